"""Summarize basis, product table, F-manifold and RHB results for every bundled model."""
import argparse
import json
import time

from dgbv import (example, frobenius_structure, prepare, rhb_check, solve_f_manifold, verify_f_axioms,
                  verify_frobenius_axioms)
from dgbv.cli import rational
from dgbv.model import EXAMPLES


def summarize(name: str, fm_order: int) -> dict:
    start = time.perf_counter()
    st = prepare(example(name))
    row = {"mu": st.basis.mu, "weights": st.basis.weights, "basis_seconds": round(time.perf_counter() - start, 3)}
    rep = verify_frobenius_axioms(frobenius_structure(st))
    row["frobenius"] = {k: rep[k] for k in ("D1", "D2", "D3", "D4", "D5")}
    row["det_g"] = rational(rep["det_g"])
    if st.basis.mu <= 4:
        out = solve_f_manifold(st, fm_order)
        fm = verify_f_axioms(out)
        row["fmanifold"] = {k: fm[k] for k in ("C1", "C2", "C3")}
    rhb = rhb_check(st)
    row["rhb_holds"] = rhb["holds"]
    row["N0"] = rhb["N0"]
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fm-order", type=int, default=3)
    args = ap.parse_args()
    print(json.dumps({name: summarize(name, args.fm_order) for name in EXAMPLES}, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
