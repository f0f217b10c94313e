"""Compare the zero-seed weak primitive solve across models.

For each model: the number of basis-index pairs whose t = 0 connection
matrices fail to commute, and (optionally) whether the residual check passes.
A nonzero defect count means no flat connection with these seeds exists.
"""
import argparse
import json
import time

from dgbv import example, prepare, solve_weak_primitive, solve_zeta_truncated, verify_gcm
from dgbv.model import EXAMPLES
from dgbv.primitive import flatness_defects


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=2)
    ap.add_argument("--residual", action="store_true", help="also run the (slow on the quartic) residual check")
    ap.add_argument("--models", nargs="+", default=list(EXAMPLES))
    args = ap.parse_args()
    rows = {}
    for name in args.models:
        st = prepare(example(name))
        start = time.perf_counter()
        one = solve_weak_primitive(st, None, args.order)
        other = solve_zeta_truncated(st, None, 1, args.order)
        row = {
            "solve_seconds": round(time.perf_counter() - start, 3),
            "routes_agree": all(tuple(one.A0[k]) == tuple(other.A0[k]) and tuple(one.A1[k]) == tuple(other.A1[k])
                                for k in one.A0.keys()),
            "A1_vanishes": one.a1_vanishes(),
        }
        defects = flatness_defects(one)
        row["noncommuting_pairs"] = len({tuple(d["pair"]) for d in defects})
        row["defect_hbar_powers"] = sorted({d["hbar"] for d in defects})
        if args.residual:
            start = time.perf_counter()
            rep = verify_gcm(one)
            row["residual_zero"] = rep["holds"]
            row["residual_failures"] = len(rep["failures"])
            row["residual_seconds"] = round(time.perf_counter() - start, 3)
        rows[name] = row
    print(json.dumps(rows, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
