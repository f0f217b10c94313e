"""Command-line front end.  Every command prints deterministic JSON."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence

from .errors import DomainError
from .fmanifold import solve_f_manifold, verify_f_axioms
from .frobenius import (check_h3_condition, check_h4_condition, frobenius_structure, pairing_from_primitive,
                        pairing_table, verify_frobenius_axioms)
from .groebner import prepare
from .model import EXAMPLES, ModelSetup, example, load_model
from .primitive import flatness_defects, solve_zeta_truncated, verify_gcm
from .series import Series, SymTensor
from .verify import ALL_SUITES, SuiteConfig, run_suite


def rational(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _key(idx: Sequence[int]) -> str:
    return ",".join(map(str, idx))


def tensor_json(T: SymTensor, order: int, min_size: int = 2) -> dict:
    """Vector-valued tensor as {"a1,a2,...->rho": "p/q"}, nonzero entries only."""
    entries = {}
    for key in sorted(T.keys(), key=lambda k: (len(k), k)):
        if len(key) < min_size:
            continue
        for r, c in enumerate(T[key]):
            if c:
                entries[f"{_key(key)}->{r}"] = rational(c)
    return {"order": order, "entries": entries}


def poly_tensor_json(T: SymTensor, model: ModelSetup, min_size: int = 0) -> Dict[str, str]:
    return {_key(k): model.render(v) for k, v in sorted(T.items(), key=lambda kv: (len(kv[0]), kv[0]))
            if len(k) >= min_size and not v.is_zero()}


def series_json(s: Series) -> Dict[str, str]:
    """{"hbar_exponent|t_multi_index": "p/q"}."""
    return {f"{r}|{_key(t)}": rational(c) for (r, t), c in sorted(s.terms.items())}


def _load(arg: str) -> ModelSetup:
    if arg in EXAMPLES and not Path(arg).exists():
        return example(arg)
    return load_model(arg)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _read_seeds(path: str, model: ModelSetup) -> dict:
    doc = json.loads(Path(path).read_text())
    out = {}
    for j, name in enumerate(("zeta0", "zeta1")):
        for rho, text in (doc.get(name) or {}).items():
            out.setdefault(j, {})[int(rho)] = model.parse(text)
    extra = set(doc) - {"zeta0", "zeta1"}
    if extra:
        raise ValueError(f"unknown seed keys {sorted(extra)}")
    return out


def cmd_basis(args) -> dict:
    st = prepare(_load(args.model), order=args.monomial_order)
    return {"mu": st.basis.mu, "basis": st.basis.labels(), "weights": list(st.basis.weights)}


def cmd_fmanifold(args) -> dict:
    model = _load(args.model)
    st = prepare(model, order=args.monomial_order)
    out = solve_f_manifold(st, args.order, args.strategy)
    rep = verify_f_axioms(out)
    return {
        "order": args.order,
        "A": tensor_json(out.A, args.order),
        "gamma": poly_tensor_json(out.gamma, model, 2),
        "axioms": {k: rep[k] for k in ("C1", "C2", "C3")},
    }


def cmd_primitive(args) -> dict:
    model = _load(args.model)
    st = prepare(model, order=args.monomial_order)
    seeds = _read_seeds(args.zeta_seed, model) if args.zeta_seed else None
    out = solve_zeta_truncated(st, seeds, args.zeta_hbar_order, args.order, args.strategy)
    doc = {
        "order": args.order,
        "zeta_hbar_order": args.zeta_hbar_order,
        "A0": tensor_json(out.A0, args.order),
        "A1": tensor_json(out.A1, args.order),
        "zeta": [poly_tensor_json(T, model, 1) for T in out.zeta],
        "A1_vanishes": out.a1_vanishes(),
        "flatness_defects": len(flatness_defects(out)),
    }
    if not args.no_check:
        doc["gcm_holds"] = verify_gcm(out)["holds"]
    return doc


def cmd_frobenius(args) -> dict:
    st = prepare(_load(args.model), order=args.monomial_order)
    fd = frobenius_structure(st)
    rep = verify_frobenius_axioms(fd)
    mu = st.basis.mu
    return {
        "a": {f"{i},{j}->{r}": rational(fd.a[(i, j, r)]) for i in range(mu) for j in range(mu) for r in range(mu)},
        "g": {f"{i},{j}": rational(fd.g[(i, j)]) for i in range(mu) for j in range(mu)},
        "axioms": {k: rep[k] for k in ("D1", "D2", "D3", "D4", "D5")},
        "det_g": rational(rep["det_g"]),
    }


def cmd_pairing(args) -> dict:
    st = prepare(_load(args.model), order=args.monomial_order)
    window = (-2, args.hbar_order)
    table = pairing_table(st, window)
    out = solve_zeta_truncated(st, None, 1, args.order, args.strategy)
    prim = pairing_from_primitive(out)
    h3 = check_h3_condition(out)
    h4 = check_h4_condition(out)
    return {
        "window": list(window),
        "K": {_key(k): series_json(v) for k, v in sorted(table.items())},
        "K_primitive": {_key(k): series_json(v) for k, v in sorted(prim.items())},
        "h3": h3["holds"],
        "h4": {k: h4[k] for k in ("holds", "hbar0_zero", "higher_zero", "symmetric")},
    }


def cmd_verify(args) -> dict:
    model = _load(args.model)
    suites = ALL_SUITES if args.suite == ["all"] else tuple(args.suite)
    unknown = set(suites) - set(ALL_SUITES)
    if unknown:
        raise _Usage(f"unknown suite(s): {', '.join(sorted(unknown))}")
    cfg = SuiteConfig(seed=args.seed, samples=args.samples, suites=suites, corrupt_delta=args.corrupt_delta)
    st = prepare(model, order=args.monomial_order)
    return run_suite(cfg, st)


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgbv", description="dGBV computations for Calabi-Yau complete intersections")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, strategy=False):
        sp.add_argument("model", help="model JSON file, or one of: " + ", ".join(EXAMPLES))
        sp.add_argument("--monomial-order", default="grevlex", choices=["grevlex"])
        sp.add_argument("--out", help="write the JSON here instead of standard output")
        if strategy:
            sp.add_argument("--strategy", default=None, choices=["first", "last"],
                            help="divisor selection in the reduction")

    sp = sub.add_parser("basis", help="charge-zero Jacobian ring basis")
    common(sp)
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("fmanifold", help="F-manifold structure constants")
    common(sp, True)
    sp.add_argument("--order", type=_positive, default=3)
    sp.set_defaults(func=cmd_fmanifold)

    sp = sub.add_parser("primitive", help="weak primitive form")
    common(sp, True)
    sp.add_argument("--order", type=_positive, default=2)
    sp.add_argument("--zeta-seed", help='JSON {"zeta0": {"rho": poly}, "zeta1": {...}}')
    sp.add_argument("--zeta-hbar-order", type=_nonneg, default=1)
    sp.add_argument("--no-check", action="store_true", help="skip the residual check")
    sp.set_defaults(func=cmd_primitive)

    sp = sub.add_parser("frobenius", help="Frobenius structure constants and metric")
    common(sp)
    sp.set_defaults(func=cmd_frobenius)

    sp = sub.add_parser("pairing", help="modified higher residue pairing")
    common(sp, True)
    sp.add_argument("--hbar-order", type=_nonneg, default=4)
    sp.add_argument("--order", type=_positive, default=2)
    sp.set_defaults(func=cmd_pairing)

    sp = sub.add_parser("verify", help="randomized property suites")
    common(sp)
    sp.add_argument("--suite", nargs="+", default=["all"], help="all, or any of: " + ", ".join(ALL_SUITES))
    sp.add_argument("--samples", type=_positive, default=50)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--corrupt-delta", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: List[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = args.func(args)
    except _Usage as exc:
        print(f"dgbv: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"dgbv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"dgbv: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(doc, sort_keys=True, indent=2, default=rational)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
