"""Acceptance criteria, one PASS/FAIL line each.  Time limits are wall-clock seconds."""
import subprocess
import sys
import time


from dgbv.fmanifold import solve_f_manifold, verify_f_axioms, verify_ind_qm
from dgbv.frobenius import frobenius_structure, rhb_check, verify_frobenius_axioms, verify_pairing_axioms
from dgbv.groebner import prepare
from dgbv.model import example
from dgbv.primitive import case_ii_system, solve_weak_primitive, solve_zeta_truncated, verify_gcm
from dgbv.series import multi_indices
from dgbv.verify import SuiteConfig, run_suite

from pairing_samples import sample_pairs

MODELS = ("cubic", "quadrics", "quartic")
BASIS_LIMIT_SMALL = 1.0
BASIS_LIMIT_QUARTIC = 60.0
FMANIFOLD_LIMIT = 30.0
PRIMITIVE_LIMIT = 60.0
SUITE_SAMPLES = 50
PAIRING_SAMPLES = 20
PAIRING_WINDOW = (-2, 4)
PAIRING_T_ORDER = 2


def report(capsys, number, title, ok, detail=""):
    with capsys.disabled():
        print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title}{' (' + detail + ')' if detail else ''}")
    assert ok, detail


def test_criterion_01_dimensions(capsys):
    expected = {"cubic": ([0, 1], BASIS_LIMIT_SMALL), "quadrics": ([0, 1], BASIS_LIMIT_SMALL),
                "quartic": ([0] + [1] * 19 + [2], BASIS_LIMIT_QUARTIC)}
    ok, parts = True, []
    for name, (weights, limit) in expected.items():
        start = time.perf_counter()
        st = prepare(example(name))
        elapsed = time.perf_counter() - start
        good = st.basis.weights == weights and elapsed < limit
        if name == "cubic":
            good = good and st.basis.labels() == ["1", "y1*x0*x1*x2"]
        ok &= good
        parts.append(f"{name} mu={st.basis.mu} in {elapsed:.2f}s")
    report(capsys, 1, "Jacobian ring dimensions and weight profiles", ok, "; ".join(parts))


def test_criterion_02_dgbv_suite(capsys, setups):
    ok, parts = True, []
    for name in MODELS:
        rep = run_suite(SuiteConfig(model=name, samples=SUITE_SAMPLES,
                                    suites=("differentials", "dgbv", "concentration", "grading")), setups(name))
        good = all(c["passed"] and c["checked"] >= SUITE_SAMPLES for s in ("differentials", "dgbv")
                   for c in rep[s].values())
        good = good and all(c["passed"] for s in ("concentration", "grading") for c in rep[s].values())
        ok &= good
        parts.append(f"{name} {'ok' if good else 'failed'}")
    report(capsys, 2, "differentials and dGBV axioms on random samples", ok, "; ".join(parts))


def test_criterion_03_weak_lemma(capsys, setups):
    ok, parts = True, []
    for name in MODELS:
        rep = run_suite(SuiteConfig(model=name, samples=SUITE_SAMPLES, suites=("weak_lemma",)), setups(name))
        w = rep["weak_lemma"]
        good = (w["Delta_of_closed_is_exact"]["passed"] and w["Delta_of_closed_is_exact"]["checked"] >= SUITE_SAMPLES
                and w["Delta_of_R_times_basis"]["passed"]
                and w["Delta_of_R_times_basis"]["checked"] == setups(name).basis.mu)
        ok &= good
        parts.append(f"{name} {w['Delta_of_closed_is_exact']['checked']} closed elements")
    report(capsys, 3, "Delta of closed charge-zero elements has zero class", ok, "; ".join(parts))


def test_criterion_04_fmanifold(capsys, setups):
    start = time.perf_counter()
    ok, parts = True, []
    for name in ("cubic", "quadrics"):
        out = solve_f_manifold(setups(name), 3)
        rep = verify_f_axioms(out)
        good = rep["C1"] and rep["C2"] and rep["C3"]
        for size in (2, 3):
            for abar in multi_indices(out.mu, size):
                good = good and verify_ind_qm(out, abar)["holds"]
        ok &= good
        parts.append(f"{name} {'ok' if good else 'failed'}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < FMANIFOLD_LIMIT
    report(capsys, 4, "F-manifold axioms to t-order 3 and descendant identities", ok,
           "; ".join(parts) + f"; {elapsed:.2f}s")


def test_criterion_05_strategy_independence(capsys, setups):
    ok = True
    for name in ("cubic", "quadrics"):
        a = solve_f_manifold(setups(name), 3, "first")
        b = solve_f_manifold(setups(name), 3, "last")
        ok &= set(a.A.keys()) == set(b.A.keys()) and all(tuple(a.A[k]) == tuple(b.A[k]) for k in a.A.keys())
    report(capsys, 5, "structure constants independent of division strategy", ok)


def test_criterion_06_weak_primitive(capsys, cubic):
    start = time.perf_counter()
    route_one = solve_weak_primitive(cubic, None, 2)
    gcm = verify_gcm(route_one)
    truncated = solve_zeta_truncated(cubic, None, 1, 2)
    same = all(tuple(route_one.A0[k]) == tuple(truncated.A0[k]) and tuple(route_one.A1[k]) == tuple(truncated.A1[k])
               for k in route_one.A0.keys())
    same = same and all(route_one.zeta[j].entries == truncated.zeta[j].entries for j in range(2))
    red = cubic.reducer.with_strategy("last")
    u = cubic.basis.elements()
    hbar_free = case_ii_system(cubic, 2)
    case_ii = verify_gcm(hbar_free)["holds"] and len(hbar_free.zeta) == 1
    for key in multi_indices(cubic.basis.mu, 2):
        first = red.reduce(u[key[0]] * u[key[1]])
        second = red.reduce(-first.delta_lam)
        case_ii = case_ii and tuple(hbar_free.A0[key]) == first.coefficients
        case_ii = case_ii and tuple(hbar_free.A1[key]) == second.coefficients
        case_ii = case_ii and red.coefficients(hbar_free.zeta0[key]) == red.coefficients(second.delta_lam)
    elapsed = time.perf_counter() - start
    ok = gcm["holds"] and same and case_ii and elapsed < PRIMITIVE_LIMIT
    report(capsys, 6, "weak primitive form on the cubic to order 2", ok,
           f"residual zero={gcm['holds']}, routes agree={same}, hbar-free system={case_ii}, {elapsed:.2f}s")


def test_criterion_07_frobenius(capsys, setups):
    ok, parts = True, []
    for name in MODELS:
        fd = frobenius_structure(setups(name))
        rep = verify_frobenius_axioms(fd)
        good = all(rep[k] for k in ("D1", "D2", "D3", "D4", "D5")) and rep["nondegenerate"]
        if name == "cubic":
            good = good and fd.metric() == [[0, 1], [1, 0]]
        ok &= good
        parts.append(f"{name} det g={rep['det_g']}")
    report(capsys, 7, "Frobenius axioms and non-degenerate metric", ok, "; ".join(parts))


def test_criterion_08_pairing(capsys, setups):
    ok, parts = True, []
    for name in MODELS:
        st = setups(name)
        rep = verify_pairing_axioms(st, sample_pairs(st, PAIRING_SAMPLES, seed=3, window=PAIRING_WINDOW),
                                    PAIRING_WINDOW, PAIRING_T_ORDER)
        good = all(rep[k] for k in ("H1", "H2", "H3", "H4", "H5")) and rep["samples"] >= PAIRING_SAMPLES
        ok &= good
        parts.append(f"{name} {rep['samples']} pairs {'ok' if good else 'failed'}")
    report(capsys, 8, "modified pairing axioms on sample pairs", ok, "; ".join(parts))


def test_criterion_09_rhb(capsys, setups):
    ok, parts = True, []
    for name in MODELS:
        rep = rhb_check(setups(name))
        ok &= rep["holds"]
        if name == "cubic":
            ok &= rep["N0"] == [1, 2]
        parts.append(f"{name} N0={rep['N0'][:2]}...")
    report(capsys, 9, "hbar-direction congruence on every basis element", ok, "; ".join(parts))


COMMANDS = [
    ["basis", "quadrics"],
    ["fmanifold", "cubic", "--order", "3"],
    ["primitive", "cubic", "--order", "2"],
    ["frobenius", "quadrics"],
    ["pairing", "cubic", "--order", "2"],
    ["verify", "cubic", "--samples", "10", "--seed", "4"],
]


def test_criterion_10_determinism(capsys):
    ok, bad = True, []
    for argv in COMMANDS:
        runs = [subprocess.run([sys.executable, "-m", "dgbv", *argv], capture_output=True, timeout=300)
                for _ in range(2)]
        same = runs[0].returncode == 0 and runs[0].stdout == runs[1].stdout and runs[0].stdout
        if not same:
            ok = False
            bad.append(argv[0])
    report(capsys, 10, "CLI output byte-identical across runs", ok,
           f"{len(COMMANDS)} commands" + (f", differing: {bad}" if bad else ""))
