import pytest

from dgbv.verify import ALL_SUITES, SuiteConfig, decompose_even, run_suite


def _all_pass(report):
    return all(r["passed"] for checks in report.values() for r in checks.values())


@pytest.mark.parametrize("name", ["cubic", "quadrics", "quartic"])
def test_all_suites_pass(setups, name):
    report = run_suite(SuiteConfig(model=name, samples=50), setups(name))
    assert set(report) == set(ALL_SUITES)
    assert _all_pass(report), report
    for suite in ("differentials", "dgbv"):
        for check in report[suite].values():
            assert check["checked"] >= 50
    assert report["weak_lemma"]["Delta_of_closed_is_exact"]["checked"] >= 50
    assert report["weak_lemma"]["Delta_of_R_times_basis"]["checked"] == setups(name).basis.mu


def test_reports_are_reproducible(cubic):
    cfg = SuiteConfig(seed=5, samples=10)
    assert run_suite(cfg, cubic) == run_suite(cfg, cubic)


def test_corrupted_delta_is_detected(cubic):
    report = run_suite(SuiteConfig(samples=30, suites=("differentials",), corrupt_delta=True), cubic)
    check = report["differentials"]["Delta_squared"]
    assert not check["passed"]
    assert check["counterexample"]


def test_empty_and_unknown_selection(cubic):
    assert run_suite(SuiteConfig(suites=()), cubic) == {}
    with pytest.raises(ValueError):
        run_suite(SuiteConfig(suites=("nope",)), cubic)


def test_decompose_even_on_a_product(cubic):
    u1 = cubic.basis.element(1)
    coeffs, lam = decompose_even(cubic, u1 * u1 + u1.scale(2))
    assert list(coeffs) == [0, 2]
