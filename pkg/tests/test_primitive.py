import random
from fractions import Fraction
from itertools import product

import pytest

from dgbv.algebra import SuperPolynomial, apply_Delta
from dgbv.errors import IndexRange, SeedWeightError
from dgbv.fmanifold import solve_f_manifold, verify_f_axioms
from dgbv.primitive import (b_term, case_ii_system, flatness_defects, solve_weak_primitive, solve_zeta_truncated,
                            v_term, verify_gcm)
from dgbv.series import Series, SymTensor, multi_indices


def _same_output(a, b):
    assert set(a.A0.keys()) == set(b.A0.keys())
    for key in a.A0.keys():
        assert tuple(a.A0[key]) == tuple(b.A0[key])
        assert tuple(a.A1[key]) == tuple(b.A1[key])
    for Ta, Tb in zip(a.zeta, b.zeta):
        keys = set(Ta.keys()) | set(Tb.keys())
        zp = SuperPolynomial.zero(a.setup.model.N)
        for key in keys:
            assert Ta.get(key, zp) == Tb.get(key, zp)


@pytest.fixture(scope="module")
def cubic_route_one(cubic):
    return solve_weak_primitive(cubic, None, 2)


def test_cubic_weak_primitive_form(cubic_route_one):
    rep = verify_gcm(cubic_route_one)
    assert rep["holds"], rep["failures"]
    assert rep["flatness_defects"] == 0
    assert not cubic_route_one.consistency_defects


def test_routes_agree_on_cubic(cubic, cubic_route_one):
    _same_output(cubic_route_one, solve_zeta_truncated(cubic, None, 1, 2))


@pytest.mark.parametrize("n_zeta", [0, 1, 2])
def test_quadrics_truncations(quadrics, n_zeta):
    out = solve_zeta_truncated(quadrics, None, n_zeta, 2)
    assert verify_gcm(out)["holds"]
    assert len(out.zeta) == n_zeta + 1


def test_quadrics_routes_agree_at_order_three(quadrics):
    _same_output(solve_weak_primitive(quadrics, None, 3), solve_zeta_truncated(quadrics, None, 1, 3))


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
def test_hbar_free_zeta_system_at_pairs(setups, name):
    """zeta without hbar terms: A0 from the product, A1 from -Delta of its witness, zeta_ab from Delta again.

    The oracle uses the other division strategy, so its witnesses differ from
    the solver's; the classes agree because Delta of a closed witness is exact.
    """
    setup = setups(name)
    out = case_ii_system(setup, 1)
    assert len(out.zeta) == 1
    red = setup.reducer.with_strategy("last")
    u = setup.basis.elements()
    for a, b in product(range(setup.basis.mu), repeat=2):
        key = tuple(sorted((a, b)))
        first = red.reduce(u[a] * u[b])
        assert tuple(out.A0[key]) == first.coefficients
        second = red.reduce(-first.delta_lam)
        assert tuple(out.A1[key]) == second.coefficients
        assert red.coefficients(out.zeta0[key]) == red.coefficients(second.delta_lam)
    assert verify_gcm(case_ii_system(setup, 2))["holds"]


def test_a1_vanishing_gives_f_manifold(cubic, cubic_route_one):
    assert cubic_route_one.a1_vanishes()
    rep = verify_f_axioms(cubic_route_one, table=cubic_route_one.connection_table())
    assert rep["C1"] and rep["C2"]
    fm = solve_f_manifold(cubic, 2)
    for key in multi_indices(2, 2):
        assert tuple(fm.A[key]) == tuple(cubic_route_one.A0[key])


def test_seeded_run(cubic):
    seeds = {0: {1: cubic.model.parse("3")}}
    a = solve_weak_primitive(cubic, seeds, 2)
    b = solve_zeta_truncated(cubic, seeds, 1, 2)
    _same_output(a, b)
    assert a.zeta0[(1,)] == cubic.model.parse("3")
    assert verify_gcm(a)["holds"]


@pytest.mark.parametrize("seeds,err", [
    ({0: {1: "x0"}}, SeedWeightError),
    ({0: {0: "1"}}, SeedWeightError),
    ({1: {1: "1"}}, SeedWeightError),
    ({0: {1: "e1"}}, SeedWeightError),
    ({0: {5: "1"}}, IndexRange),
])
def test_bad_seeds(cubic, seeds, err):
    parsed = {j: {r: cubic.model.parse(t) for r, t in row.items()} for j, row in seeds.items()}
    with pytest.raises(err):
        solve_weak_primitive(cubic, parsed, 1)


def test_seed_beyond_truncation(cubic):
    with pytest.raises(SeedWeightError):
        solve_zeta_truncated(cubic, {2: {1: cubic.model.parse("1")}}, 1, 1)


def test_perturbed_connection_is_caught(quadrics):
    out = solve_weak_primitive(quadrics, None, 2)
    table = out.connection_table()
    bad = dict(table)
    row = list(bad[(1, 1)])
    row[0] = row[0] + Series({(1, ()): Fraction(1)}, Fraction(0))
    bad[(1, 1)] = row
    assert not verify_gcm(out, bad)["holds"]


def test_v_term_small_cases(cubic):
    N = cubic.model.N
    u = cubic.basis.elements()
    z = SymTensor(order=2)
    z[()] = SuperPolynomial.one(N)
    z[(0,)] = SuperPolynomial.zero(N)
    z[(1,)] = cubic.model.parse("2")
    for key in multi_indices(2, 2):
        z[key] = SuperPolynomial.zero(N)
    assert v_term([z], u, (0, 1), 0, 0, N) == u[0] * u[1]
    assert v_term([z], u, (0, 1), 1, 0, N) == u[0].scale(2)
    assert v_term([z], u, (0, 1), 1, 1, N).is_zero()
    with pytest.raises(IndexRange):
        v_term([z], u, (0, 1), 3, 0, N)


def test_b_term_against_explicit_chains():
    rng = random.Random(7)
    mu = 2
    A0, A1 = SymTensor(order=3), SymTensor(order=3)
    for size in (2, 3):
        for key in multi_indices(mu, size):
            A0[key] = [Fraction(rng.randint(-3, 3)) for _ in range(mu)]
            A1[key] = [Fraction(rng.randint(-3, 3)) for _ in range(mu)]
    a, b, c = 0, 1, 1
    for rho in range(mu):
        assert b_term((A0, A1), (a, b), rho, 0, 0, mu) == A0[(a, b)][rho]
        assert b_term((A0, A1), (a, b), rho, 1, 0, mu) == A1[(a, b)][rho]
        # three indices, one chain link: A_{ab}^d A_{dc}^rho with a choice of which factor carries hbar
        chain = {0: Fraction(0), 1: Fraction(0), 2: Fraction(0)}
        for d in range(mu):
            dc = tuple(sorted((d, c)))
            chain[0] += A0[(a, b)][d] * A0[dc][rho]
            chain[1] += A1[(a, b)][d] * A0[dc][rho] + A0[(a, b)][d] * A1[dc][rho]
            chain[2] += A1[(a, b)][d] * A1[dc][rho]
        for ell in range(3):
            assert b_term((A0, A1), (a, b, c), rho, ell, 0, mu) == chain[ell]
        assert b_term((A0, A1), (a, b, c), rho, 1, 1, mu) == A0[(a, b, c)][rho]
        assert b_term((A0, A1), (a, b, c), rho, 2, 1, mu) == A1[(a, b, c)][rho]


def test_quartic_zero_seeds_meet_flatness_obstruction(quartic):
    """With zero seeds the quartic pair matrices fail to commute at hbar^2; no flat connection exists."""
    out = solve_zeta_truncated(quartic, None, 1, 1)
    defects = flatness_defects(out)
    assert defects
    assert {d["hbar"] for d in defects} == {2}
    assert not out.consistency_defects


def test_flatness_defects_empty_on_cubic_and_quadrics(cubic_route_one, quadrics):
    assert flatness_defects(cubic_route_one) == []
    assert flatness_defects(solve_weak_primitive(quadrics, None, 1)) == []


def test_cubic_route_one_values(cubic_route_one):
    assert cubic_route_one.zeta0[(1, 1, 1)] == cubic_route_one.setup.model.parse("1/27")
    assert apply_Delta(cubic_route_one.zeta0[(1, 1, 1)]).is_zero()


@pytest.mark.parametrize("n_zeta", [0, 1])
def test_connection_without_hbar_term_fails_on_quadrics(quadrics, n_zeta):
    """Dropping A1 leaves the hbar^1 line of the pair equations unsolvable when A1 is genuinely nonzero."""
    out = solve_zeta_truncated(quadrics, None, n_zeta, 2)
    assert not out.a1_vanishes()
    stripped = {key: [s.truncate(h_max=0) for s in row] for key, row in out.connection_table().items()}
    assert not verify_gcm(out, stripped)["holds"]
