"""Basis dimensions against an independent count: rank of each graded piece of the ideal."""
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgbv.algebra import SuperPolynomial, apply_Q
from dgbv.errors import ChargeMismatch
from dgbv.groebner import prepare, to_dict
from dgbv.model import example


def _monomials(nvars, charges, weights, charge, weight, max_deg):
    out = []
    for deg in range(max_deg + 1):
        for combo in combinations_with_replacement(range(nvars), deg):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            if sum(c * x for c, x in zip(charges, e)) == charge and sum(w * x for w, x in zip(weights, e)) == weight:
                out.append(tuple(e))
    return out


def _rank(rows):
    rows = [dict(r) for r in rows if r]
    rank = 0
    while rows:
        pivot_row = rows.pop()
        if not pivot_row:
            continue
        col, val = next(iter(pivot_row.items()))
        rank += 1
        for r in rows:
            c = r.get(col)
            if c:
                f = c / val
                for k, v in pivot_row.items():
                    nv = r.get(k, Fraction(0)) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        rows = [r for r in rows if r]
    return rank


def quotient_dimension(model, weight):
    """dim of (charge 0, weight w) polynomials modulo the Jacobian ideal of S, by linear algebra."""
    N = model.N
    max_deg = weight * (1 + max(model.degrees))
    space = _monomials(N, model.charges, model.weights, 0, weight, max_deg)
    grads = [to_dict(model.S.diff_q(i)) for i in range(N)]
    rows = []
    for i, g in enumerate(grads):
        # d_i S has charge -ch(q_i) and weight 1 - wt(q_i)
        mult_w = weight - 1 + model.weights[i]
        if mult_w < 0:
            continue
        for m in _monomials(N, model.charges, model.weights, model.charges[i], mult_w, max_deg):
            rows.append({tuple(a + b for a, b in zip(m, e)): Fraction(c) for e, c in g.items()})
    return len(space) - _rank(rows)


@pytest.mark.parametrize("name,profile", [("cubic", [1, 1]), ("quadrics", [1, 1]), ("quartic", [1, 19, 1])])
def test_basis_weight_profile_matches_rank_oracle(setups, name, profile):
    st_ = setups(name)
    counts = [len(st_.basis.by_weight().get(w, [])) for w in range(len(profile) + 1)]
    assert counts == profile + [0]
    oracle = [quotient_dimension(st_.model, w) for w in range(len(profile))]
    assert oracle == profile


def test_cubic_basis_labels(cubic):
    assert cubic.basis.labels() == ["1", "y1*x0*x1*x2"]
    assert cubic.basis.mu == 2


def test_cofactors_reproduce_groebner_elements(setups):
    for name in ("cubic", "quadrics"):
        assert setups(name).gbd.check_cofactors()


def _charge_zero_sample(model, draw):
    y = draw(st.integers(0, 2))
    e = [0] * model.N
    for _ in range(y):
        e[draw(st.integers(0, model.k - 1))] += 1
    need = -sum(c * x for c, x in zip(model.charges, e))
    for _ in range(need):
        e[draw(st.integers(model.k, model.N - 1))] += 1
    return SuperPolynomial.monomial(model.N, e, 0, draw(st.integers(-4, 4)))


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_reduction_identity(setups, name, data):
    st_ = setups(name)
    p = _charge_zero_sample(st_.model, data.draw)
    for _ in range(data.draw(st.integers(0, 2))):
        p = p + _charge_zero_sample(st_.model, data.draw)
    out = st_.reducer.reduce(p)
    assert st_.reducer.combination(out.coefficients) + apply_Q(st_.model.S, out.lam) == p
    other = st_.reducer.with_strategy("last").reduce(p)
    assert other.coefficients == out.coefficients


def test_reduction_rejects_nonzero_charge(cubic):
    with pytest.raises(ChargeMismatch):
        cubic.reducer.reduce(cubic.model.parse("x0"))


def test_unknown_strategy(cubic):
    with pytest.raises(ValueError):
        cubic.reducer.with_strategy("middle")


def test_quadrics_basis_is_stable_under_reprepare():
    a = prepare(example("quadrics"))
    b = prepare(example("quadrics"))
    assert a.basis.labels() == b.basis.labels()


def test_singular_model_is_not_finite_dimensional():
    from dgbv.errors import NotFiniteDimensional
    from dgbv.model import build_model
    with pytest.raises(NotFiniteDimensional):
        prepare(build_model(2, 1, ["x0^3+x1^3"]), cap=50)
