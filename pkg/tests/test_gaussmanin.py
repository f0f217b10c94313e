from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgbv.algebra import SuperPolynomial
from dgbv.errors import NormalizationError, WindowUnderflow
from dgbv.gaussmanin import (ConnectionContext, apply_K_hbar, class_identity_holds, linear_deformation,
                             nabla_t, reduce_class, scalar_to_poly_series, zero_deformation)
from dgbv.series import Series


def _odd_charge_zero(model, draw):
    """A random degree -1 element of charge zero: monomial times one odd variable."""
    N = model.N
    i = draw(st.integers(0, N - 1))
    e = [0] * N
    # eta_i carries charge -ch(q_i); balance it with y's or x's
    need = model.charges[i]
    while need != 0:
        if need > 0:
            e[draw(st.integers(model.k, N - 1))] += 1
            need -= 1
        else:
            j = draw(st.integers(0, model.k - 1))
            e[j] += 1
            need += model.degrees[j]
    if draw(st.booleans()):
        j = draw(st.integers(0, model.k - 1))
        e[j] += 1
        for _ in range(model.degrees[j]):
            e[draw(st.integers(model.k, N - 1))] += 1
    return SuperPolynomial.monomial(N, e, 1 << i, draw(st.integers(-3, 3)))


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_planted_class_is_recovered(setups, name, data):
    setup = setups(name)
    mu = setup.basis.mu
    ctx = ConnectionContext(setup, linear_deformation(setup, 2))
    zp = ctx.zero_poly()
    frame = [ctx.gamma_partial(r) for r in range(mu)]
    planted = []
    for _ in range(mu):
        terms = {}
        for _ in range(data.draw(st.integers(0, 3))):
            t = tuple(sorted(data.draw(st.lists(st.integers(0, mu - 1), max_size=1))))
            terms[(data.draw(st.integers(0, 2)), t)] = Fraction(data.draw(st.integers(-3, 3)))
        planted.append(Series(terms, Fraction(0), 1, 2))
    lam_terms = {}
    for _ in range(data.draw(st.integers(0, 3))):
        t = tuple(sorted(data.draw(st.lists(st.integers(0, mu - 1), max_size=1))))
        lam_terms[(data.draw(st.integers(0, 1)), t)] = _odd_charge_zero(setup.model, data.draw)
    lam = Series(lam_terms, zp, 1, 2)
    w = apply_K_hbar(ctx, lam)
    for c, f in zip(planted, frame):
        w = w + scalar_to_poly_series(ctx, c) * f
    w = w.truncate(1, 2)
    res = reduce_class(ctx, w, frame, hbar_max=2, t_order=1)
    for got, want in zip(res.coeffs, planted):
        assert got.same_as(want, t_order=1, h_max=2)
    assert class_identity_holds(ctx, w, frame, res)


def test_frame_must_restrict_to_basis(cubic):
    ctx = ConnectionContext(cubic, linear_deformation(cubic, 2))
    frame = [ctx.gamma_partial(r).scale(2) for r in range(cubic.basis.mu)]
    w = Series.const(SuperPolynomial.one(ctx.N), ctx.zero_poly())
    with pytest.raises(NormalizationError):
        reduce_class(ctx, w, frame)
    with pytest.raises(NormalizationError):
        reduce_class(ctx, w, frame[:1])


def test_deformation_must_be_normalized(cubic):
    zp = SuperPolynomial.zero(cubic.model.N)
    with pytest.raises(NormalizationError):
        ConnectionContext(cubic, Series.const(SuperPolynomial.one(cubic.model.N), zp))
    with pytest.raises(NormalizationError):
        ConnectionContext(cubic, Series({(1, (0,)): SuperPolynomial.one(cubic.model.N)}, zp))


def test_window_floor(cubic):
    ctx = ConnectionContext(cubic, linear_deformation(cubic), hbar_floor=0)
    w = Series.const(SuperPolynomial.one(ctx.N), ctx.zero_poly())
    with pytest.raises(WindowUnderflow):
        nabla_t(ctx, 0, w)
