from fractions import Fraction
from itertools import product

import pytest
from sympy.functions.combinatorial.numbers import stirling

from dgbv.errors import IndexRange
from dgbv.fmanifold import set_partitions, solve_f_manifold, u_partition, verify_f_axioms, verify_ind_qm
from dgbv.groebner import to_dict
from dgbv.series import Series, multi_indices

from test_groebner import _monomials, _rank


@pytest.fixture(scope="module")
def fm(setups):
    cache = {}

    def get(name, order=3, strategy=None):
        key = (name, order, strategy)
        if key not in cache:
            cache[key] = solve_f_manifold(setups(name), order, strategy)
        return cache[key]

    return get


@pytest.mark.parametrize("m,blocks", [(m, b) for m in range(1, 7) for b in range(1, m + 1)])
def test_set_partition_counts_are_stirling_numbers(m, blocks):
    parts = set_partitions(m, blocks)
    assert len(parts) == stirling(m, blocks)
    assert len({frozenset(map(frozenset, p)) for p in parts}) == len(parts)
    for p in parts:
        assert sorted(i for b in p for i in b) == list(range(m))


def _in_ideal(model, p):
    """Membership of a charge-zero, weight-homogeneous polynomial in the Jacobian ideal by rank."""
    d = to_dict(p)
    if not d:
        return True
    w = {sum(a * b for a, b in zip(model.weights, e)) for e in d}.pop()
    max_deg = max(sum(e) for e in d)
    rows = []
    for i in range(model.N):
        g = to_dict(model.S.diff_q(i))
        mult_w = w - 1 + model.weights[i]
        if mult_w < 0:
            continue
        for m in _monomials(model.N, model.charges, model.weights, model.charges[i], mult_w, max_deg):
            rows.append({tuple(a + b for a, b in zip(m, e)): Fraction(c) for e, c in g.items()})
    target = {e: Fraction(c) for e, c in d.items()}
    return _rank(rows + [target]) == _rank(rows)


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
def test_pair_constants_against_ideal_membership(setups, fm, name):
    setup = setups(name)
    out = fm(name, 1)
    u = setup.basis.elements()
    for a, b in product(range(setup.basis.mu), repeat=2):
        key = tuple(sorted((a, b)))
        rest = u[a] * u[b] - setup.reducer.combination(out.A[key])
        assert _in_ideal(setup.model, rest)


def test_cubic_product_table(fm):
    A = fm("cubic", 1).A
    assert list(A[(0, 0)]) == [1, 0]
    assert list(A[(0, 1)]) == [0, 1]
    assert list(A[(1, 1)]) == [0, 0]


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
def test_axioms_and_descendants(fm, name):
    out = fm(name, 3)
    rep = verify_f_axioms(out)
    assert rep["C1"] and rep["C2"] and rep["C3"], rep["failures"]
    for size in (2, 3):
        for abar in multi_indices(out.mu, size):
            r = verify_ind_qm(out, abar)
            assert r["holds"], r


@pytest.mark.parametrize("name", ["cubic", "quadrics"])
def test_strategy_independence(fm, name):
    a, b = fm(name, 3, "first"), fm(name, 3, "last")
    assert set(a.A.keys()) == set(b.A.keys())
    for key in a.A.keys():
        assert tuple(a.A[key]) == tuple(b.A[key])


def test_perturbed_table_is_caught(fm):
    out = fm("quadrics", 2)
    table = out.connection_table()
    bad = dict(table)
    row = list(bad[(0, 1)])
    row[1] = row[1] + Series({(0, (1,)): Fraction(1)}, Fraction(0))
    bad[(0, 1)] = row
    rep = verify_f_axioms(out, table=bad)
    assert not (rep["C1"] and rep["C2"] and rep["C3"])


def test_partition_index_range(cubic):
    out = solve_f_manifold(cubic, 1)
    with pytest.raises(IndexRange):
        u_partition(out.gamma, (0, 1), 2, cubic.model.N)
    with pytest.raises(IndexRange):
        verify_ind_qm(out, (0,))


def test_order_must_be_positive(cubic):
    with pytest.raises(ValueError):
        solve_f_manifold(cubic, 0)
