"""Weak primitive forms for the linear deformation L = sum t^alpha u_alpha.

We look for zeta = zeta_0 + hbar zeta_1 (+ ... + hbar^n zeta_n in the
truncated variant) and A = A0 + hbar A1 with

    hbar nabla_b hbar nabla_a zeta = sum_rho A_ab^rho hbar nabla_rho zeta + (Q_{S+L} + hbar Delta)(Lambda).

Per multi-index abar of size m the equations at t = 0 form a cascade of m
reductions (hbar^0 .. hbar^(m-1)) followed by n + 1 explicit assignments that
fix the zeta coefficients of abar.  The hbar^(m-2) and hbar^(m-1) lines
contain the new entries of A0 and A1 plus a part already determined by
smaller multi-indices.  That known part is computed in two independent ways:

* ``solve_weak_primitive`` uses the closed combinatorial sum ``b_term``;
* ``solve_zeta_truncated`` expands the connection-matrix recursion
  D_{a'a} = sum_d D_{a'}^d D_{da} + hbar d_a D_{a'} as t-series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Dict, List, Mapping, Sequence, Tuple

from .algebra import SuperPolynomial
from .errors import IndexRange, SeedWeightError
from .fmanifold import set_partitions
from .gaussmanin import (ConnectionContext, class_identity_holds, hnabla_t, linear_deformation,
                         reduce_class, scalar_to_poly_series)
from .groebner import Setup
from .series import MultiIndex, Series, SymTensor, multi_indices, tensor_to_series

Vec = Tuple[Fraction, ...]


@dataclass
class PrimitiveOutput:
    setup: Setup
    order: int
    n_zeta: int
    zeta: List[SymTensor]  # zeta[j][abar] is the t^abar derivative of zeta_j at 0
    A0: SymTensor
    A1: SymTensor
    seeds: Dict[int, Dict[int, SuperPolynomial]]
    route: str
    cascades: Dict[MultiIndex, List[Vec]] = field(default_factory=dict, repr=False)
    consistency_defects: List[dict] = field(default_factory=list)

    @property
    def mu(self) -> int:
        return self.setup.basis.mu

    @property
    def zeta0(self) -> SymTensor:
        return self.zeta[0]

    @property
    def zeta1(self) -> SymTensor:
        return self.zeta[1] if len(self.zeta) > 1 else SymTensor()

    def zero_poly(self) -> SuperPolynomial:
        return SuperPolynomial.zero(self.setup.model.N)

    def zeta_series(self) -> Series:
        out = Series({}, self.zero_poly(), self.order + 1)
        for j, T in enumerate(self.zeta):
            s = tensor_to_series(SymTensor(T.entries, self.order + 1), self.order + 1, self.zero_poly())
            out = out + s.shift_h(j)
        return out

    def connection_table(self, t_order: int | None = None) -> Dict[Tuple[int, int], List[Series]]:
        """(A0 + hbar A1)_{ab}^rho(t), exact through t^(order-1)."""
        T = self.order - 1 if t_order is None else t_order
        A0 = SymTensor(self.A0.entries, self.order + 1)
        A1 = SymTensor(self.A1.entries, self.order + 1)
        table = {}
        for a in range(self.mu):
            for b in range(self.mu):
                table[(a, b)] = [
                    tensor_to_series(A0, T, Fraction(0), (a, b), r)
                    + tensor_to_series(A1, T, Fraction(0), (a, b), r, h=1)
                    for r in range(self.mu)
                ]
        return table

    def a1_vanishes(self) -> bool:
        return all(not any(v) for v in self.A1.entries.values())


# seeds


def validate_seeds(setup: Setup, seeds: Mapping[int, Mapping[int, SuperPolynomial]] | None,
                   n_zeta: int) -> Dict[int, Dict[int, SuperPolynomial]]:
    """Check seeds: charge 0, no odd variables, wt(seed_j[rho]) = wt(u_rho) - 1 - j.

    The weight rule is what makes zeta homogeneous of weight 0 when hbar has
    weight 1 and t^rho has weight 1 - wt(u_rho), so that L has the weight of S.
    """
    model = setup.model
    basis = setup.basis
    zp = SuperPolynomial.zero(model.N)
    out = {j: {r: zp for r in range(basis.mu)} for j in range(n_zeta + 1)}
    for j, row in (seeds or {}).items():
        for r, p in row.items():
            if not isinstance(r, int) or not 0 <= r < basis.mu:
                raise IndexRange(f"seed index {r} outside the basis")
            if p.is_zero():
                continue
            if j > n_zeta:
                raise SeedWeightError(f"seed at hbar^{j} exceeds the zeta truncation {n_zeta}")
            if not p.is_eta_free():
                raise SeedWeightError("seeds must be even polynomials")
            if model.charges_of(p) != {0}:
                raise SeedWeightError(f"seed {j},{r} is not charge zero")
            want = basis.weights[r] - 1 - j
            if want < 0 or model.weights_of(p) != {want}:
                raise SeedWeightError(f"seed {j},{r} must have weight {want}")
            out[j][r] = p
    return out


# the combinatorial sums


def v_term(zeta: Sequence[SymTensor], basis_elems: Sequence[SuperPolynomial], abar: MultiIndex,
           ell: int, j: int, nvars: int) -> SuperPolynomial:
    """sum over position subsets abar_1 of size ell of u(rest) * zeta_j[abar_1]."""
    m = len(abar)
    if not 0 <= ell <= m:
        raise IndexRange(f"subset size {ell} outside 0..{m}")
    out = SuperPolynomial.zero(nvars)
    if j >= len(zeta):
        return out
    for pos in combinations(range(m), ell):
        key = tuple(sorted(abar[p] for p in pos))
        z = zeta[j].get(key)
        if z is None:
            raise IndexRange(f"zeta_{j} not populated at {key}")
        if z.is_zero():
            continue
        term = z
        for p in range(m):
            if p not in pos:
                term = basis_elems[abar[p]] * term
        out = out + term
    return out


def _ordered_partitions(positions: Tuple[int, ...], s: int):
    if s == 0:
        if not positions:
            yield ()
        return
    for p in set_partitions(len(positions), s):
        blocks = [tuple(positions[i] for i in blk) for blk in p]
        for perm in permutations(blocks):
            yield perm


def b_term(A: Sequence[SymTensor], abar: MultiIndex, rho: int, ell: int, j: int, mu: int) -> Fraction:
    """Closed-form part of the hbar^ell coefficient of the connection matrix at t = 0.

    s = m - j - 2 chain links; positions 3..m are split into a set attached
    to the first factor and s ordered nonempty blocks (weight 1/s!); each
    factor carries A0 or A1 with exactly ell - j factors of A1.
    """
    m = len(abar)
    s = m - j - 2
    if s < 0 or ell - j < 0 or ell - j > s + 1:
        return Fraction(0)
    rest = tuple(range(2, m))
    total = Fraction(0)

    def entry(r, key):
        v = A[r].get(key)
        if v is None:
            raise IndexRange(f"structure constants not populated at {key}")
        return v

    for k in range(len(rest) + 1):
        for first in combinations(rest, k):
            remaining = tuple(p for p in rest if p not in first)
            for blocks in _ordered_partitions(remaining, s):
                for rs in product((0, 1), repeat=s + 1):
                    if sum(rs) != ell - j:
                        continue
                    key0 = tuple(sorted([abar[0], abar[1]] + [abar[p] for p in first]))
                    vec = list(entry(rs[0], key0))
                    for r, blk in zip(rs[1:], blocks):
                        bvals = [abar[p] for p in blk]
                        new = [Fraction(0)] * mu
                        for d, vd in enumerate(vec):
                            if vd:
                                ent = entry(r, tuple(sorted([d] + bvals)))
                                for e in range(mu):
                                    if ent[e]:
                                        new[e] += vd * ent[e]
                        vec = new
                    total += vec[rho]
    return total / math.factorial(s)


def _formula_known(A0: SymTensor, A1: SymTensor, mu: int):
    def known(abar: MultiIndex, p: int) -> Vec:
        m = len(abar)
        return tuple(sum((b_term((A0, A1), abar, r, p, j, mu) for j in range(0, m - 2)), Fraction(0))
                     for r in range(mu))
    return known


def _recursion_known(A0: SymTensor, A1: SymTensor, mu: int):
    """Known part from the connection-matrix recursion with the size-m entries absent."""
    cache: Dict[int, Dict] = {}

    def tables(m: int):
        if m not in cache:
            # m - 2 derivatives must leave the t^0 part exact; size-m entries are the unknowns
            T = m - 2
            A0c = SymTensor({k: v for k, v in A0.items() if len(k) < m}, m)
            A1c = SymTensor({k: v for k, v in A1.items() if len(k) < m}, m)
            tab = {}
            for a in range(mu):
                for b in range(mu):
                    tab[(a, b)] = [
                        tensor_to_series(A0c, T, Fraction(0), (a, b), r)
                        + tensor_to_series(A1c, T, Fraction(0), (a, b), r, h=1)
                        for r in range(mu)
                    ]
            cache[m] = tab
        return cache[m]

    def full(abar: MultiIndex) -> List[Series]:
        tab = tables(len(abar))
        D = tab[(abar[0], abar[1])]
        for a in abar[2:]:
            new = []
            for r in range(mu):
                acc = D[r].d_t(a).shift_h(1)
                for d in range(mu):
                    if not D[d].is_zero():
                        acc = acc + D[d] * tab[(d, a)][r]
                new.append(acc)
            D = new
        return [x.at_t0() for x in D]

    memo: Dict[MultiIndex, List[Series]] = {}

    def known(abar: MultiIndex, p: int) -> Vec:
        if abar not in memo:
            memo[abar] = full(abar)
        return tuple(memo[abar][r].coefficient(p) for r in range(mu))

    return known


def _run(setup: Setup, seeds, n_zeta: int, order: int, route: str,
         strategy: str | None) -> PrimitiveOutput:
    if order < 1:
        raise ValueError("order must be at least 1")
    if n_zeta < 0:
        raise ValueError("n_zeta must be non-negative")
    red = setup.reducer if strategy is None else setup.reducer.with_strategy(strategy)
    mu = setup.basis.mu
    N = setup.model.N
    zp = SuperPolynomial.zero(N)
    one = SuperPolynomial.one(N)
    u = setup.basis.elements()
    seeds = validate_seeds(setup, seeds, n_zeta)
    zeta = [SymTensor(order=1) for _ in range(n_zeta + 1)]
    zeta[0][()] = one
    for j in range(1, n_zeta + 1):
        zeta[j][()] = zp
    for j in range(n_zeta + 1):
        for r in range(mu):
            zeta[j][(r,)] = seeds[j][r]
    A0, A1 = SymTensor(), SymTensor()
    known = (_formula_known if route == "formula" else _recursion_known)(A0, A1, mu)
    out = PrimitiveOutput(setup, order, n_zeta, zeta, A0, A1, seeds, route)

    def V(abar, ell, j):
        if ell < 0 or j > n_zeta:
            return zp
        return v_term(zeta, u, abar, ell, j, N)

    for m in range(2, order + 2):
        for abar in multi_indices(mu, m):
            b: List[Vec] = []
            c: List[SuperPolynomial] = []

            def Bv(p):
                return b[p] if 0 <= p < len(b) else None

            def frame_part(i):
                acc = zp
                for j in range(n_zeta + 1):
                    vec = Bv(i - 1 - j)
                    if vec is None:
                        continue
                    for r in range(mu):
                        if vec[r]:
                            acc = acc + seeds[j][r].scale(vec[r])
                return acc

            for i in range(m):
                lhs = zp
                for j in range(n_zeta + 1):
                    if i - j >= 0:
                        lhs = lhs + V(abar, i - j, j)
                lhs = lhs - frame_part(i)
                if i > 0:
                    lhs = lhs - c[i - 1].delta_lam
                res = red.reduce(lhs)
                b.append(res.coefficients)
                c.append(res)
            out.cascades[abar] = b
            k0 = known(abar, m - 2)
            k1 = known(abar, m - 1)
            A0[abar] = tuple(x - y for x, y in zip(b[m - 2], k0))
            A1[abar] = tuple(x - y for x, y in zip(b[m - 1], k1))
            if route == "recursion":
                for p in range(m - 2):
                    kp = known(abar, p)
                    if kp != b[p]:
                        out.consistency_defects.append({"multi_index": list(abar), "hbar": p})
            for i in range(m, m + n_zeta + 1):
                val = frame_part(i)
                if i - 1 <= m - 1:
                    val = val + c[i - 1].delta_lam
                for j in range(i - m + 1, n_zeta + 1):
                    val = val - V(abar, i - j, j)
                zeta[i - m][abar] = val
    return out


def solve_weak_primitive(setup: Setup, seeds=None, order: int = 2,
                         strategy: str | None = None) -> PrimitiveOutput:
    """zeta = zeta_0 + hbar zeta_1, known parts from the closed combinatorial sum."""
    return _run(setup, seeds, 1, order, "formula", strategy)


def solve_zeta_truncated(setup: Setup, seeds=None, n_zeta: int = 1, order: int = 2,
                         strategy: str | None = None) -> PrimitiveOutput:
    """zeta truncated at hbar^n_zeta, known parts from the connection-matrix recursion."""
    return _run(setup, seeds, n_zeta, order, "recursion", strategy)


def flatness_defects(out: PrimitiveOutput) -> List[dict]:
    """Pairs (a, b) whose t = 0 matrices A_a(0) = A0_a + hbar A1_a fail to commute.

    Flatness of hbar nabla forces [A_a(0), A_b(0)] = 0 in every hbar power
    (the derivative terms cancel by symmetry of the tensors), so any entry
    here is an obstruction no choice of higher-order data can remove.
    """
    mu = out.mu

    def mat(T, a):
        return [[T[(a, c)][r] for c in range(mu)] for r in range(mu)]

    def mul(X, Y):
        out = [[Fraction(0)] * mu for _ in range(mu)]
        for i, row in enumerate(X):
            for k, x in enumerate(row):
                if x:
                    for j, y in enumerate(Y[k]):
                        if y:
                            out[i][j] += x * y
        return out

    def sub(X, Y):
        return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(X, Y)]

    found = []
    for a in range(mu):
        for b in range(a + 1, mu):
            A0a, A0b, A1a, A1b = mat(out.A0, a), mat(out.A0, b), mat(out.A1, a), mat(out.A1, b)
            by_power = {
                0: sub(mul(A0a, A0b), mul(A0b, A0a)),
                1: sub(sub(mul(A0a, A1b), mul(A1b, A0a)), sub(mul(A0b, A1a), mul(A1a, A0b))),
                2: sub(mul(A1a, A1b), mul(A1b, A1a)),
            }
            for r, c in by_power.items():
                if any(any(row) for row in c):
                    found.append({"pair": [a, b], "hbar": r})
    return found


def primitive_context(out: PrimitiveOutput) -> ConnectionContext:
    return ConnectionContext(out.setup, linear_deformation(out.setup))


def frame_of(out: PrimitiveOutput, ctx: ConnectionContext | None = None) -> List[Series]:
    ctx = ctx or primitive_context(out)
    z = out.zeta_series()
    return [hnabla_t(ctx, r, z) for r in range(out.mu)]


def verify_gcm(out: PrimitiveOutput, table: Dict[Tuple[int, int], List[Series]] | None = None) -> dict:
    """Reduce hbar nabla_b hbar nabla_a zeta - sum (A0 + hbar A1) hbar nabla_rho zeta.

    The residual must be an exact (Q_{S+L} + hbar Delta)-image: every frame
    coefficient vanishes through the truncation.
    """
    ctx = primitive_context(out)
    table = table if table is not None else out.connection_table()
    frame = frame_of(out, ctx)
    H = out.n_zeta + 2
    report = {"holds": True, "failures": [], "pairs": 0, "flatness_defects": len(flatness_defects(out))}
    for a in range(out.mu):
        for b in range(a, out.mu):
            w = hnabla_t(ctx, b, frame[a])
            for r in range(out.mu):
                w = w - scalar_to_poly_series(ctx, table[(a, b)][r]) * frame[r]
            res = reduce_class(ctx, w, frame, hbar_max=H)
            report["pairs"] += 1
            ok = res.is_zero() and class_identity_holds(ctx, w, frame, res)
            report["t_order_checked"] = res.t_order
            report["h_max_checked"] = res.h_max
            if not ok:
                report["holds"] = False
                bad = [(rho, sorted(c.terms.items())[:1]) for rho, c in enumerate(res.coeffs) if not c.is_zero()]
                report["failures"].append({"pair": [a, b], "nonzero": str(bad[:2])})
    return report


def case_ii_system(setup: Setup, order: int = 1, strategy: str | None = None) -> PrimitiveOutput:
    """zeta forced to be hbar-free (only zeta_0), A = A0 + hbar A1."""
    return solve_zeta_truncated(setup, None, 0, order, strategy)

