"""Formal F-manifold: a Maurer-Cartan deformation Gamma and hbar-free structure constants.

For every multi-index abar of size m = l + 1 the solver runs the cascade

    u^(0)_abar                       = sum_rho a^(0)rho u_rho + Q_S(lambda^(0))
    u^(i)_abar - Delta(lambda^(i-1)) = sum_rho a^(i)rho u_rho + Q_S(lambda^(i)),  i < l

and sets a_abar = a^(l-1), u_abar = Delta(lambda^(l-1)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from .algebra import SuperPolynomial
from .errors import IndexRange
from .gaussmanin import ConnectionContext, apply_K_hbar, hnabla_t, reduce_class, scalar_to_poly_series
from .groebner import Setup
from .series import INF, MultiIndex, Series, SymTensor, multi_indices, tensor_to_series


@lru_cache(maxsize=None)
def set_partitions(m: int, blocks: int) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
    """Unordered partitions of positions 0..m-1 into exactly ``blocks`` nonempty blocks."""
    if blocks < 1 or blocks > m:
        return ()
    if m == blocks:
        return (tuple((i,) for i in range(m)),)
    if blocks == 1:
        return (tuple([tuple(range(m))]),)
    out = []
    last = m - 1
    # last position alone, or joined to a block of a partition of the rest
    for p in set_partitions(m - 1, blocks - 1):
        out.append(p + ((last,),))
    for p in set_partitions(m - 1, blocks):
        for j in range(len(p)):
            out.append(p[:j] + (p[j] + (last,),) + p[j + 1:])
    return tuple(out)


def u_partition(gamma: SymTensor, abar: MultiIndex, i: int, nvars: int) -> SuperPolynomial:
    """Sum over partitions of the positions of abar into m - i blocks of prod u_block."""
    m = len(abar)
    if not 0 <= i <= m - 1:
        raise IndexRange(f"partition index {i} outside 0..{m - 1}")
    out = SuperPolynomial.zero(nvars)
    for p in set_partitions(m, m - i):
        term = SuperPolynomial.one(nvars)
        for block in p:
            term = term * gamma[[abar[j] for j in block]]
            if term.is_zero():
                break
        out = out + term
    return out


@dataclass
class FManifoldOutput:
    setup: Setup
    order: int
    gamma: SymTensor
    A: SymTensor
    lam: SymTensor
    cascades: Dict[MultiIndex, List[Tuple[Fraction, ...]]] = field(default_factory=dict, repr=False)

    @property
    def mu(self) -> int:
        return self.setup.basis.mu

    def zero_poly(self) -> SuperPolynomial:
        return SuperPolynomial.zero(self.setup.model.N)

    def gamma_series(self) -> Series:
        T = SymTensor(self.gamma.entries, self.order + 1)
        return tensor_to_series(T, self.order + 1, self.zero_poly())

    def connection_table(self) -> Dict[Tuple[int, int], List[Series]]:
        """A_{alpha beta}^rho(t) for every ordered pair, exact through t^(order-1)."""
        table = {}
        T = SymTensor(self.A.entries, self.order + 1)
        for a in range(self.mu):
            for b in range(self.mu):
                table[(a, b)] = [
                    tensor_to_series(T, self.order - 1, Fraction(0), prefix=(a, b), component=r)
                    for r in range(self.mu)
                ]
        return table


def solve_f_manifold(setup: Setup, order: int = 3, strategy: str | None = None) -> FManifoldOutput:
    if order < 1:
        raise ValueError("order must be at least 1")
    red = setup.reducer if strategy is None else setup.reducer.with_strategy(strategy)
    mu = setup.basis.mu
    N = setup.model.N
    gamma = SymTensor(order=1)
    for a in range(mu):
        gamma[(a,)] = setup.basis.element(a)
    A = SymTensor()
    lam = SymTensor()
    cascades = {}
    for m in range(2, order + 2):
        for abar in multi_indices(mu, m):
            lines = []
            prev = None
            for i in range(m - 1):
                p = u_partition(gamma, abar, i, N)
                if prev is not None:
                    p = p - prev.delta_lam
                prev = red.reduce(p)
                lines.append(prev.coefficients)
            A[abar] = prev.coefficients
            lam[abar] = prev.lam
            gamma[abar] = prev.delta_lam
            cascades[abar] = lines
    return FManifoldOutput(setup, order, gamma, A, lam, cascades)


def _first_nonzero(s: Series):
    for k, v in sorted(s.terms.items()):
        if v:
            return k, v
    return None


def verify_f_axioms(out: FManifoldOutput, order: int | None = None,
                    table: Dict[Tuple[int, int], List[Series]] | None = None) -> dict:
    """Associativity (C1), commutativity (C2) and potentiality (C3) of A(t)."""
    order = out.order if order is None else order
    table = table if table is not None else out.connection_table()
    mu = out.mu
    T1 = order - 1
    report = {"C1": True, "C2": True, "C3": True, "failures": []}

    def fail(name, where, detail):
        report[name] = False
        if len(report["failures"]) < 20:
            report["failures"].append({"axiom": name, "at": list(where), "detail": str(detail)})

    for a in range(mu):
        for b in range(mu):
            for c in range(mu):
                if table[(a, b)][c].truncate(T1).terms != table[(b, a)][c].truncate(T1).terms:
                    fail("C2", (a, b, c), "A_ab^c != A_ba^c")
    for a in range(mu):
        for b in range(mu):
            for c in range(mu):
                for d in range(mu):
                    lhs = Series({}, Fraction(0), T1)
                    rhs = Series({}, Fraction(0), T1)
                    for r in range(mu):
                        lhs = lhs + table[(a, b)][r] * table[(r, c)][d]
                        rhs = rhs + table[(b, c)][r] * table[(r, a)][d]
                    diff = (lhs - rhs).truncate(T1)
                    if not diff.is_zero():
                        fail("C1", (a, b, c, d), _first_nonzero(diff))
    T2 = order - 2
    if T2 >= 0:
        for a in range(mu):
            for b in range(mu):
                for c in range(mu):
                    for d in range(mu):
                        diff = (table[(b, c)][d].d_t(a) - table[(a, c)][d].d_t(b)).truncate(T2)
                        if not diff.is_zero():
                            fail("C3", (a, b, c, d), _first_nonzero(diff))
    report["t_order_checked"] = {"C1": T1, "C2": T1, "C3": T2}
    return report


def _one(ctx: ConnectionContext) -> Series:
    return Series.const(SuperPolynomial.one(ctx.N), ctx.zero_poly())


def verify_ind_qm(out: FManifoldOutput, abar: Tuple[int, ...], hbar_max: int | None = None) -> dict:
    """Check U_abar = sum_rho B_abar^rho Gamma_rho + (Q_{S+Gamma} + hbar Delta)(C_abar).

    U is hbar nabla applied |abar| times to 1; B and C follow the recursions
    B_{a'a} = sum_d B_{a'}^d A_{d a} + hbar d_a B_{a'} and
    C_{a'a} = sum_d B_{a'}^d Lambda_{d a} + hbar nabla_a C_{a'}.
    The pair witnesses Lambda come from reducing the size-two residuals.
    """
    abar = tuple(abar)
    m = len(abar)
    if m < 2:
        raise IndexRange("need at least two indices")
    H = m + 1 if hbar_max is None else hbar_max
    ctx = ConnectionContext(out.setup, out.gamma_series())
    mu = out.mu
    table = out.connection_table()
    frame = [ctx.gamma_partial(r) for r in range(mu)]
    one = _one(ctx)

    pair_lambda: Dict[Tuple[int, int], Series] = {}
    pair_zero = True

    def U_of(idx):
        w = one
        for a in idx:
            w = hnabla_t(ctx, a, w)
        return w

    def lam_pair(d, a):
        key = (d, a)
        if key not in pair_lambda:
            nonlocal pair_zero
            w = U_of((d, a))
            for r in range(mu):
                w = w - scalar_to_poly_series(ctx, table[(d, a)][r]) * frame[r]
            res = reduce_class(ctx, w, frame, hbar_max=H)
            if not res.is_zero():
                pair_zero = False
            pair_lambda[key] = res.witness
        return pair_lambda[key]

    B = [table[(abar[0], abar[1])][r] for r in range(mu)]
    C = lam_pair(abar[0], abar[1])
    for a in abar[2:]:
        newB = []
        for r in range(mu):
            acc = B[r].d_t(a).shift_h(1)
            for d in range(mu):
                acc = acc + B[d] * table[(d, a)][r]
            newB.append(acc)
        newC = hnabla_t(ctx, a, C)
        for d in range(mu):
            if not B[d].is_zero():
                newC = newC + scalar_to_poly_series(ctx, B[d]) * lam_pair(d, a)
        B, C = newB, newC
    U = U_of(abar)
    rhs = apply_K_hbar(ctx, C)
    for r in range(mu):
        rhs = rhs + scalar_to_poly_series(ctx, B[r]) * frame[r]
    diff = (U - rhs).truncate(h_max=H)
    t_chk = diff.t_order
    return {
        "multi_index": list(abar),
        "holds": diff.is_zero() and pair_zero,
        "pair_coefficients_zero": pair_zero,
        "t_order_checked": None if t_chk == INF else int(t_chk),
        "h_max_checked": None if diff.h_max == INF else int(diff.h_max),
        "witness_hbar_degree": max((int(s.max_h()) for s in pair_lambda.values() if not s.is_zero()), default=0),
    }
