"""Connection operators on hbar-t-series and the frame decomposition of classes."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Sequence, Tuple

from .algebra import SuperPolynomial, apply_Delta
from .errors import NormalizationError, WindowUnderflow
from .groebner import Setup
from .series import INF, MultiIndex, Series, multi_indices


@lru_cache(maxsize=None)
def splits(tm: MultiIndex) -> Tuple[Tuple[MultiIndex, MultiIndex], ...]:
    """All ways to write the multiset tm as a union of two sub-multisets."""
    cnt = sorted(Counter(tm).items())
    out = []
    for picks in product(*[range(c + 1) for _, c in cnt]):
        a, b = [], []
        for (idx, c), p in zip(cnt, picks):
            a += [idx] * p
            b += [idx] * (c - p)
        out.append((tuple(a), tuple(b)))
    return tuple(out)


@dataclass
class ConnectionContext:
    setup: Setup
    gamma: Series
    hbar_floor: float = -INF
    _partials: Dict[int, Series] = field(default_factory=dict, repr=False)
    _grads: Dict[int, Series] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.gamma.coefficient(0, ()) or any(r != 0 for r in self.gamma.exponents()):
            raise NormalizationError("the deformation must be hbar-free with no t-constant term")

    @property
    def N(self) -> int:
        return self.setup.model.N

    @property
    def mu(self) -> int:
        return self.setup.basis.mu

    def zero_poly(self) -> SuperPolynomial:
        return SuperPolynomial.zero(self.N)

    def gamma_partial(self, alpha: int) -> Series:
        s = self._partials.get(alpha)
        if s is None:
            s = self.gamma.d_t(alpha)
            self._partials[alpha] = s
        return s

    def potential(self) -> Series:
        """S + Gamma as a series."""
        return Series.const(self.setup.model.S, self.zero_poly()) + self.gamma

    def potential_grad(self, i: int) -> Series:
        """d(S + Gamma)/dq_i."""
        s = self._grads.get(i)
        if s is None:
            s = Series.const(self.setup.reducer.grad[i], self.zero_poly()) + self.gamma.map(lambda p: p.diff_q(i))
            self._grads[i] = s
        return s

    def check_window(self, w: Series) -> Series:
        if w.min_h() < self.hbar_floor:
            raise WindowUnderflow(f"hbar exponent {w.min_h()} below window floor {self.hbar_floor}")
        return w


def linear_deformation(setup: Setup, t_order: int = INF) -> Series:
    """L = sum_alpha t^alpha u_alpha."""
    N = setup.model.N
    return Series({(0, (a,)): setup.basis.element(a) for a in range(setup.basis.mu)},
                  SuperPolynomial.zero(N), t_order, INF)


def zero_deformation(setup: Setup) -> Series:
    return Series({}, SuperPolynomial.zero(setup.model.N))


def hnabla_t(ctx: ConnectionContext, alpha: int, w: Series) -> Series:
    """hbar * nabla_alpha = hbar d/dt^alpha + Gamma_alpha."""
    return w.d_t(alpha).shift_h(1) + ctx.gamma_partial(alpha) * w


def nabla_t(ctx: ConnectionContext, alpha: int, w: Series) -> Series:
    return ctx.check_window(hnabla_t(ctx, alpha, w).shift_h(-1))


def nabla_hbar_inv(ctx: ConnectionContext, w: Series) -> Series:
    return ctx.check_window(w.d_hbar_inv() + ctx.potential() * w)


def apply_Q_deformed(ctx: ConnectionContext, lam: Series) -> Series:
    """Q_{S+Gamma} applied to a series of odd elements."""
    out = Series({}, ctx.zero_poly(), lam.t_order, lam.h_max)
    present = 0
    for c in lam.terms.values():
        for (_, m) in c._terms:
            present |= m
    for i in range(ctx.N):
        if present >> i & 1:
            out = out + ctx.potential_grad(i) * lam.map(lambda p: p.diff_eta(i))
    return out


def apply_K_hbar(ctx: ConnectionContext, lam: Series) -> Series:
    """(Q_{S+Gamma} + hbar Delta)(lam)."""
    return apply_Q_deformed(ctx, lam) + lam.map(apply_Delta).shift_h(1)


@dataclass
class ClassReduction:
    coeffs: List[Series]
    witness: Series
    t_order: float
    h_max: float

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def _check_frame(ctx: ConnectionContext, frame: Sequence[Series]) -> None:
    basis = ctx.setup.basis
    if len(frame) != basis.mu:
        raise NormalizationError(f"frame has {len(frame)} elements, expected {basis.mu}")
    for rho, f in enumerate(frame):
        if f.min_h() < 0:
            raise NormalizationError(f"frame element {rho} has negative hbar powers")
        if f.coefficient(0, ()) != basis.element(rho):
            raise NormalizationError(f"frame element {rho} does not restrict to u_{rho}")


def reduce_class(ctx: ConnectionContext, w: Series, frame: Sequence[Series],
                 hbar_max=None, t_order=None) -> ClassReduction:
    """Solve w = sum_rho c_rho frame_rho + (Q_{S+Gamma} + hbar Delta)(Lambda).

    Unknowns are found hbar-level by hbar-level, and within a level by
    increasing t-degree; each coefficient costs one reduction to the basis.
    """
    _check_frame(ctx, frame)
    ctx.check_window(w)
    setup = ctx.setup
    red = setup.reducer
    mu = setup.basis.mu
    zp = ctx.zero_poly()
    T = min([w.t_order, ctx.gamma.t_order] + [f.t_order for f in frame]
            + ([t_order] if t_order is not None else []))
    if T == INF:
        T = max((len(t) for (_, t) in w.terms), default=0)
    r_lo = w.min_h()
    if r_lo == INF:
        r_lo = 0
    H = min([w.h_max] + [f.h_max + r_lo for f in frame] + ([hbar_max] if hbar_max is not None else []))
    if H == INF:
        H = max(w.max_h(), r_lo)
    T, H = int(T), int(H)

    coeffs: List[Dict[Tuple[int, MultiIndex], Fraction]] = [dict() for _ in range(mu)]
    lam: Dict[Tuple[int, MultiIndex], SuperPolynomial] = {}
    lam_deta: Dict[Tuple[int, MultiIndex], Dict[int, SuperPolynomial]] = {}
    grads = {}
    for i in range(ctx.N):
        g = ctx.gamma.map(lambda p: p.diff_q(i))
        if not g.is_zero():
            grads[i] = g
    frame_terms = [f.terms for f in frame]

    for r in range(r_lo, H + 1):
        for deg in range(T + 1):
            for tm in multi_indices(mu, deg):
                known = w.terms.get((r, tm), zp)
                for a, b in splits(tm):
                    for rho in range(mu):
                        ft = frame_terms[rho]
                        cr = coeffs[rho]
                        for (r2, t2), fc in ft.items():
                            if t2 != b:
                                continue
                            r1 = r - r2
                            if (r1, a) == (r, tm):
                                continue
                            c = cr.get((r1, a))
                            if c:
                                known = known - fc.scale(c)
                    if a != tm:
                        d = lam_deta.get((r, a))
                        if d:
                            for i, g in grads.items():
                                gi = g.terms.get((0, b))
                                if gi is not None and i in d:
                                    known = known - gi * d[i]
                prev = lam.get((r - 1, tm))
                if prev is not None:
                    known = known - apply_Delta(prev)
                out = red.reduce(known)
                for rho, c in enumerate(out.coefficients):
                    if c:
                        coeffs[rho][(r, tm)] = c
                if out.lam:
                    lam[(r, tm)] = out.lam
                    lam_deta[(r, tm)] = {i: out.lam.diff_eta(i) for i in range(ctx.N)
                                         if not out.lam.diff_eta(i).is_zero()}
    return ClassReduction(
        coeffs=[Series(c, Fraction(0), T, H) for c in coeffs],
        witness=Series(lam, zp, T, H),
        t_order=T,
        h_max=H,
    )


def class_identity_holds(ctx: ConnectionContext, w: Series, frame: Sequence[Series],
                         result: ClassReduction) -> bool:
    """Re-expand sum c_rho frame_rho + (Q + hbar Delta)(Lambda) and compare with w."""
    zp = ctx.zero_poly()
    total = apply_K_hbar(ctx, result.witness)
    for c, f in zip(result.coeffs, frame):
        cpoly = c.map(lambda x: SuperPolynomial.constant(ctx.N, x), zero=zp)
        total = total + cpoly * f
    return total.same_as(w, t_order=result.t_order, h_max=result.h_max)


def scalar_to_poly_series(ctx: ConnectionContext, s: Series) -> Series:
    return s.map(lambda x: SuperPolynomial.constant(ctx.N, x), zero=ctx.zero_poly())
