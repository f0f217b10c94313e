"""Frobenius structure constants, the modified higher residue pairing and related checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .algebra import SuperPolynomial, apply_Delta, apply_Q
from .errors import WeightConditionError, WindowUnderflow
from .gaussmanin import (ConnectionContext, hnabla_t, linear_deformation, nabla_hbar_inv, reduce_class,
                         scalar_to_poly_series, zero_deformation)
from .groebner import Setup
from .primitive import PrimitiveOutput, frame_of, primitive_context
from .series import INF, Series, SymTensor, multiplicity_factorial, tensor_to_series

DEFAULT_WINDOW = (-2, 4)


@dataclass
class FrobeniusData:
    setup: Setup
    a: Dict[Tuple[int, int, int], Fraction]
    g: Dict[Tuple[int, int], Fraction]

    @property
    def mu(self) -> int:
        return self.setup.basis.mu

    def matrix(self, alpha: int) -> List[List[Fraction]]:
        """Multiplication by u_alpha: M[rho][beta] = a_{alpha beta}^rho."""
        return [[self.a[(alpha, b, r)] for b in range(self.mu)] for r in range(self.mu)]

    def metric(self) -> List[List[Fraction]]:
        return [[self.g[(a, b)] for b in range(self.mu)] for a in range(self.mu)]


def frobenius_structure(setup: Setup) -> FrobeniusData:
    mu = setup.basis.mu
    top = setup.basis.max_index
    u = setup.basis.elements()
    a = {}
    for i in range(mu):
        for j in range(mu):
            c = setup.reducer.coefficients(u[i] * u[j])
            for r in range(mu):
                a[(i, j, r)] = c[r]
    g = {(i, j): a[(i, j, top)] for i in range(mu) for j in range(mu)}
    return FrobeniusData(setup, a, g)


def determinant(M: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact Gaussian elimination."""
    A = [list(map(Fraction, row)) for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    return det


def verify_frobenius_axioms(fd: FrobeniusData) -> dict:
    """D1 associativity, D2 commutativity, D3 invariance, D4 flat identity, D5 potential."""
    mu = fd.mu
    a, g = fd.a, fd.g
    unit = fd.setup.basis.min_index
    rep = {"D1": True, "D2": True, "D3": True, "D4": True, "D5": True, "failures": []}

    def fail(name, where):
        rep[name] = False
        if len(rep["failures"]) < 20:
            rep["failures"].append({"axiom": name, "at": list(where)})

    for i in range(mu):
        for j in range(mu):
            for r in range(mu):
                if a[(i, j, r)] != a[(j, i, r)]:
                    fail("D2", (i, j, r))
    nz = {(i, j): [(r, a[(i, j, r)]) for r in range(mu) if a[(i, j, r)]] for i in range(mu) for j in range(mu)}

    def compose(first, second_of):
        out: Dict[int, Fraction] = {}
        for r, v in first:
            for d, w in second_of(r):
                out[d] = out.get(d, Fraction(0)) + v * w
        return {d: c for d, c in out.items() if c}

    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                lhs = compose(nz[(i, j)], lambda r: nz[(r, k)])
                rhs = compose(nz[(j, k)], lambda r: nz[(i, r)])
                for d in sorted(set(lhs) | set(rhs)):
                    if lhs.get(d) != rhs.get(d):
                        fail("D1", (i, j, k, d))
    triple = {}
    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                triple[(i, j, k)] = sum((v * g[(r, k)] for r, v in nz[(i, j)]), Fraction(0))
    for (i, j, k), v in triple.items():
        if v != triple[(j, k, i)] or v != triple[(j, i, k)]:
            fail("D3", (i, j, k))
    for i in range(mu):
        for r in range(mu):
            if a[(unit, i, r)] != (1 if i == r else 0):
                fail("D4", (unit, i, r))
    # D5: the cubic potential built from sorted triples has third derivatives equal to every triple
    potential = Series({(0, tuple(sorted(key))): v * Fraction(1, multiplicity_factorial(tuple(sorted(key))))
                        for key, v in triple.items() if list(key) == sorted(key)}, Fraction(0))
    second = {(i, j): potential.d_t(i).d_t(j) for i in range(mu) for j in range(mu)}
    for (i, j, k), v in triple.items():
        if second[(i, j)].d_t(k).coefficient(0, ()) != v:
            fail("D5", (i, j, k))
    det = determinant(fd.metric())
    rep["det_g"] = det
    rep["nondegenerate"] = det != 0
    return rep


# pairing


def star(w: Series) -> Series:
    """hbar -> -hbar."""
    return w.star()


def _check_floor(w: Series, lo: int) -> None:
    if w.min_h() < lo:
        raise WindowUnderflow(f"hbar exponent {w.min_h()} below the pairing window {lo}")


def modified_pairing(setup: Setup, w1: Series, w2: Series, window: Tuple[int, int] = DEFAULT_WINDOW,
                     t_order=INF) -> Series:
    """u_max-coefficient of w1 * star(w2), one reduction per (hbar, t) coefficient.

    Inputs are even charge-zero series.  The result is exact for hbar
    exponents up to the top of the window.
    """
    lo, hi = window
    _check_floor(w1, lo)
    _check_floor(w2, lo)
    top = setup.basis.max_index
    prod = (w1.truncate(t_order, hi - lo) * w2.star().truncate(t_order, hi - lo)).truncate(t_order, hi)
    out = {}
    for k, p in prod.terms.items():
        c = setup.reducer.coefficients(p)[top]
        if c:
            out[k] = c
    return Series(out, Fraction(0), prod.t_order, min(prod.h_max, hi))


def pairing_table(setup: Setup, window: Tuple[int, int] = DEFAULT_WINDOW) -> Dict[Tuple[int, int], Series]:
    zp = SuperPolynomial.zero(setup.model.N)
    u = [Series.const(e, zp) for e in setup.basis.elements()]
    return {(i, j): modified_pairing(setup, u[i], u[j], window)
            for i in range(setup.basis.mu) for j in range(setup.basis.mu)}


def _hbar_scalar(e: int, c=1) -> Series:
    return Series({(e, ()): Fraction(c)}, Fraction(0))


def verify_pairing_axioms(setup: Setup, samples: Sequence[Tuple[Series, Series]],
                          window: Tuple[int, int] = DEFAULT_WINDOW, t_order: int = 2) -> dict:
    """H1 star-symmetry, H2 sesquilinearity, H3 flatness in t, H4 flatness in 1/hbar, H5 hbar = 0 slice.

    Samples are pairs of even charge-zero series with t-degree at most
    t_order; the first entry should leave one step of headroom below the
    window floor for H3.
    """
    N = setup.model.N
    zp = SuperPolynomial.zero(N)
    ctx = ConnectionContext(setup, linear_deformation(setup))
    fd = frobenius_structure(setup)
    mu = setup.basis.mu
    lo, hi = window
    rep = {k: True for k in ("H1", "H2", "H3", "H4", "H5")}
    rep["failures"] = []
    rep["samples"] = len(samples)

    def fail(name, i, detail=""):
        rep[name] = False
        if len(rep["failures"]) < 20:
            rep["failures"].append({"axiom": name, "sample": i, "detail": detail})

    def K(x, y):
        return modified_pairing(setup, x, y, window, t_order)

    def as_poly(s: Series) -> Series:
        return scalar_to_poly_series(ctx, s)

    for i, (w1, w2) in enumerate(samples):
        k12 = K(w1, w2)
        if not k12.same_as(K(w2, w1).star()):
            fail("H1", i)
        for e in (-1, 1):
            f = _hbar_scalar(e, 3)
            if w1.min_h() + e >= lo and w2.min_h() + e >= lo:
                lhs1 = K(as_poly(f) * w1, w2)
                lhs2 = K(w1, as_poly(f) * w2)
                if not lhs1.same_as((f * k12).truncate(h_max=hi)):
                    fail("H2", i, f"left factor hbar^{e}")
                if not lhs2.same_as((f.star() * k12).truncate(h_max=hi)):
                    fail("H2", i, f"right factor hbar^{e}")
        T = t_order - 1
        for alpha in range(mu):
            lhs = k12.d_t(alpha).truncate(T)
            n1 = hnabla_t(ctx, alpha, w1).shift_h(-1)
            n2 = hnabla_t(ctx, alpha, w2).shift_h(-1)
            rhs = (K(n1, w2) + K(w1, n2)).truncate(T)
            if not lhs.same_as(rhs):
                fail("H3", i, f"alpha={alpha}")
        lhs = k12.d_hbar_inv()
        rhs = K(nabla_hbar_inv(ctx, w1), w2) - K(w1, nabla_hbar_inv(ctx, w2))
        if not lhs.same_as(rhs, h_max=hi):
            fail("H4", i)
        # hbar = 0 slice against the metric on reduced coefficients
        a0 = w1.hbar_slice(0) if w1.min_h() >= 0 else None
        b0 = w2.hbar_slice(0) if w2.min_h() >= 0 else None
        if a0 is not None and b0 is not None:
            k0 = k12.hbar_slice(0)
            expected: Dict = {}
            for (_, ta), pa in a0.terms.items():
                ca = setup.reducer.coefficients(pa)
                for (_, tb), pb in b0.terms.items():
                    cb = setup.reducer.coefficients(pb)
                    v = sum((ca[r] * cb[s] * fd.g[(r, s)] for r in range(mu) for s in range(mu) if ca[r] and cb[s]),
                            Fraction(0))
                    if v:
                        key = (0, tuple(sorted(ta + tb)))
                        expected[key] = expected.get(key, Fraction(0)) + v
            if not k0.same_as(Series(expected, Fraction(0), k0.t_order)):
                fail("H5", i)
    return rep


# pairing induced by a weak primitive form


def pairing_from_primitive(out: PrimitiveOutput) -> Dict[Tuple[int, int], Series]:
    """K(hbar nabla_a zeta, hbar nabla_b zeta) = A0_{ab}^max(t), exact through t^(order-1)."""
    top = out.setup.basis.max_index
    T = SymTensor(out.A0.entries, out.order + 1)
    return {(a, b): tensor_to_series(T, out.order - 1, Fraction(0), (a, b), top)
            for a in range(out.mu) for b in range(out.mu)}


def primitive_pairing(out: PrimitiveOutput, phi: Series, psi: Series, hbar_max: int | None = None) -> Series:
    """sum A_phi^rho (A_psi^sigma)^* A0_{rho sigma}^max with A_. the frame coefficients."""
    ctx = primitive_context(out)
    frame = frame_of(out, ctx)
    table = pairing_from_primitive(out)
    cp = reduce_class(ctx, phi, frame, hbar_max=hbar_max).coeffs
    cq = reduce_class(ctx, psi, frame, hbar_max=hbar_max).coeffs
    total = Series({}, Fraction(0))
    for r in range(out.mu):
        if cp[r].is_zero():
            continue
        for s in range(out.mu):
            if cq[s].is_zero():
                continue
            total = total + cp[r] * cq[s].star() * table[(r, s)]
    return total


def check_h3_condition(out: PrimitiveOutput, A1: SymTensor | None = None) -> dict:
    """d_c A0_{ab}^max = sum_rho (A1_{ca}^rho A0_{rho b}^max + A1_{cb}^rho A0_{a rho}^max)."""
    mu = out.mu
    top = out.setup.basis.max_index
    M = out.order
    A0 = SymTensor(out.A0.entries, M + 1)
    A1 = SymTensor((A1 if A1 is not None else out.A1).entries, M + 1)
    T = M - 2
    rep = {"holds": True, "failures": [], "t_order_checked": T}
    if T < 0:
        rep["holds"] = None
        return rep
    g = {(a, b): tensor_to_series(A0, M - 1, Fraction(0), (a, b), top) for a in range(mu) for b in range(mu)}
    one = {(a, b, r): tensor_to_series(A1, M - 1, Fraction(0), (a, b), r)
           for a in range(mu) for b in range(mu) for r in range(mu)}
    for c in range(mu):
        for a in range(mu):
            for b in range(a, mu):
                lhs = g[(a, b)].d_t(c)
                rhs = Series({}, Fraction(0))
                for r in range(mu):
                    rhs = rhs + one[(c, a, r)] * g[(r, b)] + one[(c, b, r)] * g[(a, r)]
                if not lhs.same_as(rhs, t_order=T):
                    rep["holds"] = False
                    if len(rep["failures"]) < 20:
                        rep["failures"].append({"at": [c, a, b]})
    return rep


def h4_coefficients(out: PrimitiveOutput, hbar_max: int | None = None) -> List[List[Series]]:
    """B_alpha^rho from hbar nabla_{1/hbar} nabla_alpha zeta = sum_rho B_alpha^rho hbar nabla_rho zeta + exact."""
    ctx = primitive_context(out)
    frame = frame_of(out, ctx)
    H = out.n_zeta + 3 if hbar_max is None else hbar_max
    rows = []
    for a in range(out.mu):
        w = nabla_hbar_inv(ctx, frame[a].shift_h(-1)).shift_h(1)
        rows.append(reduce_class(ctx, w, frame, hbar_max=H).coeffs)
    return rows


def check_h4_condition(out: PrimitiveOutput, hbar_max: int | None = None) -> dict:
    """Report whether B = hbar * (hbar-free) and the symmetry of hbar d_b B_a + B_a (A0 + hbar A1)_b."""
    mu = out.mu
    B = h4_coefficients(out, hbar_max)
    table = out.connection_table()
    rep = {"hbar0_zero": True, "higher_zero": True, "symmetric": True, "failures": []}
    for a in range(mu):
        for r in range(mu):
            s = B[a][r]
            if any(h == 0 for h in s.exponents()):
                rep["hbar0_zero"] = False
            if any(h >= 2 for h in s.exponents()):
                rep["higher_zero"] = False
    rep["holds"] = rep["hbar0_zero"] and rep["higher_zero"]
    X = {}
    for a in range(mu):
        for b in range(mu):
            for d in range(mu):
                acc = B[a][d].d_t(b).shift_h(1)
                for r in range(mu):
                    acc = acc + B[a][r] * table[(b, r)][d]
                X[(a, b, d)] = acc
    for a in range(mu):
        for b in range(a + 1, mu):
            for d in range(mu):
                if not X[(a, b, d)].same_as(X[(b, a, d)]):
                    rep["symmetric"] = False
                    if len(rep["failures"]) < 20:
                        rep["failures"].append({"at": [a, b, d]})
    rep["B"] = B
    return rep


# RHB


def rhb_check(setup: Setup, v: Sequence[Sequence[SuperPolynomial]] | None = None) -> dict:
    """Verify the hbar-direction congruence for v_i = sum_l hbar^l v_i^(l), v_i^(0) = u_i.

    With Lambda_i^(l) = sum_j y_j v_i^(l) eta_{y_j}: Q_S(Lambda) = S v,
    Delta(Lambda) = (k - l + wt(u_i)) v, and then
    nabla_{1/hbar} v_i + hbar (k + wt(u_i)) v_i = (Q_S + hbar Delta)(sum_l hbar^l Lambda_i^(l)).
    """
    model = setup.model
    basis = setup.basis
    N, k = model.N, model.k
    zp = SuperPolynomial.zero(N)
    u = basis.elements()
    if v is None:
        v = [[e] for e in u]
    if len(v) != basis.mu:
        raise WeightConditionError(f"need {basis.mu} elements, got {len(v)}")
    for i, parts in enumerate(v):
        if not parts or parts[0] != u[i]:
            raise WeightConditionError(f"element {i} must restrict to u_{i} at hbar = 0")
        for l, p in enumerate(parts):
            if p.is_zero():
                continue
            want = basis.weights[i] - l
            if not p.is_eta_free() or model.charges_of(p) != {0} or model.weights_of(p) != {want}:
                raise WeightConditionError(f"hbar^{l} part of element {i} must be even, charge 0, weight {want}")
    ctx = ConnectionContext(setup, zero_deformation(setup))
    series = [Series({(l, ()): p for l, p in enumerate(parts)}, zp) for parts in v]
    rep = {"Q_identity": True, "Delta_identity": True, "exact_identity": True, "reduction_zero": True,
           "N0": [k + w for w in basis.weights], "failures": []}
    for i, parts in enumerate(v):
        lam_terms = {}
        for l, p in enumerate(parts):
            lam = zp
            for j in range(k):
                lam = lam + SuperPolynomial.q(N, j) * p * SuperPolynomial.eta(N, j)
            if apply_Q(model.S, lam) != model.S * p:
                rep["Q_identity"] = False
                rep["failures"].append({"element": i, "hbar": l, "identity": "Q"})
            if apply_Delta(lam) != p.scale(k - l + basis.weights[i]):
                rep["Delta_identity"] = False
                rep["failures"].append({"element": i, "hbar": l, "identity": "Delta"})
            lam_terms[(l, ())] = lam
        w = nabla_hbar_inv(ctx, series[i]) + series[i].shift_h(1).scale(Fraction(k + basis.weights[i]))
        lam_s = Series(lam_terms, zp)
        image = lam_s.map(lambda p: apply_Q(model.S, p)) + lam_s.map(apply_Delta).shift_h(1)
        if not w.same_as(image):
            rep["exact_identity"] = False
            rep["failures"].append({"element": i, "identity": "exact"})
        res = reduce_class(ctx, w, series, hbar_max=int(max(w.max_h(), 0)))
        if not res.is_zero():
            rep["reduction_zero"] = False
            rep["failures"].append({"element": i, "identity": "reduction"})
    rep["holds"] = all(rep[x] for x in ("Q_identity", "Delta_identity", "exact_identity", "reduction_zero"))
    return rep
