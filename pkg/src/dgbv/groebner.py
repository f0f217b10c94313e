"""Groebner basis of the Jacobian ideal with cofactors, and the charge-zero basis.

Commutative polynomials live here as plain ``{exps: Fraction}`` dicts; they
only become SuperPolynomials at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

from .algebra import SuperPolynomial, apply_Delta
from .errors import ChargeMismatch, DegreeMismatch, InvalidBasis, NotFiniteDimensional
from .model import ModelSetup

Exps = Tuple[int, ...]
Poly = Dict[Exps, Fraction]

STRATEGIES = ("first", "last")
DEFAULT_CAP = 100_000


class MonomialOrder:
    """Graded reverse lexicographic order for a given variable precedence."""

    def __init__(self, precedence: Sequence[int], name: str = "grevlex"):
        self.name = name
        self.precedence = tuple(precedence)
        self._rev = tuple(reversed(self.precedence))
        self._cache: Dict[Exps, tuple] = {}

    def key(self, e: Exps) -> tuple:
        k = self._cache.get(e)
        if k is None:
            k = (sum(e), tuple(-e[p] for p in self._rev))
            self._cache[e] = k
        return k

    def leading(self, p: Poly) -> Exps:
        return max(p, key=self.key)

    def describe(self) -> dict:
        return {"name": self.name, "precedence": list(self.precedence)}


def model_order(model: ModelSetup, name: str = "grevlex") -> MonomialOrder:
    if name != "grevlex":
        raise ValueError(f"unsupported monomial order {name!r}")
    # x0 > x1 > ... > xn > y1 > ... > yk
    prec = [model.k + j for j in range(model.n + 1)] + list(range(model.k))
    return MonomialOrder(prec, name)


# dict-polynomial helpers

def p_add_scaled(acc: Poly, p: Poly, c: Fraction, shift: Exps | None = None) -> None:
    """acc += c * x^shift * p, in place."""
    for e, v in p.items():
        if shift is not None:
            e = tuple(a + b for a, b in zip(e, shift))
        s = acc.get(e, 0) + c * v
        if s:
            acc[e] = s
        else:
            acc.pop(e, None)


def p_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def to_dict(p: SuperPolynomial) -> Poly:
    out: Poly = {}
    for (e, m), c in p.items():
        if m:
            raise DegreeMismatch("expected an eta-free polynomial")
        out[e] = c
    return out


def from_dict(nvars: int, p: Poly, mask: int = 0) -> SuperPolynomial:
    return SuperPolynomial(nvars, {(e, mask): c for e, c in p.items()}, _clean=True)


def divide(p: Poly, divisors: Sequence[Tuple[Exps, Fraction, Poly]], order: MonomialOrder,
           strategy: str = "first") -> Tuple[List[Poly], Poly]:
    """Multivariate division: p = sum_i quotients[i] * divisors[i] + remainder."""
    work = dict(p)
    quotients: List[Poly] = [dict() for _ in divisors]
    rem: Poly = {}
    key = order.key
    idx = range(len(divisors)) if strategy == "first" else range(len(divisors) - 1, -1, -1)
    while work:
        m = max(work, key=key)
        c = work[m]
        for i in idx:
            lt, ltc, g = divisors[i]
            if divides(lt, m):
                shift = tuple(a - b for a, b in zip(m, lt))
                qc = c / ltc
                quotients[i][shift] = quotients[i].get(shift, 0) + qc
                p_add_scaled(work, g, -qc, shift)
                break
        else:
            rem[m] = c
            del work[m]
    return quotients, rem


@dataclass
class GroebnerData:
    model: ModelSetup
    order: MonomialOrder
    jacobian: List[Poly]
    gb: List[Poly]
    leading: List[Exps]
    cofactors: List[List[Poly]]

    def divisors(self):
        return [(lt, g[lt], g) for lt, g in zip(self.leading, self.gb)]

    def as_super(self) -> List[SuperPolynomial]:
        return [from_dict(self.model.N, g) for g in self.gb]

    def check_cofactors(self) -> bool:
        for g, cof in zip(self.gb, self.cofactors):
            acc: Poly = {}
            for c, J in zip(cof, self.jacobian):
                if c and J:
                    p_add_scaled(acc, p_mul(c, J), Fraction(1))
            if acc != g:
                return False
        return True


def _spoly(f, g, lf, lg):
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    sf = tuple(a - b for a, b in zip(lcm, lf))
    sg = tuple(a - b for a, b in zip(lcm, lg))
    return sf, sg


def jacobian_groebner(model: ModelSetup, order: MonomialOrder | None = None) -> GroebnerData:
    """Buchberger's algorithm on (dS/dq_1, ..., dS/dq_N), tracking cofactors."""
    order = order or model_order(model)
    N = model.N
    jac = [to_dict(d) for d in model.grad_S()]
    polys: List[Poly] = []
    cofs: List[List[Poly]] = []
    lts: List[Exps] = []
    zero_row = lambda: [dict() for _ in range(N)]

    def add(p: Poly, cof: List[Poly]) -> None:
        lt = order.leading(p)
        c = p[lt]
        inv = 1 / c
        polys.append({e: v * inv for e, v in p.items()})
        cofs.append([{e: v * inv for e, v in row.items()} for row in cof])
        lts.append(lt)

    def reduce_tracked(p: Poly, cof: List[Poly]):
        divs = [(lt, Fraction(1), g) for lt, g in zip(lts, polys)]
        qs, rem = divide(p, divs, order)
        cof = [dict(r) for r in cof]
        for q, gc in zip(qs, cofs):
            if not q:
                continue
            for i in range(N):
                if gc[i]:
                    p_add_scaled(cof[i], p_mul(q, gc[i]), Fraction(-1))
        return rem, cof

    for i, J in enumerate(jac):
        if not J:
            continue
        row = zero_row()
        row[i] = {(0,) * N: Fraction(1)}
        rem, row = reduce_tracked(J, row)
        if rem:
            add(rem, row)

    pairs = [(i, j) for j in range(len(polys)) for i in range(j)]
    while pairs:
        pairs.sort(key=lambda ij: order.key(tuple(max(a, b) for a, b in zip(lts[ij[0]], lts[ij[1]]))))
        i, j = pairs.pop(0)
        li, lj = lts[i], lts[j]
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading terms
        si, sj = _spoly(polys[i], polys[j], li, lj)
        sp: Poly = {}
        p_add_scaled(sp, polys[i], Fraction(1), si)
        p_add_scaled(sp, polys[j], Fraction(-1), sj)
        row = zero_row()
        for r in range(N):
            if cofs[i][r]:
                p_add_scaled(row[r], cofs[i][r], Fraction(1), si)
            if cofs[j][r]:
                p_add_scaled(row[r], cofs[j][r], Fraction(-1), sj)
        rem, row = reduce_tracked(sp, row)
        if rem:
            add(rem, row)
            new = len(polys) - 1
            pairs.extend((a, new) for a in range(new))

    # minimalize, then inter-reduce tails
    keep = []
    for i, lt in enumerate(lts):
        dominated = any(
            j != i and divides(lts[j], lt) and (lts[j] != lt or j < i) for j in range(len(lts))
        )
        if not dominated:
            keep.append(i)
    keep.sort(key=lambda i: order.key(lts[i]))
    polys = [polys[i] for i in keep]
    cofs = [cofs[i] for i in keep]
    lts = [lts[i] for i in keep]
    final_p, final_c = [], []
    for i in range(len(polys)):
        others = [(lts[j], Fraction(1), polys[j]) for j in range(len(polys)) if j != i]
        oc = [cofs[j] for j in range(len(polys)) if j != i]
        qs, rem = divide(polys[i], others, order)
        row = [dict(r) for r in cofs[i]]
        for q, gc in zip(qs, oc):
            if q:
                for r in range(N):
                    if gc[r]:
                        p_add_scaled(row[r], p_mul(q, gc[r]), Fraction(-1))
        final_p.append(rem)
        final_c.append(row)
    return GroebnerData(model=model, order=order, jacobian=jac, gb=final_p,
                        leading=[order.leading(g) for g in final_p], cofactors=final_c)


# charge-zero basis


@dataclass
class BasisData:
    model: ModelSetup
    monomials: List[Exps]
    weights: List[int]
    index: Dict[Exps, int] = field(repr=False)

    @property
    def mu(self) -> int:
        return len(self.monomials)

    @property
    def min_index(self) -> int:
        return 0

    @property
    def max_index(self) -> int:
        return len(self.monomials) - 1

    def element(self, i: int) -> SuperPolynomial:
        return SuperPolynomial.monomial(self.model.N, self.monomials[i])

    def elements(self) -> List[SuperPolynomial]:
        return [self.element(i) for i in range(self.mu)]

    def by_weight(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, w in enumerate(self.weights):
            out.setdefault(w, []).append(i)
        return out

    def labels(self) -> List[str]:
        return [self.model.render(self.element(i)) for i in range(self.mu)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def charge_zero_basis(gbd: GroebnerData, cap: int = DEFAULT_CAP) -> BasisData:
    """Standard monomials of charge zero, enumerated weight level by weight level.

    A standard monomial of weight w+1 always has a standard divisor of weight w
    and charge zero (drop one y_j and d_j of the x's), so the first empty level
    ends the enumeration.
    """
    model = gbd.model
    k, n = model.k, model.n
    lts = gbd.leading
    found: List[Exps] = []
    weights: List[int] = []
    w = 0
    while True:
        level = []
        for beta in _compositions(w, k):
            D = sum(b * d for b, d in zip(beta, model.degrees))
            for xs in combinations_with_replacement(range(n + 1), D):
                e = list(beta) + [0] * (n + 1)
                for j in xs:
                    e[k + j] += 1
                e = tuple(e)
                if not any(divides(lt, e) for lt in lts):
                    level.append(e)
                    if len(found) + len(level) > cap:
                        raise NotFiniteDimensional(
                            f"more than {cap} charge-zero standard monomials; is the input smooth?")
        if not level:
            break
        level.sort(key=gbd.order.key)
        found.extend(level)
        weights.extend([w] * len(level))
        w += 1
    top = max(weights) if weights else -1
    if not found or found[0] != (0,) * model.N or weights.count(0) != 1 or weights.count(top) != 1:
        raise InvalidBasis("charge-zero quotient lacks a unique unit and top element")
    if top != n - k:
        raise InvalidBasis(f"top weight {top} differs from n-k = {n - k}")
    return BasisData(model=model, monomials=found, weights=weights,
                     index={e: i for i, e in enumerate(found)})


# the basic reduction step


@dataclass(frozen=True)
class ReductionOutcome:
    coefficients: Tuple[Fraction, ...]
    lam: SuperPolynomial
    delta_lam: SuperPolynomial


class Reducer:
    """Bundles model, Groebner data and basis; performs p = sum m u + Q_S(lambda)."""

    def __init__(self, model: ModelSetup, gbd: GroebnerData, basis: BasisData, strategy: str = "first"):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown division strategy {strategy!r}")
        self.model = model
        self.gbd = gbd
        self.basis = basis
        self.strategy = strategy
        self._divs = gbd.divisors()
        self._cache: Dict[SuperPolynomial, ReductionOutcome] = {}
        self._coef_cache: Dict[SuperPolynomial, Tuple[Fraction, ...]] = {}
        self.grad = model.grad_S()

    @property
    def mu(self) -> int:
        return self.basis.mu

    def with_strategy(self, strategy: str) -> "Reducer":
        return Reducer(self.model, self.gbd, self.basis, strategy)

    def _check(self, p: SuperPolynomial) -> Poly:
        d = to_dict(p)
        bad = {self.model.term_charge(e, 0) for e in d} - {0}
        if bad:
            raise ChargeMismatch(f"reduction input has charge {sorted(bad)}, need 0")
        return d

    def _coefficients(self, rem: Poly) -> Tuple[Fraction, ...]:
        m = [Fraction(0)] * self.mu
        for e, c in rem.items():
            i = self.basis.index.get(e)
            if i is None:
                raise InvalidBasis(f"remainder monomial {e} is not a basis element")
            m[i] = c
        return tuple(m)

    def coefficients(self, p: SuperPolynomial) -> Tuple[Fraction, ...]:
        """Only the basis coefficients (skips the cofactor bookkeeping)."""
        hit = self._coef_cache.get(p)
        if hit is None:
            hit = self._cache[p].coefficients if p in self._cache else None
        if hit is None:
            _, rem = divide(self._check(p), self._divs, self.gbd.order, self.strategy)
            hit = self._coefficients(rem)
            self._coef_cache[p] = hit
        return hit

    def reduce(self, p: SuperPolynomial) -> ReductionOutcome:
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        N = self.model.N
        qs, rem = divide(self._check(p), self._divs, self.gbd.order, self.strategy)
        coeffs = self._coefficients(rem)
        lam_terms: Dict[Tuple[Exps, int], Fraction] = {}
        for i in range(N):
            acc: Poly = {}
            for q, cof in zip(qs, self.gbd.cofactors):
                if q and cof[i]:
                    p_add_scaled(acc, p_mul(q, cof[i]), Fraction(1))
            for e, c in acc.items():
                lam_terms[(e, 1 << i)] = c
        lam = SuperPolynomial(N, lam_terms, _clean=True)
        out = ReductionOutcome(coeffs, lam, apply_Delta(lam))
        self._cache[p] = out
        return out

    def combination(self, coeffs: Sequence) -> SuperPolynomial:
        out = SuperPolynomial.zero(self.model.N)
        for i, c in enumerate(coeffs):
            if c:
                out = out + self.basis.element(i).scale(c)
        return out


@dataclass
class Setup:
    """Everything downstream solvers need for one model."""

    model: ModelSetup
    gbd: GroebnerData
    basis: BasisData
    reducer: Reducer


def prepare(model: ModelSetup, strategy: str = "first", order: str = "grevlex",
            cap: int = DEFAULT_CAP) -> Setup:
    gbd = jacobian_groebner(model, model_order(model, order))
    basis = charge_zero_basis(gbd, cap)
    return Setup(model, gbd, basis, Reducer(model, gbd, basis, strategy))


def reduce_to_basis(p: SuperPolynomial, gbd: GroebnerData, basis: BasisData,
                    strategy: str = "first") -> ReductionOutcome:
    return Reducer(gbd.model, gbd, basis, strategy).reduce(p)

