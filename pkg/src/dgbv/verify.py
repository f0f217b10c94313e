"""Randomized property suites for the dGBV structure of a model.

Every suite is a pure function of the model and the config: samples come from
a private ``random.Random(seed)`` stream, so equal seeds give identical reports.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .algebra import SuperPolynomial, apply_Delta, apply_Q, ell2
from .groebner import Setup, prepare
from .model import ModelSetup, example

ALL_SUITES = ("differentials", "dgbv", "weak_lemma", "concentration", "grading", "isomorphism")


@dataclass
class SuiteConfig:
    model: str = "cubic"
    seed: int = 1
    samples: int = 50
    max_y: int = 2  # bound on the total y-degree of a sample monomial
    max_terms: int = 3
    max_eta: int = 2
    suites: Tuple[str, ...] = ALL_SUITES
    corrupt_delta: bool = False  # drop the Koszul sign in Delta (negative control)


class Sampler:
    """Random sparse elements, homogeneous in charge, weight and cohomological degree."""

    def __init__(self, model: ModelSetup, rng: random.Random, max_y: int = 2, max_terms: int = 3):
        self.model = model
        self.rng = rng
        self.max_y = max_y
        self.max_terms = max_terms
        self.y_slots = list(range(model.k))
        self.x_slots = list(range(model.k, model.N))

    def monomial(self, charge: int, n_eta: int, y_total: int | None = None):
        """One monomial of the given charge and number of odd variables, or None."""
        m = self.model
        rng = self.rng
        mask = 0
        for i in rng.sample(range(m.N), n_eta):
            mask |= 1 << i
        e = [0] * m.N
        yt = rng.randint(0, self.max_y) if y_total is None else y_total
        for _ in range(yt):
            e[rng.choice(self.y_slots)] += 1
        partial = m.term_charge(tuple(e), mask)
        need = charge - partial
        if need < 0:
            return None
        for _ in range(need):
            e[rng.choice(self.x_slots)] += 1
        return tuple(e), mask

    def element(self, charge: int = 0, n_eta: int = 0, tries: int = 200) -> SuperPolynomial:
        """Homogeneous in charge and degree; weight-homogeneous too (fixed y-degree and odd pattern weight)."""
        m = self.model
        rng = self.rng
        terms: Dict = {}
        target_w = None
        for _ in range(tries):
            if len(terms) >= rng.randint(1, self.max_terms):
                break
            mono = self.monomial(charge, n_eta)
            if mono is None:
                continue
            w = m.term_weight(*mono)
            if target_w is None:
                target_w = w
            if w != target_w:
                continue
            c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2]))
            terms[mono] = terms.get(mono, 0) + c
        return SuperPolynomial(m.N, terms)

    def any_element(self, max_eta: int = 2) -> SuperPolynomial:
        charge = self.rng.randint(-2, 3)
        return self.element(charge, self.rng.randint(0, max_eta))


def _degree(p: SuperPolynomial) -> int:
    d = p.cohomological_degree()
    return 0 if d is None else d


def _record(rep: dict, name: str, ok: bool, witness=None, render=None) -> None:
    r = rep.setdefault(name, {"passed": True, "checked": 0, "counterexample": None})
    r["checked"] += 1
    if not ok and r["passed"]:
        r["passed"] = False
        if witness is not None:
            r["counterexample"] = [render(w) if render else str(w) for w in witness]


def run_suite(cfg: SuiteConfig, setup: Setup | None = None) -> dict:
    unknown = set(cfg.suites) - set(ALL_SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}")
    if not cfg.suites:
        return {}
    model = setup.model if setup is not None else example(cfg.model)
    S = model.S
    grad = model.grad_S()
    render = model.render

    def Delta(a):
        return apply_Delta(a, koszul=not cfg.corrupt_delta)

    def Q(a):
        return apply_Q(S, a, grad)

    def K(a):
        return Q(a) + Delta(a)

    report: Dict[str, dict] = {}
    for suite in ALL_SUITES:
        if suite not in cfg.suites:
            continue
        rng = random.Random(f"{cfg.seed}:{suite}")
        smp = Sampler(model, rng, cfg.max_y, cfg.max_terms)
        rep: Dict[str, dict] = {}
        if suite == "differentials":
            for _ in range(cfg.samples):
                a = smp.any_element(cfg.max_eta + 1)
                _record(rep, "Q_squared", Q(Q(a)).is_zero(), [a], render)
                _record(rep, "Delta_squared", Delta(Delta(a)).is_zero(), [a], render)
                _record(rep, "K_squared", K(K(a)).is_zero(), [a], render)
                _record(rep, "anticommute", (Q(Delta(a)) + Delta(Q(a))).is_zero(), [a], render)
        elif suite == "dgbv":
            _dgbv_suite(rep, smp, cfg, Delta, K, render)
        elif suite == "weak_lemma":
            st = setup or prepare(model)
            _weak_lemma_suite(rep, smp, cfg, st, Q, Delta, render)
        elif suite == "concentration":
            R = model.euler_R()
            for _ in range(10 * cfg.samples):
                if rep.get("K_closed_is_exact", {}).get("checked", 0) >= cfg.samples:
                    break
                lam = 0
                while lam == 0:
                    lam = rng.randint(-3, 3)
                g = smp.element(lam, rng.randint(0, cfg.max_eta))
                f = K(g)
                if f.is_zero():
                    continue
                ok = K(f * R) == f.scale(lam * (-1) ** _degree(f))
                _record(rep, "K_closed_is_exact", ok, [g], render)
        elif suite == "grading":
            _grading_suite(rep, smp, cfg, model, Q, Delta, render)
        elif suite == "isomorphism":
            st = setup or prepare(model)
            _isomorphism_suite(rep, smp, cfg, st, K, render)
        report[suite] = rep
    return report


def _dgbv_suite(rep, smp: Sampler, cfg: SuiteConfig, Delta, K, render) -> None:
    def br(a, b):
        return ell2(Delta, a, b)

    def brK(a, b):
        return ell2(K, a, b)

    def sgn(e):
        return -1 if e % 2 else 1

    for _ in range(cfg.samples):
        a, b, c = (smp.element(smp.rng.randint(-1, 2), smp.rng.randint(0, cfg.max_eta)) for _ in range(3))
        da, db = _degree(a), _degree(b)
        _record(rep, "bracket_Q_independent", br(a, b) == brK(a, b), [a, b], render)
        _record(rep, "symmetry", br(a, b) == br(b, a).scale(sgn(da * db)), [a, b], render)
        lhs = br(a, br(b, c))
        rhs = br(br(a, b), c).scale(sgn(da + 1)) + br(b, br(a, c)).scale(sgn((da + 1) * (db + 1)))
        _record(rep, "jacobi", lhs == rhs, [a, b, c], render)
        lhs = br(a, b * c)
        rhs = br(a, b) * c + (b * br(a, c)).scale(sgn((da + 1) * db))
        _record(rep, "leibniz", lhs == rhs, [a, b, c], render)
        lhs = K(brK(a, b))
        rhs = -brK(K(a), b) - brK(a, K(b)).scale(sgn(da))
        _record(rep, "differential_compatibility", lhs == rhs, [a, b], render)
        _record(rep, "commutativity", a * b == (b * a).scale(sgn(da * db)), [a, b], render)


def _weak_lemma_suite(rep, smp: Sampler, cfg: SuiteConfig, st: Setup, Q, Delta, render) -> None:
    model = st.model
    R = model.euler_R()
    u = st.basis.elements()
    for rho, e in enumerate(u):
        _record(rep, "Delta_of_R_times_basis", Delta(R * e).is_zero(), [e], render)
    for _ in range(10 * cfg.samples):
        if rep.get("Delta_of_closed_is_exact", {}).get("checked", 0) >= cfg.samples:
            break
        w = smp.element(0, 2)
        f = Q(w)
        for rho in range(st.basis.mu):
            c = smp.rng.randint(-2, 2)
            if c:
                f = f + (R * u[rho]).scale(c)
        if f.is_zero():
            continue
        ok = Q(f).is_zero() and not any(st.reducer.coefficients(Delta(f)))
        _record(rep, "Delta_of_closed_is_exact", ok, [f], render)


def _grading_suite(rep, smp: Sampler, cfg: SuiteConfig, model: ModelSetup, Q, Delta, render) -> None:
    """Q_S keeps charge and weight; Delta keeps charge and lowers weight by one; both raise degree."""
    for _ in range(cfg.samples):
        a = smp.element(smp.rng.randint(-2, 3), smp.rng.randint(1, cfg.max_eta + 1))
        if a.is_zero():
            continue
        ch, wt, dg = model.charges_of(a), model.weights_of(a), a.degrees()
        for name, img, shift_w in (("Q", Q(a), 0), ("Delta", Delta(a), -1)):
            if img.is_zero():
                continue
            ok = (model.charges_of(img) == ch and model.weights_of(img) == {w + shift_w for w in wt}
                  and img.degrees() == {d + 1 for d in dg})
            _record(rep, f"{name}_grading", ok, [a], render)


def _isomorphism_suite(rep, smp: Sampler, cfg: SuiteConfig, st: Setup, K, render) -> None:
    """x = sum c u + K_S(Lambda) for even charge-zero x, with Lambda from iterated reductions."""
    for _ in range(cfg.samples):
        x = smp.element(0, 0)
        if not x.is_zero():
            coeffs, lam = decompose_even(st, x)
            rebuilt = st.reducer.combination(coeffs) + K(lam)
            _record(rep, "decomposition", rebuilt == x, [x], render)
        g = smp.element(0, 1)
        if not g.is_zero():
            coeffs, _ = decompose_even(st, K(g))
            _record(rep, "exact_has_zero_class", not any(coeffs), [g], render)


def decompose_even(st: Setup, x: SuperPolynomial, max_steps: int = 64):
    """Write x = sum_rho c_rho u_rho + K_S(Lambda); each step lowers the weight of the remainder."""
    red = st.reducer
    total = [Fraction(0)] * st.basis.mu
    lam = SuperPolynomial.zero(st.model.N)
    rest = x
    for _ in range(max_steps):
        if rest.is_zero():
            return total, lam
        out = red.reduce(rest)
        total = [t + c for t, c in zip(total, out.coefficients)]
        lam = lam + out.lam
        rest = -out.delta_lam
    raise RuntimeError("decomposition did not terminate")
