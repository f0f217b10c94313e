"""Validated geometric input: k homogeneous equations in P^n and their Dwork potential."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Tuple

from .algebra import SuperPolynomial, Variables, gradient, parse_poly, render
from .errors import BadArity, NonCalabiYau, NotHomogeneous, ParseError


@dataclass(frozen=True)
class ModelSetup:
    n: int
    k: int
    degrees: Tuple[int, ...]
    generators: Tuple[SuperPolynomial, ...]
    S: SuperPolynomial
    charges: Tuple[int, ...]
    weights: Tuple[int, ...]
    c_X: int
    names: Variables = field(repr=False)

    @property
    def N(self) -> int:
        return self.n + self.k + 1

    def grad_S(self) -> list:
        return gradient(self.S)

    def term_charge(self, exps, mask) -> int:
        ch = self.charges
        c = sum(ch[i] * e for i, e in enumerate(exps) if e)
        i = 0
        while mask:
            if mask & 1:
                c -= ch[i]
            mask >>= 1
            i += 1
        return c

    def term_weight(self, exps, mask) -> int:
        wt = self.weights
        w = sum(wt[i] * e for i, e in enumerate(exps) if e)
        i = 0
        while mask:
            if mask & 1:
                w += 1 - wt[i]
            mask >>= 1
            i += 1
        return w

    def charges_of(self, p: SuperPolynomial) -> set:
        return {self.term_charge(e, m) for (e, m) in p._terms}

    def weights_of(self, p: SuperPolynomial) -> set:
        return {self.term_weight(e, m) for (e, m) in p._terms}

    def weight(self, p: SuperPolynomial) -> int | None:
        ws = self.weights_of(p)
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError("element is not weight-homogeneous")
        return ws.pop()

    def charge(self, p: SuperPolynomial) -> int | None:
        cs = self.charges_of(p)
        if not cs:
            return None
        if len(cs) > 1:
            raise ValueError("element is not charge-homogeneous")
        return cs.pop()

    def parse(self, text: str) -> SuperPolynomial:
        return parse_poly(text, self.names)

    def render(self, p: SuperPolynomial) -> str:
        return render(p, self.names)

    def euler_R(self) -> SuperPolynomial:
        """R = sum_i ch(q_i) q_i eta_i."""
        out = SuperPolynomial.zero(self.N)
        for i, c in enumerate(self.charges):
            e = [0] * self.N
            e[i] = 1
            out = out + SuperPolynomial.monomial(self.N, e, 1 << i, c)
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "generators": [render(g, self.names) for g in self.generators]}


def build_model(n: int, k: int, generators: Sequence[str]) -> ModelSetup:
    if not isinstance(n, int) or not isinstance(k, int) or n < 1 or k < 1 or k > n:
        raise BadArity(f"need 1 <= k <= n, got n={n}, k={k}")
    if len(generators) != k:
        raise BadArity(f"expected {k} generators, got {len(generators)}")
    names = Variables(n=n, k=k)
    N = names.N
    gens = []
    degrees = []
    for text in generators:
        if not isinstance(text, str):
            raise ParseError("generators must be strings")
        g = parse_poly(text, names)
        if g.is_zero():
            raise NotHomogeneous(f"generator {text!r} is zero")
        for (e, m) in g._terms:
            if m or any(e[i] for i in range(k)):
                raise ParseError(f"generator {text!r} may only use x0..x{n}")
        degs = {sum(e) for (e, _) in g._terms}
        if len(degs) != 1:
            raise NotHomogeneous(f"generator {text!r} mixes degrees {sorted(degs)}")
        d = degs.pop()
        if d < 1:
            raise NotHomogeneous(f"generator {text!r} has degree 0")
        gens.append(g)
        degrees.append(d)
    c_X = sum(degrees) - (n + 1)
    if c_X != 0:
        raise NonCalabiYau(f"background charge is {c_X}, need 0")
    charges = tuple([-d for d in degrees] + [1] * (n + 1))
    weights = tuple([1] * k + [0] * (n + 1))
    S = SuperPolynomial.zero(N)
    for i, g in enumerate(gens):
        S = S + SuperPolynomial.q(N, i) * g
    return ModelSetup(n=n, k=k, degrees=tuple(degrees), generators=tuple(gens), S=S,
                      charges=charges, weights=weights, c_X=c_X, names=names)


def load_model(path: str | Path) -> ModelSetup:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not {"n", "k", "generators"} <= doc.keys():
        raise ParseError('model document needs "n", "k" and "generators"')
    return build_model(doc["n"], doc["k"], list(doc["generators"]))


FERMAT_CUBIC = dict(n=2, k=1, generators=["x0^3+x1^3+x2^3"])
TWO_QUADRICS = dict(n=3, k=2, generators=["x0^2+x1^2+x2^2+x3^2", "x0^2+2*x1^2+3*x2^2+4*x3^2"])
FERMAT_QUARTIC = dict(n=3, k=1, generators=["x0^4+x1^4+x2^4+x3^4"])

EXAMPLES = {"cubic": FERMAT_CUBIC, "quadrics": TWO_QUADRICS, "quartic": FERMAT_QUARTIC}


def example(name: str) -> ModelSetup:
    return build_model(**EXAMPLES[name])

