"""Sparse exact arithmetic in the super-commutative algebra Q[q_1..q_N][eta_1..eta_N].

A term is keyed by ``(exps, mask)``: ``exps`` is the tuple of q-exponents and
bit ``i`` of ``mask`` says whether eta_i is present.  Odd variables are always
stored in ascending order, so every sign is resolved when the term is built.

Internally everything is 0-based: q_0..q_{k-1} are y_1..y_k and q_k..q_{N-1}
are x_0..x_n.  Names shown to users are the 1-based ``y1..yk``, ``x0..xn`` and
``e1..eN``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, Iterator, Tuple, Union

from .errors import ParseError

Scalar = Fraction
Key = Tuple[Tuple[int, ...], int]
Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def eta_product_sign(a: int, b: int) -> int:
    """Sign of (eta-monomial a)(eta-monomial b) once rewritten in ascending order."""
    if a & b:
        return 0
    swaps = 0
    j = 0
    bb = b
    while bb:
        if bb & 1:
            swaps += bin(a >> (j + 1)).count("1")
        bb >>= 1
        j += 1
    return -1 if swaps & 1 else 1


def _below(mask: int, i: int) -> int:
    return bin(mask & ((1 << i) - 1)).count("1")


def _bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def format_scalar(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class SuperPolynomial:
    """Immutable sparse element of the super-commutative algebra."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Dict[Key, Number] | None = None, _clean: bool = False):
        self.nvars = nvars
        if terms is None:
            self._terms: Dict[Key, Fraction] = {}
        elif _clean:
            self._terms = terms
        else:
            self._terms = {k: Fraction(v) for k, v in terms.items() if v != 0}
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "SuperPolynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c: Number) -> "SuperPolynomial":
        if c == 0:
            return cls(nvars)
        return cls(nvars, {((0,) * nvars, 0): Fraction(c)}, _clean=True)

    @classmethod
    def one(cls, nvars: int) -> "SuperPolynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, nvars: int, exps: Iterable[int], mask: int = 0, coef: Number = 1) -> "SuperPolynomial":
        exps = tuple(exps)
        if len(exps) != nvars:
            raise ValueError("exponent vector has wrong length")
        if coef == 0:
            return cls(nvars)
        return cls(nvars, {(exps, mask): Fraction(coef)}, _clean=True)

    @classmethod
    def q(cls, nvars: int, i: int) -> "SuperPolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(nvars, e)

    @classmethod
    def eta(cls, nvars: int, i: int) -> "SuperPolynomial":
        return cls.monomial(nvars, (0,) * nvars, 1 << i)

    # container protocol
    def items(self):
        return self._terms.items()

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: _display_key(kv[0]))

    def coefficient(self, exps: Tuple[int, ...], mask: int = 0) -> Fraction:
        return self._terms.get((tuple(exps), mask), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperPolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == SuperPolynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"SuperPolynomial({render_generic(self)!r})"

    # linear structure
    def _coerce(self, other) -> "SuperPolynomial":
        if isinstance(other, SuperPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("mismatched variable counts")
            return other
        if isinstance(other, (int, Fraction)):
            return SuperPolynomial.constant(self.nvars, other)
        raise TypeError(f"cannot combine SuperPolynomial with {type(other).__name__}")

    def __add__(self, other) -> "SuperPolynomial":
        other = self._coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k)
            if s is None:
                out[k] = v
            else:
                s += v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return SuperPolynomial(self.nvars, out, _clean=True)

    __radd__ = __add__

    def __neg__(self) -> "SuperPolynomial":
        return SuperPolynomial(self.nvars, {k: -v for k, v in self._terms.items()}, _clean=True)

    def __sub__(self, other) -> "SuperPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "SuperPolynomial":
        return self._coerce(other) - self

    def scale(self, c: Number) -> "SuperPolynomial":
        if c == 0:
            return SuperPolynomial(self.nvars)
        c = Fraction(c)
        if c == 1:
            return self
        return SuperPolynomial(self.nvars, {k: v * c for k, v in self._terms.items()}, _clean=True)

    def __mul__(self, other) -> "SuperPolynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return SuperPolynomial(self.nvars)
        out: Dict[Key, Fraction] = {}
        for (e1, m1), c1 in self._terms.items():
            for (e2, m2), c2 in other._terms.items():
                if m1 & m2:
                    continue
                sign = eta_product_sign(m1, m2) if (m1 and m2) else 1
                key = (tuple(a + b for a, b in zip(e1, e2)), m1 | m2)
                c = c1 * c2 if sign > 0 else -(c1 * c2)
                s = out.get(key)
                if s is None:
                    out[key] = c
                else:
                    s += c
                    if s:
                        out[key] = s
                    else:
                        del out[key]
        return SuperPolynomial(self.nvars, out, _clean=True)

    def __rmul__(self, other) -> "SuperPolynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "SuperPolynomial":
        out = SuperPolynomial.one(self.nvars)
        for _ in range(n):
            out = out * self
        return out

    # structure queries
    def is_eta_free(self) -> bool:
        return all(m == 0 for (_, m) in self._terms)

    def degrees(self) -> set:
        """Set of cohomological degrees (minus the eta count) present."""
        return {-bin(m).count("1") for (_, m) in self._terms}

    def cohomological_degree(self) -> int | None:
        """The degree when homogeneous, None for zero, ValueError if mixed."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("element is not homogeneous in cohomological degree")
        return ds.pop()

    def filter(self, pred: Callable[[Tuple[int, ...], int], bool]) -> "SuperPolynomial":
        return SuperPolynomial(self.nvars, {k: v for k, v in self._terms.items() if pred(*k)}, _clean=True)

    def parts_by(self, grading: Callable[[Tuple[int, ...], int], object]) -> Dict[object, "SuperPolynomial"]:
        buckets: Dict[object, Dict[Key, Fraction]] = {}
        for k, v in self._terms.items():
            buckets.setdefault(grading(*k), {})[k] = v
        return {g: SuperPolynomial(self.nvars, d, _clean=True) for g, d in buckets.items()}

    def degree_parts(self) -> Dict[int, "SuperPolynomial"]:
        return self.parts_by(lambda e, m: -bin(m).count("1"))

    def max_total_degree(self) -> int:
        return max((sum(e) for (e, _) in self._terms), default=-1)

    # derivations
    def diff_q(self, i: int) -> "SuperPolynomial":
        out: Dict[Key, Fraction] = {}
        for (e, m), c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[(tuple(ne), m)] = c * e[i]
        return SuperPolynomial(self.nvars, out, _clean=True)

    def diff_eta(self, i: int) -> "SuperPolynomial":
        """Left derivative by eta_i; passing each earlier eta costs a sign."""
        bit = 1 << i
        out: Dict[Key, Fraction] = {}
        for (e, m), c in self._terms.items():
            if m & bit:
                out[(e, m ^ bit)] = -c if _below(m, i) & 1 else c
        return SuperPolynomial(self.nvars, out, _clean=True)

    def substitute_scalar(self, f: Callable[[Fraction], Fraction]) -> "SuperPolynomial":
        return SuperPolynomial(self.nvars, {k: f(v) for k, v in self._terms.items() if f(v)}, _clean=True)


def _display_key(key: Key):
    e, m = key
    return (-sum(e), tuple(-x for x in e), bin(m).count("1"), m)


def apply_Delta(a: SuperPolynomial, koszul: bool = True) -> SuperPolynomial:
    """The BV operator sum_i d/dq_i d/deta_i.

    ``koszul=False`` drops the sign picked up by the odd derivative; that
    operator is not a differential and exists only as a negative control.
    """
    out: Dict[Key, Fraction] = {}
    for (e, m), c in a.items():
        mm = m
        i = 0
        while mm:
            if mm & 1 and e[i]:
                ne = list(e)
                ne[i] -= 1
                key = (tuple(ne), m ^ (1 << i))
                v = c * e[i]
                if koszul and _below(m, i) & 1:
                    v = -v
                s = out.get(key, 0) + v
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
            mm >>= 1
            i += 1
    return SuperPolynomial(a.nvars, out, _clean=True)


def gradient(F: SuperPolynomial) -> list:
    return [F.diff_q(i) for i in range(F.nvars)]


def apply_Q(F: SuperPolynomial, a: SuperPolynomial, grad: list | None = None) -> SuperPolynomial:
    """Q_F(a) = sum_i (dF/dq_i) d/deta_i a for an even polynomial F."""
    if grad is None:
        if not F.is_eta_free():
            raise ValueError("Q_F needs an even, eta-free F")
        grad = gradient(F)
    out = SuperPolynomial.zero(a.nvars)
    present = 0
    for (_, m) in a._terms:
        present |= m
    for i in _bits(present):
        if grad[i]:
            out = out + grad[i] * a.diff_eta(i)
    return out


def apply_K(F: SuperPolynomial, a: SuperPolynomial, grad: list | None = None) -> SuperPolynomial:
    return apply_Q(F, a, grad) + apply_Delta(a)


def ell2(op: Callable[[SuperPolynomial], SuperPolynomial], a: SuperPolynomial, b: SuperPolynomial) -> SuperPolynomial:
    """op(ab) - op(a)b - (-1)^|a| a op(b), split over the degree parts of a."""
    out = op(a * b) - op(a) * b
    for d, part in a.degree_parts().items():
        term = part * op(b)
        out = out - term if d % 2 == 0 else out + term
    return out


# naming, parsing and rendering


@dataclass(frozen=True)
class Variables:
    """Names for the even and odd generators of a model with k equations in P^n."""

    n: int
    k: int

    @property
    def N(self) -> int:
        return self.n + self.k + 1

    @property
    def q_names(self) -> list:
        return [f"y{i + 1}" for i in range(self.k)] + [f"x{j}" for j in range(self.n + 1)]

    def y(self, i: int) -> int:
        """Internal slot of y_i (1-based name)."""
        return i - 1

    def x(self, j: int) -> int:
        return self.k + j

    def lookup(self, name: str) -> Tuple[str, int]:
        m = re.fullmatch(r"([xye])(\d+)", name)
        if not m:
            raise ParseError(f"unknown variable {name!r}")
        kind, idx = m.group(1), int(m.group(2))
        if kind == "x" and 0 <= idx <= self.n:
            return "q", self.k + idx
        if kind == "y" and 1 <= idx <= self.k:
            return "q", idx - 1
        if kind == "e" and 1 <= idx <= self.N:
            return "e", idx - 1
        raise ParseError(f"variable {name!r} out of range")


def _parse_number(tok: str) -> Fraction | None:
    if re.fullmatch(r"\d+(/\d+)?", tok):
        num, _, den = tok.partition("/")
        if den and int(den) == 0:
            raise ParseError("zero denominator")
        return Fraction(int(num), int(den) if den else 1)
    return None


def parse_poly(text: str, names: Variables) -> SuperPolynomial:
    """Parse the polynomial text grammar, e.g. ``3*y1*x0^2 - 1/2*x1*e2``."""
    N = names.N
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial")
    if s == "0":
        return SuperPolynomial.zero(N)
    pos = 0
    out = SuperPolynomial.zero(N)
    first = True
    while pos < len(s):
        m = re.match(r"([+-]?)([^+-]+)", s[pos:])
        if not m or (not first and not m.group(1)):
            raise ParseError(f"cannot parse near {s[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2)
        pos += m.end()
        first = False
        term = SuperPolynomial.constant(N, sign)
        for factor in body.split("*"):
            if not factor:
                raise ParseError(f"empty factor in {body!r}")
            num = _parse_number(factor)
            if num is not None:
                term = term.scale(num)
                continue
            base, caret, exp = factor.partition("^")
            if caret and not exp.isdigit():
                raise ParseError(f"bad exponent in {factor!r}")
            power = int(exp) if exp else 1
            kind, idx = names.lookup(base)
            gen = SuperPolynomial.q(N, idx) if kind == "q" else SuperPolynomial.eta(N, idx)
            for _ in range(power):
                term = term * gen
        out = out + term
    return out


def render_monomial(exps: Tuple[int, ...], mask: int, names: Variables | None) -> str:
    qn = names.q_names if names else [f"q{i + 1}" for i in range(len(exps))]
    parts = []
    for i, e in enumerate(exps):
        if e == 1:
            parts.append(qn[i])
        elif e > 1:
            parts.append(f"{qn[i]}^{e}")
    for i in _bits(mask):
        parts.append(f"e{i + 1}")
    return "*".join(parts) if parts else "1"


def render(p: SuperPolynomial, names: Variables | None = None) -> str:
    if p.is_zero():
        return "0"
    pieces = []
    for (e, m), c in p.sorted_items():
        mono = render_monomial(e, m, names)
        mag = abs(c)
        if mono == "1":
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def render_generic(p: SuperPolynomial) -> str:
    return render(p, None)
