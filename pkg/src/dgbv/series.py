"""Truncated series in t^alpha and Laurent polynomials in hbar.

A t-monomial is a sorted tuple of basis indices (a multiset), so t^0 t^0 t^1
is ``(0, 0, 1)``.  Symmetric tensors use the same keys.  Stored tensor values
are derivatives at t = 0; the series coefficient of t^abar is the value
divided by the product of multiplicity factorials.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterable, Iterator, Tuple

from .errors import OrderExceeded

MultiIndex = Tuple[int, ...]
INF = math.inf


def mi(*idx: int) -> MultiIndex:
    return tuple(sorted(idx))


def merge(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def remove_one(a: MultiIndex, alpha: int) -> MultiIndex:
    i = a.index(alpha)
    return a[:i] + a[i + 1:]


def multiplicity_factorial(a: MultiIndex) -> int:
    out = 1
    for c in Counter(a).values():
        out *= math.factorial(c)
    return out


def multi_indices(mu: int, size: int) -> Iterator[MultiIndex]:
    return combinations_with_replacement(range(mu), size)


def multi_indices_upto(mu: int, max_size: int, min_size: int = 0) -> Iterator[MultiIndex]:
    for s in range(min_size, max_size + 1):
        yield from multi_indices(mu, s)


class SymTensor:
    """Symmetric tensor: one stored value per sorted multi-index."""

    def __init__(self, entries: Dict[MultiIndex, object] | None = None, order: int = 0):
        self.entries: Dict[MultiIndex, object] = {}
        for k, v in (entries or {}).items():
            self.entries[tuple(sorted(k))] = v
        self.order = max([order] + [len(k) for k in self.entries])

    def __getitem__(self, key: Iterable[int]):
        return self.entries[tuple(sorted(key))]

    def get(self, key: Iterable[int], default=None):
        return self.entries.get(tuple(sorted(key)), default)

    def __setitem__(self, key: Iterable[int], value) -> None:
        key = tuple(sorted(key))
        self.entries[key] = value
        self.order = max(self.order, len(key))

    def __contains__(self, key) -> bool:
        return tuple(sorted(key)) in self.entries

    def keys(self):
        return self.entries.keys()

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)


class Series:
    """Finite part of R[[t]]((hbar)) with exactness bookkeeping.

    ``t_order``: coefficients are exact for t-degree <= t_order.
    ``h_max``: coefficients are exact for hbar-exponent <= h_max.
    Terms beyond either bound are never stored.
    """

    __slots__ = ("terms", "t_order", "h_max", "zero")

    def __init__(self, terms: Dict[Tuple[int, MultiIndex], object] | None, zero,
                 t_order=INF, h_max=INF):
        self.zero = zero
        self.t_order = t_order
        self.h_max = h_max
        self.terms: Dict[Tuple[int, MultiIndex], object] = {}
        for (r, t), c in (terms or {}).items():
            if c and len(t) <= t_order and r <= h_max:
                self.terms[(r, t)] = c

    @classmethod
    def const(cls, c, zero, t_order=INF, h_max=INF) -> "Series":
        return cls({(0, ()): c}, zero, t_order, h_max)

    @classmethod
    def hbar_poly(cls, coeffs: Dict[int, object], zero, t_order=INF, h_max=INF) -> "Series":
        return cls({(r, ()): c for r, c in coeffs.items()}, zero, t_order, h_max)

    def like(self, terms, t_order=None, h_max=None) -> "Series":
        return Series(terms, self.zero, self.t_order if t_order is None else t_order,
                      self.h_max if h_max is None else h_max)

    def copy_bounds(self, t_order=None, h_max=None) -> "Series":
        return self.like(dict(self.terms), t_order, h_max)

    def truncate(self, t_order=INF, h_max=INF) -> "Series":
        return self.like(self.terms, min(self.t_order, t_order), min(self.h_max, h_max))

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def min_h(self):
        return min((r for (r, _) in self.terms), default=INF)

    def max_h(self):
        return max((r for (r, _) in self.terms), default=-INF)

    def coefficient(self, r: int, t: MultiIndex = ()):
        return self.terms.get((r, tuple(t)), self.zero)

    def hbar_slice(self, r: int) -> "Series":
        return Series({(0, t): c for (rr, t), c in self.terms.items() if rr == r},
                      self.zero, self.t_order, INF)

    def at_t0(self) -> "Series":
        return Series({(r, ()): c for (r, t), c in self.terms.items() if not t},
                      self.zero, INF, self.h_max)

    def exponents(self) -> set:
        return {r for (r, _) in self.terms}

    def __repr__(self) -> str:
        return f"Series({len(self.terms)} terms, t_order={self.t_order}, h_max={self.h_max})"

    # arithmetic
    def __add__(self, other: "Series") -> "Series":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k)
            out[k] = v if s is None else s + v
        return self.like(out, min(self.t_order, other.t_order), min(self.h_max, other.h_max))

    def __neg__(self) -> "Series":
        return self.like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c) -> "Series":
        """Multiply every coefficient by a t- and hbar-independent factor."""
        return self.like({k: v * c for k, v in self.terms.items()})

    def lscale(self, c) -> "Series":
        return self.like({k: c * v for k, v in self.terms.items()})

    def map(self, f: Callable, zero=None) -> "Series":
        return Series({k: f(v) for k, v in self.terms.items()},
                      self.zero if zero is None else zero, self.t_order, self.h_max)

    def __mul__(self, other: "Series") -> "Series":
        t_order = min(self.t_order, other.t_order)
        lo_a, lo_b = self.min_h(), other.min_h()
        if not self.terms or not other.terms:
            h_max = INF
        else:
            h_max = min(self.h_max + lo_b, other.h_max + lo_a)
        out: Dict[Tuple[int, MultiIndex], object] = {}
        zero = self.zero if not isinstance(self.zero, Fraction) else other.zero
        for (r1, t1), c1 in self.terms.items():
            for (r2, t2), c2 in other.terms.items():
                r = r1 + r2
                if r > h_max or len(t1) + len(t2) > t_order:
                    continue
                key = (r, merge(t1, t2))
                v = c1 * c2
                s = out.get(key)
                out[key] = v if s is None else s + v
        return Series(out, zero, t_order, h_max)

    def shift_h(self, k: int) -> "Series":
        return self.like({(r + k, t): c for (r, t), c in self.terms.items()}, h_max=self.h_max + k)

    def d_t(self, alpha: int) -> "Series":
        out = {}
        for (r, t), c in self.terms.items():
            m = t.count(alpha)
            if m:
                out[(r, remove_one(t, alpha))] = c * m
        return self.like(out, t_order=self.t_order - 1)

    def d_hbar_inv(self) -> "Series":
        """Differentiation in the variable 1/hbar: hbar^r -> -r hbar^(r+1)."""
        out = {}
        for (r, t), c in self.terms.items():
            if r:
                out[(r + 1, t)] = c * (-r)
        return self.like(out, h_max=self.h_max + 1)

    def star(self) -> "Series":
        """hbar -> -hbar."""
        return self.like({(r, t): (-c if r % 2 else c) for (r, t), c in self.terms.items()})

    def same_as(self, other: "Series", t_order=None, h_max=None) -> bool:
        """Equality of the parts both sides know exactly (optionally capped further)."""
        T = min(self.t_order, other.t_order, INF if t_order is None else t_order)
        H = min(self.h_max, other.h_max, INF if h_max is None else h_max)
        a = {k: v for k, v in self.terms.items() if len(k[1]) <= T and k[0] <= H}
        b = {k: v for k, v in other.terms.items() if len(k[1]) <= T and k[0] <= H}
        return a == b


def tensor_to_series(T: SymTensor, order: int, zero, prefix: MultiIndex = (),
                     component: int | None = None, h: int = 0) -> Series:
    """Sum over abar of T[prefix + abar] t^abar / mult(abar)!, for |abar| <= order.

    With ``prefix`` this is the derivative of the generating series along the
    prefix indices.  ``component`` picks one entry of vector-valued tensors.
    """
    if order + len(prefix) > T.order:
        raise OrderExceeded(f"tensor is populated to size {T.order}, asked for {order + len(prefix)}")
    out = {}
    for key, v in T.items():
        if len(key) < len(prefix) or len(key) > order + len(prefix):
            continue
        rest = list(key)
        try:
            for p in prefix:
                rest.remove(p)
        except ValueError:
            continue
        if component is not None:
            v = v[component]
        if not v:
            continue
        out[(h, tuple(rest))] = v * Fraction(1, multiplicity_factorial(tuple(rest)))
    return Series(out, zero, order, INF)


def series_to_tensor(s: Series, r: int = 0) -> SymTensor:
    """Inverse of tensor_to_series on the hbar^r slice."""
    T = SymTensor(order=0 if s.t_order == INF else int(s.t_order))
    for (rr, t), c in s.terms.items():
        if rr == r:
            T[t] = c * multiplicity_factorial(t)
    return T


def series_multiply(a: Series, b: Series, order: int) -> Series:
    return (a * b).truncate(t_order=order)
