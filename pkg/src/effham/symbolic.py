"""Exact rational arithmetic and Laurent polynomials over a fixed symbol set.

Coefficients are :class:`fractions.Fraction`. Polynomials are immutable maps
from exponent vectors over ``SYMBOLS`` to non-zero coefficients. Only ``M``
may carry a negative exponent.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

ExactScalar = Fraction

SYMBOLS = ("x0", "p0", "hbar", "beta", "M", "omega", "g")
_INDEX = {s: i for i, s in enumerate(SYMBOLS)}
_M = _INDEX["M"]
_ZERO_EXP = (0,) * len(SYMBOLS)

Scalar = Union[int, Fraction]


class UnboundSymbolError(KeyError):
    def __init__(self, symbol: str):
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self):
        return f"symbol {self.symbol!r} is not bound"


def _check_exponents(exp: tuple[int, ...]) -> None:
    for i, e in enumerate(exp):
        if e < 0 and i != _M:
            raise ValueError(f"negative exponent on {SYMBOLS[i]} (only M may be inverted)")


def _sort_key(exp: tuple[int, ...]):
    # graded lex: higher total degree first, then lexicographically larger exponents
    return (-sum(exp), tuple(-e for e in exp))


class Poly:
    """Immutable multivariate Laurent-in-M polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != len(SYMBOLS):
                    raise ValueError("exponent vector has wrong length")
                c = Fraction(c)
                if c:
                    _check_exponents(exp)
                    clean[exp] = clean.get(exp, 0) + c
        self._terms = {e: c for e, c in sorted(clean.items(), key=lambda t: _sort_key(t[0])) if c}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls({_ZERO_EXP: c})

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> "Poly":
        if name not in _INDEX:
            raise KeyError(f"unknown symbol {name!r}")
        exp = [0] * len(SYMBOLS)
        exp[_INDEX[name]] = power
        return cls({tuple(exp): 1})

    @classmethod
    def monomial(cls, coeff: Scalar = 1, **powers: int) -> "Poly":
        exp = [0] * len(SYMBOLS)
        for name, e in powers.items():
            exp[_INDEX[name]] = e
        return cls({tuple(exp): coeff})

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        # terms already sorted-agnostic, nonzero and validated
        p = cls.__new__(cls)
        p._terms = {e: terms[e] for e in sorted(terms, key=_sort_key)}
        p._hash = None
        return p

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def degree_in(self, name: str) -> int:
        i = _INDEX[name]
        return max((e[i] for e in self._terms), default=0)

    def free_symbols(self) -> set[str]:
        return {SYMBOLS[i] for e in self._terms for i, k in enumerate(e) if k}

    def coefficient_of(self, **powers: int) -> Fraction:
        exp = [0] * len(SYMBOLS)
        for name, e in powers.items():
            exp[_INDEX[name]] = e
        return self._terms.get(tuple(exp), Fraction(0))

    def collect(self, name: str) -> dict[int, "Poly"]:
        """Split into ``{power: coefficient poly}`` with respect to one symbol."""
        i = _INDEX[name]
        parts: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            parts.setdefault(k, {})[rest] = c
        return {k: Poly._raw(v) for k, v in sorted(parts.items())}

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly()
        return Poly._raw({e: v * c for e, v in self._terms.items()})

    def inverse_monomial(self) -> "Poly":
        """Inverse of a monomial; fails unless only ``M`` ends up inverted."""
        if len(self._terms) != 1:
            raise ValueError("only monomials can be inverted")
        (e, c), = self._terms.items()
        return Poly({tuple(-k for k in e): 1 / c})

    def substitute(self, name: str, value: "Poly | Scalar") -> "Poly":
        value = self._coerce(value)
        i = _INDEX[name]
        out = Poly()
        for k, rest in self.collect(name).items():
            if k < 0:
                out = out + rest * value.inverse_monomial() ** (-k)
            else:
                out = out + rest * value ** k
        return out

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation / printing ------------------------------------------------
    def evaluate(self, bindings: Mapping[str, float]) -> float:
        return poly_eval(self, bindings)

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            factors = [_render_coeff(c)]
            for name, k in zip(SYMBOLS, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    __str__ = render

    def __repr__(self):
        return f"Poly({self.render()!r})"

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Inverse of :meth:`render`."""
        text = text.strip()
        if text == "0":
            return cls()
        terms: dict = {}
        for chunk in text.split(" + "):
            factors = chunk.split(" * ")
            c = Fraction(factors[0])
            exp = [0] * len(SYMBOLS)
            for f in factors[1:]:
                m = _FACTOR_RE.fullmatch(f)
                if not m or m.group(1) not in _INDEX:
                    raise ValueError(f"bad factor {f!r}")
                exp[_INDEX[m.group(1)]] += int(m.group(2) or 1)
            terms[tuple(exp)] = terms.get(tuple(exp), 0) + c
        return cls(terms)


_FACTOR_RE = re.compile(r"([A-Za-z][A-Za-z0-9]*)(?:\^(-?\d+))?")


def _render_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def poly_eval(p: Poly, bindings: Mapping[str, float]) -> float:
    """Numeric value of ``p`` with symbols replaced by floats."""
    vals = []
    for e, c in p.items():
        v = float(c)
        for name, k in zip(SYMBOLS, e):
            if k:
                if name not in bindings:
                    raise UnboundSymbolError(name)
                v *= float(bindings[name]) ** k
        vals.append(v)
    return math.fsum(vals)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2:
        return Fraction(0)
    # sum_{k=0}^{n} C(n+1, k) B_k = 0
    acc = sum(math.comb(n + 1, k) * bernoulli(k) for k in range(n))
    return -acc / (n + 1)


def zeta_even_coeff(k: int) -> Fraction:
    """Rational r with zeta(2k) = r * pi^(2k)."""
    if k < 1:
        raise ValueError("zeta_even_coeff needs k >= 1")
    sign = 1 if k % 2 else -1
    return sign * bernoulli(2 * k) * 2 ** (2 * k - 1) / math.factorial(2 * k)


def poly_sum(polys: Iterable[Poly]) -> Poly:
    acc: dict = {}
    for p in polys:
        for e, c in p.items():
            acc[e] = acc.get(e, 0) + c
    return Poly._raw({e: c for e, c in acc.items() if c})
