"""Textual Hamiltonians H(p, x) and their monomial vertices.

Grammar (whitespace ignored)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ['^' ['-'] atom]
    atom   := NUMBER | 'p' | 'x' | 'M' | 'w' | 'g' | 'hbar' | '(' expr ')'

Exponents must be integer constants. Division is only allowed by monomials
whose inverse keeps every symbol except ``M`` at a non-negative power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .symbolic import Poly

MAX_EXPONENT = 64

_IDENT_TO_SYMBOL = {"M": "M", "w": "omega", "g": "g", "hbar": "hbar"}
_SYMBOL_TO_IDENT = {"M": "M", "omega": "w", "g": "g", "hbar": "hbar"}


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class HamiltonianSyntaxError(ParseError):
    pass


class UnsupportedFormError(ParseError):
    pass


class FormError(ValueError):
    """Hamiltonian is not of the form p^2/2M + g V(x) where that is required."""


@dataclass(frozen=True)
class Vertex:
    coefficient: Poly
    p_power: int
    x_power: int

    def __post_init__(self):
        if self.coefficient.is_zero():
            raise ValueError("vertex coefficient must be non-zero")
        if self.p_power < 0 or self.x_power < 0:
            raise ValueError("negative field power")
        bad = self.coefficient.free_symbols() & {"x0", "p0", "beta"}
        if bad:
            raise ValueError(f"vertex coefficient may not contain {sorted(bad)}")

    @property
    def monomial(self) -> tuple[int, int]:
        return (self.p_power, self.x_power)

    @property
    def is_kinetic(self) -> bool:
        return self.p_power > 0 and self.x_power == 0

    @property
    def is_potential(self) -> bool:
        return self.p_power == 0


def _vertex_order(v: Vertex):
    if v.is_kinetic:
        return (0, v.p_power, 0)
    return (1, v.x_power, v.p_power)


@dataclass(frozen=True)
class Hamiltonian:
    vertices: tuple[Vertex, ...]
    standard_form: bool = field(init=False)

    def __post_init__(self):
        verts = tuple(sorted(self.vertices, key=_vertex_order))
        if len({v.monomial for v in verts}) != len(verts):
            raise ValueError("duplicate (p_power, x_power) among vertices")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "standard_form", _is_standard(verts))

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], Poly]) -> "Hamiltonian":
        return cls(tuple(Vertex(c, a, b) for (a, b), c in terms.items() if not c.is_zero()))

    def render(self) -> str:
        return render_hamiltonian(self)

    def classical(self) -> Poly:
        """H(p0, x0) as a polynomial."""
        out = Poly()
        for v in self.vertices:
            out = out + v.coefficient * Poly.monomial(p0=v.p_power, x0=v.x_power)
        return out

    def weak_coupling_split(self) -> tuple[Poly, dict[int, Poly]]:
        """Return ``(coupling, V)`` with the potential written as coupling * V(x).

        ``V`` maps x-powers to g-free coefficients. Raises :class:`FormError`
        if the Hamiltonian is not p^2/2M + g V(x).
        """
        split = _coupling_split(self.vertices)
        if split is None:
            raise FormError("Hamiltonian is not of standard form p^2/2M + g V(x)")
        return split


def vertices(h: Hamiltonian) -> list[Vertex]:
    return list(h.vertices)


_KINETIC = Poly.monomial(Fraction(1, 2), M=-1)


def _coupling_split(verts):
    kin = [v for v in verts if not v.is_potential]
    pot = [v for v in verts if v.is_potential]
    if len(kin) != 1 or kin[0].monomial != (2, 0) or kin[0].coefficient != _KINETIC:
        return None
    g = Poly.symbol("g")
    if not pot:
        return g, {}
    if all(v.coefficient.degree_in("g") == 1 and set(v.coefficient.collect("g")) == {1} for v in pot):
        return g, {v.x_power: v.coefficient.collect("g")[1] for v in pot}
    if len(pot) == 1:
        c = pot[0].coefficient
        # coupling absorbed into a monomial prefactor carrying omega, e.g. M w^2 / 2
        if c.is_monomial() and "g" not in c.free_symbols() and "omega" in c.free_symbols():
            return c, {pot[0].x_power: Poly.const(1)}
    return None


def _is_standard(verts) -> bool:
    return _coupling_split(verts) is not None


# -- parser -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|(hbar|[A-Za-z_][A-Za-z_0-9]*)|(.))")

PX = dict  # (p_power, x_power) -> Poly


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", num, start))
        elif ident is not None:
            tokens.append(("ident", ident, start))
        elif op is not None:
            if op not in "+-*/^()":
                raise HamiltonianSyntaxError(f"unexpected character {op!r}", start)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _px_add(a: PX, b: PX, sign: int = 1) -> PX:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, Poly()) + (c if sign > 0 else -c)
        if v.is_zero():
            out.pop(k, None)
        else:
            out[k] = v
    return out


def _px_mul(a: PX, b: PX) -> PX:
    out: PX = {}
    for (pa, xa), ca in a.items():
        for (pb, xb), cb in b.items():
            k = (pa + pb, xa + xb)
            if k[0] > MAX_EXPONENT or k[1] > MAX_EXPONENT:
                raise OverflowError
            v = out.get(k, Poly()) + ca * cb
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
    return out


def _px_const(c) -> PX:
    p = c if isinstance(c, Poly) else Poly.const(c)
    return {} if p.is_zero() else {(0, 0): p}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise HamiltonianSyntaxError(f"expected {op!r}", tok[2])
        return tok

    def parse(self) -> PX:
        if self.peek()[0] == "end":
            raise HamiltonianSyntaxError("empty expression", 0)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise HamiltonianSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return value

    def expr(self) -> PX:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        value = self.term()
        if sign < 0:
            value = _px_add({}, value, -1)
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                value = _px_add(value, self.term(), 1 if tok[1] == "+" else -1)
            else:
                return value

    def term(self) -> PX:
        value = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                value = self._mul(value, self.unary(), tok[2])
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                rhs = self.unary()
                value = self._mul(value, self._invert(rhs, tok[2]), tok[2])
            else:
                return value

    def unary(self) -> PX:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return _px_add({}, self.unary(), -1)
        return self.power()

    def power(self) -> PX:
        base = self.atom()
        tok = self.peek()
        if not (tok[0] == "op" and tok[1] == "^"):
            return base
        self.take()
        neg = False
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            neg = True
        exp_pos = self.peek()[2]
        exp = self.atom()
        k = self._integer(exp, exp_pos)
        if neg:
            k = -k
        if abs(k) > MAX_EXPONENT:
            raise UnsupportedFormError(f"exponent {k} exceeds {MAX_EXPONENT}", exp_pos)
        if k < 0:
            base = self._invert(base, tok[2])
            k = -k
        result = _px_const(1)
        for _ in range(k):
            result = self._mul(result, base, tok[2])
        return result

    def atom(self) -> PX:
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            return _px_const(Fraction(text))
        if kind == "ident":
            if text == "p":
                return {(1, 0): Poly.const(1)}
            if text == "x":
                return {(0, 1): Poly.const(1)}
            if text in _IDENT_TO_SYMBOL:
                return {(0, 0): Poly.symbol(_IDENT_TO_SYMBOL[text])}
            raise HamiltonianSyntaxError(f"unknown symbol {text!r}", pos)
        if kind == "op" and text == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        if kind == "end":
            raise HamiltonianSyntaxError("unexpected end of input", pos)
        raise HamiltonianSyntaxError(f"unexpected token {text!r}", pos)

    def _mul(self, a, b, pos):
        try:
            return _px_mul(a, b)
        except OverflowError:
            raise UnsupportedFormError(f"power exceeds {MAX_EXPONENT}", pos) from None

    @staticmethod
    def _integer(value: PX, pos: int) -> int:
        if not value:
            return 0
        if set(value) != {(0, 0)} or value[(0, 0)].free_symbols():
            raise UnsupportedFormError("exponent must be an integer constant", pos)
        c = value[(0, 0)].coefficient_of()
        if c.denominator != 1:
            raise UnsupportedFormError(f"non-integer exponent {c}", pos)
        return int(c)

    @staticmethod
    def _invert(value: PX, pos: int) -> PX:
        if set(value) != {(0, 0)}:
            raise UnsupportedFormError("division by an expression in p or x", pos)
        c = value[(0, 0)]
        if not c.is_monomial():
            raise UnsupportedFormError("division by a non-monomial", pos)
        try:
            return {(0, 0): c.inverse_monomial()}
        except ValueError:
            raise UnsupportedFormError("only M may appear in a denominator", pos) from None


def parse_hamiltonian(text: str) -> Hamiltonian:
    """Parse ``text`` into a :class:`Hamiltonian` of monomial vertices."""
    if not isinstance(text, str):
        raise TypeError("Hamiltonian text must be a string")
    try:
        terms = _Parser(text).parse()
    except RecursionError:
        raise HamiltonianSyntaxError("expression nested too deeply", 0) from None
    return Hamiltonian.from_terms(terms)


def _with_coeff(coeff: Fraction, factors: list[str]) -> str:
    # unit coefficients are implicit when at least one factor follows
    if factors and abs(coeff) == 1:
        return ("-" if coeff < 0 else "") + "*".join(factors)
    return "*".join([str(coeff)] + factors)


def _render_coeff_poly(c: Poly) -> str:
    pieces = []
    for exp, coeff in c.items():
        factors = []
        for name, k in zip(("x0", "p0", "hbar", "beta", "M", "omega", "g"), exp):
            if k:
                ident = _SYMBOL_TO_IDENT[name]
                factors.append(ident if k == 1 else f"{ident}^{k}")
        pieces.append(_with_coeff(coeff, factors))
    if len(pieces) == 1:
        return pieces[0]
    return "(" + " + ".join(pieces) + ")"


def render_hamiltonian(h: Hamiltonian) -> str:
    """Render in the parser's grammar; ``parse_hamiltonian`` inverts it."""
    if not h.vertices:
        return "0"
    parts = []
    for v in h.vertices:
        fields = []
        if v.p_power:
            fields.append("p" if v.p_power == 1 else f"p^{v.p_power}")
        if v.x_power:
            fields.append("x" if v.x_power == 1 else f"x^{v.x_power}")
        if v.coefficient.is_monomial() and v.coefficient.free_symbols() == set():
            parts.append(_with_coeff(v.coefficient.coefficient_of(), fields))
        else:
            parts.append("*".join([_render_coeff_poly(v.coefficient)] + fields))
    text = parts[0]
    for part in parts[1:]:
        text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return text
