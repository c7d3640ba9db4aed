"""Exact integration of propagator products over [0, hbar]^n in scaled time.

Two routes are available. :func:`integrate_simplex` splits the cube into the
n! time orderings; inside each ordering every step function is resolved and
the integrand is an ordinary polynomial. The Matsubara route writes G as a
mode sum without the zero mode, which gives closed forms for loops
(zeta values) and zero for any diagram with a dangling propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Sequence

from ._graph import canonical_form
from .symbolic import Poly, zeta_even_coeff
from .wick import Integrand

MAX_SIMPLEX_LABELS = 8

Edge = tuple[int, int]  # factor G(t_i, t_j)


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class DiagramValue:
    value: Poly  # rational * hbar^power
    backend: str  # "simplex" or "matsubara"

    @property
    def rational(self) -> Fraction:
        if self.value.is_zero():
            return Fraction(0)
        (exp, c), = self.value.items()
        return c

    @property
    def hbar_power(self) -> int | None:
        if self.value.is_zero():
            return None
        (exp, _), = self.value.items()
        return exp[2]

    def at(self, hbar: float) -> float:
        return self.value.evaluate({"hbar": hbar})


def _hbar_term(c: Fraction, power: int) -> Poly:
    return Poly.monomial(c, hbar=power)


@lru_cache(maxsize=None)
def _simplex_denominator(exps: tuple[int, ...]) -> int:
    # integral over 0 <= u_0 <= ... <= u_{n-1} <= 1 of prod u_k^exps[k] is 1 / this
    out = 1
    acc = 0
    for m, a in enumerate(exps, start=1):
        acc += a
        out *= acc + m
    return out


def _expand_ordering(n: int, edges: Sequence[Edge], pos: Sequence[int]) -> dict:
    # 2 g(t_a, t_b) = -2 (u_pa - u_pb) + sgn(u_pa - u_pb), with hbar = 1
    poly = {(0,) * n: 1}
    for a, b in edges:
        pa, pb = pos[a], pos[b]
        s = 1 if pa > pb else -1
        lin = (
            (pa, -2),
            (pb, 2),
        )
        new: dict = {}
        for exp, c in poly.items():
            new[exp] = new.get(exp, 0) + c * s
            for k, w in lin:
                e = list(exp)
                e[k] += 1
                e = tuple(e)
                new[e] = new.get(e, 0) + c * w
        poly = {e: c for e, c in new.items() if c}
    return poly


def integrate_simplex(n: int, edges: Sequence[Edge], coefficient: Fraction | int = 1) -> DiagramValue:
    """coefficient * integral of prod_{(i, j) in edges} G(t_i, t_j) over [0, hbar]^n.

    Exact: each of the n! ordering simplices is integrated as a polynomial.
    Ties have measure zero, so the equal-time convention never matters.
    """
    if n > MAX_SIMPLEX_LABELS:
        raise CapacityError(
            f"simplex backend supports at most {MAX_SIMPLEX_LABELS} time labels; "
            "use the matsubara backend (loop_value_closed) for cycles"
        )
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge {(i, j)} outside labels 0..{n - 1}")
    E = len(edges)
    if any(i == j for i, j in edges):
        return DiagramValue(Poly(), "simplex")  # G(t, t) = 0 identically
    by_denominator: dict[int, int] = {}
    for order in permutations(range(n)):
        pos = [0] * n
        for k, v in enumerate(order):
            pos[v] = k
        for exp, c in _expand_ordering(n, edges, pos).items():
            d = _simplex_denominator(exp)
            by_denominator[d] = by_denominator.get(d, 0) + c
    total = sum((Fraction(c, d) for d, c in by_denominator.items() if c), Fraction(0))
    if E % 2:
        # i^E is imaginary here; reflection t -> hbar - t forces the real part to 0
        if total:
            raise ArithmeticError("odd propagator product has non-zero integral")
        return DiagramValue(Poly(), "simplex")
    # G = i g, so prod G = i^E prod g; the 2^E undoes the doubled linear forms
    total *= Fraction((-1) ** (E // 2), 2 ** E) * Fraction(coefficient)
    return DiagramValue(_hbar_term(total, n + E), "simplex")


def _zeta_cycle(length: int) -> Fraction:
    # integral of G(t1,t2) G(t2,t3) ... G(tL,t1) = hbar^{2L} sum_{m != 0} (2 pi m)^{-L}
    if length % 2:
        return Fraction(0)
    return 2 * zeta_even_coeff(length // 2) / 2 ** length


def loop_value_closed(k: int) -> DiagramValue:
    """Loop of 2k propagators alternating kinetic and potential vertices."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = (-1) ** k * _zeta_cycle(2 * k)
    return DiagramValue(_hbar_term(c, 4 * k), "matsubara")


def loop_edges(k: int) -> tuple[int, list[Edge]]:
    """Labels and edges of the alternating loop: kinetic 0..k-1, potential k..2k-1.

    Every edge runs from a potential (x) vertex to a kinetic (p) vertex.
    """
    edges = []
    for i in range(k):
        pot = k + i
        edges.append((pot, i))
        edges.append((pot, (i + 1) % k))
    return 2 * k, edges


def chain_edges(length: int) -> tuple[int, list[Edge]]:
    """Open path of propagators over ``length`` vertices, alternating kinds."""
    if length < 2:
        raise ValueError("chain needs at least two vertices")
    edges = []
    for v in range(length - 1):
        # x sits on odd vertices, p on even ones
        edges.append((v + 1, v) if v % 2 == 0 else (v, v + 1))
    return length, edges


def chain_value(length: int) -> DiagramValue:
    """A chain integrates to zero: its end propagator has no zero mode."""
    if length < 2:
        raise ValueError("chain needs at least two vertices")
    return DiagramValue(Poly(), "matsubara")


def matsubara_loop_numeric(k: int, m_max: int, hbar: float = 1.0) -> float:
    """Alternating 2k-loop from the mode sum truncated at |m| <= m_max."""
    if k < 1 or m_max < 1:
        raise ValueError("k and m_max must be >= 1")
    terms = []
    for m in range(1, m_max + 1):
        c = hbar / (2.0 * math.pi * m)
        terms.append(2.0 * c ** (2 * k))  # modes m and -m
    return (-1) ** k * hbar ** (2 * k) * math.fsum(terms)


# -- general evaluation with shortcuts ---------------------------------------------

def _components(labels: Sequence[int], edges: Sequence[Edge]):
    parent = {v: v for v in labels}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in edges:
        parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for v in labels:
        comps.setdefault(find(v), []).append(v)
    return list(comps.values())


def _cycle_sign(verts: Sequence[int], edges: Sequence[Edge]) -> int:
    # walk the cycle; each edge traversed against its orientation flips the sign
    remaining = list(edges)
    start = verts[0]
    cur = start
    sign = 1
    while remaining:
        for idx, (i, j) in enumerate(remaining):
            if i == cur:
                cur = j
                break
            if j == cur:
                cur = i
                sign = -sign
                break
        else:
            raise AssertionError("not a cycle")
        remaining.pop(idx)
    assert cur == start
    return sign


_component_cache: dict = {}


def _component_value(verts: Sequence[int], edges: Sequence[Edge]) -> tuple[Fraction, bool]:
    """(rational coefficient of hbar^{m+E}, whether the simplex route was needed)."""
    m, E = len(verts), len(edges)
    degree = {v: 0 for v in verts}
    for i, j in edges:
        degree[i] += 1
        degree[j] += 1
    if E % 2 or any(i == j for i, j in edges):
        return Fraction(0), False
    if any(d == 1 for d in degree.values()):
        # integrating the leaf time kills the only propagator attached to it
        return Fraction(0), False
    if all(d == 2 for d in degree.values()):
        return _cycle_sign(verts, edges) * _zeta_cycle(E), False
    index = {v: k for k, v in enumerate(verts)}
    counts: dict = {}
    for i, j in edges:
        key = (index[i], index[j])
        counts[key] = counts.get(key, 0) + 1
    _, enc, _ = canonical_form([0] * m, counts)
    cached = _component_cache.get((m, enc))
    if cached is None:
        local = [(i, j) for i, j, k in enc for _ in range(k)]
        cached = integrate_simplex(m, local).rational
        _component_cache[(m, enc)] = cached
    return cached, True


def evaluate_edges(n: int, edges: Sequence[Edge]) -> DiagramValue:
    """Integral of prod G over [0, hbar]^n, factorised into components."""
    value = Fraction(1)
    touched = {v for e in edges for v in e}
    backend = "matsubara"
    for comp in _components(range(n), edges):
        if comp[0] not in touched:
            continue  # a free time label contributes one factor of hbar
        cset = set(comp)
        sub = [e for e in edges if e[0] in cset]
        c, used_simplex = _component_value(comp, sub)
        if used_simplex:
            backend = "simplex"
        if not c:
            return DiagramValue(Poly(), backend)
        value *= c
    return DiagramValue(_hbar_term(value, n + len(edges)), backend)


def evaluate_integrand(f: Integrand, n: int) -> Poly:
    """Integrate an :class:`Integrand` over n scaled time labels.

    Returns a polynomial in x0, p0 and hbar.
    """
    out: dict = {}
    for (edge_key, nx, np_), c in f.terms.items():
        edges = [e for e, mult in edge_key for _ in range(mult)]
        dv = evaluate_edges(n, edges)
        if dv.value.is_zero():
            continue
        r = dv.rational * c
        k = (nx, np_, dv.hbar_power)
        out[k] = out.get(k, 0) + r
    return Poly({(nx, np_, h, 0, 0, 0, 0): c for (nx, np_, h), c in out.items()})
