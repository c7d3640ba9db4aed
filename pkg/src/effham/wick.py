"""Wick contraction of monomial vertices in the pinned phase-space measure.

Each vertex p^a x^b sits at its own scaled time label. A field either takes
its mean value (a *current*: x -> x0, p -> p0) or is contracted with a field
of the opposite kind at another label. Contracting x at label i with p at
label j gives G(i, j); x-x and p-p contractions vanish, and so does an
equal-time x-p contraction because G(t, t) = 0.

Integrands are stored as :class:`Integrand`, a polynomial in x0, p0 and the
formal propagators G(i, j) with i < j (G(j, i) = -G(i, j)).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from ._graph import canonical_form
from .hamiltonian import Hamiltonian

Monomial = tuple[int, int]  # (p_power, x_power)
EdgeKey = tuple[tuple[tuple[int, int], int], ...]
TermKey = tuple[EdgeKey, int, int]  # (edges, x0 power, p0 power)

POSITION = "x"
MOMENTUM = "p"


@dataclass(frozen=True, order=True)
class FieldSlot:
    vertex_index: int
    kind: str  # POSITION or MOMENTUM
    slot: int = 0  # distinguishes equal fields at one vertex

    def __str__(self):
        return f"{self.kind}@{self.vertex_index + 1}"


@dataclass(frozen=True)
class Pairing:
    edges: tuple[tuple[FieldSlot, FieldSlot], ...]  # (x slot, p slot)
    singles: tuple[FieldSlot, ...]

    def edge_counts(self) -> dict[tuple[int, int], int]:
        """Directed counts ``(x label, p label) -> number of contractions``."""
        out: Counter = Counter()
        for xs, ps in self.edges:
            out[(xs.vertex_index, ps.vertex_index)] += 1
        return dict(out)

    def value(self) -> "Integrand":
        edges: Counter = Counter()
        sign = 1
        for xs, ps in self.edges:
            i, j = xs.vertex_index, ps.vertex_index
            if i < j:
                edges[(i, j)] += 1
            else:
                edges[(j, i)] += 1
                sign = -sign
        nx = sum(1 for s in self.singles if s.kind == POSITION)
        np_ = len(self.singles) - nx
        return Integrand({(_edge_key(edges), nx, np_): sign})


def slots_for(monomials: Sequence[Monomial], labels: Sequence[int] | None = None) -> list[FieldSlot]:
    if labels is None:
        labels = range(len(monomials))
    slots = []
    for label, (a, b) in zip(labels, monomials):
        slots.extend(FieldSlot(label, MOMENTUM, k) for k in range(a))
        slots.extend(FieldSlot(label, POSITION, k) for k in range(b))
    return slots


def enumerate_pairings(slots: Sequence[FieldSlot]) -> Iterator[Pairing]:
    """Yield every surviving pairing of ``slots`` exactly once, in a fixed order.

    Same-kind contractions and equal-label contractions carry weight zero and
    are never produced.
    """
    slots = list(slots)
    n = len(slots)
    used = [False] * n
    edges: list = []
    singles: list = []

    def rec(start: int):
        k = start
        while k < n and used[k]:
            k += 1
        if k == n:
            yield Pairing(tuple(edges), tuple(singles))
            return
        s = slots[k]
        used[k] = True
        singles.append(s)
        yield from rec(k + 1)
        singles.pop()
        for m in range(k + 1, n):
            t = slots[m]
            if used[m] or t.kind == s.kind or t.vertex_index == s.vertex_index:
                continue
            used[m] = True
            edges.append((s, t) if s.kind == POSITION else (t, s))
            yield from rec(k + 1)
            edges.pop()
            used[m] = False
        used[k] = False

    yield from rec(0)


def _edge_key(edges) -> EdgeKey:
    return tuple(sorted((e, m) for e, m in edges.items() if m))


class Integrand:
    """Polynomial in x0, p0 and formal propagators G(i, j), i < j."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[TermKey, int | Fraction] | None = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def one(cls) -> "Integrand":
        return cls({((), 0, 0): 1})

    def __add__(self, other: "Integrand") -> "Integrand":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Integrand(out)

    def __sub__(self, other: "Integrand") -> "Integrand":
        return self + other.scale(-1)

    def scale(self, c) -> "Integrand":
        return Integrand({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "Integrand") -> "Integrand":
        out: dict = {}
        for (e1, x1, p1), c1 in self.terms.items():
            for (e2, x2, p2), c2 in other.terms.items():
                if e2:
                    merged = Counter(dict(e1))
                    for e, m in e2:
                        merged[e] += m
                    ek = _edge_key(merged)
                else:
                    ek = e1
                k = (ek, x1 + x2, p1 + p2)
                out[k] = out.get(k, 0) + c1 * c2
        return Integrand(out)

    def __eq__(self, other):
        return isinstance(other, Integrand) and self.terms == other.terms

    def __repr__(self):
        return f"Integrand({self.render()!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (edges, nx, np_), c in sorted(self.terms.items(), key=lambda t: (len(t[0][0]), t[0])):
            factors = [str(c)]
            if nx:
                factors.append("x0" if nx == 1 else f"x0^{nx}")
            if np_:
                factors.append("p0" if np_ == 1 else f"p0^{np_}")
            for (i, j), m in edges:
                g = f"G({i + 1},{j + 1})"
                factors.append(g if m == 1 else f"{g}^{m}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    __str__ = render


def _moment_terms(slots: Sequence[FieldSlot], connected_only: bool = False) -> dict:
    """Pairing sum grouped by contraction counts.

    Fields of one kind at one label are interchangeable, so instead of
    walking individual slots we enumerate the count matrix N[i][j] of x
    fields at label i contracted with p fields at label j. Each matrix
    stands for prod b_i! prod a_j! / (prod r_i! prod c_j! prod N_ij!)
    pairings, where r_i and c_j count the leftover currents.
    """
    xcap = Counter(s.vertex_index for s in slots if s.kind == POSITION)
    pcap = Counter(s.vertex_index for s in slots if s.kind == MOMENTUM)
    label_set = sorted(set(xcap) | set(pcap))
    pairs = [(i, j) for i in sorted(xcap) for j in sorted(pcap) if i != j]
    base = 1
    for c in list(xcap.values()) + list(pcap.values()):
        base *= math.factorial(c)
    xrem, prem = dict(xcap), dict(pcap)
    counts = [0] * len(pairs)
    acc: dict = {}

    def connected() -> bool:
        if len(label_set) <= 1:
            return True
        parent = {v: v for v in label_set}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (i, j), m in zip(pairs, counts):
            if m:
                parent[find(i)] = find(j)
        root = find(label_set[0])
        return all(find(v) == root for v in label_set)

    def emit(denom: int):
        if connected_only and not connected():
            return
        edges: Counter = Counter()
        sign = 1
        for (i, j), m in zip(pairs, counts):
            if m:
                # x at i, p at j gives +G(i, j); store with the smaller label first
                edges[(i, j) if i < j else (j, i)] += m
                if i > j and m % 2:
                    sign = -sign
        for r in list(xrem.values()) + list(prem.values()):
            denom *= math.factorial(r)
        key = (_edge_key(edges), sum(xrem.values()), sum(prem.values()))
        acc[key] = acc.get(key, 0) + sign * (base // denom)

    def rec(idx: int, denom: int):
        if idx == len(pairs):
            emit(denom)
            return
        i, j = pairs[idx]
        top = min(xrem[i], prem[j])
        for m in range(top + 1):
            counts[idx] = m
            xrem[i] -= m
            prem[j] -= m
            rec(idx + 1, denom * math.factorial(m))
            xrem[i] += m
            prem[j] += m
        counts[idx] = 0

    rec(0, 1)
    return {k: v for k, v in acc.items() if v}


def moment(monomials: Sequence[Monomial], labels: Sequence[int] | None = None) -> Integrand:
    """<prod_i p(t_i)^a_i x(t_i)^b_i> as a sum over surviving pairings."""
    return Integrand(_moment_terms(slots_for(monomials, labels)))


def moment_by_enumeration(monomials: Sequence[Monomial]) -> Integrand:
    """Same as :func:`moment` but through the public :func:`enumerate_pairings`."""
    total = Integrand()
    for pairing in enumerate_pairings(slots_for(monomials)):
        total = total + pairing.value()
    return total


def cumulant(monomials: Sequence[Monomial]) -> Integrand:
    """Connected part via the moment-cumulant recursion over set partitions.

    kappa(S) = m(S) - sum_{B ∋ min S, B ⊊ S} kappa(B) m(S \\ B), which is the
    Möbius inversion sum_{pi} (-1)^{|pi|-1} (|pi|-1)! prod_{B in pi} m(B).
    """
    n = len(monomials)
    if n < 1:
        raise ValueError("cumulant needs at least one vertex")
    moments: dict[int, Integrand] = {}
    cumulants: dict[int, Integrand] = {}

    def mom(mask: int) -> Integrand:
        if mask not in moments:
            idx = [i for i in range(n) if mask >> i & 1]
            moments[mask] = moment([monomials[i] for i in idx], idx)
        return moments[mask]

    def cum(mask: int) -> Integrand:
        if mask in cumulants:
            return cumulants[mask]
        low = mask & -mask
        rest = mask ^ low
        total = mom(mask)
        sub = rest
        # B = low | sub for every proper sub-mask sub of rest
        while True:
            sub = (sub - 1) & rest
            b = low | sub
            if b != mask:
                total = total - cum(b) * mom(mask ^ b)
            if sub == 0:
                break
        cumulants[mask] = total
        return total

    return cum((1 << n) - 1)


def cumulant_from_moments_partitions(monomials: Sequence[Monomial]) -> Integrand:
    """Explicit set-partition sum; slow, used to audit :func:`cumulant`."""
    n = len(monomials)
    total = Integrand()
    for blocks in _set_partitions(list(range(n))):
        b = len(blocks)
        term = Integrand.one()
        for block in blocks:
            term = term * moment([monomials[i] for i in block], block)
        total = total + term.scale((-1) ** (b - 1) * math.factorial(b - 1))
    return total


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def connected_sum(monomials: Sequence[Monomial]) -> Integrand:
    """Sum of pairings whose propagators connect all labels."""
    return Integrand(_moment_terms(slots_for(monomials), connected_only=True))


def moments_from_cumulants(monomials: Sequence[Monomial]) -> Integrand:
    """Rebuild the full moment as sum over partitions of products of cumulants."""
    n = len(monomials)
    total = Integrand()
    for blocks in _set_partitions(list(range(n))):
        term = Integrand.one()
        for block in blocks:
            k = cumulant([monomials[i] for i in block])
            term = term * relabel(k, block)
        total = total + term
    return total


def relabel(f: Integrand, labels: Sequence[int]) -> Integrand:
    """Map label k to ``labels[k]`` (G orientation fixed up)."""
    out: dict = {}
    for (edges, nx, np_), c in f.terms.items():
        new: Counter = Counter()
        sign = 1
        for (i, j), m in edges:
            a, b = labels[i], labels[j]
            if a > b:
                a, b = b, a
                if m % 2:
                    sign = -sign
            new[(a, b)] += m
        key = (_edge_key(new), nx, np_)
        out[key] = out.get(key, 0) + sign * c
    return Integrand(out)


# -- diagram classes ------------------------------------------------------------

TOPOLOGIES = ("chain", "loop", "mixed", "current-only")


@dataclass(frozen=True)
class Diagram:
    canonical_key: str
    multiplicity: Fraction
    topology: str
    monomials: tuple[Monomial, ...]
    representative: Pairing

    @property
    def order(self) -> int:
        return len(self.monomials)


def _topology(n: int, edge_counts: dict[tuple[int, int], int]) -> str:
    if not edge_counts:
        return "current-only"
    degree = Counter()
    adj: dict[int, set] = {}
    n_edges = 0
    for (i, j), m in edge_counts.items():
        degree[i] += m
        degree[j] += m
        n_edges += m
        adj.setdefault(i, set()).add(j)
        adj.setdefault(j, set()).add(i)
    touched = list(degree)
    seen = {touched[0]}
    stack = [touched[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(touched):
        return "mixed"
    degs = sorted(degree.values())
    if all(d == 2 for d in degs) and n_edges == len(touched):
        return "loop"
    if n_edges == len(touched) - 1 and degs[:2] == [1, 1] and all(d == 2 for d in degs[2:]):
        return "chain"
    return "mixed"


def _currents(pairing: Pairing, n: int):
    cur = [[0, 0] for _ in range(n)]
    for s in pairing.singles:
        cur[s.vertex_index][0 if s.kind == MOMENTUM else 1] += 1
    return cur


def _diagram_key(monomials: Sequence[Monomial], pairing: Pairing):
    n = len(monomials)
    cur = _currents(pairing, n)
    colors = [(a, b, cur[v][0], cur[v][1]) for v, (a, b) in enumerate(monomials)]
    edges = pairing.edge_counts()
    _, enc_edges, order = canonical_form(colors, edges)
    verts = ";".join(
        f"v{k}=p{c[0]}x{c[1]}" + (f"[cp{c[2]}cx{c[3]}]" if c[2] or c[3] else "")
        for k, c in enumerate(colors[v] for v in order)
    )
    es = ",".join(f"{i}>{j}" + (f"*{m}" if m > 1 else "") for i, j, m in enc_edges)
    return f"{verts}|{es}"


def classify_diagram(pairing: Pairing, monomials: Sequence[Monomial]) -> Diagram:
    """Canonical class of a single pairing (multiplicity 1)."""
    for xs, ps in pairing.edges:
        if xs.kind == ps.kind:
            raise ValueError("same-kind contraction has weight zero")
    n = len(monomials)
    return Diagram(
        canonical_key=_diagram_key(monomials, pairing),
        multiplicity=Fraction(1),
        topology=_topology(n, pairing.edge_counts()),
        monomials=tuple(monomials),
        representative=pairing,
    )


def is_connected(pairing: Pairing, n: int) -> bool:
    if n <= 1:
        return True
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for xs, ps in pairing.edges:
        parent[find(xs.vertex_index)] = find(ps.vertex_index)
    return len({find(v) for v in range(n)}) == 1


def diagram_classes(h: Hamiltonian, order: int) -> list[Diagram]:
    """Connected diagram classes of <H(t_1)...H(t_n)>_c with multiplicities.

    Multiplicity counts every (vertex assignment to ordered times, pairing)
    in the class; vertex coefficients are not folded in.
    """
    verts = h.vertices
    counts: Counter = Counter()
    reps: dict[str, tuple] = {}
    key_cache: dict = {}
    for assignment in product(range(len(verts)), repeat=order):
        monomials = tuple(verts[a].monomial for a in assignment)
        for pairing in enumerate_pairings(slots_for(monomials)):
            if not is_connected(pairing, order):
                continue
            labeled = (
                monomials,
                tuple(sorted(pairing.edge_counts().items())),
                tuple(map(tuple, _currents(pairing, order))),
            )
            key = key_cache.get(labeled)
            if key is None:
                key = key_cache[labeled] = _diagram_key(monomials, pairing)
            counts[key] += 1
            reps.setdefault(key, (monomials, pairing))
    out = []
    for key in sorted(counts):
        monomials, pairing = reps[key]
        out.append(
            Diagram(
                canonical_key=key,
                multiplicity=Fraction(counts[key]),
                topology=_topology(order, pairing.edge_counts()),
                monomials=monomials,
                representative=pairing,
            )
        )
    return out
