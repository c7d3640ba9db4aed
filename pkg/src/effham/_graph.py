"""Canonical forms of small directed multigraphs with coloured vertices."""

from __future__ import annotations

from itertools import permutations, product
from typing import Hashable, Sequence


def refine_colors(colors: Sequence[Hashable], edges: dict[tuple[int, int], int]) -> list:
    """Colour refinement (1-WL) on a directed multigraph; returns stable colours."""
    n = len(colors)
    out_adj = [[] for _ in range(n)]
    in_adj = [[] for _ in range(n)]
    for (i, j), m in edges.items():
        out_adj[i].append((j, m))
        in_adj[j].append((i, m))
    current = list(colors)
    rank = _rank(current)
    for _ in range(n):
        sig = [
            (
                rank[v],
                tuple(sorted((m, rank[j]) for j, m in out_adj[v])),
                tuple(sorted((m, rank[i]) for i, m in in_adj[v])),
            )
            for v in range(n)
        ]
        new_rank = _rank(sig)
        if len(set(new_rank)) == len(set(rank)):
            break
        rank = new_rank
    return rank


def _rank(values: Sequence) -> list[int]:
    keyed = sorted(set(map(repr, values)))
    index = {k: i for i, k in enumerate(keyed)}
    return [index[repr(v)] for v in values]


def canonical_form(colors: Sequence[Hashable], edges: dict[tuple[int, int], int]):
    """Return ``(ordered_colors, sorted_edges, order)`` invariant under relabelling.

    ``order[k]`` is the original vertex placed at canonical position ``k``.
    Brute force runs only over permutations inside refined colour classes.
    """
    n = len(colors)
    rank = refine_colors(colors, edges)
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(rank[v], []).append(v)
    groups = [classes[r] for r in sorted(classes)]
    color_keys = [repr(c) for c in colors]
    best = None
    best_order = None
    for choice in product(*(permutations(g) for g in groups)):
        order = [v for grp in choice for v in grp]
        pos = {v: k for k, v in enumerate(order)}
        enc_edges = tuple(sorted((pos[i], pos[j], m) for (i, j), m in edges.items()))
        enc = (tuple(color_keys[v] for v in order), enc_edges)
        if best is None or enc < best:
            best, best_order = enc, order
    return best[0], best[1], best_order
