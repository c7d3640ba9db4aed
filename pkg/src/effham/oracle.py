"""Independent numerical cross-checks.

Nothing here uses the simplex integrator or the series machinery for the
quantity being checked; only the Green-function kernel is shared.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .green import green_scaled_array
from .series import EffectiveSeries, ho_closed_form, ho_series_coefficient
from .symbolic import poly_eval

Edge = tuple[int, int]


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre rule per panel; panels on axis k break at t_1..t_{k-1}."""

    points_per_axis: int = 12
    hbar: float = 1.0


def _nested_rule(n: int, spec: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(spec.points_per_axis)
    h = spec.hbar
    pts = np.zeros((1, 0))
    wts = np.ones(1)
    for axis in range(n):
        new_pts, new_wts = [], []
        for row, w in zip(pts, wts):
            cuts = np.unique(np.concatenate(([0.0, h], row)))
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if hi <= lo:
                    continue
                half = 0.5 * (hi - lo)
                t = lo + half * (nodes + 1.0)
                block = np.repeat(row[None, :], len(t), axis=0)
                new_pts.append(np.column_stack((block, t)))
                new_wts.append(w * half * weights)
        pts = np.vstack(new_pts)
        wts = np.concatenate(new_wts)
    return pts, wts


def quad_diagram(integrand: Callable[[np.ndarray], np.ndarray], n: int, spec: QuadratureSpec | None = None) -> float:
    """Integrate ``integrand(t)`` over [0, hbar]^n, ``t`` of shape (N, n).

    The rule is a nested tensor product of Gauss-Legendre panels whose
    boundaries sit on the kinks t_i = t_j of the propagator.
    """
    if not 1 <= n <= 3:
        raise ValueError("quad_diagram supports 1 to 3 time labels")
    spec = spec or QuadratureSpec()
    pts, wts = _nested_rule(n, spec)
    return float(np.dot(wts, integrand(pts)))


def gproduct_integrand(edges: Sequence[Edge], hbar: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Real integrand for prod G(t_i, t_j).

    For an even number of factors this is the product itself, i^E prod g. For
    odd E it returns the coefficient of i.
    """
    E = len(edges)
    sign = (-1) ** (E // 2)

    def f(t):
        out = np.full(t.shape[0], float(sign))
        for i, j in edges:
            out = out * green_scaled_array(t[:, i], t[:, j], hbar)
        return out

    return f


def integrand_callable(integrand, bindings: Mapping[str, float], hbar: float = 1.0):
    """Numeric callable for a Wick :class:`~effham.wick.Integrand` at fixed x0, p0."""
    x0 = float(bindings.get("x0", 0.0))
    p0 = float(bindings.get("p0", 0.0))
    parts = []
    for (edge_key, nx, np_), c in integrand.terms.items():
        edges = [e for e, m in edge_key for _ in range(m)]
        if len(edges) % 2:
            continue  # imaginary piece; integrates to zero
        parts.append((float(c) * x0 ** nx * p0 ** np_, gproduct_integrand(edges, hbar)))

    def f(t):
        out = np.zeros(t.shape[0])
        for c, g in parts:
            out = out + c * g(t)
        return out

    return f


def exact_Z_canonical(beta: float, omega: float, hbar: float, n_max: int = 2000) -> float:
    """sum_{n=0}^{n_max} exp(-beta hbar omega (n + 1/2))."""
    x = beta * hbar * omega
    if not x > 0:
        raise ValueError("beta * hbar * omega must be positive")
    return math.fsum(math.exp(-x * (n + 0.5)) for n in range(n_max + 1))


def canonical_truncation_bound(x: float, n_max: int) -> float:
    return math.exp(-x * (n_max + 1.5)) / (1.0 - math.exp(-x))


@dataclass
class ConvergenceRow:
    x: float
    deviation: float
    bound: float
    ratio: float | None
    expected_ratio: float
    passed: bool


@dataclass
class ConvergenceReport:
    max_order: int
    rows: list[ConvergenceRow] = field(default_factory=list)
    excluded: list[float] = field(default_factory=list)

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def series_vs_closed(
    max_order: int,
    grid: Sequence[float],
    series: EffectiveSeries | None = None,
    p0: float = 0.0,
    x0: float = 0.0,
) -> ConvergenceReport:
    """Compare the truncated oscillator series with the resummed logarithm.

    ``grid`` holds values of x = hbar omega beta; hbar = omega = M = 1 and
    beta = x. The deviation must stay below twice the first omitted term
    (up to floating-point rounding of the sum).
    """
    kmax = max_order // 2
    report = ConvergenceReport(max_order)
    for x in grid:
        if x >= 2 * math.pi or x <= 0:
            warnings.warn(f"grid point {x} outside the convergence disk 0 < x < 2 pi; excluded")
            report.excluded.append(x)
            continue
        b = {"beta": x, "hbar": 1.0, "omega": 1.0, "M": 1.0, "p0": p0, "x0": x0, "g": 0.5}
        if series is None:
            truncated = p0 * p0 / 2 + x0 * x0 / 2 + math.fsum(
                poly_eval(ho_series_coefficient(k), b) for k in range(1, kmax + 1)
            )
        else:
            truncated = series.truncate(max_order).evaluate(b)
        closed = ho_closed_form(p0, x0, x, 1.0, 1.0, 1.0)
        dev = abs(closed - truncated)
        omitted = abs(poly_eval(ho_series_coefficient(kmax + 1), b))
        ratio = None
        if kmax >= 1:
            last = poly_eval(ho_series_coefficient(kmax), b)
            ratio = abs(poly_eval(ho_series_coefficient(kmax + 1), b) / last)
        # twice the first omitted term, plus a few ulps of rounding in the sum itself
        bound = 2 * omitted + 8 * sys.float_info.epsilon * max(abs(closed), abs(truncated))
        report.rows.append(ConvergenceRow(x, dev, bound, ratio, (x / (2 * math.pi)) ** 2, dev <= bound))
    return report
