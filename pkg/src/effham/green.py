"""Periodic phase-space Green function with the temporal means removed.

G(t, t') is purely imaginary, so values are carried as :class:`GreenValue`
holding the real number ``imag_part`` with ``G = 1j * imag_part``. The
equal-time value uses Theta(0) = 1/2, so G(t, t) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GreenValue",
    "green_scaled",
    "green_scaled_array",
    "green_unscaled",
    "green_matsubara_partial",
    "matsubara_frequency",
]


@dataclass(frozen=True)
class GreenValue:
    imag_part: float

    def __complex__(self):
        return complex(0.0, self.imag_part)

    def __neg__(self):
        return GreenValue(-self.imag_part)


def _sign(u: float) -> float:
    # Theta(u) - Theta(-u) with Theta(0) = 1/2
    if u > 0:
        return 1.0
    if u < 0:
        return -1.0
    return 0.0


def _check_range(t: float, upper: float, name: str) -> None:
    if not (0.0 <= t <= upper):
        raise ValueError(f"{name}={t!r} outside [0, {upper!r}]")


def green_scaled(t1: float, t2: float, hbar: float) -> GreenValue:
    """G in scaled time t = tau/beta, t in [0, hbar]; independent of beta."""
    _check_range(t1, hbar, "t1")
    _check_range(t2, hbar, "t2")
    u = t1 - t2
    return GreenValue(-(2.0 * u - hbar * _sign(u)) / 2.0)


def green_scaled_array(t1, t2, hbar: float) -> np.ndarray:
    """Vectorised imaginary part of :func:`green_scaled` (no range checks)."""
    u = np.asarray(t1, dtype=float) - np.asarray(t2, dtype=float)
    return -(2.0 * u - hbar * np.sign(u)) / 2.0


def green_unscaled(tau1: float, tau2: float, beta: float, hbar: float) -> GreenValue:
    """G in imaginary time tau in [0, hbar*beta]."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    _check_range(tau1, hbar * beta, "tau1")
    _check_range(tau2, hbar * beta, "tau2")
    u = tau1 - tau2
    return GreenValue(-(2.0 * u - hbar * beta * _sign(u)) / (2.0 * beta))


def matsubara_frequency(m: int, hbar: float, beta: float = 1.0) -> float:
    return 2.0 * math.pi * m / (hbar * beta)


def green_matsubara_partial(t1: float, t2: float, hbar: float, m_max: int) -> GreenValue:
    """Mode sum (2/beta) sum_{m=1}^{m_max} sin(w_m u)/w_m in scaled time.

    The zero mode is never included.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    _check_range(t1, hbar, "t1")
    _check_range(t2, hbar, "t2")
    u = t1 - t2
    if u == 0.0:
        return GreenValue(0.0)
    terms = []
    for m in range(1, m_max + 1):
        w = matsubara_frequency(m, hbar)
        terms.append(math.sin(w * u) / w)
    return GreenValue(2.0 * math.fsum(terms))
