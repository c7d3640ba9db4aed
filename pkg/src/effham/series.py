"""High-temperature series of the effective classical Hamiltonian.

Term n of the series is beta^(n-1) times

    (-1)^(n+1) / (hbar^n n!) * int_[0,hbar]^n <H(t_1) ... H(t_n)>_c

All signs, factorials and hbar/beta powers are applied here; the Wick engine
and the diagram evaluator only return unweighted sums.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Mapping

from .evaluator import CapacityError, evaluate_integrand
from .hamiltonian import FormError, Hamiltonian, parse_hamiltonian, render_hamiltonian
from .symbolic import SYMBOLS, Poly, poly_eval, poly_sum, zeta_even_coeff
from .wick import Monomial, connected_sum, cumulant

MAX_ORDER = 8

_HBAR = SYMBOLS.index("hbar")
_BETA = SYMBOLS.index("beta")


class DivergenceError(ValueError):
    """Phase-space integral of exp(-beta H_eff) does not converge."""


@dataclass(frozen=True)
class SeriesTerm:
    order: int
    coefficient: Poly

    @property
    def beta_power(self) -> int:
        return self.order - 1

    def full(self) -> Poly:
        return self.coefficient * Poly.symbol("beta", self.beta_power)


@dataclass(frozen=True)
class EffectiveSeries:
    hamiltonian: str
    terms: tuple[SeriesTerm, ...]

    def __post_init__(self):
        orders = [t.order for t in self.terms]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise ValueError("orders must be strictly increasing")

    def coefficient(self, n: int) -> Poly:
        for t in self.terms:
            if t.order == n:
                return t.coefficient
        raise KeyError(n)

    @property
    def max_order(self) -> int:
        return self.terms[-1].order if self.terms else 0

    def truncate(self, max_order: int) -> "EffectiveSeries":
        return EffectiveSeries(self.hamiltonian, tuple(t for t in self.terms if t.order <= max_order))

    def as_poly(self) -> Poly:
        return poly_sum(t.full() for t in self.terms)

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        return math.fsum(poly_eval(t.full(), bindings) for t in self.terms)

    def to_json_dict(self) -> dict:
        return {
            "hamiltonian": self.hamiltonian,
            "orders": [
                {"n": t.order, "beta_power": t.beta_power, "coefficient": t.coefficient.render()}
                for t in self.terms
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str | dict) -> "EffectiveSeries":
        data = json.loads(text) if isinstance(text, str) else text
        terms = []
        for entry in data["orders"]:
            if entry["beta_power"] != entry["n"] - 1:
                raise ValueError("beta_power must equal n - 1")
            terms.append(SeriesTerm(entry["n"], Poly.parse(entry["coefficient"])))
        return cls(data["hamiltonian"], tuple(terms))


@dataclass(frozen=True)
class WeakCouplingSeries:
    terms: tuple[tuple[int, Poly], ...]  # (power of g, coefficient incl. beta)
    coupling: Poly = field(default_factory=lambda: Poly.symbol("g"))

    def coefficient(self, k: int) -> Poly:
        for power, c in self.terms:
            if power == k:
                return c
        return Poly()

    def evaluate(self, bindings: Mapping[str, float]) -> float:
        b = dict(bindings)
        if "g" not in b or self.coupling != Poly.symbol("g"):
            b["g"] = poly_eval(self.coupling, bindings)
        vals = []
        for k, c in self.terms:
            for exp, coeff in (c * Poly.symbol("g", k)).items():
                vals.append(poly_eval(Poly({exp: coeff}), b))
        return math.fsum(vals)


def shift_hbar(p: Poly, delta: int) -> Poly:
    out = {}
    for exp, c in p.items():
        e = list(exp)
        e[_HBAR] += delta
        if e[_HBAR] < 0:
            raise ArithmeticError("negative hbar power in series term")
        out[tuple(e)] = c
    return Poly(out)


@lru_cache(maxsize=None)
def _integrated_cumulant(monomials: tuple[Monomial, ...], method: str) -> Poly:
    if method == "moebius":
        f = cumulant(monomials)
    elif method == "connected":
        f = connected_sum(monomials)
    else:
        raise ValueError(f"unknown method {method!r}")
    return evaluate_integrand(f, len(monomials))


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("EFFHAM_THREADS", "1")))
    except ValueError:
        return 1


def _order_tasks(h: Hamiltonian, n: int):
    verts = h.vertices
    for combo in combinations_with_replacement(range(len(verts)), n):
        count = math.factorial(n)
        for v in set(combo):
            count //= math.factorial(combo.count(v))
        yield combo, count, tuple(verts[v].monomial for v in combo)


def _assemble_order(h: Hamiltonian, n: int, values: dict) -> Poly:
    acc = []
    for combo, count, monomials in _order_tasks(h, n):
        integral = values[monomials]
        if integral.is_zero():
            continue
        coeff = Poly.const(count)
        for v in combo:
            coeff = coeff * h.vertices[v].coefficient
        acc.append(coeff * integral)
    total = poly_sum(acc).scale(Fraction((-1) ** (n + 1), math.factorial(n)))
    return shift_hbar(total, -n)


def heff_high_t(
    h: Hamiltonian | str,
    max_order: int,
    method: str = "moebius",
    workers: int | None = None,
) -> EffectiveSeries:
    """Exact high-temperature series of H_eff(p0, x0) through ``max_order``."""
    if isinstance(h, str):
        h = parse_hamiltonian(h)
    if not 1 <= max_order <= MAX_ORDER:
        raise CapacityError(f"max_order must be within 1..{MAX_ORDER}")
    workers = _default_workers() if workers is None else workers
    needed = sorted({m for n in range(1, max_order + 1) for _, _, m in _order_tasks(h, n)}, key=len)
    if workers > 1 and len(needed) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_integrated_cumulant, needed, [method] * len(needed))
            values = dict(zip(needed, results))
    else:
        values = {m: _integrated_cumulant(m, method) for m in needed}
    terms = tuple(SeriesTerm(n, _assemble_order(h, n, values)) for n in range(1, max_order + 1))
    return EffectiveSeries(render_hamiltonian(h), terms)


def ho_series_coefficient(k: int) -> Poly:
    """k-th harmonic-oscillator correction beta^(2k-1) (-1)^(k+1)/k (hbar w/2 pi)^(2k) zeta(2k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    c = Fraction((-1) ** (k + 1), k) * zeta_even_coeff(k) / 4 ** k
    return Poly.monomial(c, beta=2 * k - 1, hbar=2 * k, omega=2 * k)


def reorder_weak_coupling(s: EffectiveSeries, h: Hamiltonian | str) -> WeakCouplingSeries:
    """Regroup the high-temperature series by powers of the potential coupling."""
    if isinstance(h, str):
        h = parse_hamiltonian(h)
    if not h.standard_form:
        raise FormError("weak-coupling reordering needs H = p^2/2M + g V(x)")
    coupling, _ = h.weak_coupling_split()
    full = s.as_poly()
    groups: dict[int, dict] = {}
    if coupling == Poly.symbol("g"):
        for k, part in full.collect("g").items():
            groups[k] = dict(part.items())
    else:
        # coupling is a monomial prefactor carrying omega, e.g. M w^2 / 2
        (cexp, cval), = coupling.items()
        w = SYMBOLS.index("omega")
        for exp, c in full.items():
            if exp[w] % cexp[w]:
                raise FormError("series term is not a power of the identified coupling")
            k = exp[w] // cexp[w]
            new = tuple(e - k * ce for e, ce in zip(exp, cexp))
            try:
                Poly({new: 1})
            except ValueError:
                raise FormError("series term is not a power of the identified coupling") from None
            groups.setdefault(k, {})
            groups[k][new] = groups[k].get(new, 0) + c / cval ** k
    terms = tuple((k, Poly(groups[k])) for k in sorted(groups))
    return WeakCouplingSeries(terms, coupling)


def _require_positive(**params: float) -> None:
    for name, v in params.items():
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v!r}")


@lru_cache(maxsize=None)
def _log_sinh_coeffs(n_terms: int = 14) -> tuple[float, ...]:
    # ln(2 sinh(x/2) / x) = sum_k (-1)^(k+1)/k * zeta(2k) (x / 2 pi)^(2k)
    return tuple(float(Fraction((-1) ** (k + 1), k) * zeta_even_coeff(k) / 4 ** k) for k in range(1, n_terms + 1))


def ho_log_correction(beta: float, omega: float, hbar: float) -> float:
    """-(1/beta) ln[x / (2 sinh(x/2))] with x = hbar omega beta."""
    x = hbar * omega * beta
    if x < 1.0:
        # the closed form cancels badly here; the series has radius 2 pi
        x2 = x * x
        acc = 0.0
        for c in reversed(_log_sinh_coeffs()):
            acc = acc * x2 + c
        return acc * x2 / beta
    return (x / 2.0 + math.log1p(-math.exp(-x)) - math.log(x)) / beta


def ho_closed_form(p0: float, x0: float, beta: float, M: float, omega: float, hbar: float) -> float:
    """Resummed effective classical Hamiltonian of the harmonic oscillator."""
    _require_positive(beta=beta, M=M, omega=omega, hbar=hbar)
    return p0 * p0 / (2.0 * M) + 0.5 * M * omega ** 2 * x0 * x0 + ho_log_correction(beta, omega, hbar)


def _gaussian_z(a, b, d, e, f, c, beta, hbar) -> float:
    # H = a p^2 + b x^2 + d p x + e p + f x + c ; Z = int dx dp/(2 pi hbar) exp(-beta H)
    det = 4.0 * a * b - d * d
    if not (a > 0 and b > 0 and det > 0):
        raise DivergenceError("quadratic form in (p0, x0) is not positive definite")
    # minimum of the quadratic: c - (b e^2 - d e f + a f^2) / det
    qmin = c - (b * e * e - d * e * f + a * f * f) / det
    return math.exp(-beta * qmin) / (beta * hbar * math.sqrt(det))


def partition_function_quadratic(
    heff,
    beta: float,
    M: float = 1.0,
    omega: float = 1.0,
    hbar: float = 1.0,
    g: float | None = None,
) -> float:
    """Gaussian phase-space integral of exp(-beta H_eff) for quadratic H_eff.

    ``heff`` is ``"ho"`` for the resummed oscillator, or a :class:`Poly` /
    :class:`EffectiveSeries` quadratic in (p0, x0).
    """
    _require_positive(beta=beta, M=M, omega=omega, hbar=hbar)
    if isinstance(heff, str):
        if heff != "ho":
            raise ValueError(f"unknown closed form {heff!r}")
        return _gaussian_z(
            1.0 / (2.0 * M), 0.5 * M * omega ** 2, 0.0, 0.0, 0.0,
            ho_log_correction(beta, omega, hbar), beta, hbar,
        )
    poly = heff.as_poly() if isinstance(heff, EffectiveSeries) else heff
    bindings = {"beta": beta, "M": M, "omega": omega, "hbar": hbar}
    if g is not None:
        bindings["g"] = g
    coeffs: dict[tuple[int, int], list[float]] = {}
    for exp, c in poly.items():
        nx, np_ = exp[0], exp[1]
        if nx + np_ > 2:
            raise ValueError("H_eff is not quadratic in (p0, x0)")
        rest = Poly({(0, 0) + exp[2:]: c})
        coeffs.setdefault((np_, nx), []).append(poly_eval(rest, bindings))
    get = lambda k: math.fsum(coeffs.get(k, [0.0]))  # noqa: E731
    return _gaussian_z(get((2, 0)), get((0, 2)), get((1, 1)), get((1, 0)), get((0, 1)), get((0, 0)), beta, hbar)
