"""Pass/fail checks behind ``effham validate``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .evaluator import (
    chain_edges,
    evaluate_integrand,
    integrate_simplex,
    loop_edges,
    loop_value_closed,
    matsubara_loop_numeric,
)
from .hamiltonian import parse_hamiltonian
from .oracle import (
    QuadratureSpec,
    exact_Z_canonical,
    gproduct_integrand,
    integrand_callable,
    quad_diagram,
    series_vs_closed,
)
from .series import (
    heff_high_t,
    ho_closed_form,
    ho_series_coefficient,
    partition_function_quadratic,
    reorder_weak_coupling,
)
from .symbolic import Poly, poly_eval
from .wick import connected_sum, cumulant

HO = "p^2/(2*M) + (M*w^2/2)*x^2"
QUARTIC = "p^2/(2*M) + g*x^4"


@dataclass
class CheckResult:
    check: str
    expected: str
    actual: str
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {"check": self.check, "expected": self.expected, "actual": self.actual,
                "tolerance": self.tolerance, "pass": self.passed}


def _exact(name, expected, actual) -> CheckResult:
    return CheckResult(name, str(expected), str(actual), 0.0, expected == actual)


def _close(name, expected: float, actual: float, tol: float) -> CheckResult:
    return CheckResult(name, repr(expected), repr(actual), tol, abs(expected - actual) <= tol)


def run_checks(m_max: int = 10_000) -> list[CheckResult]:
    out: list[CheckResult] = []
    ho = parse_hamiltonian(HO)
    s = heff_high_t(ho, 6)
    out.append(_exact("order-1 classical Hamiltonian", ho.classical(), s.coefficient(1)))
    out.append(_exact("order-2 coefficient", Poly.monomial(Fraction(1, 24), hbar=2, omega=2), s.coefficient(2)))
    for n in (3, 5):
        out.append(_exact(f"order-{n} vanishes", Poly(), s.coefficient(n)))
    for k in (2, 3):
        expected = ho_series_coefficient(k)
        out.append(_exact(f"order-{2 * k} coefficient", expected, s.terms[2 * k - 1].full()))
    for k in (1, 2, 3):
        n, e = loop_edges(k)
        out.append(_exact(f"simplex loop k={k}", loop_value_closed(k).value, integrate_simplex(n, e).value))
    for length in range(2, 6):
        n, e = chain_edges(length)
        out.append(_exact(f"simplex chain length {length}", Poly(), integrate_simplex(n, e).value))
    out.append(_close("matsubara loop k=1", -1 / 12, matsubara_loop_numeric(1, m_max), 1.0 / m_max))
    report = series_vs_closed(6, [0.25, 0.5, 1.0])
    out.append(CheckResult("resummation k<=3 within 2x omitted term", "True", str(report.passed), 0.0, report.passed))
    closed = ho_closed_form(0.0, 0.0, 0.5, 1.0, 1.0, 1.0)
    trunc = s.evaluate({"beta": 0.5, "hbar": 1.0, "omega": 1.0, "M": 1.0, "x0": 0.0, "p0": 0.0})
    out.append(_close("resummation at x=0.5", closed, trunc, 1e-8))
    for x in (0.5, 1.0, 2.0):
        out.append(_close(f"partition function x={x}", exact_Z_canonical(x, 1.0, 1.0, 2000),
                          partition_function_quadratic("ho", x), 1e-10))
    n, e = loop_edges(1)
    out.append(_close("quadrature loop k=1", -1 / 12, quad_diagram(gproduct_integrand(e), n, QuadratureSpec(12)), 1e-9))
    mono = [(2, 0), (0, 4)]
    out.append(_exact("quartic cumulant vs connected sum", cumulant(mono).terms, connected_sum(mono).terms))
    b = {"x0": 0.7, "p0": 0.3, "hbar": 1.0}
    out.append(_close("quartic order-2 quadrature", poly_eval(evaluate_integrand(cumulant(mono), 2), b),
                      quad_diagram(integrand_callable(cumulant(mono), b), 2), 1e-8))
    w = reorder_weak_coupling(s, ho)
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(20):
        point = {"x0": rng.uniform(-2, 2), "p0": rng.uniform(-2, 2), "hbar": rng.uniform(0.5, 1.5),
                 "beta": rng.uniform(0.1, 1.0), "M": rng.uniform(0.5, 2.0), "omega": rng.uniform(0.5, 2.0)}
        worst = max(worst, abs(s.evaluate(point) - w.evaluate(point)))
    out.append(_close("weak-coupling reordering", 0.0, worst, 1e-12))
    return out
