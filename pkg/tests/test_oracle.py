import ast
import math
from pathlib import Path

import numpy as np
import pytest

import effham.oracle as oracle_mod
from effham.evaluator import chain_edges, integrate_simplex, loop_edges
from effham.oracle import (
    QuadratureSpec,
    canonical_truncation_bound,
    exact_Z_canonical,
    gproduct_integrand,
    integrand_callable,
    quad_diagram,
    series_vs_closed,
)
from effham.series import heff_high_t, partition_function_quadratic
from effham.wick import cumulant


def test_loop_examples():
    n, edges = loop_edges(1)
    assert abs(quad_diagram(gproduct_integrand(edges), n, QuadratureSpec(8)) + 1 / 12) < 1e-10
    assert abs(quad_diagram(gproduct_integrand(edges), n, QuadratureSpec(12)) + 1 / 12) < 1e-9


def test_vanishing_examples():
    assert abs(quad_diagram(gproduct_integrand([(0, 1)]), 2)) < 1e-12
    n, edges = chain_edges(2)
    assert abs(quad_diagram(gproduct_integrand(edges), n)) < 1e-10
    n, edges = chain_edges(3)
    assert abs(quad_diagram(gproduct_integrand(edges), n)) < 1e-10


def test_panels_cover_cube():
    for n in (1, 2, 3):
        for h in (1.0, 2.5):
            vol = quad_diagram(lambda t: np.ones(t.shape[0]), n, QuadratureSpec(4, h))
            assert vol == pytest.approx(h ** n, rel=1e-13)


def test_quad_label_limit():
    with pytest.raises(ValueError):
        quad_diagram(lambda t: np.ones(t.shape[0]), 4)


def test_three_label_graphs():
    for edges in ([(0, 1), (1, 2), (2, 0), (0, 1)], [(0, 1), (0, 2)], [(0, 1), (0, 1), (1, 2), (1, 2)]):
        exact = integrate_simplex(3, edges).at(1.0)
        assert abs(quad_diagram(gproduct_integrand(edges), 3) - exact) < 1e-9


def test_integrand_callable_for_cumulant():
    f = cumulant([(2, 0), (0, 4), (0, 2)])
    for x0 in (0.0, 0.7):
        val = quad_diagram(integrand_callable(f, {"x0": x0, "p0": 0.0}), 3)
        assert math.isfinite(val)


def test_oracle_independent_of_simplex_integrator():
    tree = ast.parse(Path(oracle_mod.__file__).read_text())
    imported = {node.module or "" for node in ast.walk(tree) if isinstance(node, ast.ImportFrom)}
    assert not any("evaluator" in m for m in imported)


def test_canonical_examples():
    assert abs(exact_Z_canonical(1.0, 1.0, 1.0, n_max=50) - 1 / (2 * math.sinh(0.5))) < 1e-15
    assert abs(exact_Z_canonical(0.5, 1.0, 1.0, n_max=100) - 1 / (2 * math.sinh(0.25))) < 1e-15
    assert exact_Z_canonical(60.0, 1.0, 1.0, n_max=10) == pytest.approx(math.exp(-30.0), rel=1e-15)
    with pytest.raises(ValueError):
        exact_Z_canonical(0.0, 1.0, 1.0)


def test_truncation_bound():
    x = 0.2
    full = 1 / (2 * math.sinh(x / 2))
    for n_max in (10, 50, 100):
        err = full - exact_Z_canonical(x, 1.0, 1.0, n_max)
        # the bound is the exact geometric tail, so allow rounding only
        assert -1e-14 <= err <= canonical_truncation_bound(x, n_max) + 1e-14


def test_partition_agrees_over_range():
    for x in np.linspace(0.1, 3.0, 30):
        assert abs(partition_function_quadratic("ho", beta=float(x)) - exact_Z_canonical(float(x), 1.0, 1.0)) < 1e-10


def test_series_vs_closed_examples():
    r6 = series_vs_closed(6, [0.5])
    assert r6.passed and r6.max_deviation < 1e-8
    r2 = series_vs_closed(2, [0.5])
    # leading omitted term beta^3 (hbar w)^4 / 2880 with beta = x
    assert r2.rows[0].deviation == pytest.approx(0.5 ** 3 / 2880, rel=0.01)
    tiny = series_vs_closed(4, [1e-6])
    assert tiny.max_deviation < 1e-20


def test_series_vs_closed_with_computed_series():
    s = heff_high_t("p^2/(2*M) + (M*w^2/2)*x^2", 6)
    r = series_vs_closed(6, [0.25, 0.5, 1.0], series=s, p0=0.3, x0=-0.4)
    assert r.passed and not r.excluded


def test_series_vs_closed_excludes_outside_disk():
    with pytest.warns(UserWarning, match="convergence disk"):
        r = series_vs_closed(4, [1.0, 2 * math.pi, 7.0])
    assert r.excluded == [2 * math.pi, 7.0]
    assert len(r.rows) == 1


def test_empirical_ratio_approaches_limit():
    x = 3.0
    prev = None
    for order in (4, 8, 12, 16):
        row = series_vs_closed(order, [x]).rows[0]
        gap = abs(row.ratio - row.expected_ratio)
        if prev is not None:
            assert gap < prev
        prev = gap
