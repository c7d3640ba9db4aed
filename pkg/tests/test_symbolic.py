import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from effham.symbolic import SYMBOLS, Poly, UnboundSymbolError, bernoulli, poly_eval, poly_sum, zeta_even_coeff

# small random polynomials: few terms, bounded exponents, M may be inverted
_exp = st.tuples(*[st.integers(-2, 2) if s == "M" else st.integers(0, 3) for s in SYMBOLS])
_coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)
polys = st.dictionaries(_exp, _coef, max_size=4).map(Poly)


@settings(max_examples=1000, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    zero, one = Poly(), Poly.const(1)
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + zero == a and a * one == a
    assert (a - a).is_zero()


@settings(max_examples=300, deadline=None)
@given(polys)
def test_render_parse_round_trip(p):
    assert Poly.parse(p.render()) == p
    assert p.render() == Poly.parse(p.render()).render()


@settings(max_examples=200, deadline=None)
@given(polys, polys)
def test_eval_is_homomorphism(a, b):
    pt = {"x0": 0.3, "p0": -1.1, "hbar": 0.7, "beta": 1.3, "M": 2.0, "omega": 0.9, "g": 0.4}
    assert math.isclose(poly_eval(a * b, pt), poly_eval(a, pt) * poly_eval(b, pt), rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(poly_eval(a + b, pt), poly_eval(a, pt) + poly_eval(b, pt), rel_tol=1e-9, abs_tol=1e-9)


def test_canonical_order_is_deterministic():
    p = Poly.monomial(Fraction(1, 2), M=-1, p0=2) + Poly.monomial(Fraction(1, 2), M=1, omega=2, x0=2)
    q = Poly.monomial(Fraction(1, 2), M=1, omega=2, x0=2) + Poly.monomial(Fraction(1, 2), M=-1, p0=2)
    assert p.render() == q.render()
    assert p.render() == "1/2 * x0^2 * M * omega^2 + 1/2 * p0^2 * M^-1"


def test_only_mass_may_be_inverted():
    Poly.symbol("M", -3)
    with pytest.raises(ValueError):
        Poly.symbol("hbar", -1)
    with pytest.raises(ValueError):
        Poly.symbol("omega") ** -1


def test_unbound_symbol_named():
    with pytest.raises(UnboundSymbolError) as info:
        poly_eval(Poly.symbol("omega") + 1, {"x0": 1.0})
    assert info.value.symbol == "omega"


def test_examples_from_api_walkthrough():
    x0, M, w = Poly.symbol("x0"), Poly.symbol("M"), Poly.symbol("omega")
    half = Poly.const(Fraction(1, 2))
    p = half * M * w ** 2 * x0 ** 2
    assert poly_eval(p, {"x0": 2.0, "M": 1.0, "omega": 1.0}) == 2.0
    assert poly_sum([p, p]) == p.scale(2)


def _bernoulli_from_generating_function(n_max):
    # x / (e^x - 1) = sum B_n x^n / n!
    x = sympy.symbols("x")
    ser = sympy.series(x / (sympy.exp(x) - 1), x, 0, n_max + 1).removeO()
    return [Fraction(str(ser.coeff(x, n) * sympy.factorial(n))) for n in range(n_max + 1)]


def test_bernoulli_against_generating_function():
    ref = _bernoulli_from_generating_function(16)
    assert [bernoulli(n) for n in range(17)] == ref
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(6) == Fraction(1, 42)


def test_zeta_values():
    assert zeta_even_coeff(1) == Fraction(1, 6)
    assert zeta_even_coeff(2) == Fraction(1, 90)
    assert zeta_even_coeff(3) == Fraction(1, 945)
    with pytest.raises(ValueError):
        zeta_even_coeff(0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_zeta_against_partial_sums(k):
    n = 200_000
    m = np.arange(1, n + 1, dtype=float)
    partial = math.fsum(m ** (-2 * k))
    tail = 1.0 / ((2 * k - 1) * n ** (2 * k - 1))  # integral bound on the omitted tail
    exact = float(zeta_even_coeff(k)) * math.pi ** (2 * k)
    assert -1e-15 <= exact - partial <= tail + 1e-15
