"""Effective classical Hamiltonians from the perturbative phase-space path integral."""

from .evaluator import (
    CapacityError,
    DiagramValue,
    chain_value,
    evaluate_integrand,
    integrate_simplex,
    loop_value_closed,
    matsubara_loop_numeric,
)
from .green import GreenValue, green_matsubara_partial, green_scaled, green_unscaled
from .hamiltonian import (
    FormError,
    Hamiltonian,
    HamiltonianSyntaxError,
    ParseError,
    UnsupportedFormError,
    Vertex,
    parse_hamiltonian,
    render_hamiltonian,
    vertices,
)
from .oracle import QuadratureSpec, exact_Z_canonical, quad_diagram, series_vs_closed
from .series import (
    DivergenceError,
    EffectiveSeries,
    WeakCouplingSeries,
    heff_high_t,
    ho_closed_form,
    ho_series_coefficient,
    partition_function_quadratic,
    reorder_weak_coupling,
)
from .symbolic import ExactScalar, Poly, bernoulli, poly_eval, zeta_even_coeff
from .wick import (
    Diagram,
    FieldSlot,
    Integrand,
    Pairing,
    classify_diagram,
    cumulant,
    diagram_classes,
    enumerate_pairings,
    moment,
)

__version__ = "0.1.0"
