"""Critical graphs of quartic quadratic differentials and a quasi-exactly-solvable spectrum.

Modules
-------
polynomial
    Polynomials, roots, branch-tracked square roots and period integrals.
quad_diff
    Trajectory tracing, critical graphs, faces and angle-count checks.
gamma_curve
    The curve that classifies the parameter of ``(z**2 - 1)(z - a)(z - conj a)``.
qes_spectrum
    Eigenpairs, rescaled root clouds and the Riccati identity.
mother_body
    Algebraic equations for Cauchy transforms, masses and densities.
pipeline
    Root clouds compared with the limit critical graph.
"""
from ._kernel import BACKEND
from .config import DEFAULT, Config
from .gamma_curve import classify_region, gamma_value, solve_asymptote_angle, trace_branch
from .mother_body import QuadraticAlgebraicEq, discriminant_qd, total_mass, verify_candidate
from .polynomial import ComplexPolynomial, OrientedPath, period_integral, roots
from .qes_spectrum import SpectralProblem, eigenpairs, rescaled_measure, riccati_residual, select_state
from .quad_diff import QuadraticDifferential, critical_graph, short_trajectories, trace

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Config", "DEFAULT", "ComplexPolynomial", "OrientedPath", "QuadraticDifferential",
    "QuadraticAlgebraicEq", "SpectralProblem", "classify_region", "critical_graph",
    "discriminant_qd", "eigenpairs", "gamma_value", "period_integral", "rescaled_measure",
    "riccati_residual", "roots", "select_state", "short_trajectories", "solve_asymptote_angle",
    "total_mass", "trace", "trace_branch", "verify_candidate",
]
