"""Numerical doubling of the Clifford torus in S^3 by catenoidal bridges."""

from .ambient import phi_map, phi_inverse, killing_field, SymmetryElement, compose
from .initsurf import (ConstructionError, ConstructionParams, SurfaceMesh, build_mesh,
                       derive_params, with_zeta, rebuild_for_zeta)
from .geomq import chart_shape, discrete_H, perturb_normal, linearization_check, verify_estimates
from .specsolve import (assemble_operator, eigen_low, approximate_kernel, solve_mod_kernel,
                        neck_dirichlet_eig, neck_harmonic_decay, quadratic_estimate, NumericalError)
from .balance import boundary_force, interior_force, force_report, zeta_update
from .driver import (SCHEMA_VERSION, Tolerances, SolveState, run_newton, embeddedness_check,
                     run_report)
from .suites import DiagnosticsReport, Section, CheckResult, SUITES

__version__ = "0.1.0"

__all__ = [
    "phi_map", "phi_inverse", "killing_field", "SymmetryElement", "compose",
    "ConstructionError", "ConstructionParams", "SurfaceMesh", "build_mesh", "derive_params",
    "with_zeta", "rebuild_for_zeta", "chart_shape", "discrete_H", "perturb_normal",
    "linearization_check", "verify_estimates", "assemble_operator", "eigen_low",
    "approximate_kernel", "solve_mod_kernel", "neck_dirichlet_eig", "neck_harmonic_decay",
    "quadratic_estimate", "NumericalError", "boundary_force", "interior_force", "force_report",
    "zeta_update", "SCHEMA_VERSION", "Tolerances", "SolveState", "run_newton",
    "embeddedness_check", "run_report", "DiagnosticsReport", "Section", "CheckResult", "SUITES",
    "CliffordDoubling", "__version__",
]


def __getattr__(name):
    # the estimator pulls in scikit-learn, so import it on first use only
    if name == "CliffordDoubling":
        from .estimator import CliffordDoubling
        return CliffordDoubling
    raise AttributeError(name)
