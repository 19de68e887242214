"""Trigonometric Rosen-Morse potential as an angular function on S^3."""

from .errors import DomainError, ParameterError, RmpropError, SolverError, ToleranceError
from .geometry import Curvature, Hemisphere, SpherePoint, chi_from_radius, radius_from_chi, x4_from_chi
from .momentum import (
    CurveMode,
    MomentumGrid,
    PropagatorCurve,
    QuadratureConfig,
    closed_form_propagator,
    hemisphere_fourier,
    propagator_curve,
    sign_convention_audit,
    uv_ir_limits,
)
from .operators import (
    ChiGrid,
    KQuantumNumbers,
    SpectrumResult,
    apply_radial_laplacian,
    degeneracy_report,
    harmonicity_residual,
    psi_from_s,
    solve_spectrum,
)
from .potentials import PhysicalParams, centrifugal_barrier, cot_term, rosen_morse

__version__ = "0.1.0"
