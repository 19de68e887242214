"""Hemisphere Fourier transform of the cot interaction to momentum space.

On one hemisphere the transform of ``-2 G sqrt(kappa) cot(chi)`` with the 4D
plane wave ``exp(i |q| |r| cos(theta))`` and the shell constraint
``|x| = R`` reduces, after the exact theta/phi integration, to

    Pi(q) = -2 G sqrt(kappa) (2 mu / hbar^2) R^3
            * int sin(chi) cos(chi) sinc(x sin(chi)) dchi,    x = q/(hbar sqrt(kappa)),

over ``[0, pi/2]`` (Northern) or ``[pi/2, pi]`` (Southern).  The Northern
closed form is ``c * 2 sin^2(x/2) / x^2`` with ``c = 2G (2 mu)/(hbar^2 kappa)``.

The literal integral above comes out as the *negative* of that closed form on
the Northern hemisphere.  :func:`sign_convention_audit` measures this and the
library freezes ``SIGN_CONVENTION = -1`` so that :func:`hemisphere_fourier`
returns the positive Northern propagator and its mirror image on the South.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ToleranceError
from .geometry import Hemisphere
from .potentials import PhysicalParams

GL_ORDER = 16
SERIES_CUTOFF = 1e-4
SIGN_CONVENTION = -1

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


def sinc(t):
    """``sin(t)/t`` with a Taylor branch for ``|t| < 1e-4``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SERIES_CUTOFF
    safe = np.where(small, 1.0, t)
    t2 = t * t
    out = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def half_versine_ratio(x):
    """``2 sin^2(x/2) / x^2 = (1 - cos x)/x^2``, with value 1/2 at the origin."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 0.5 - x2 / 24.0 + x2 * x2 / 720.0,
                   2.0 * np.sin(safe / 2.0) ** 2 / (safe * safe))
    return out if out.ndim else float(out)


def dimensionless_momentum(q, p: PhysicalParams):
    return np.asarray(q, dtype=float) / (p.hbar * math.sqrt(p.kappa))


def closed_form_propagator(q, p: PhysicalParams):
    """Northern-hemisphere propagator ``c * 2 sin^2(x/2) / x^2``."""
    q_arr = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(q_arr)) or np.any(q_arr < 0):
        raise ParameterError(f"momentum must be finite and non-negative, got {q!r}")
    return p.c * half_versine_ratio(dimensionless_momentum(q, p))


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel control for the chi integral.

    The panel count is ``max(base_panels, panels_per_wavelength * ceil(x/2pi))``;
    each panel carries a fixed 16-point Gauss-Legendre rule.
    """

    base_panels: int = 8
    panels_per_wavelength: int = 8
    abs_tol: float = 1e-8
    rel_tol: float = 1e-7

    def __post_init__(self):
        if self.base_panels < 8:
            raise ParameterError(f"base_panels must be >= 8, got {self.base_panels}")
        if self.panels_per_wavelength < 8:
            raise ParameterError(
                f"panels_per_wavelength must be >= 8, got {self.panels_per_wavelength}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ParameterError("abs_tol and rel_tol must be positive")

    def panels(self, x: float) -> int:
        return max(self.base_panels, self.panels_per_wavelength * math.ceil(x / (2 * math.pi)))

    def tolerance(self, reference: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(reference))


def gauss_legendre_panels(f, a: float, b: float, n_panels: int) -> float:
    """Composite Gauss-Legendre rule on ``n_panels`` equal panels of ``[a, b]``."""
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    return float(np.sum(half[:, None] * _GL_WEIGHTS[None, :] * f(pts)))


def kernel_integral(x: float, hemisphere: Hemisphere, n_panels: int) -> float:
    """``int sin(chi) cos(chi) sinc(x sin(chi)) dchi`` over one hemisphere."""
    lo, hi = Hemisphere(hemisphere).chi_range
    return gauss_legendre_panels(
        lambda chi: np.sin(chi) * np.cos(chi) * sinc(x * np.sin(chi)), lo, hi, n_panels)


def transform_prefactor(p: PhysicalParams) -> float:
    """``-2 G sqrt(kappa) (2 mu/hbar^2) R^3`` with the 4pi of the angular integral divided out."""
    return -2.0 * p.G * math.sqrt(p.kappa) * (2.0 * p.mu / p.hbar**2) * p.radius**3


def _raw_transform(q: float, p: PhysicalParams, hemisphere: Hemisphere, cfg: QuadratureConfig):
    x = float(dimensionless_momentum(q, p))
    n = cfg.panels(x)
    pref = transform_prefactor(p)
    coarse = pref * kernel_integral(x, hemisphere, n)
    fine = pref * kernel_integral(x, hemisphere, 2 * n)
    return fine, abs(fine - coarse)


def hemisphere_fourier(q: float, p: PhysicalParams, hemisphere: Hemisphere = Hemisphere.NORTHERN,
                       cfg: QuadratureConfig | None = None) -> float:
    """Momentum-space transform of the cot term over one hemisphere by quadrature.

    Raises:
        ToleranceError: if the panel-doubling error estimate exceeds the
            configured tolerance; ``estimate`` carries the achieved value.
    """
    cfg = cfg or QuadratureConfig()
    if not (math.isfinite(q) and q >= 0):
        raise ParameterError(f"momentum must be finite and non-negative, got {q!r}")
    value, err = _raw_transform(q, p, hemisphere, cfg)
    value *= SIGN_CONVENTION
    if err > cfg.tolerance(value):
        raise ToleranceError(f"quadrature error estimate {err:.3e} above tolerance at q={q!r}",
                             estimate=err, q=q)
    return value


@dataclass(frozen=True)
class SignAudit:
    q_probe: float
    prefactor: float
    kernel_integral: float
    raw_value: float
    closed_form: float
    magnitude_ratio: float
    raw_sign_matches: bool
    convention_sign: int
    raw_hemisphere_matching_closed_form: Hemisphere


def sign_convention_audit(p: PhysicalParams, cfg: QuadratureConfig | None = None,
                          q_probe: float = 1.0) -> SignAudit:
    """Evaluate the literal Northern integral factor by factor and compare with the closed form."""
    cfg = cfg or QuadratureConfig()
    if p.G == 0 or q_probe <= 0:
        raise ParameterError("the audit needs G != 0 and q_probe > 0")
    x = float(dimensionless_momentum(q_probe, p))
    pref = transform_prefactor(p)
    kern = kernel_integral(x, Hemisphere.NORTHERN, 2 * cfg.panels(x))
    raw = pref * kern
    closed = float(closed_form_propagator(q_probe, p))
    matches = math.copysign(1.0, raw) == math.copysign(1.0, closed)
    return SignAudit(
        q_probe=q_probe,
        prefactor=pref,
        kernel_integral=kern,
        raw_value=raw,
        closed_form=closed,
        magnitude_ratio=abs(raw) / abs(closed),
        raw_sign_matches=matches,
        convention_sign=1 if matches else -1,
        raw_hemisphere_matching_closed_form=Hemisphere.NORTHERN if matches else Hemisphere.SOUTHERN,
    )


def format_audit(report: SignAudit, p: PhysicalParams) -> str:
    """Markdown rendering of an audit; ``docs/sign_convention.md`` is generated from it."""
    lines = [
        "# Sign convention of the hemisphere transform",
        "",
        "Generated by `rmprop.momentum.format_audit` "
        f"(G={p.G!r}, kappa={p.kappa!r}, hbar={p.hbar!r}, mu={p.mu!r}).",
        "",
        "| quantity | value |",
        "|---|---|",
        f"| q_probe | {report.q_probe:.17g} |",
        f"| prefactor -2G sqrt(kappa) (2mu/hbar^2) R^3 | {report.prefactor:.17g} |",
        f"| kernel integral over [0, pi/2] | {report.kernel_integral:.17g} |",
        f"| raw Northern integral | {report.raw_value:.17g} |",
        f"| closed form c 2 sin^2(x/2)/x^2 | {report.closed_form:.17g} |",
        f"| abs(raw)/closed form | {report.magnitude_ratio:.17g} |",
        f"| raw sign matches closed form | {report.raw_sign_matches} |",
        f"| raw hemisphere reproducing the closed form | {report.raw_hemisphere_matching_closed_form.name} |",
        f"| frozen convention sign | {report.convention_sign:+d} |",
        "",
        "The literal integral is the closed form times the convention sign.",
        "`hemisphere_fourier` multiplies the raw integral by the frozen sign, so the",
        "Northern transform equals the positive closed form and the Southern one its mirror image.",
        "",
    ]
    return "\n".join(lines)


class CurveMode(enum.Enum):
    CLOSED_FORM = "closed"
    NORTHERN = "north"
    SOUTHERN = "south"


@dataclass(frozen=True)
class MomentumGrid:
    q_values: np.ndarray
    params: PhysicalParams

    def __post_init__(self):
        q = np.asarray(self.q_values, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ParameterError("momentum grid must be a non-empty 1D sequence")
        if np.any(~np.isfinite(q)) or np.any(q < 0) or np.any(np.diff(q) < 0):
            raise ParameterError("momentum grid must be finite, non-negative and ascending")
        object.__setattr__(self, "q_values", q)

    @property
    def x(self) -> np.ndarray:
        return dimensionless_momentum(self.q_values, self.params)


@dataclass(frozen=True)
class PropagatorCurve:
    grid: MomentumGrid
    values: np.ndarray
    mode: CurveMode
    params: PhysicalParams
    quad_meta: QuadratureConfig | None = field(default=None)


def propagator_curve(grid: MomentumGrid, p: PhysicalParams | None = None,
                     mode: CurveMode = CurveMode.CLOSED_FORM,
                     cfg: QuadratureConfig | None = None) -> PropagatorCurve:
    p = p or grid.params
    mode = CurveMode(mode)
    if mode is CurveMode.CLOSED_FORM:
        values = np.asarray(closed_form_propagator(grid.q_values, p), dtype=float)
        return PropagatorCurve(grid, values, mode, p)
    cfg = cfg or QuadratureConfig()
    hemi = Hemisphere.NORTHERN if mode is CurveMode.NORTHERN else Hemisphere.SOUTHERN
    values = np.empty_like(grid.q_values)
    for i, q in enumerate(grid.q_values):
        values[i] = hemisphere_fourier(float(q), p, hemi, cfg)
    return PropagatorCurve(grid, values, mode, p, cfg)


@dataclass(frozen=True)
class LimitReport:
    c: float
    ir_value: float
    first_zero_x: float
    first_zero_q: float
    uv_envelope_sup: float


def uv_ir_limits(p: PhysicalParams) -> LimitReport:
    """IR value ``c/2``, first zero at ``x = 2pi`` and the Coulomb-like envelope ``x^2 Pi <= 2c``."""
    if p.G <= 0:
        raise ParameterError("limit report assumes G > 0")
    scale = p.hbar * math.sqrt(p.kappa)
    return LimitReport(
        c=p.c,
        ir_value=float(closed_form_propagator(0.0, p)),
        first_zero_x=2 * math.pi,
        first_zero_q=2 * math.pi * scale,
        uv_envelope_sup=2.0 * p.c,
    )


def uv_envelope(x, p: PhysicalParams):
    """``x^2 Pi(x) = 2c sin^2(x/2)``."""
    x = np.asarray(x, dtype=float)
    return 2.0 * p.c * np.sin(x / 2.0) ** 2
