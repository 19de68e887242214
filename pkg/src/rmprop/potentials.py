"""Position-space trigonometric Rosen-Morse potential on S^3.

    V(chi) = -2 G sqrt(kappa) cot(chi) + kappa hbar^2/(2 mu) l(l+1) / sin^2(chi)

The first term is the interaction (a harmonic angular function), the second
the centrifugal barrier on the hypersphere.  Evaluation at the poles
``chi in {0, pi}`` raises instead of returning infinities.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry
from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class PhysicalParams:
    """Units and couplings of the problem.

    ``G`` carries units energy*length so that ``G*sqrt(kappa)`` is an energy.
    The defaults are natural units with ``2*mu = 1``.
    """

    hbar: float = 1.0
    mu: float = 0.5
    G: float = 1.0
    kappa: float = 1.0
    l: int = 0

    def __post_init__(self):
        for name in ("hbar", "mu", "kappa"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v!r}")
        if not (isinstance(self.G, (int, float)) and math.isfinite(self.G)):
            raise ParameterError(f"G must be finite, got {self.G!r}")
        if isinstance(self.l, bool) or not isinstance(self.l, (int, np.integer)) or self.l < 0:
            raise ParameterError(f"l must be a non-negative integer, got {self.l!r}")

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.kappa)

    @property
    def energy_scale(self) -> float:
        """``kappa * hbar**2 / (2 mu)``, the kinetic prefactor in chi."""
        return self.kappa * self.hbar**2 / (2.0 * self.mu)

    @property
    def B(self) -> float:
        """Coupling of the cot term in energy units, ``G*sqrt(kappa)``."""
        return self.G * math.sqrt(self.kappa)

    @property
    def c(self) -> float:
        """Strength ``2G * 2mu/(hbar^2 kappa)`` of the momentum-space propagator."""
        return 2.0 * self.G * 2.0 * self.mu / (self.hbar**2 * self.kappa)

    def replace(self, **changes) -> "PhysicalParams":
        return PhysicalParams(**{**asdict(self), **changes})

    def as_dict(self) -> dict:
        return asdict(self)


def _check_interior(chi):
    c = np.asarray(chi, dtype=float)
    if np.any(~np.isfinite(c)) or np.any(c <= 0.0) or np.any(c >= math.pi):
        raise DomainError("chi endpoint: chi must lie strictly inside (0, pi)")


def cot_term(chi, p: PhysicalParams):
    """Interaction ``-2 G sqrt(kappa) cot(chi)``, i.e. ``-2 G sqrt(kappa) x4/|r|``."""
    _check_interior(chi)
    return -2.0 * p.B * np.cos(chi) / np.sin(chi)


def cot_term_cartesian(chi, p: PhysicalParams):
    """Same as :func:`cot_term` but routed through the embedding coordinates."""
    _check_interior(chi)
    x4 = geometry.x4_from_chi(chi, p.kappa)
    r = geometry.radius_from_chi(chi, p.kappa)
    return -2.0 * p.B * x4 / r


def centrifugal_barrier(chi, p: PhysicalParams):
    _check_interior(chi)
    return p.energy_scale * p.l * (p.l + 1) / np.sin(chi) ** 2


def rosen_morse(chi, p: PhysicalParams):
    """Full potential; equals ``cot_term + centrifugal_barrier`` pointwise."""
    return cot_term(chi, p) + centrifugal_barrier(chi, p)
