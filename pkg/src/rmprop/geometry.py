"""Charts on the hypersphere S^3 embedded in four-dimensional Euclidean space.

A point is labelled by the second polar angle ``chi`` together with the
ordinary polar angles ``theta`` and ``phi``.  With radius ``R = 1/sqrt(kappa)``

    |r| = R sin(chi),    x4 = R cos(chi),    x4**2 + |r|**2 = R**2.

All angles are radians.  ``chi`` is the canonical coordinate; the flat-space
radius ``|r|`` only enters through :func:`chi_from_radius`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError


class Hemisphere(enum.Enum):
    NORTHERN = "north"
    SOUTHERN = "south"

    @classmethod
    def of(cls, chi: float) -> "Hemisphere":
        """Classify an angle; the equator chi = pi/2 counts as Northern."""
        _check_chi(chi)
        return cls.NORTHERN if chi <= math.pi / 2 else cls.SOUTHERN

    @property
    def sign(self) -> int:
        return 1 if self is Hemisphere.NORTHERN else -1

    @property
    def chi_range(self) -> tuple[float, float]:
        if self is Hemisphere.NORTHERN:
            return 0.0, math.pi / 2
        return math.pi / 2, math.pi


@dataclass(frozen=True)
class Curvature:
    """Constant positive curvature ``kappa = 1/R**2`` of the hypersphere."""

    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ParameterError(f"kappa must be positive and finite, got {self.kappa!r}")

    @property
    def radius(self) -> float:
        return 1.0 / math.sqrt(self.kappa)

    def __float__(self) -> float:
        return float(self.kappa)


@dataclass(frozen=True)
class SpherePoint:
    chi: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.chi <= math.pi:
            raise DomainError(f"chi={self.chi!r} outside [0, pi]")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta={self.theta!r} outside [0, pi]")
        if not 0.0 <= self.phi < 2 * math.pi:
            raise DomainError(f"phi={self.phi!r} outside [0, 2pi)")

    @property
    def hemisphere(self) -> Hemisphere:
        return Hemisphere.of(self.chi)

    def embedding(self, kappa) -> np.ndarray:
        """Cartesian coordinates ``(x, y, z, x4)`` in E_4."""
        r = radius_from_chi(self.chi, kappa)
        return np.array([
            r * math.sin(self.theta) * math.cos(self.phi),
            r * math.sin(self.theta) * math.sin(self.phi),
            r * math.cos(self.theta),
            x4_from_chi(self.chi, kappa),
        ])


def _kappa(kappa) -> float:
    return Curvature(float(kappa)).kappa


def _check_chi(chi):
    c = np.asarray(chi, dtype=float)
    if np.any(~np.isfinite(c)) or np.any(c < 0.0) or np.any(c > math.pi):
        raise DomainError("chi outside [0, pi]")


def radius_from_chi(chi, kappa):
    """Flat-space radius ``|r| = sin(chi)/sqrt(kappa)``."""
    _check_chi(chi)
    return np.sin(chi) / math.sqrt(_kappa(kappa))


def x4_from_chi(chi, kappa):
    """Extra-dimension coordinate ``x4 = cos(chi)/sqrt(kappa)``."""
    _check_chi(chi)
    return np.cos(chi) / math.sqrt(_kappa(kappa))


def chi_from_radius(r, kappa, hemisphere: Hemisphere = Hemisphere.NORTHERN):
    """Invert :func:`radius_from_chi` on the requested hemisphere.

    Raises:
        DomainError: if ``r`` is negative or exceeds the sphere radius.
    """
    k = _kappa(kappa)
    s = np.asarray(r, dtype=float) * math.sqrt(k)
    if np.any(~np.isfinite(s)) or np.any(s < 0.0) or np.any(s > 1.0):
        raise DomainError(f"radius {r!r} outside [0, R] with R={1 / math.sqrt(k)!r}")
    chi = np.arcsin(s)
    if Hemisphere(hemisphere) is Hemisphere.SOUTHERN:
        chi = math.pi - chi
    return chi if np.ndim(chi) else float(chi)
