"""Finite-difference angular Laplacian on S^3 and the chi-space eigenproblem.

The S-equation

    -kappa hbar^2/(2 mu) S'' + V(chi) S = E S,    S(0) = S(pi) = 0,

is discretized with second-order central differences on the interior nodes of
a uniform grid.  Its free eigenvalues are ``kappa hbar^2/(2 mu) (K+1)^2``,
i.e. the K^2 Casimir value ``K(K+2)`` shifted by one unit of
``kappa hbar^2/(2 mu)`` (see :func:`s_equation_offset`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import DomainError, ParameterError, SolverError
from .potentials import PhysicalParams, rosen_morse

MIN_POINTS = 16
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ChiGrid:
    """Uniform interior grid ``chi_j = j*h``, ``j = 1..n_points``, ``h = pi/(n_points+1)``."""

    n_points: int

    def __post_init__(self):
        if isinstance(self.n_points, bool) or not isinstance(self.n_points, (int, np.integer)):
            raise ParameterError(f"n_points must be an integer, got {self.n_points!r}")
        if self.n_points < MIN_POINTS:
            raise ParameterError(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")

    @property
    def h(self) -> float:
        return math.pi / (self.n_points + 1)

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(1, self.n_points + 1) * self.h

    def refined(self) -> "ChiGrid":
        return ChiGrid(2 * self.n_points)

    def coarsened(self) -> "ChiGrid":
        return ChiGrid(self.n_points // 2)


@dataclass(frozen=True)
class KQuantumNumbers:
    """Labels of a state ``|K l m>`` of the SO(4) > SO(3) > SO(2) chain."""

    K: int
    l: int
    m: int = 0

    def __post_init__(self):
        if self.K < 0 or not 0 <= self.l <= self.K or not -self.l <= self.m <= self.l:
            raise ParameterError(f"invalid quantum numbers K={self.K}, l={self.l}, m={self.m}")

    @property
    def n(self) -> int:
        return self.K + 1

    @property
    def casimir(self) -> int:
        return self.K * (self.K + 2)

    @staticmethod
    def multiplet(K: int) -> list["KQuantumNumbers"]:
        """All ``(K+1)**2`` states of the ``(K/2, K/2)`` representation."""
        return [KQuantumNumbers(K, l, m) for l in range(K + 1) for m in range(-l, l + 1)]


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    params: PhysicalParams
    grid: ChiGrid
    extrapolated: bool = False
    grid_pair: tuple[int, int] | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False, compare=False)


def s_equation_offset(p: PhysicalParams) -> float:
    """Constant separating S-equation eigenvalues from ``energy_scale * K(K+2)``."""
    return p.energy_scale


def free_eigenvalue(K: int, p: PhysicalParams) -> float:
    """S-equation eigenvalue of the free (G = 0) level with 4D label K."""
    return p.energy_scale * KQuantumNumbers(K, 0).casimir + s_equation_offset(p)


def _check_samples(f, grid: ChiGrid) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n_points,):
        raise ParameterError(f"expected {grid.n_points} samples, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise DomainError("non-finite samples passed to the angular Laplacian")
    return f


def apply_radial_laplacian(f, l: int, grid: ChiGrid) -> np.ndarray:
    """Discrete ``sin^-2 d/dchi (sin^2 df/dchi) - l(l+1) f / sin^2``.

    Uses the expanded form ``f'' + 2 cot(chi) f'`` with second-order central
    differences; the ghost values beyond both ends are zero.  Constants are
    annihilated exactly except at the two boundary nodes.
    """
    f = _check_samples(f, grid)
    if l < 0:
        raise ParameterError(f"l must be non-negative, got {l}")
    h = grid.h
    chi = grid.nodes
    padded = np.concatenate(([0.0], f, [0.0]))
    second = (padded[2:] - 2.0 * f + padded[:-2]) / (h * h)
    first = (padded[2:] - padded[:-2]) / (2.0 * h)
    s = np.sin(chi)
    return second + 2.0 * np.cos(chi) / s * first - l * (l + 1) * f / (s * s)


def harmonicity_residual(grid: ChiGrid, window=(0.1, math.pi - 0.1)) -> float:
    """Max |Laplacian(cot)| over the nodes inside ``window``; tends to 0 as O(h^2)."""
    chi = grid.nodes
    lap = apply_radial_laplacian(np.cos(chi) / np.sin(chi), 0, grid)
    inside = (chi >= window[0]) & (chi <= window[1])
    if not np.any(inside):
        raise ParameterError(f"no grid nodes inside window {window}")
    return float(np.max(np.abs(lap[inside])))


def psi_from_s(S, grid: ChiGrid) -> np.ndarray:
    """``psi = sin(chi) * S`` on the grid nodes."""
    return np.sin(grid.nodes) * _check_samples(S, grid)


def laplacian_profile_from_s(S, grid: ChiGrid) -> np.ndarray:
    """``S / sin(chi)``: the profile that solves the K^2 equation when S solves the S-equation."""
    return _check_samples(S, grid) / np.sin(grid.nodes)


def s_equation_matrix(p: PhysicalParams, grid: ChiGrid) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetric tridiagonal S-equation matrix."""
    a = p.energy_scale
    h2 = grid.h**2
    v = rosen_morse(grid.nodes, p)
    if not np.all(np.isfinite(v)):
        raise SolverError("non-finite potential sample on the chi grid")
    diag = 2.0 * a / h2 + v
    off = np.full(grid.n_points - 1, -a / h2)
    return diag, off


def _solve_grid(p: PhysicalParams, grid: ChiGrid, n_levels: int):
    diag, off = s_equation_matrix(p, grid)
    try:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1))
    except (LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal eigen-solve failed: {exc}") from exc
    if len(w) != n_levels:
        raise SolverError(f"expected {n_levels} eigenvalues, got {len(w)}")
    av = diag[:, None] * v
    av[:-1] += off[:, None] * v[1:]
    av[1:] += off[:, None] * v[:-1]
    norm = np.max(np.abs(diag)) + 2.0 * abs(off[0])
    resid = np.linalg.norm(av - v * w, axis=0)
    if np.any(resid > RESIDUAL_TOL * norm):
        raise SolverError(f"eigenpair residual {resid.max():.3e} exceeds {RESIDUAL_TOL}*||A||")
    return w, v


def richardson(coarse, fine, h_coarse: float, h_fine: float, order: int = 2):
    """Extrapolate two O(h**order) estimates to h -> 0."""
    ratio = (h_coarse / h_fine) ** order
    fine = np.asarray(fine, dtype=float)
    return fine + (fine - np.asarray(coarse, dtype=float)) / (ratio - 1.0)


def solve_spectrum(p: PhysicalParams, grid: ChiGrid, n_levels: int,
                   extrapolate: bool = False) -> SpectrumResult:
    """Lowest ``n_levels`` S-equation eigenvalues on ``grid``.

    With ``extrapolate=True`` the problem is also solved on the grid with half
    as many points and the pair is Richardson-extrapolated; ``grid`` is the
    fine member of the pair.
    """
    if n_levels < 1 or n_levels > grid.n_points // 4:
        raise ParameterError(
            f"n_levels={n_levels} must lie in [1, n_points/4 = {grid.n_points // 4}]")
    w, v = _solve_grid(p, grid, n_levels)
    if not extrapolate:
        return SpectrumResult(w, p, grid, eigenvectors=v)
    coarse = grid.coarsened()
    if n_levels > coarse.n_points // 4:
        raise ParameterError(f"grid {grid.n_points} too small to extrapolate {n_levels} levels")
    wc, _ = _solve_grid(p, coarse, n_levels)
    ext = richardson(wc, w, coarse.h, grid.h)
    return SpectrumResult(np.sort(ext), p, grid, extrapolated=True,
                          grid_pair=(coarse.n_points, grid.n_points), eigenvectors=v)


@dataclass(frozen=True)
class DegeneracyRow:
    n: int
    l: int
    level_index: int
    eigenvalue: float
    spread: float


def relative_spread(values) -> float:
    values = np.asarray(values, dtype=float)
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return 0.0
    return float((values.max() - values.min()) / scale)


def degeneracy_report(p: PhysicalParams, K_max: int, grid: ChiGrid,
                      extrapolate: bool = True, n_levels: int | None = None) -> list[DegeneracyRow]:
    """Solve the l = 0..K_max problems and compare levels sharing n = K+1.

    Level ``k`` (1-based) of the l-problem is assigned ``n = l + k``.  The
    spread of ``n`` is ``(max - min)/max|E|`` over all l that reach it.
    ``n_levels`` (default ``K_max + 1``) caps the largest n reported.
    """
    if K_max < 1:
        raise ParameterError(f"K_max must be >= 1, got {K_max}")
    n_max = K_max + 1 if n_levels is None else n_levels
    if n_max < K_max + 1:
        raise ParameterError(f"n_levels must be >= K_max + 1 = {K_max + 1}")
    by_n: dict[int, list[tuple[int, int, float]]] = {}
    for l in range(K_max + 1):
        res = solve_spectrum(p.replace(l=l), grid, n_max - l, extrapolate=extrapolate)
        for k, e in enumerate(res.eigenvalues, start=1):
            by_n.setdefault(l + k, []).append((l, k, float(e)))
    rows = []
    for n in sorted(by_n):
        spread = relative_spread([e for _, _, e in by_n[n]])
        rows.extend(DegeneracyRow(n, l, k, e, spread) for l, k, e in by_n[n])
    return rows


def spreads_by_n(rows: list[DegeneracyRow]) -> dict[int, float]:
    return {r.n: r.spread for r in rows}
