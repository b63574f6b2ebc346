"""Separable 2D potentials as 2x2 diagonal block operators.

Each axis carries its own superpotential, factorization energy and scaling
parameter. Nothing is ever sampled on an n x n product grid: every 2D
quantity is assembled from the two 1D problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grid import GridFunction, derivative, laplacian3, require_same_grid
from .potentials import PotentialModel
from .riccati import riccati_residual
from .spectral import (INTERIOR_FRACTION, _interior_norm, discretize,
                       lowest_k_eigenvalues)

RICCATI_TOL = 1e-8
# FD levels carry O(h^2) errors of ~1e-4 that differ from level to level, so
# continuum-degenerate sums only coincide to about this tolerance
LEVEL_RTOL = 1e-3


@dataclass(frozen=True)
class AxisFactorization:
    """Superpotential data for one axis, in the unscaled coordinate.

    ``alpha``/``alpha_deriv`` solve ``alpha' + alpha^2 = 2 (V - axis_energy)``
    on the axis grid; ``lam`` is this axis' scaling parameter.
    """

    alpha: GridFunction
    alpha_deriv: GridFunction
    potential: PotentialModel
    axis_energy: float
    lam: float = 0.0
    axis: str = "x"

    def __post_init__(self):
        require_same_grid(self.alpha, self.alpha_deriv)
        if self.axis not in ("x", "y"):
            raise ValidationError(f"axis must be 'x' or 'y', got {self.axis!r}")
        res = riccati_residual(self.alpha, self.alpha_deriv, self.potential, self.axis_energy)
        if not res < RICCATI_TOL:
            raise ValidationError(
                f"{self.axis}-axis superpotential fails its Riccati equation "
                f"(residual {res:.2e} >= {RICCATI_TOL:g})"
            )

    @property
    def grid(self):
        return self.alpha.grid

    @property
    def scale(self) -> float:
        return math.exp(2.0 * self.lam)

    def block_potential(self) -> GridFunction:
        """``(alpha^2 + alpha')/2 + E``, the potential of ``A A+ + E``."""
        a = self.alpha.values
        return GridFunction(self.grid, 0.5 * (a * a + self.alpha_deriv.values) + self.axis_energy)

    def partner_potential(self) -> GridFunction:
        """Scaled partner ``e^{2lam}(V - alpha')(e^lam x)`` on the dilated grid."""
        v1 = self.potential(self.grid.points()) - self.alpha_deriv.values
        return GridFunction(self.grid.dilated(self.lam), self.scale * v1)


@dataclass(frozen=True)
class AxisOperator:
    """First-order factorization operator ``(-D + alpha)/sqrt 2`` (or its adjoint)."""

    alpha: GridFunction
    adjoint: bool = False

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        g = self.alpha.grid
        d = derivative(psi, g.h)
        sign = 1.0 if self.adjoint else -1.0
        return (sign * d + self.alpha.values * psi) / math.sqrt(2.0)


@dataclass(frozen=True)
class BlockOperator2D:
    """``diag(block_x, block_y)``; the cross blocks are identically zero."""

    block_x: object
    block_y: object

    @property
    def cross_blocks(self) -> tuple[int, int]:
        return (0, 0)

    def is_diagonal(self) -> bool:
        return self.cross_blocks == (0, 0)

    def apply(self, psi_x, psi_y):
        return self.block_x(psi_x), self.block_y(psi_y)

    @classmethod
    def creation(cls, ax: AxisFactorization, ay: AxisFactorization) -> "BlockOperator2D":
        return cls(AxisOperator(ax.alpha), AxisOperator(ay.alpha))

    @classmethod
    def annihilation(cls, ax: AxisFactorization, ay: AxisFactorization) -> "BlockOperator2D":
        return cls(AxisOperator(ax.alpha, adjoint=True), AxisOperator(ay.alpha, adjoint=True))


def _check_axes(ax, ay):
    if ax.axis == ay.axis:
        raise ValidationError("the two axis factorizations must be for different axes")


def build_block_hamiltonian(ax: AxisFactorization, ay: AxisFactorization):
    """Discretised blocks ``A A+ + E_x`` and ``B B+ + E_y``."""
    _check_axes(ax, ay)
    return discretize(ax.block_potential()), discretize(ay.block_potential())


def build_partner_blocks(ax: AxisFactorization, ay: AxisFactorization):
    """Discretised scaled partners, one per axis, each with its own ``lam``."""
    _check_axes(ax, ay)
    return discretize(ax.partner_potential()), discretize(ay.partner_potential())


def _commutator_residual(ax: AxisFactorization, f: GridFunction, tests) -> float:
    g = ax.grid
    vb = ax.block_potential().values
    a_plus = AxisOperator(ax.alpha)
    mask = g.interior_mask(INTERIOR_FRACTION)

    def ham(p):
        return -0.5 * laplacian3(p, g.h) + vb * p

    worst = 0.0
    for psi in tests:
        if psi.grid != g:
            raise ValidationError("test functions must share the axis grid")
        ap = a_plus(psi.values)
        comm = ham(ap) - a_plus(ham(psi.values))
        den = _interior_norm(ap, g, mask)
        if den == 0.0:
            raise ValidationError("A+ psi vanishes on the interior")
        worst = max(worst, _interior_norm(comm - f.values * ap, g, mask) / den)
    return worst


def block_commutator_residual(ax: AxisFactorization, ay: AxisFactorization,
                              tests_x, tests_y, F=None) -> float:
    """Relative residual of ``[H, A+] = F A+`` with ``F = diag(alpha_x', alpha_y')``.

    Uses the unscaled (``lam = 0``) axis data. ``F`` may override the
    diagonal of the right-hand side as a pair of grid functions, e.g. to
    run a negative control.
    """
    _check_axes(ax, ay)
    fx, fy = (ax.alpha_deriv, ay.alpha_deriv) if F is None else F
    if fx.grid != ax.grid or fy.grid != ay.grid:
        raise ValidationError("F entries must live on the axis grids")
    return max(_commutator_residual(ax, fx, tests_x), _commutator_residual(ay, fy, tests_y))


@dataclass
class SeparableSpectrum:
    values: np.ndarray
    levels: list[tuple[float, int]]

    @property
    def degeneracies(self) -> list[int]:
        return [d for _, d in self.levels]


def group_levels(values, rtol: float = LEVEL_RTOL) -> list[tuple[float, int]]:
    """Merge sorted values within ``rtol * max(1, |v|)`` of a group's first member."""
    out: list[list] = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if out and abs(v - out[-1][0]) <= rtol * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(v, c) for v, c in out]


def combine_spectra(ex, ey, k: int, rtol: float = LEVEL_RTOL) -> SeparableSpectrum:
    ex = np.asarray(ex, dtype=float)
    ey = np.asarray(ey, dtype=float)
    if k > ex.size * ey.size:
        raise ValidationError(f"k={k} exceeds the {ex.size * ey.size} available sums")
    sums = np.sort((ex[:, None] + ey[None, :]).ravel())[:k]
    return SeparableSpectrum(sums, group_levels(sums, rtol))


def separable_spectrum(ax: AxisFactorization, ay: AxisFactorization, k: int,
                       partner: bool = False) -> SeparableSpectrum:
    """The ``k`` lowest sums ``E_m^x + E_n^y`` with degeneracy counts.

    ``partner=False`` uses the blocks ``A A+ + E`` (the original
    Hamiltonian); ``partner=True`` the scaled partners, whose axis spectra
    are ``e^{2 lam_i} {E_i, E_n}``.
    """
    if k < 1:
        raise ValidationError("k must be positive")
    tx, ty = build_partner_blocks(ax, ay) if partner else build_block_hamiltonian(ax, ay)
    if k > min(tx.n, ty.n):
        raise ValidationError("k exceeds the axis grid size")
    return combine_spectra(lowest_k_eigenvalues(tx, k), lowest_k_eigenvalues(ty, k), k)
