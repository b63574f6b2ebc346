"""Spectral engineering with the scaling parameter.

Two maps are available. A uniform scale ``sigma = e^{2lam}`` multiplies the
whole spectrum ``{E, E_n}``. The fixed-ground map picks ``E = e^{-2lam} E0``
so the new ground level stays at ``E0`` while the excited levels are
multiplied by ``kappa = E0 / E``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntervalError, SameSignError, ScaledSusyError
from .grid import GridSpec
from .intertwining import oscillator_partner
from .riccati import IntertwiningParams, check_oscillator_params
from .spectral import ShapeClass, classify_shape, discretize, lowest_k_eigenvalues

# Oscillator intervals on which the closed-form superpotential is nodeless.
I1 = (-math.inf, 0.0)
I2 = (0.0, 0.5 - 1e-6)
PRESET_INTERVALS = {"I1": I1, "I2": I2}

DEFAULT_EIGEN_GRID = GridSpec(-12.0, 12.0, 3001)


@dataclass(frozen=True)
class DesignTarget:
    """Ground level ``E0``, excited-level factor ``kappa = E0/E`` and the
    interval ``(interval_lo, interval_hi)`` on which the Riccati solution
    is available. Interval endpoints must not straddle zero."""

    ground_level: float
    spacing_factor: float
    interval: tuple[float, float] | None = None

    def __post_init__(self):
        if not math.isfinite(self.ground_level) or self.ground_level == 0.0:
            raise SameSignError("ground level must be finite and nonzero")
        if not math.isfinite(self.spacing_factor):
            raise DomainError("spacing factor must be finite")
        if self.spacing_factor <= 0.0:
            raise SameSignError(
                f"kappa = E0/E must be > 0 (E and E0 share sign), got {self.spacing_factor!r}"
            )
        lo, hi = self.resolved_interval
        if not lo < hi:
            raise IntervalError(f"empty interval [{lo}, {hi}]")
        if lo < 0.0 < hi:
            raise IntervalError(f"interval endpoints must have the same sign, got [{lo}, {hi}]")

    @property
    def resolved_interval(self) -> tuple[float, float]:
        if self.interval is not None:
            return tuple(float(v) for v in self.interval)
        return I1 if self.ground_level < 0.0 else (0.0, math.inf)

    @property
    def energy(self) -> float:
        return self.ground_level / self.spacing_factor


def design_uniform_scale(sigma: float) -> float:
    """``lam = ln(sigma) / 2``: every level of ``{E, E_n}`` is multiplied by ``sigma``."""
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise DomainError(f"scale factor must be a positive number, got {sigma!r}")
    return 0.5 * math.log(sigma)


def design_fixed_ground(target: DesignTarget, nu: float = 0.0) -> IntertwiningParams:
    """Parameters keeping the ground level at ``E0`` and scaling excited levels by ``kappa``.

    >>> p = design_fixed_ground(DesignTarget(-0.5, 2.0))
    >>> round(p.energy, 12), round(p.lam, 12)
    (-0.25, 0.34657359028)
    """
    lo, hi = target.resolved_interval
    e0 = target.ground_level
    if not lo <= e0 <= hi:
        raise IntervalError(f"E0 = {e0} lies outside the interval [{lo}, {hi}]")
    lam = 0.5 * math.log(target.spacing_factor)
    energy = e0 * math.exp(-2.0 * lam)
    if not lo <= energy <= hi:
        raise IntervalError(
            f"E = E0/kappa = {energy:.6g} leaves the interval [{lo}, {hi}]; "
            "lam must keep E inside it"
        )
    return IntertwiningParams(lam, energy, nu)


def figure1_samples(count: int = 40) -> list[float]:
    """``count`` energies spaced geometrically in (-2.5, -0.05], plus -1/2."""
    mags = np.geomspace(0.05, 2.5, count + 1)[:-1]
    samples = set((-mags).tolist())
    samples.add(-0.5)
    return sorted(samples)


@dataclass
class SweepRow:
    energy: float
    lam: float | None = None
    x: np.ndarray | None = None
    v2: np.ndarray | None = None
    shape: ShapeClass | None = None
    e0_computed: float | None = None
    e1_computed: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _sweep_row(ground_level, nu, energy, grid, eigen_grid):
    row = SweepRow(energy=float(energy))
    try:
        check_oscillator_params(energy, nu)
        if energy == 0.0 or (energy > 0) != (ground_level > 0):
            raise SameSignError(f"E = {energy} and E0 = {ground_level} must share sign")
        params = IntertwiningParams(0.5 * math.log(ground_level / energy), energy, nu)
        row.lam = params.lam
        v2 = oscillator_partner(params, grid)
        row.x = grid.points()
        row.v2 = np.array(v2.values)
        row.shape = classify_shape(v2)
        levels = lowest_k_eigenvalues(
            discretize(oscillator_partner(params, eigen_grid.dilated(params.lam))), 2
        )
        row.e0_computed, row.e1_computed = float(levels[0]), float(levels[1])
    except ScaledSusyError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def sweep_family(ground_level: float, nu: float, energy_samples, grid: GridSpec,
                 eigen_grid: GridSpec = DEFAULT_EIGEN_GRID) -> list[SweepRow]:
    """Fixed-ground oscillator family ``e^{2lam} = E0/E`` over ``energy_samples``.

    ``V_2`` is tabulated on ``grid`` (common to all rows, for surface plots)
    and classified there; the two lowest levels come from
    ``eigen_grid.dilated(lam)``. A failing sample yields a row with
    ``error`` set; the sweep carries on. Rows follow input order.
    """
    return [_sweep_row(ground_level, nu, e, grid, eigen_grid) for e in energy_samples]
