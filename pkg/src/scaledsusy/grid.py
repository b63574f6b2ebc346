"""Uniform 1D grids, sampled functions and the finite-difference helpers
shared by the operator code."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridMismatchError, OutOfDomainError, ValidationError


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``n`` points on ``[x_min, x_max]`` (both included)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"grid needs n >= 3 points, got n={self.n}")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValidationError("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise ValidationError(
                f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]"
            )
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    def dilated(self, lam: float) -> "GridSpec":
        """The grid whose points are ``e^{-lam}`` times these.

        A function sampled here at ``x`` and one sampled on the dilated grid
        at ``e^{-lam} x`` share node indices, which makes the dilation
        ``psi(x) -> psi(e^lam x)`` an exact reindexing.
        """
        s = math.exp(-lam)
        return GridSpec(self.x_min * s, self.x_max * s, self.n)

    def refined(self) -> "GridSpec":
        """Same interval, half the spacing."""
        return GridSpec(self.x_min, self.x_max, 2 * self.n - 1)

    def is_symmetric(self, rtol: float = 1e-9) -> bool:
        return abs(self.x_min + self.x_max) <= rtol * self.width

    def interior_mask(self, fraction: float = 0.05) -> np.ndarray:
        """Boolean mask that drops ``fraction`` of the points at each end."""
        cut = max(2, int(math.ceil(fraction * self.n)))
        mask = np.zeros(self.n, dtype=bool)
        mask[cut : self.n - cut] = True
        return mask


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples of a function on a :class:`GridSpec`.

    The value array is copied on construction and made read-only.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if vals.size != self.grid.n:
            raise ValidationError(
                f"expected {self.grid.n} samples for the grid, got {vals.size}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("grid function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, grid: GridSpec, fn) -> "GridFunction":
        return cls(grid, fn(grid.points()))

    @property
    def x(self) -> np.ndarray:
        return self.grid.points()

    def norm(self, mask=None) -> float:
        v = self.values if mask is None else self.values[mask]
        return math.sqrt(float(np.sum(v * v)) * self.grid.h)

    def normalized(self) -> "GridFunction":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValidationError("cannot normalise the zero function")
        return GridFunction(self.grid, self.values / nrm)

    def __call__(self, x):
        return interpolate(self, x)


def require_same_grid(*fns: GridFunction) -> GridSpec:
    grid = fns[0].grid
    for f in fns[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def derivative(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative of uniformly sampled values.

    Fourth-order central differences on the interior, second-order
    one-sided formulas on the two outermost points at each end.
    """
    f = np.asarray(values, dtype=float)
    n = f.size
    if n < 5:
        raise ValidationError("derivative needs at least 5 samples")
    d = np.empty(n)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    d[1] = (f[2] - f[0]) / (2.0 * h)
    d[-2] = (f[-1] - f[-3]) / (2.0 * h)
    return d


def laplacian3(values: np.ndarray, h: float) -> np.ndarray:
    """Three-point second difference with zero (Dirichlet) values outside."""
    f = np.asarray(values, dtype=float)
    padded = np.concatenate(([0.0], f, [0.0]))
    return (padded[:-2] - 2.0 * f + padded[2:]) / (h * h)


def interpolate(fn: GridFunction, x) -> np.ndarray:
    """Cubic-spline evaluation of ``fn`` at ``x``; never extrapolates."""
    x = np.asarray(x, dtype=float)
    g = fn.grid
    slack = 1e-9 * g.width
    if np.any(x < g.x_min - slack) or np.any(x > g.x_max + slack):
        lo, hi = float(np.min(x)), float(np.max(x))
        raise OutOfDomainError(
            f"evaluation range [{lo:.6g}, {hi:.6g}] leaves the sampled "
            f"interval [{g.x_min:.6g}, {g.x_max:.6g}]"
        )
    x = np.clip(x, g.x_min, g.x_max)
    return CubicSpline(g.points(), fn.values)(x)


def dilate_values(psi: GridFunction, lam: float, target: GridSpec) -> np.ndarray:
    """Sample ``e^{lam/2} psi(e^lam x)`` at the points of ``target``.

    When ``e^lam x`` lands on psi's own nodes (``target`` is
    ``psi.grid.dilated(lam)``, or lam is 0 on the same grid) the node values
    are reused directly; otherwise psi is interpolated.
    """
    if lam == 0.0 and target == psi.grid:
        return np.array(psi.values)
    scaled = math.exp(lam) * target.points()
    src = psi.grid
    if target.n == src.n and np.allclose(
        scaled, src.points(), rtol=0.0, atol=1e-12 * src.width
    ):
        vals = np.array(psi.values)
    else:
        vals = interpolate(psi, scaled)
    return math.exp(lam / 2.0) * vals
