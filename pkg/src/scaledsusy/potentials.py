"""Closed-form and tabulated potentials ``V(x)``.

Every model is a callable evaluable at arbitrary real arguments, so the
scaled argument ``e^lam x`` needs no special handling.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OutOfDomainError, ValidationError
from .grid import GridFunction, interpolate


class PotentialModel:
    kind = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def sample(self, grid) -> GridFunction:
        return GridFunction(grid, self(grid.points()))

    def describe(self) -> dict:
        return {"kind": self.kind}


class HomogeneousPower(PotentialModel):
    """``V(x) = coefficient * |x|**degree``, so that ``V(s x) = s**d V(x)``."""

    kind = "homogeneous"

    def __init__(self, degree: float, coefficient: float = 1.0):
        if not (math.isfinite(degree) and math.isfinite(coefficient)):
            raise ValidationError("degree and coefficient must be finite")
        self.degree = float(degree)
        self.coefficient = float(coefficient)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.coefficient == 0.0:
            return np.zeros_like(x)
        if self.degree == 2.0:
            return self.coefficient * x * x
        ax = np.abs(x)
        if self.degree < 0 and np.any(ax == 0.0):
            raise OutOfDomainError(
                f"|x|^{self.degree:g} is singular at x = 0"
            )
        return self.coefficient * ax**self.degree

    def describe(self):
        return {"kind": self.kind, "degree": self.degree, "coefficient": self.coefficient}

    def __repr__(self):
        return f"HomogeneousPower(degree={self.degree!r}, coefficient={self.coefficient!r})"


class Harmonic(HomogeneousPower):
    """The oscillator ``x**2 / 2``; spectrum ``n + 1/2``."""

    kind = "harmonic"

    def __init__(self):
        super().__init__(2.0, 0.5)

    def describe(self):
        return {"kind": self.kind}

    def __repr__(self):
        return "Harmonic()"


def free_particle() -> HomogeneousPower:
    return HomogeneousPower(2.0, 0.0)


class Tabulated(PotentialModel):
    """Potential known only on a grid.

    ``order`` 1 interpolates linearly, 3 with a cubic spline. Requests
    outside the tabulated interval raise :class:`OutOfDomainError`.
    """

    kind = "tabulated"

    def __init__(self, table: GridFunction, order: int = 3):
        if order not in (1, 3):
            raise ValidationError(f"interpolation order must be 1 or 3, got {order}")
        self.table = table
        self.order = order

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.order == 3:
            return interpolate(self.table, x)
        g = self.table.grid
        slack = 1e-9 * g.width
        if np.any(x < g.x_min - slack) or np.any(x > g.x_max + slack):
            raise OutOfDomainError(
                f"tabulated potential defined on [{g.x_min:.6g}, {g.x_max:.6g}] only"
            )
        return np.interp(x, g.points(), self.table.values)

    def describe(self):
        g = self.table.grid
        return {"kind": self.kind, "order": self.order,
                "x_min": g.x_min, "x_max": g.x_max, "n": g.n}
