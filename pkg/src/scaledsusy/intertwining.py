"""Partner potentials, Darboux potential differences and the scaled
intertwiner.

Dilation convention. ``(U psi)(x) = e^{lam/2} psi(e^lam x)``. With this
choice ``U`` is unitary on the line and ``U H U^+ = -e^{-2lam} D^2 / 2 +
V(e^lam x)``, which is what matching powers of ``D`` in
``H_1 (-D + alpha) U = (-D + alpha) U H`` requires: the ``D^3`` terms give
``e^{-2lam} = 1 + eps`` and the ``D^1`` terms give the difference ``f``
below, in which ``V`` enters at the two points ``x`` and ``e^lam x``.

Grids. A function ``psi`` on grid ``G`` is carried to ``G.dilated(lam)``
without interpolation, since ``e^lam`` times a node of the dilated grid is a
node of ``G``. Operators for ``H`` live on ``G``, those for ``H_2`` on the
dilated grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .grid import (GridFunction, GridSpec, derivative, dilate_values,
                   require_same_grid)
from .potentials import HomogeneousPower, PotentialModel
from .riccati import IntertwiningParams, epsilon_of_lambda, oscillator_alpha

__all__ = [
    "PartnerKind", "PartnerPotential", "standard_partner",
    "darboux_potential_difference", "homogeneous_dpd", "scaled_partner",
    "oscillator_partner", "epsilon_of_lambda", "ground_state_wavefunction",
    "apply_scaled_intertwiner", "apply_scaled_annihilator", "dilate",
]


class PartnerKind(enum.Enum):
    STANDARD = "standard"
    SCALED = "scaled"


@dataclass(frozen=True)
class PartnerPotential:
    base: PotentialModel
    params: IntertwiningParams
    values: GridFunction
    kind: PartnerKind

    def __post_init__(self):
        if self.kind is PartnerKind.STANDARD and self.params.lam != 0.0:
            raise ValidationError("a standard partner requires lam = 0")


def standard_partner(V: PotentialModel, alpha: GridFunction,
                     alpha_deriv: GridFunction) -> GridFunction:
    """``V_1 = V - alpha'``."""
    grid = require_same_grid(alpha, alpha_deriv)
    return GridFunction(grid, V(grid.points()) - alpha_deriv.values)


def darboux_potential_difference(V: PotentialModel, alpha_deriv: GridFunction,
                                 lam: float) -> GridFunction:
    """``f(x) = e^{-2lam} alpha'(x) + e^{-2lam} V(x) - V(e^lam x)``.

    Note the non-local dependence: ``V`` is needed both at ``x`` and at the
    dilated point ``e^lam x``. Tabulated potentials raise
    :class:`OutOfDomainError` if the latter leaves their table.
    """
    x = alpha_deriv.grid.points()
    w = math.exp(-2.0 * lam)
    return GridFunction(
        alpha_deriv.grid,
        w * alpha_deriv.values + (w * V(x) - V(math.exp(lam) * x)),
    )


def homogeneous_dpd(V: PotentialModel, alpha_deriv: GridFunction,
                    lam: float) -> GridFunction:
    """Local form ``f = s^-2 alpha' + (s^-2 - s^d) V`` for ``V`` homogeneous of degree ``d``."""
    if not isinstance(V, HomogeneousPower):
        raise ValidationError(
            f"homogeneous_dpd needs a homogeneous potential, got {type(V).__name__}"
        )
    x = alpha_deriv.grid.points()
    s = math.exp(lam)
    return GridFunction(
        alpha_deriv.grid,
        alpha_deriv.values / (s * s) + (s**-2 - s**V.degree) * V(x),
    )


def scaled_partner(V: PotentialModel, alpha_deriv: GridFunction,
                   lam: float) -> GridFunction:
    """``V_2(x) = e^{2lam} V(e^lam x) - alpha'(x)``.

    Equal, up to rounding, to ``V - e^{2lam} f`` with ``f`` from
    :func:`darboux_potential_difference`.
    """
    x = alpha_deriv.grid.points()
    s = math.exp(lam)
    return GridFunction(alpha_deriv.grid, s * s * V(s * x) - alpha_deriv.values)


def oscillator_partner(params: IntertwiningParams, grid: GridSpec,
                       validate: bool = True) -> GridFunction:
    """``V_2(x) = e^{4lam} x^2/2 - e^{2lam} alpha_t'(e^lam x)`` for ``V = x^2/2``."""
    x = grid.points()
    s = math.exp(params.lam)
    _, dalpha = oscillator_alpha(params, x, validate)  # already carries e^{2lam}
    return GridFunction(grid, s**4 * 0.5 * x * x - dalpha)


def ground_state_wavefunction(alpha: GridFunction) -> GridFunction:
    """``psi_E(x) ~ exp(-int_0^x alpha)``, normalised to unit discrete norm.

    The integral uses the trapezoidal rule from the node closest to 0; the
    exponent is shifted by its maximum before exponentiating, so only a
    non-finite ``alpha`` can overflow.
    """
    g = alpha.grid
    if not (g.x_min <= 0.0 <= g.x_max):
        raise ValidationError("ground_state_wavefunction needs 0 inside the grid")
    a = alpha.values
    cum = np.concatenate(([0.0], np.cumsum(0.5 * g.h * (a[1:] + a[:-1]))))
    i0 = int(np.argmin(np.abs(g.points())))
    expo = -(cum - cum[i0])
    if not np.all(np.isfinite(expo)):
        raise NumericalError("non-finite exponent while integrating alpha")
    psi = np.exp(expo - expo.max())
    return GridFunction(g, psi).normalized()


def dilate(psi: GridFunction, lam: float, target: GridSpec | None = None) -> GridFunction:
    """``(U psi)(x) = e^{lam/2} psi(e^lam x)`` sampled on ``target``.

    ``target`` defaults to ``psi.grid.dilated(lam)``, for which no
    interpolation is needed.
    """
    target = psi.grid.dilated(lam) if target is None else target
    return GridFunction(target, dilate_values(psi, lam, target))


def apply_scaled_intertwiner(alpha: GridFunction, lam: float,
                             psi: GridFunction) -> GridFunction:
    """``A+_lam psi = (1/sqrt 2)(-D + alpha) U psi`` on ``alpha``'s grid.

    Raises :class:`OutOfDomainError` if ``e^lam x`` leaves psi's grid.
    """
    g = alpha.grid
    ps = dilate_values(psi, lam, g)
    return GridFunction(g, (-derivative(ps, g.h) + alpha.values * ps) / math.sqrt(2.0))


def apply_scaled_annihilator(alpha: GridFunction, lam: float, phi: GridFunction,
                             target: GridSpec | None = None) -> GridFunction:
    """``A_lam phi = (1/sqrt 2) U^+ (D + alpha) phi``, the formal adjoint of ``A+_lam``.

    ``phi`` lives on alpha's grid; the result on ``target`` (default: the
    grid that ``alpha.grid`` is the ``lam``-dilation of).
    """
    g = require_same_grid(alpha, phi)
    chi = GridFunction(g, (derivative(phi.values, g.h) + alpha.values * phi.values) / math.sqrt(2.0))
    target = g.dilated(-lam) if target is None else target
    return dilate(chi, -lam, target)
