"""Superpotentials: the closed-form oscillator solution, the numeric solution
for arbitrary potentials, the change of variable between scaled and
unscaled coordinates, and Riccati residuals.

Conventions. The scaled Riccati equation for ``alpha(x)``::

    e^{-2 lam} (alpha' + alpha^2) = 2 (V(e^lam x) - E)

becomes, with ``y = e^lam x`` and ``alpha_t(y) = e^{-lam} alpha(e^{-lam} y)``,
the ordinary one ``alpha_t' + alpha_t^2 = 2 (V(y) - E)``. Hence
``alpha(x) = e^lam alpha_t(e^lam x)`` and ``alpha'(x) = e^{2 lam} alpha_t'(e^lam x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NodefulSolutionError, SingularityError
from .grid import GridFunction, GridSpec, require_same_grid
from .potentials import Harmonic, PotentialModel
from .special import gamma_ratio, kummer_m, kummer_m_deriv

SINGULARITY_FLOOR = 1e-12


@dataclass(frozen=True)
class IntertwiningParams:
    """Scaling ``lam``, factorization energy ``energy`` and family parameter ``nu``."""

    lam: float = 0.0
    energy: float = -0.5
    nu: float = 0.0

    def __post_init__(self):
        for name in ("lam", "energy", "nu"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def epsilon(self) -> float:
        return epsilon_of_lambda(self.lam)

    @property
    def scale(self) -> float:
        """``e^{2 lam}``, the factor applied to the whole spectrum."""
        return math.exp(2.0 * self.lam)

    @classmethod
    def from_epsilon(cls, epsilon: float, energy: float, nu: float = 0.0):
        return cls(lambda_of_epsilon(epsilon), energy, nu)

    def check_oscillator(self) -> None:
        check_oscillator_params(self.energy, self.nu)


def epsilon_of_lambda(lam: float) -> float:
    """``eps = e^{-2 lam} - 1``."""
    return math.expm1(-2.0 * lam)


def lambda_of_epsilon(epsilon: float) -> float:
    if not epsilon > -1.0:
        raise DomainError(f"epsilon must exceed -1 (e^(-2 lam) > 0), got {epsilon!r}")
    return -0.5 * math.log1p(epsilon)


def check_oscillator_params(energy: float, nu: float) -> None:
    if not energy < 0.5:
        raise DomainError(f"oscillator family needs energy < 1/2, got {energy!r}")
    if not abs(nu) < 1.0:
        raise DomainError(f"oscillator family needs |nu| < 1, got {nu!r}")


def _oscillator_bracket(energy: float, nu: float, y: np.ndarray):
    """The bracket ``B(y)`` under the logarithm and its first two derivatives."""
    a1, b1 = (1.0 + 2.0 * energy) / 4.0, 0.5
    a2, b2 = (3.0 + 2.0 * energy) / 4.0, 1.5
    coef = 2.0 * nu * gamma_ratio((3.0 - 2.0 * energy) / 4.0, (1.0 - 2.0 * energy) / 4.0)
    z = -y * y

    m1 = kummer_m(a1, b1, z)
    m1p = kummer_m_deriv(a1, b1, z)
    m1pp = (a1 / b1) * kummer_m_deriv(a1 + 1.0, b1 + 1.0, z) if a1 != 0.0 else 0.0 * z

    # d/dy M(z(y)) with z = -y^2
    b = m1
    bp = -2.0 * y * m1p
    bpp = 4.0 * y * y * m1pp - 2.0 * m1p

    if coef != 0.0:
        m2 = kummer_m(a2, b2, z)
        m2p = kummer_m_deriv(a2, b2, z)
        m2pp = (a2 / b2) * kummer_m_deriv(a2 + 1.0, b2 + 1.0, z)
        # g(y) = y M2(-y^2)
        g = y * m2
        gp = m2 - 2.0 * y * y * m2p
        gpp = -6.0 * y * m2p + 4.0 * y**3 * m2pp
        b = b + coef * g
        bp = bp + coef * gp
        bpp = bpp + coef * gpp
    return b, bp, bpp


def oscillator_superpotential(energy: float, nu: float, y, validate: bool = True):
    """Closed-form superpotential of ``V(y) = y^2/2`` at factorization energy ``energy``.

    ``alpha_t(y) = y + B'(y)/B(y)`` with
    ``B(y) = M((1+2E)/4, 1/2, -y^2) + 2 nu G y M((3+2E)/4, 3/2, -y^2)``
    and ``G = Gamma((3-2E)/4) / Gamma((1-2E)/4)``. The derivative is exact,
    built from the contiguous relation for ``dM/dz``.

    Returns
    -------
    (alpha_t, alpha_t_deriv)
        Floats for scalar ``y``, arrays otherwise.

    Raises
    ------
    DomainError
        Unless ``energy < 1/2`` and ``|nu| < 1``.
    SingularityError
        If ``B(y) <= 1e-12`` anywhere (roundoff guard; cannot happen inside
        the admissible parameter range).

    ``validate=False`` skips the parameter check (negative controls only).
    """
    if validate:
        check_oscillator_params(energy, nu)
    yy = np.asarray(y, dtype=float)
    scalar = yy.ndim == 0
    yy = np.atleast_1d(yy)
    b, bp, bpp = _oscillator_bracket(energy, nu, yy)
    bad = ~(b > SINGULARITY_FLOOR)
    if bad.any():
        where = float(yy[np.argmax(bad)])
        raise SingularityError(
            f"superpotential bracket B(y) <= {SINGULARITY_FLOOR:g} at y={where:.6g} "
            f"(energy={energy}, nu={nu})"
        )
    q = bp / b
    alpha = yy + q
    dalpha = 1.0 + bpp / b - q * q
    if scalar:
        return float(alpha[0]), float(dalpha[0])
    return alpha.reshape(np.shape(y)), dalpha.reshape(np.shape(y))


def unscale_superpotential(alpha_tilde, lam: float):
    """``alpha(x) = e^lam alpha_tilde(e^lam x)`` from a scaled-coordinate solution.

    ``alpha_tilde`` is any callable; the result is a callable of ``x``.
    """
    s = math.exp(lam)
    if lam == 0.0:
        return alpha_tilde

    def alpha(x):
        return s * np.asarray(alpha_tilde(s * np.asarray(x, dtype=float)))

    return alpha


def rescale_superpotential(alpha, lam: float):
    """Inverse of :func:`unscale_superpotential`: ``e^{-lam} alpha(e^{-lam} y)``."""
    return unscale_superpotential(alpha, -lam)


def oscillator_alpha(params: IntertwiningParams, x, validate: bool = True):
    """Unscaled oscillator superpotential and its derivative at ``x``.

    ``alpha(x) = e^lam alpha_t(e^lam x)``, ``alpha'(x) = e^{2lam} alpha_t'(e^lam x)``.
    """
    s = math.exp(params.lam)
    at, atp = oscillator_superpotential(params.energy, params.nu,
                                       s * np.asarray(x, dtype=float), validate)
    return s * at, s * s * atp


def riccati_residual(alpha_tilde: GridFunction, alpha_tilde_deriv: GridFunction,
                     V: PotentialModel, energy: float) -> float:
    """``max |alpha' + alpha^2 - 2 (V - E)|`` over the grid."""
    grid = require_same_grid(alpha_tilde, alpha_tilde_deriv)
    y = grid.points()
    a = alpha_tilde.values
    r = alpha_tilde_deriv.values + a * a - 2.0 * (V(y) - energy)
    return float(np.max(np.abs(r)))


def scaled_riccati_residual(alpha: GridFunction, alpha_deriv: GridFunction,
                            V: PotentialModel, params: IntertwiningParams) -> float:
    """Residual of the scaled Riccati equation in the unscaled coordinate."""
    grid = require_same_grid(alpha, alpha_deriv)
    x = grid.points()
    a = alpha.values
    r = math.exp(-2.0 * params.lam) * (alpha_deriv.values + a * a) - 2.0 * (
        V(math.exp(params.lam) * x) - params.energy
    )
    return float(np.max(np.abs(r)))


# -- numeric superpotential -------------------------------------------------

_RENORM = 1e150


def _integrate(V, energy, x, start, stop, psi0, dpsi0):
    """RK4 for psi'' = 2 (V - E) psi from node ``start`` towards ``stop``.

    Returns psi and psi' on the visited nodes (scaled by a common, node
    dependent positive factor, irrelevant for psi'/psi and sign tests).
    """
    step = 1 if stop > start else -1
    idx = np.arange(start, stop + step, step)
    xs = x[idx]
    h = xs[1] - xs[0] if xs.size > 1 else 0.0
    q = 2.0 * (np.asarray(V(xs), dtype=float) - energy)
    qmid = 2.0 * (np.asarray(V(0.5 * (xs[1:] + xs[:-1])), dtype=float) - energy)
    psi = np.empty(xs.size)
    dpsi = np.empty(xs.size)
    p, d = psi0, dpsi0
    psi[0], dpsi[0] = p, d
    for i in range(xs.size - 1):
        q0, qm, q1 = q[i], qmid[i], q[i + 1]
        k1p, k1d = d, q0 * p
        k2p, k2d = d + 0.5 * h * k1d, qm * (p + 0.5 * h * k1p)
        k3p, k3d = d + 0.5 * h * k2d, qm * (p + 0.5 * h * k2p)
        k4p, k4d = d + h * k3d, q1 * (p + h * k3p)
        p = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        d = d + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        mag = max(abs(p), abs(d))
        if mag > _RENORM:
            p /= mag
            d /= mag
        psi[i + 1], dpsi[i + 1] = p, d
    return idx, psi, dpsi


def _first_node(x, psi):
    s = np.sign(psi)
    flips = np.flatnonzero((s[:-1] * s[1:] <= 0) & ~((s[:-1] == 0) & (s[1:] == 0)))
    if flips.size == 0:
        return None
    i = int(flips[0])
    if psi[i] == 0.0:
        return float(x[i])
    # one bisection step on the linear interpolant
    t = psi[i] / (psi[i] - psi[i + 1])
    return float(x[i] + t * (x[i + 1] - x[i]))


def numeric_superpotential(V: PotentialModel, energy: float, mix: float,
                           grid: GridSpec, ground_energy: float | None = None) -> GridFunction:
    """Superpotential ``alpha = psi'/psi`` from a zero-free solution of ``H psi = E psi``.

    The solution is ``psi = cos(t) psi_even + sin(t) psi_odd`` with
    ``t = mix * pi / 2``; ``psi_even``/``psi_odd`` start at the grid node
    nearest ``x = 0`` with data (1, 0) and (0, 1). Both sides are integrated
    outward from that node with RK4, which follows the growing solution and
    is therefore stable; the pair is renormalised whenever it gets large.

    ``ground_energy`` (the ground level of ``V``) is estimated with the
    finite-difference eigensolver on ``grid`` when not supplied.

    Raises
    ------
    NodefulSolutionError
        If ``energy`` exceeds the ground level, or if the chosen solution has
        a zero on the grid (its location is attached).
    """
    if ground_energy is None:
        from .spectral import discretize, lowest_k_eigenvalues

        ground_energy = lowest_k_eigenvalues(discretize(V.sample(grid)), 1)[0]
    if energy > ground_energy + 1e-9 * max(1.0, abs(ground_energy)):
        raise NodefulSolutionError(
            f"energy {energy:g} lies above the ground level E0 = {ground_energy:.8g}; "
            "for E > E0 every solution has zeros"
        )
    x = grid.points()
    i0 = int(np.argmin(np.abs(x)))
    theta = 0.5 * math.pi * mix
    p0, d0 = math.cos(theta), math.sin(theta)

    psi = np.empty(grid.n)
    dpsi = np.empty(grid.n)
    if i0 < grid.n - 1:
        idx, p, d = _integrate(V, energy, x, i0, grid.n - 1, p0, d0)
        psi[idx], dpsi[idx] = p, d
    if i0 > 0:
        idx, p, d = _integrate(V, energy, x, i0, 0, p0, d0)
        psi[idx], dpsi[idx] = p, d
    psi[i0], dpsi[i0] = p0, d0

    # the two halves carry independent positive scale factors; signs are intact
    right = _first_node(x[i0:], psi[i0:])
    left = _first_node(x[i0::-1], psi[i0::-1])
    if right is not None or left is not None:
        where = right if left is None else left if right is None else (
            left if abs(left) < abs(right) else right)
        raise NodefulSolutionError(
            f"solution at energy {energy:g} (mix={mix:g}) has a node near x={where:.6g}",
            location=where,
        )
    return GridFunction(grid, dpsi / psi)


def riccati_derivative(alpha: GridFunction, V: PotentialModel, energy: float) -> GridFunction:
    """``alpha' = 2 (V - E) - alpha^2``, exact for a true Riccati solution."""
    x = alpha.grid.points()
    return GridFunction(alpha.grid, 2.0 * (V(x) - energy) - alpha.values**2)


def is_oscillator(V: PotentialModel) -> bool:
    return isinstance(V, Harmonic)
