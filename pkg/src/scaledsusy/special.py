"""Gamma function and Kummer's confluent hypergeometric function M(a, b, z).

Only real arguments are supported. ``kummer_m`` and ``kummer_m_deriv``
accept a scalar or an array for ``z`` (``a`` and ``b`` are scalars) and
return the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError

# Lanczos approximation, g = 7, 9 coefficients (Godfrey); ~1e-15 relative
# accuracy for Re z >= 1/2.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

MAX_TERMS = 10_000
TERM_RTOL = 1e-16
# Beyond this the series needs more terms than MAX_TERMS allows.
Z_MAX = 5_000.0
# Switch to the Kummer-transformed series once the estimated relative
# rounding loss of the direct sum passes this.
CANCELLATION_LIMIT = 1e-13
_TAYLOR_ZONE = 50.0
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)
_EPS = np.finfo(float).eps


def log_gamma(z: float) -> float:
    """``ln Gamma(z)`` for real ``z > 0``."""
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"log_gamma needs a finite z > 0, got {z!r}")
    if z < 0.5:
        # Gamma(z) = Gamma(z + 1) / z keeps the Lanczos sum in its range.
        return log_gamma(z + 1.0) - math.log(z)
    z -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def gamma_ratio(num: float, den: float) -> float:
    """``Gamma(num) / Gamma(den)`` for positive arguments."""
    return math.exp(log_gamma(num) - log_gamma(den))


def _check_b(b: float) -> None:
    if not math.isfinite(b) or (b <= 0.0 and b == math.floor(b)):
        raise DomainError(f"M(a, b, z) has poles at b = 0, -1, -2, ...; got b={b!r}")


@dataclass(frozen=True)
class KummerArgs:
    """Parameters of ``M(a, b, z)``; ``b`` may not be a non-positive integer."""

    a: float
    b: float
    z: float

    def __post_init__(self):
        _check_b(self.b)
        if not math.isfinite(self.a):
            raise DomainError("a must be finite")


def _series(a: float, b: float, z: np.ndarray):
    """Sum ``sum_n (a)_n z^n / ((b)_n n!)`` elementwise.

    Returns ``(mantissa, log_scale, max_term)``: the sum equals
    ``mantissa * exp(log_scale)`` and ``max_term`` is the largest term
    magnitude on the same scale, for cancellation estimates.
    """
    term = np.ones_like(z)
    total = np.ones_like(z)
    biggest = np.ones_like(z)
    log_scale = np.zeros_like(z)
    done = z == 0.0
    for n in range(MAX_TERMS):
        if done.all():
            return total, log_scale, biggest
        ratio = (a + n) / ((b + n) * (n + 1.0)) * z
        term = term * ratio
        total = total + term
        mag = np.abs(term)
        biggest = np.maximum(biggest, mag)
        big = (np.abs(total) > _RESCALE) | (mag > _RESCALE)
        if big.any():
            total[big] /= _RESCALE
            term[big] /= _RESCALE
            biggest[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        small = (mag <= TERM_RTOL * np.abs(total)) & (np.abs(ratio) < 1.0)
        done = done | small | (term == 0.0)
    partial = total * np.exp(log_scale)
    raise AccuracyError(
        f"M({a}, {b}, z) series did not converge in {MAX_TERMS} terms", partial
    )


def _kummer(a: float, b: float, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    neg = z < 0.0
    near = neg & (z >= -_TAYLOR_ZONE)
    pos = ~neg

    if pos.any():
        m, ls, _ = _series(a, b, z[pos])
        out[pos] = m * np.exp(ls)

    transform = neg & ~near
    if near.any():
        zn = z[near]
        m, ls, big = _series(a, b, zn)
        with np.errstate(divide="ignore", invalid="ignore"):
            loss = _EPS * big / np.abs(m)
        direct_ok = np.isfinite(loss) & (loss <= CANCELLATION_LIMIT)
        vals = m * np.exp(ls)
        idx = np.flatnonzero(near)
        out[idx[direct_ok]] = vals[direct_ok]
        if (~direct_ok).any():
            bad = idx[~direct_ok]
            m2, ls2, big2 = _series(b - a, b, -z[bad])
            loss2 = _EPS * big2 / np.abs(m2)
            alt = m2 * np.exp(ls2 + z[bad])
            # keep the direct sum where it is the less damaged of the two
            keep = loss[~direct_ok] < loss2
            out[bad] = np.where(keep, vals[~direct_ok], alt)

    if transform.any():
        zt = z[transform]
        # M(a, b, z) = e^z M(b - a, b, -z)
        m, ls, _ = _series(b - a, b, -zt)
        out[transform] = m * np.exp(ls + zt)
    return out


def kummer_m(a: float, b: float, z):
    """Kummer's function ``M(a, b, z)`` (also written 1F1).

    Direct Taylor summation with term-ratio recursion. For negative ``z``
    the sum alternates, so when the estimated rounding loss exceeds
    ``CANCELLATION_LIMIT`` (and always for ``z < -50``) the value is taken
    from the Kummer transformation ``e^z M(b - a, b, -z)`` instead.

    Parameters
    ----------
    a, b : float
        Parameters; ``b`` must not be ``0, -1, -2, ...``.
    z : float or array_like
        Argument(s), ``|z| <= Z_MAX``.

    Raises
    ------
    DomainError
        For a pole in ``b`` or ``|z| > Z_MAX``.
    AccuracyError
        If the series has not converged after ``MAX_TERMS`` terms.
    """
    a = float(a)
    b = float(b)
    KummerArgs(a, b, 0.0)
    zz = np.asarray(z, dtype=float)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz)
    if not np.all(np.isfinite(zz)) or np.any(np.abs(zz) > Z_MAX):
        raise DomainError(f"kummer_m supports finite |z| <= {Z_MAX:g}")
    out = _kummer(a, b, zz.astype(float))
    return float(out[0]) if scalar else out.reshape(np.shape(z))


def kummer_m_deriv(a: float, b: float, z):
    """``dM/dz = (a/b) M(a + 1, b + 1, z)``."""
    a = float(a)
    b = float(b)
    _check_b(b)
    if a == 0.0:
        zz = np.asarray(z, dtype=float)
        return 0.0 if zz.ndim == 0 else np.zeros_like(zz)
    return (a / b) * kummer_m(a + 1.0, b + 1.0, z)
