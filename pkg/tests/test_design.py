import math

import numpy as np
import pytest

from scaledsusy.design import (I1, I2, PRESET_INTERVALS, DesignTarget,
                               design_fixed_ground, design_uniform_scale,
                               figure1_samples, sweep_family)
from scaledsusy.errors import DomainError, IntervalError, SameSignError
from scaledsusy.grid import GridSpec
from scaledsusy.potentials import Harmonic
from scaledsusy.intertwining import oscillator_partner
from scaledsusy.riccati import IntertwiningParams
from scaledsusy.spectral import ShapeClass, discretize, lowest_k_eigenvalues, verify_spectrum_map

REF = GridSpec(-12.0, 12.0, 3001)
SHAPE_GRID = GridSpec(-6.0, 6.0, 1201)


def test_uniform_scale():
    assert design_uniform_scale(1.0) == 0.0
    assert design_uniform_scale(4.0) == pytest.approx(math.log(2.0), abs=1e-15)
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            design_uniform_scale(bad)


def test_uniform_scale_doubles_spectrum():
    lam = design_uniform_scale(2.0)
    base = lowest_k_eigenvalues(discretize(oscillator_partner(IntertwiningParams(0.0, -0.3), REF)), 5)
    p = IntertwiningParams(lam, -0.3)
    scaled = lowest_k_eigenvalues(discretize(oscillator_partner(p, REF.dilated(lam))), 5)
    assert np.max(np.abs(scaled - 2.0 * base)) < 1e-3


def test_fixed_ground_examples():
    p = design_fixed_ground(DesignTarget(-0.5, 1.0))
    assert (p.lam, p.energy) == (0.0, -0.5)
    p = design_fixed_ground(DesignTarget(-0.5, 2.0))
    assert p.lam == pytest.approx(0.5 * math.log(2.0), abs=1e-15)
    assert p.energy == pytest.approx(-0.25, abs=1e-15)
    assert -1.0 / (2.0 * p.energy) == pytest.approx(2.0)
    with pytest.raises(SameSignError):
        DesignTarget(-0.5, -3.0)


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 4.0, 0.37, 7.0])
def test_fixed_ground_keeps_ground_exact(kappa):
    p = design_fixed_ground(DesignTarget(-0.5, kappa))
    assert math.exp(2 * p.lam) * p.energy == pytest.approx(-0.5, abs=1e-15)


def test_interval_checks():
    with pytest.raises(IntervalError):
        DesignTarget(-0.5, 2.0, interval=(-1.0, 1.0))
    with pytest.raises(IntervalError):
        design_fixed_ground(DesignTarget(-0.5, 2.0, interval=(-1.0, -0.3)))
    with pytest.raises(IntervalError):
        design_fixed_ground(DesignTarget(-0.5, 2.0, interval=(-0.4, -0.1)))
    # I2 keeps E strictly below 1/2
    with pytest.raises(IntervalError):
        design_fixed_ground(DesignTarget(0.4, 0.5, interval=I2))
    p = design_fixed_ground(DesignTarget(0.4, 2.0, interval=I2))
    assert p.energy == pytest.approx(0.2)
    assert PRESET_INTERVALS["I1"] == I1 and PRESET_INTERVALS["I2"] == I2


@pytest.mark.parametrize("kappa", [0.5, 1.0, 2.0, 4.0])
def test_design_then_verify(kappa):
    p = design_fixed_ground(DesignTarget(-0.5, kappa))
    r = verify_spectrum_map(Harmonic(), p, 4, 1e-3, REF)
    assert r.computed[0] == pytest.approx(-0.5, abs=1e-3)
    assert r.computed[2] - r.computed[1] == pytest.approx(kappa, abs=1e-3)


def test_uniform_and_fixed_ground_agree():
    sigma, energy = 3.0, -0.2
    p = design_fixed_ground(DesignTarget(energy * sigma, sigma))
    assert p.lam == pytest.approx(design_uniform_scale(sigma), abs=1e-15)
    assert p.energy == pytest.approx(energy, abs=1e-15)


def test_figure1_samples():
    s = figure1_samples()
    assert len(s) == 41 and -0.5 in s
    assert min(s) > -2.5 and max(s) == pytest.approx(-0.05)
    assert s == sorted(s)


def test_sweep_oscillator_row():
    (row,) = sweep_family(-0.5, 0.0, [-0.5], SHAPE_GRID)
    assert row.ok and row.lam == 0.0
    assert np.max(np.abs(row.v2 - (0.5 * row.x**2 - 1.0))) < 1e-10
    assert row.shape is ShapeClass.SINGLE_WELL
    assert row.e0_computed == pytest.approx(-0.5, abs=1e-4)


def test_sweep_squeezed_and_shapes():
    rows = sweep_family(-0.5, 0.0, [-1.0, -2.0, -0.25, -0.1], SHAPE_GRID)
    assert [r.shape for r in rows[:2]] == [ShapeClass.PEAKED_SINGLE_WELL] * 2
    assert [r.shape for r in rows[2:]] == [ShapeClass.DOUBLE_WELL] * 2
    for r in rows:
        kappa = -0.5 / r.energy
        assert r.e0_computed == pytest.approx(-0.5, abs=1e-3)
        assert r.e1_computed == pytest.approx(0.5 * kappa, abs=1e-3)
    # squeezed: the first excited level sits below the oscillator's 1/2
    assert rows[0].e1_computed < 0.5


def test_sweep_row_errors_do_not_stop():
    rows = sweep_family(-0.5, 0.0, [-0.25, 0.3, -1.0], SHAPE_GRID)
    assert rows[0].ok and rows[2].ok
    assert not rows[1].ok and "SameSignError" in rows[1].error
    rows = sweep_family(-0.5, 1.5, [-0.25], SHAPE_GRID)
    assert "nu" in rows[0].error


def test_sweep_permutation_invariance():
    samples = [-0.3, -1.2, -0.5]
    a = sweep_family(-0.5, 0.0, samples, SHAPE_GRID)
    b = sweep_family(-0.5, 0.0, samples[::-1], SHAPE_GRID)
    for ra, rb in zip(a, b[::-1]):
        assert ra.energy == rb.energy and ra.shape == rb.shape
        assert np.array_equal(ra.v2, rb.v2)
        assert ra.e0_computed == rb.e0_computed and ra.e1_computed == rb.e1_computed
