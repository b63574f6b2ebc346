import math

import numpy as np
import pytest

from scaledsusy.errors import OutOfDomainError, ValidationError
from scaledsusy.grid import GridFunction, GridSpec, derivative
from scaledsusy.intertwining import (PartnerKind, PartnerPotential,
                                     apply_scaled_annihilator,
                                     apply_scaled_intertwiner,
                                     darboux_potential_difference, dilate,
                                     ground_state_wavefunction, homogeneous_dpd,
                                     oscillator_partner, scaled_partner,
                                     standard_partner)
from scaledsusy.potentials import Harmonic, HomogeneousPower, Tabulated, free_particle
from scaledsusy.riccati import IntertwiningParams, epsilon_of_lambda, oscillator_alpha
from scaledsusy.spectral import ShapeClass, classify_shape, discretize, eigenpairs

LN2 = math.log(2.0)


def _alpha(params, grid):
    a, da = oscillator_alpha(params, grid.points())
    return GridFunction(grid, a), GridFunction(grid, da)


def test_standard_partner_oscillator():
    g = GridSpec(-8.0, 8.0, 801)
    x = g.points()
    v1 = standard_partner(Harmonic(), GridFunction(g, x), GridFunction(g, np.ones_like(x)))
    assert np.max(np.abs(v1.values - (0.5 * x * x - 1.0))) < 1e-14


def test_standard_partner_constant_alpha():
    g = GridSpec(-3.0, 3.0, 61)
    v1 = standard_partner(Harmonic(), GridFunction(g, np.full(g.n, 0.7)), GridFunction(g, np.zeros(g.n)))
    assert np.array_equal(v1.values, Harmonic()(g.points()))


def test_standard_partner_sech():
    k = 1.3
    g = GridSpec(-6.0, 6.0, 601)
    x = g.points()
    da = k * k / np.cosh(k * x) ** 2
    v1 = standard_partner(free_particle(), GridFunction(g, k * np.tanh(k * x)), GridFunction(g, da))
    assert np.max(np.abs(v1.values + k * k / np.cosh(k * x) ** 2)) < 1e-14


def test_dpd_reduces_at_zero_lambda():
    g = GridSpec(-4.0, 4.0, 81)
    _, da = _alpha(IntertwiningParams(0.0, -0.3, 0.2), g)
    f = darboux_potential_difference(Harmonic(), da, 0.0)
    assert np.max(np.abs(f.values - da.values)) < 1e-14
    assert np.max(np.abs(homogeneous_dpd(Harmonic(), da, 0.0).values - da.values)) < 1e-14


def test_dpd_inverse_square():
    g = GridSpec(0.5, 4.0, 71)
    V = HomogeneousPower(-2.0, 0.3)
    da = GridFunction(g, np.cos(g.points()))
    lam = 0.37
    f = darboux_potential_difference(V, da, lam)
    f_h = homogeneous_dpd(V, da, lam)
    expect = math.exp(-2 * lam) * da.values
    assert np.max(np.abs(f.values - expect)) < 1e-12
    assert np.max(np.abs(f_h.values - expect)) < 1e-12


def test_dpd_oscillator_matches_shortcut():
    g = GridSpec(-4.0, 4.0, 161)
    lam = 0.5 * LN2
    _, da = _alpha(IntertwiningParams(lam, -0.5, 0.0), g)
    f = darboux_potential_difference(Harmonic(), da, lam)
    f_h = homogeneous_dpd(Harmonic(), da, lam)
    assert np.max(np.abs(f.values - f_h.values)) < 1e-10


def test_homogeneous_dpd_requires_homogeneous():
    g = GridSpec(-2.0, 2.0, 21)
    V = Tabulated(GridFunction(g, g.points() ** 2))
    with pytest.raises(ValidationError):
        homogeneous_dpd(V, GridFunction(g, np.zeros(g.n)), 0.1)


def test_dpd_tabulated_out_of_domain():
    g = GridSpec(-2.0, 2.0, 21)
    V = Tabulated(GridFunction(g, g.points() ** 2))
    with pytest.raises(OutOfDomainError):
        darboux_potential_difference(V, GridFunction(g, np.zeros(g.n)), 0.5)


def test_two_partner_forms_agree_random():
    rng = np.random.default_rng(7)
    g = GridSpec(-6.0, 6.0, 241)
    for _ in range(20):
        lam = rng.uniform(-0.7, 0.7)
        p = IntertwiningParams(lam, rng.uniform(-3.0, 0.45), rng.uniform(-0.9, 0.9))
        _, da = _alpha(p, g)
        f = darboux_potential_difference(Harmonic(), da, lam)
        v2a = Harmonic()(g.points()) - math.exp(2 * lam) * f.values
        v2b = scaled_partner(Harmonic(), da, lam).values
        assert np.max(np.abs(v2a - v2b)) < 1e-10 * max(1.0, np.max(np.abs(v2b)))


def test_scaled_partner_zero_lambda_is_standard():
    g = GridSpec(-6.0, 6.0, 241)
    a, da = _alpha(IntertwiningParams(0.0, -0.8, 0.4), g)
    assert np.array_equal(scaled_partner(Harmonic(), da, 0.0).values,
                          standard_partner(Harmonic(), a, da).values)


def test_oscillator_partner_member():
    g = GridSpec(-8.0, 8.0, 1601)
    v2 = oscillator_partner(IntertwiningParams(0.0, -0.5, 0.0), g)
    assert np.max(np.abs(v2.values - (0.5 * g.points() ** 2 - 1.0))) < 1e-10


def test_oscillator_partner_matches_general_form():
    g = GridSpec(-5.0, 5.0, 201)
    p = IntertwiningParams(0.3, -0.7, 0.25)
    _, da = _alpha(p, g)
    assert np.max(np.abs(oscillator_partner(p, g).values
                         - scaled_partner(Harmonic(), da, p.lam).values)) < 1e-12


def test_scaled_partner_double_well():
    base = GridSpec(-8.0, 8.0, 1601)
    p = IntertwiningParams(0.5 * LN2, -0.25, 0.0)
    v2 = oscillator_partner(p, base.dilated(p.lam))
    assert classify_shape(v2) is ShapeClass.DOUBLE_WELL


def test_partner_kind_invariant():
    g = GridSpec(-1.0, 1.0, 5)
    vals = GridFunction(g, np.zeros(5))
    with pytest.raises(ValidationError):
        PartnerPotential(Harmonic(), IntertwiningParams(0.1), vals, PartnerKind.STANDARD)
    PartnerPotential(Harmonic(), IntertwiningParams(0.1), vals, PartnerKind.SCALED)


def test_epsilon_examples():
    assert epsilon_of_lambda(0.0) == 0.0
    assert epsilon_of_lambda(-0.5 * LN2) == pytest.approx(1.0, abs=1e-15)


def test_ground_state_gaussian():
    g = GridSpec(-10.0, 10.0, 2001)
    x = g.points()
    psi = ground_state_wavefunction(GridFunction(g, x))
    ref = np.exp(-x * x / 2)
    ref /= math.sqrt(np.sum(ref * ref) * g.h)
    assert np.max(np.abs(psi.values - ref)) < 1e-5
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


def test_ground_state_nodeless():
    g = GridSpec(-8.0, 8.0, 801)
    a, _ = _alpha(IntertwiningParams(0.2, -1.3, 0.6), g)
    psi = ground_state_wavefunction(a)
    assert np.all(psi.values > 0.0)


def test_ground_state_overlap_with_partner_eigenvector():
    base = GridSpec(-12.0, 12.0, 3001)
    p = IntertwiningParams(0.5 * LN2, -0.25, 0.0)
    g2 = base.dilated(p.lam)
    a, _ = _alpha(p, g2)
    psi = ground_state_wavefunction(a)
    _, vecs = eigenpairs(discretize(oscillator_partner(p, g2)), 1)
    v = vecs[0] / math.sqrt(np.sum(vecs[0] ** 2) * g2.h)
    assert abs(np.sum(v * psi.values) * g2.h) > 0.999


def test_intertwiner_on_gaussian():
    g = GridSpec(-8.0, 8.0, 1601)
    x = g.points()
    psi = GridFunction(g, np.exp(-x * x / 2))
    out = apply_scaled_intertwiner(GridFunction(g, x), 0.0, psi)
    ref = math.sqrt(2.0) * x * np.exp(-x * x / 2)
    assert np.max(np.abs(out.values - ref)[g.interior_mask()]) < 1e-8


def test_intertwiner_zero_lambda_is_standard():
    g = GridSpec(-6.0, 6.0, 601)
    x = g.points()
    a = GridFunction(g, np.tanh(x))
    psi = GridFunction(g, np.exp(-(x - 0.3) ** 2))
    out = apply_scaled_intertwiner(a, 0.0, psi)
    ref = (-derivative(psi.values, g.h) + a.values * psi.values) / math.sqrt(2.0)
    assert np.max(np.abs(out.values - ref)) < 1e-14


def test_intertwiner_out_of_domain():
    g = GridSpec(-6.0, 6.0, 121)
    psi = GridFunction(g, np.exp(-g.points() ** 2))
    with pytest.raises(OutOfDomainError):
        apply_scaled_intertwiner(GridFunction(g, g.points()), 0.4, psi)


def test_annihilator_is_adjoint():
    base = GridSpec(-10.0, 10.0, 2001)
    lam = 0.3
    g2 = base.dilated(lam)
    x2 = g2.points()
    a = GridFunction(g2, np.tanh(x2) + 0.5 * x2)
    psi = GridFunction(base, np.exp(-(base.points() - 0.4) ** 2))
    phi = GridFunction(g2, x2 * np.exp(-x2 * x2 / 3))
    lhs = np.sum(phi.values * apply_scaled_intertwiner(a, lam, psi).values) * g2.h
    rhs = np.sum(apply_scaled_annihilator(a, lam, phi).values * psi.values) * base.h
    assert lhs == pytest.approx(rhs, rel=1e-5)


@pytest.mark.parametrize("lam", [-0.5, -0.2, 0.2, 0.5])
def test_dilation_unitary(lam):
    g = GridSpec(-10.0, 10.0, 2001)
    x = g.points()
    psi = GridFunction(g, np.exp(-x * x) * (1 + 0.3 * x))
    # interpolated onto a fixed grid rather than the exact dilated one
    out = dilate(psi, lam, GridSpec(-5.0, 5.0, 1001))
    assert out.norm() == pytest.approx(psi.norm(), abs=1e-4)
