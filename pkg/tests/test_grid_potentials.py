import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaledsusy.errors import GridMismatchError, OutOfDomainError, ValidationError
from scaledsusy.grid import (GridFunction, GridSpec, derivative, dilate_values,
                             interpolate, laplacian3, require_same_grid)
from scaledsusy.potentials import Harmonic, HomogeneousPower, Tabulated, free_particle


def test_gridspec_basics():
    g = GridSpec(-2.0, 2.0, 5)
    assert g.h == 1.0
    assert np.array_equal(g.points(), [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert g.is_symmetric()
    assert g.refined().n == 9 and g.refined().h == 0.5


@pytest.mark.parametrize("args", [(0.0, 1.0, 2), (1.0, 1.0, 5), (2.0, 1.0, 5), (0.0, math.inf, 5)])
def test_gridspec_invalid(args):
    with pytest.raises(ValidationError):
        GridSpec(*args)


def test_dilated_grid_nodes_map_onto_base():
    g = GridSpec(-12.0, 12.0, 301)
    lam = 0.5 * math.log(2.0)
    d = g.dilated(lam)
    assert d.n == g.n
    assert np.max(np.abs(math.exp(lam) * d.points() - g.points())) < 1e-13


def test_interior_mask_excludes_edges():
    g = GridSpec(-1.0, 1.0, 100)
    m = g.interior_mask(0.05)
    assert not m[:5].any() and not m[-5:].any() and m[5:-5].all()
    assert GridSpec(-1.0, 1.0, 11).interior_mask().sum() == 7


def test_gridfunction_is_readonly_and_finite():
    g = GridSpec(0.0, 1.0, 3)
    f = GridFunction(g, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        f.values[0] = 5.0
    with pytest.raises(ValidationError):
        GridFunction(g, [1.0, math.nan, 0.0])
    with pytest.raises(ValidationError):
        GridFunction(g, [1.0, 2.0])


def test_require_same_grid():
    a = GridFunction(GridSpec(0.0, 1.0, 3), np.zeros(3))
    b = GridFunction(GridSpec(0.0, 1.0, 4), np.zeros(4))
    with pytest.raises(GridMismatchError):
        require_same_grid(a, b)


def test_derivative_fourth_order():
    errs = []
    for n in (201, 401):
        g = GridSpec(-3.0, 3.0, n)
        x = g.points()
        d = derivative(np.sin(x), g.h)
        errs.append(np.max(np.abs(d - np.cos(x))[g.interior_mask()]))
    assert errs[0] / errs[1] > 12.0


def test_laplacian_dirichlet():
    g = GridSpec(0.0, 1.0, 5)
    v = np.ones(5)
    lap = laplacian3(v, g.h)
    assert lap[0] == pytest.approx(-1.0 / g.h**2)
    assert lap[2] == 0.0


def test_interpolate_and_domain():
    g = GridSpec(-4.0, 4.0, 401)
    f = GridFunction(g, np.exp(-g.points() ** 2))
    assert interpolate(f, 0.123) == pytest.approx(math.exp(-0.123**2), abs=1e-7)
    with pytest.raises(OutOfDomainError):
        interpolate(f, 4.5)


def test_dilate_values_exact_on_dilated_grid():
    g = GridSpec(-6.0, 6.0, 121)
    psi = GridFunction(g, np.exp(-g.points() ** 2 / 2))
    lam = 0.3
    out = dilate_values(psi, lam, g.dilated(lam))
    assert np.allclose(out, math.exp(lam / 2) * psi.values, rtol=0, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0), st.floats(-3.0, 3.0))
def test_homogeneous_scaling(s, d, x):
    V = HomogeneousPower(d, 0.7)
    if x == 0.0 and d < 0:
        return
    assert V(s * x) == pytest.approx(s**d * V(x), rel=1e-12, abs=1e-300)


def test_harmonic_and_free():
    x = np.array([-2.0, 0.0, 3.0])
    assert np.array_equal(Harmonic()(x), 0.5 * x * x)
    assert np.array_equal(free_particle()(x), np.zeros(3))


def test_tabulated_no_extrapolation():
    g = GridSpec(-5.0, 5.0, 201)
    V = Tabulated(GridFunction(g, 0.5 * g.points() ** 2))
    assert V(1.234) == pytest.approx(0.5 * 1.234**2, abs=1e-10)
    with pytest.raises(OutOfDomainError):
        V(np.array([0.0, 6.0]))
    with pytest.raises(ValidationError):
        Tabulated(GridFunction(g, g.points()), order=2)
