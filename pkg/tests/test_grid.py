import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from wentelab.errors import EvaluationError, ParameterError
from wentelab.grid import (PolarGrid, ScalarField, gradient, integrate, jacobian, make_grid, sample,
                           write_csv)


def test_make_grid_coarse_integrates_constant():
    g = make_grid(64, 1, 8)
    assert g.radii[-1] == 1.0 and g.radii[0] > 0
    assert np.all(np.diff(g.radii) > 0)
    assert np.all(g.radii[g.radii > 0.5] > 0.5)
    assert integrate(np.ones(g.shape), g) == pytest.approx(np.pi, rel=1e-10)


def test_make_grid_deep_resolves_every_annulus():
    g = make_grid(64, 10, 16)
    assert g.deepest_level() == 10
    for j in range(11):
        # half-open annulus (2^{-j-1}, 2^{-j}]
        inside = (g.radii > 2.0 ** (-j - 1)) & (g.radii <= 2.0**-j)
        assert inside.sum() >= 16


@pytest.mark.parametrize("args", [(7, 1, 8), (6, 1, 8), (64, 0, 8), (64, 1, 3)])
def test_make_grid_rejects_bad_sizes(args):
    with pytest.raises(ParameterError):
        make_grid(*args)


def test_grading_ratio_is_dyadic():
    g = make_grid(16, 3, 8)
    assert g.grading.ratio == pytest.approx(2 ** (-1 / 8))
    assert np.allclose(g.radii[1:] / g.radii[:-1], 2 ** (1 / 8))


def test_custom_radii_validated():
    with pytest.raises(ParameterError):
        PolarGrid(8, np.array([0.2, 0.1, 1.0]))
    with pytest.raises(ParameterError):
        PolarGrid(8, np.array([0.1, 0.5, 0.9]))


def test_align_puts_node_on_radius_and_keeps_dyadic_nodes():
    s = 1 / np.sqrt(3)
    g = make_grid(32, 4, 16, align=[s])
    assert s in g.radii and g.interfaces == (s,)
    for j in range(5):
        assert 2.0**-j in g.radii


# -- sampling --

def test_sample_x(small_grid):
    f = sample("x", small_grid)
    assert np.allclose(f.values, small_grid.R * np.cos(small_grid.T), atol=1e-15)


def test_sample_h_vanishes_on_unit_circle(ref_grid):
    assert np.max(np.abs(sample("h", ref_grid).boundary())) < 1e-15


def test_sample_h_at_half(ref_grid):
    i = ref_grid.ring_index(0.5)
    assert ref_grid.radii[i] == 0.5
    assert sample("h", ref_grid).values[i, 0] == pytest.approx(1.5, abs=1e-14)


def test_sample_catalog_and_callables(small_grid):
    g = small_grid
    f = sample("f(1/2) + a_alpha(1) + psi(0) + chi(1) + log(r) + r**0.5*cos(theta)", g)
    X, R, T = g.X, g.R, g.T
    from wentelab import profiles as pr
    expect = X * R**0.5 + 3 * R + pr.psi(0, R) + pr.chi(1, R) + np.log(R) + R**0.5 * np.cos(T)
    assert np.allclose(f.values, expect, rtol=1e-13)
    c = sample(lambda x, y, r, t: x * y, g)
    assert np.allclose(c.values, g.X * g.Y)


def test_sample_singular_names_node():
    g = make_grid(8, 1, 4)
    with pytest.raises(EvaluationError, match=r"r=0\.5"):
        sample("1/(r - 1/2)", g)


# -- calculus --

def test_gradient_of_x_exact(ref_grid):
    v = gradient(sample("x", ref_grid))
    assert np.max(np.abs(v.vx - 1)) < 1e-12 and np.max(np.abs(v.vy)) < 1e-12


def test_gradient_of_r2_over_4(ref_grid):
    v = gradient(sample("r**2/4", ref_grid))
    assert np.allclose(v.vx, ref_grid.X / 2, atol=1e-12)
    assert np.allclose(v.vy, ref_grid.Y / 2, atol=1e-12)


def test_gradient_of_h_at_half_quarter_turn(ref_grid):
    g = ref_grid
    v = gradient(sample("h", g))
    i, k = g.ring_index(0.5), g.n_theta // 4
    assert g.theta[k] == pytest.approx(np.pi / 2)
    assert v.vx[i, k] == pytest.approx(3.0, abs=1e-10)
    assert v.vy[i, k] == pytest.approx(0.0, abs=1e-10)


def test_quadrature_closed_forms(ref_grid):
    g = ref_grid
    assert integrate(np.ones(g.shape), g) == pytest.approx(np.pi, rel=1e-10)
    assert integrate(g.R**2, g) == pytest.approx(np.pi / 2, abs=1e-8)
    assert integrate(np.cos(g.T) ** 2, g) == pytest.approx(np.pi / 2, abs=1e-8)


def test_quadrature_against_scipy_quad(ref_grid):
    # a smooth non-polynomial radial profile
    g = ref_grid
    exact = 2 * np.pi * quad(lambda r: np.exp(-3 * r) * r, 0, 1)[0]
    assert integrate(np.exp(-3 * g.R), g) == pytest.approx(exact, rel=1e-5)


def test_quadrature_weights_positive(ref_grid):
    assert np.all(ref_grid.quad_weights > 0)


def test_jacobian_examples(ref_grid):
    g = ref_grid
    assert np.allclose(jacobian(sample("x", g), sample("y", g)).values, 1.0, atol=1e-12)
    assert np.max(np.abs(jacobian(sample("r**2", g), sample("exp(r)", g)).values)) < 1e-12


def test_jacobian_of_a_alpha_and_y(ref_grid):
    g = ref_grid
    al = 0.5
    J = jacobian(sample("a_alpha(1/2)", g), sample("y", g)).values
    expect = g.X * g.R ** (al - 2) * al * (al + 2)
    mid = g.mask(0.1, 0.95)
    assert np.max(np.abs(J - expect)[mid] / np.abs(expect[mid]).max()) < 1e-2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jacobian_antisymmetric_bit_exact(seed):
    g = make_grid(16, 1, 4)
    r = np.random.default_rng(seed)
    a = ScalarField(g, r.standard_normal(g.shape))
    b = ScalarField(g, r.standard_normal(g.shape))
    assert np.array_equal(jacobian(a, b).values, -jacobian(b, a).values)


def test_jacobian_grid_mismatch():
    with pytest.raises(ParameterError):
        jacobian(sample("x", make_grid(8, 1, 4)), sample("y", make_grid(8, 1, 4)))


def test_circulation_vanishes_when_b_constant_on_boundary():
    errs = []
    for npl, nt in ((8, 32), (16, 64)):
        g = make_grid(nt, 4, npl)
        J = jacobian(sample("x**2*y + cos(2*x) + y", g), sample("(1 - r**2)*(1 + x)", g))
        errs.append(abs(integrate(J)))
    assert errs[1] < errs[0] and errs[1] < 1e-2


def test_write_csv(tmp_path, small_grid):
    path = tmp_path / "f.csv"
    write_csv(sample("x", small_grid), path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["r", "theta", "value"]
    assert len(rows) == 1 + small_grid.n_r * small_grid.n_theta
