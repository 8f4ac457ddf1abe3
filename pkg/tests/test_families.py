import numpy as np
import pytest

from wentelab import families as fm
from wentelab.errors import ParameterError
from wentelab.grid import gradient, make_grid


@pytest.mark.parametrize("kind", ["poly", "mode"])
def test_unit_energy_and_determinism(small_grid, kind):
    a, b, _ = fm.random_pair(np.random.default_rng(7), small_grid, kind)
    a2, b2, _ = fm.random_pair(np.random.default_rng(7), small_grid, kind)
    assert a.energy == pytest.approx(1.0, rel=1e-12)
    assert b.energy == pytest.approx(1.0, rel=1e-12)
    assert np.array_equal(a.field.values, a2.field.values)
    assert np.array_equal(b.grad.vy, b2.grad.vy)


@pytest.mark.parametrize("gen", [fm.random_poly, fm.random_mode])
def test_analytic_gradient_matches_numeric(gen):
    errs = []
    for nt, npl in ((64, 8), (128, 16)):
        g = make_grid(nt, 2, npl)
        s = gen(np.random.default_rng(3), g)
        num = gradient(s.field)
        m = g.mask(0.3, 0.9)
        errs.append(np.max(np.abs(num.vx - s.grad.vx)[m]) + np.max(np.abs(num.vy - s.grad.vy)[m]))
    assert errs[1] < errs[0] / 3 and errs[1] < 1e-2


def test_random_mode_smooth_at_origin(small_grid):
    s = fm.random_mode(np.random.default_rng(1), small_grid, max_mode=3)
    # inner ring: the gradient is bounded, the field nearly constant in theta
    assert np.all(np.isfinite(s.grad.vx))
    assert np.ptp(s.field.values[0]) < 1e-2


def test_constant_family_returns_none(small_grid):
    assert fm.random_mode(np.random.default_rng(0), small_grid, max_mode=0, radial_degree=0) is None


def test_bad_parameters(small_grid):
    rng = np.random.default_rng(0)
    with pytest.raises(ParameterError):
        fm.random_poly(rng, small_grid, degree=0)
    with pytest.raises(ParameterError):
        fm.random_mode(rng, small_grid, max_mode=-1)
    with pytest.raises(ParameterError):
        fm.random_pair(rng, small_grid, "gauss")


@pytest.mark.parametrize("j", [1, 3, 5])
def test_adversarial_support(ref_grid, j):
    a, b = fm.adversarial_annulus(j, ref_grid)
    R = ref_grid.R
    lo, hi = 2.0**-j / 4, 2.0**-j
    out = (R <= lo) | (R >= hi)
    assert np.all(b.field.values[out] == 0) and np.all(b.grad.vx[out] == 0)
    assert np.all(a.grad.vx[out] == 0)
    assert np.all(a.field.values[R <= lo] == 1) and np.all(a.field.values[R >= hi] == 0)


def test_adversarial_gradient_matches_numeric():
    err = []
    for nt, npl in ((64, 16), (128, 32)):
        g = make_grid(nt, 4, npl)
        a, b = fm.adversarial_annulus(2, g)
        m = g.mask(0.07, 0.24)
        err.append([np.max(np.abs(gradient(s.field).vx - s.grad.vx)[m]) for s in (a, b)])
    assert all(e1 < e0 / 3 for e0, e1 in zip(*err))


def test_adversarial_out_of_reach():
    with pytest.raises(ParameterError):
        fm.adversarial_annulus(8, make_grid(16, 2, 4))
    with pytest.raises(ParameterError):
        fm.adversarial_annulus(-1, make_grid(16, 2, 4))
