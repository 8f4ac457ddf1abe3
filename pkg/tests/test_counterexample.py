import numpy as np
import pytest
from scipy.integrate import quad

from wentelab import counterexample as ce
from wentelab.errors import ParameterError
from wentelab.grid import gradient, laplacian, make_grid, sample
from wentelab.norms import l2_norm, weighted_energy
from wentelab.poisson import solve_dirichlet


def aligned(alpha, nt=128, npl=16):
    return make_grid(nt, 8, npl, align=[ce.s_alpha(alpha)])


def test_s_alpha_examples():
    assert ce.s_alpha(2) == pytest.approx(1 / np.sqrt(2), rel=1e-15)
    assert ce.s_alpha(2 / 3) == pytest.approx(0.5, rel=1e-15)
    s = [ce.s_alpha(2.0**-k) for k in range(30)]
    assert np.all(np.diff(s) < 0) and s[-1] < 1e-4
    for bad in (0.0, -1.0):
        with pytest.raises(ParameterError):
            ce.s_alpha(bad)


def test_k_factor_examples():
    assert ce.k_factor(0.5, 2 / 3) == pytest.approx(2 ** (8 / 3) * 0.75, rel=1e-14)
    assert ce.k_factor(0.5, 2 / 3) == pytest.approx(4.7622, abs=1e-4)
    assert ce.k_factor(1 - 1e-9, 1.0) < 1e-8
    for al in (0.1, 0.5, 1.0, 2.0):
        s = ce.s_alpha(al)
        assert ce.k_factor(s, al) * s ** (al + 1) == pytest.approx((1 - s**2) / s, rel=1e-13)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ParameterError):
            ce.k_factor(bad, 1.0)


def test_flux_identity_holds():
    for al in [2.0**-k for k in range(9)] + [2.0, 2 / 3]:
        assert ce.flux_residual(al) <= 1e-12


def test_normal_derivative_jump_closed_form():
    # the glued field has a single layer of strength -(4 + 4/alpha) cos(theta)
    for al in (0.25, 2 / 3, 1.0, 2.0):
        assert ce.normal_derivative_jump(al) == pytest.approx(-(4 + 4 / al), rel=1e-12)


def test_build_alpha_two_thirds(ref_grid):
    fam = ce.build(2 / 3, ref_grid)
    assert fam.s == pytest.approx(0.5) and fam.K == pytest.approx(4.7622, abs=1e-4)
    assert np.max(np.abs(fam.h_field.boundary())) < 1e-15
    g = ref_grid
    i = g.ring_index(0.5)
    inner = fam.K * 0.5 ** (5 / 3)
    assert fam.h_field.values[i, 0] == pytest.approx(inner, rel=1e-12)
    assert inner == pytest.approx(1 / 0.5 - 0.5, rel=1e-12)  # continuity across r = s


def test_radial_derivative_of_h_at_s():
    al = 2 / 3
    g = aligned(al)
    s = ce.s_alpha(al)
    i = g.ring_index(s)
    v = gradient(sample("h", g))
    # three-point stencil, error ~ (rho - 1)^2
    assert v.vx[i, 0] == pytest.approx(-(1 + s**2) / s**2, rel=3e-3)


def test_build_rejects_bad_alpha_and_coarse_grids(ref_grid):
    for bad in (0.0, 2.5):
        with pytest.raises(ParameterError):
            ce.build(bad, ref_grid)
    with pytest.raises(ParameterError, match="levels or nodes_per_level"):
        ce.build(2.0**-8, make_grid(16, 1, 4))


def test_jacobian_of_family_matches_closed_form(ref_grid):
    fam = ce.build(2 / 3, ref_grid)
    from wentelab.grid import jacobian
    J = jacobian(fam.grad_a_tilde, fam.grad_b_tilde).values
    assert np.allclose(J, fam.rhs.values, atol=1e-12)
    inner = ref_grid.R < fam.s * 0.99
    expect = ref_grid.X * ref_grid.R ** (2 / 3 - 2) * (2 / 3) * (8 / 3) * fam.K
    assert np.allclose(J[inner], expect[inner], rtol=1e-12)


def test_h_harmonic_outside_s():
    res = []
    for npl, nt in ((16, 64), (32, 128)):
        g = make_grid(nt, 4, npl)
        lap = laplacian(sample("h", g)).values
        m = g.mask(0.6, 0.95)
        res.append(np.max(np.abs(lap[m])))
    assert res[1] < res[0] / 3.5


def test_zero_flux_and_averaged_energy(ref_grid):
    fam = ce.build(1.0, ref_grid)
    g = ref_grid
    gh = fam.grad_h
    radial = gh.vx * np.cos(g.T) + gh.vy * np.sin(g.T)
    assert np.max(np.abs(radial.sum(axis=1))) <= 1e-10 * np.max(np.abs(radial))
    for r in (0.65, 0.8, 0.95):
        i = g.ring_index(r)
        ri = g.radii[i]
        assert np.mean(gh.norm_sq()[i]) == pytest.approx(ri**-4 + 1, rel=1e-12)


# -- closed forms against direct quadrature --

def _grad_a_r(al, r):
    s = ce.s_alpha(al)
    return ce.k_factor(s, al) * (al + 2) * al * r ** (al - 1)


@pytest.mark.parametrize("al", [2.0, 1.0, 2 / 3, 0.25, 2.0**-6])
def test_closed_forms_match_quad(al):
    s = ce.s_alpha(al)
    K = ce.k_factor(s, al)
    rec = ce.closed_form_norms(al, 0.5)
    q = lambda f, a, b: quad(f, a, b, limit=200)[0]
    assert rec["grad_a_sq"] == pytest.approx(2 * np.pi * q(lambda r: _grad_a_r(al, r) ** 2 * r, 0, s), rel=1e-8)
    assert rec["grad_a_sq"] == pytest.approx(rec["grad_a_sq_quadrature_form"], rel=1e-12)
    inner = q(lambda r: r**2 * K**2 * r ** (2 * al) * np.pi * ((al + 1) ** 2 + 1) * r, 0, s)
    outer = q(lambda r: r**2 * 2 * np.pi * (r**-4 + 1) * r, s, 1)
    assert rec["lhs_crit"] == pytest.approx(inner + outer, rel=1e-9)
    assert rec["harmonic_crit"] == pytest.approx(outer, rel=1e-9)
    assert rec["lhs_crit"] >= rec["lhs_crit_lower"]
    rb = 2 * np.pi * q(lambda r: r**2 * abs(np.log(r)) ** 0.5 * _grad_a_r(al, r) ** 2 * r, 0, s)
    assert rec["rhs_beta"] == pytest.approx(rb, rel=1e-7)
    assert rec["harmonic_unweighted"] == pytest.approx(q(lambda r: 2 * np.pi * (r**-4 + 1) * r, s, 1), rel=1e-9)
    hb = q(lambda r: r**1.0 * 2 * np.pi * (r**-4 + 1) * r, s, 1)
    assert rec["harmonic_pow_beta"] == pytest.approx(hb, rel=1e-9)
    assert rec.tag("grad_a_sq") == "exact" and rec.tag("lhs_crit_lower") == "bound"


def test_closed_form_examples():
    rec = ce.closed_form_norms(2 / 3, 0.0)
    assert rec["grad_a_sq"] == pytest.approx(128 * np.pi / 3, rel=1e-12)
    assert rec["lhs_crit_lower"] == pytest.approx(np.pi * np.log(2), rel=1e-12)
    # beta = 0: rhs = 8 pi alpha (2 + alpha) / (2 alpha + 2), largest at alpha = 1
    for a in ce.default_alphas():
        rhs = ce.closed_form_norms(a, 0.0)["rhs_beta"]
        assert rhs == pytest.approx(8 * np.pi * a * (2 + a) / (2 * a + 2), rel=1e-10)
        assert rhs <= 6 * np.pi * (1 + 1e-12)


@pytest.mark.parametrize("al", [2.0, 1.0, 2 / 3, 0.5])
def test_grad_a_quadrature_half_percent(al):
    fam = ce.build(al, aligned(al))
    num = weighted_energy(fam.grad_a_tilde) ** 2
    assert num == pytest.approx(4 * np.pi * (2 + al) ** 2 / al, rel=5e-3)


# -- what the Jacobian equation actually produces --

def test_exact_solution_is_c1_and_solves():
    al = 2 / 3
    s = ce.s_alpha(al)
    K = ce.k_factor(s, al)
    lin = -(1 - s**4) / s**2
    d_in = K * (al + 1) * s**al + lin
    d_out = s**2 * (1 / s**2 + 1)
    assert d_in == pytest.approx(d_out, rel=1e-12)
    assert K * s ** (al + 1) + lin * s == pytest.approx(-(s**2) * (1 / s - s), rel=1e-12)


def test_solve_converges_to_exact_solution_not_glued_field():
    al = 2 / 3
    errs, miss = [], []
    for nt, npl in ((64, 8), (128, 16), (256, 32)):
        g = aligned(al, nt, npl)
        fam = ce.build(al, g)
        phi, _ = solve_dirichlet(fam.rhs)
        ex = ce.exact_solution(al, g)
        errs.append(l2_norm(phi - ex) / l2_norm(ex))
        miss.append(l2_norm(phi - fam.h_field) / l2_norm(fam.h_field))
    assert errs[2] < 1e-4 and np.log2(errs[1] / errs[2]) > 1.8
    assert min(miss) > 1.0


# -- sweep --

def test_sweep_matches_closed_form_ratio():
    f = ce.aligned_grid_factory(128, 8, 16)
    for beta in (0.0, 1.0):
        sw = ce.divergence_sweep(ce.default_alphas(), beta, f)
        assert np.allclose(sw.ratios, sw.closed_form, rtol=0.01)
        assert len(sw.csv_rows()) == len(ce.default_alphas())
        assert len(sw.csv_rows()[0]) == len(sw.CSV_HEADER)


def test_true_solution_ratio_decreases():
    sw = ce.divergence_sweep(ce.default_alphas(), 0.0, ce.aligned_grid_factory(128, 8, 16), "exact")
    assert np.all(np.diff(sw.ratios) < 0)


def test_loglog_slope_of_power_law():
    s = np.array([0.5, 0.1, 0.01, 1e-4])
    assert ce.loglog_slope(s, 3 * np.abs(np.log(s)) ** 0.37) == pytest.approx(0.37, abs=1e-12)


def test_sweep_rejects_unknown_solution(ref_grid):
    with pytest.raises(ParameterError):
        ce.divergence_sweep([1.0], 0.0, ref_grid, "bogus")
