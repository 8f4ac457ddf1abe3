"""The glued family h_alpha built from h = x/|x|^2 - x and f = x|x|^alpha.

h_alpha equals h outside B_s and K(s, alpha) f inside, with
s_alpha^2 = alpha/(2 + alpha) and K(s, alpha) = s^{-alpha-2}(1 - s^2). The
companion fields are a~ = K (alpha + 2)|x|^alpha on B_s (frozen at its
boundary value outside) and b~ = y, so that J(a~, b~) = Laplacian(K f) on B_s.

The two pieces agree in value on the circle r = s but their radial
derivatives have opposite signs there, so Laplacian(h_alpha) carries a
single layer on that circle. ``exact_solution`` returns the genuine W^{1,2}_0
solution of Laplacian(phi) = J(a~, b~), and ``normal_derivative_jump``
measures the layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma, gammaincc

from .errors import ParameterError
from .grid import PolarGrid, ScalarField, VectorField, make_grid, sample
from .norms import POW, CRITBETA, RatioReport, ratio_report, weighted_energy

ALPHA_MAX = 2.0
MIN_NODES = 8


def s_alpha(alpha: float) -> float:
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    return float(np.sqrt(alpha / (2.0 + alpha)))


def k_factor(s: float, alpha: float) -> float:
    if not 0 < s < 1:
        raise ParameterError(f"s must lie in (0, 1), got {s}")
    return float(s ** (-alpha - 2.0) * (1.0 - s**2))


def flux_residual(alpha: float) -> float:
    """|1 + s^2 - (1 + alpha)(1 - s^2)| at s = s_alpha."""
    s2 = s_alpha(alpha) ** 2
    return abs(1.0 + s2 - (1.0 + alpha) * (1.0 - s2))


def normal_derivative_jump(alpha: float) -> float:
    """Coefficient of cos(theta) in d_r h_alpha(s+) - d_r h_alpha(s-)."""
    s = s_alpha(alpha)
    outside = -(1.0 + s**2) / s**2
    inside = k_factor(s, alpha) * (alpha + 1.0) * s**alpha
    return outside - inside


@dataclass(frozen=True, eq=False)
class GluedFamily:
    alpha: float
    s: float
    K: float
    h_field: ScalarField
    a_tilde: ScalarField
    b_tilde: ScalarField
    grad_h: VectorField
    grad_a_tilde: VectorField
    grad_b_tilde: VectorField
    rhs: ScalarField  # closed-form J(a~, b~)

    @property
    def grid(self) -> PolarGrid:
        return self.h_field.grid

    def inside(self) -> np.ndarray:
        return self.grid.R <= self.s


def _check_resolvable(alpha: float, grid: PolarGrid) -> float:
    if not 0 < alpha <= ALPHA_MAX:
        raise ParameterError(f"alpha must lie in (0, {ALPHA_MAX}], got {alpha}")
    s = s_alpha(alpha)
    r = grid.radii
    below = np.count_nonzero(r < s)
    above = np.count_nonzero((r >= s) & (r <= min(2 * s, 1.0)))
    if below < MIN_NODES or above < MIN_NODES:
        raise ParameterError(
            f"grid does not resolve s_alpha={s:.4g} for alpha={alpha:g} "
            f"({below} nodes below, {above} in [s, 2s]); use more levels or nodes_per_level"
        )
    return s


def build(alpha: float, grid: PolarGrid) -> GluedFamily:
    s = _check_resolvable(alpha, grid)
    K = k_factor(s, alpha)
    R, T = grid.R, grid.T
    inside = R <= s
    c, sn = np.cos(T), np.sin(T)

    h_vals = np.where(inside, K * c * R ** (alpha + 1), c * (1 / R - R))
    a_vals = K * (alpha + 2) * np.minimum(R, s) ** alpha

    hr = _glue(grid, s, K * (alpha + 1) * R**alpha * c, -c * (1 / R**2 + 1), quadratic=True)
    ht = _glue(grid, s, -K * R**alpha * sn, -sn * (1 / R**2 - 1), quadratic=True)
    ar_in = K * (alpha + 2) * alpha * R ** (alpha - 1)
    ar = _glue(grid, s, ar_in, 0.0, quadratic=True)
    zero = np.zeros(grid.shape)

    return GluedFamily(
        alpha=alpha,
        s=s,
        K=K,
        h_field=ScalarField(grid, h_vals, f"h_alpha({alpha:g})"),
        a_tilde=ScalarField(grid, a_vals, f"a_tilde({alpha:g})"),
        b_tilde=sample("y", grid),
        grad_h=VectorField.from_polar(grid, hr, ht),
        grad_a_tilde=VectorField.from_polar(grid, ar, zero),
        grad_b_tilde=VectorField(grid, zero, np.ones(grid.shape)),
        rhs=ScalarField(grid, _glue(grid, s, ar_in, 0.0) * c),
    )


def _glue(grid: PolarGrid, s: float, inner, outer, quadratic: bool = False):
    # Node values on the interface blend the one-sided limits. Fields that only
    # enter energies use the root-mean-square blend so that squaring commutes
    # with it; the Jacobian (a linear datum for the solver) uses the plain one.
    R = grid.R
    inner = np.broadcast_to(inner, R.shape)
    outer = np.broadcast_to(outer, R.shape)
    vals = np.where(R <= s, inner, outer)
    if s in grid.interfaces:
        wi, wo = grid.interface_blend(s)
        if quadratic:
            mean = wi * inner + wo * outer
            blend = np.copysign(np.sqrt(wi * inner**2 + wo * outer**2), mean)
        else:
            blend = wi * inner + wo * outer
        vals = np.where(R == s, blend, vals)
    return vals


def exact_solution(alpha: float, grid: PolarGrid) -> ScalarField:
    """C^1 solution of Laplacian(phi) = J(a~, b~), phi = 0 on the unit circle.

    Inside B_s: K r^{alpha+1} cos - (1 - s^4)/s^2 r cos; outside: -s^2 h.
    """
    s = s_alpha(alpha)
    K = k_factor(s, alpha)
    R, T = grid.R, grid.T
    inner = (K * R ** (alpha + 1) - (1 - s**4) / s**2 * R) * np.cos(T)
    outer = -(s**2) * np.cos(T) * (1 / R - R)
    return ScalarField(grid, np.where(R <= s, inner, outer), f"exact({alpha:g})")


# -- closed forms ---------------------------------------------------------------

@dataclass(frozen=True)
class NormsRecord:
    """Closed-form quantities for one (alpha, beta); each entry is
    ``(value, tag)`` with tag ``"exact"`` or ``"bound"``."""

    alpha: float
    beta: float
    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries[key][0]

    def tag(self, key) -> str:
        return self.entries[key][1]


def _log_moment(p: float, beta: float, s: float) -> float:
    """int_0^s r^p |log r|^beta dr for p > -1 and s < 1."""
    lam = p + 1.0
    u0 = -np.log(s)
    return float(gamma(beta + 1) * gammaincc(beta + 1, lam * u0) / lam ** (beta + 1))


def closed_form_norms(alpha: float, beta: float) -> NormsRecord:
    s = s_alpha(alpha)
    K = k_factor(s, alpha)
    ls = abs(np.log(s))
    c_a = 2 * np.pi * K**2 * (alpha + 2) ** 2 * alpha**2  # |grad a~|^2 = c_a/2pi r^{2 alpha - 2}

    inner_crit = np.pi * (1 - s**2) ** 2 * ((alpha + 1) ** 2 + 1) / (2 * alpha + 4)
    outer_crit = 2 * np.pi * (ls + (1 - s**4) / 4)
    e = {
        "s": (s, "exact"),
        "K": (K, "exact"),
        "grad_a_sq": (4 * np.pi * (2 + alpha) ** 2 / alpha, "exact"),
        "grad_a_sq_quadrature_form": (c_a * s ** (2 * alpha) / (2 * alpha), "exact"),
        "lhs_crit": (outer_crit + inner_crit, "exact"),
        "lhs_crit_lower": (np.pi * ls, "bound"),
        "rhs_beta": (c_a * _log_moment(2 * alpha + 1, beta, s), "exact"),
        "rhs_pow1": (c_a * s ** (2 * alpha + 2) / (2 * alpha + 2), "exact"),
        "grad_b_sq": (np.pi, "exact"),
        # harmonic part on the annulus B_1 \ B_s
        "harmonic_unweighted": (np.pi * (s**-2 - s**2), "exact"),
        "harmonic_crit": (outer_crit, "exact"),
    }
    if 0 < beta < 1:
        e["harmonic_pow_beta"] = (
            2 * np.pi * ((s ** (2 * beta - 2) - 1) / (2 - 2 * beta) + (1 - s ** (2 * beta + 2)) / (2 * beta + 2)),
            "exact",
        )
    e["ratio"] = (np.sqrt(e["lhs_crit"][0]) / (np.sqrt(np.pi) * np.sqrt(e["rhs_beta"][0])), "exact")
    return NormsRecord(alpha, beta, e)


# -- sweep ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    beta: float
    alphas: np.ndarray
    s_values: np.ndarray
    reports: list
    closed_form: np.ndarray
    slope: float

    @property
    def ratios(self) -> np.ndarray:
        return np.array([rep.ratio for rep in self.reports])

    CSV_HEADER = ("alpha", "s_alpha", "beta", "lhs", "rhs", "ratio", "ratio_closed_form", "slope")

    def csv_rows(self) -> list:
        rows = []
        for a, s, rep, cf in zip(self.alphas, self.s_values, self.reports, self.closed_form):
            rows.append([repr(a), repr(s), repr(self.beta), repr(rep.lhs),
                         repr(rep.rhs_a * rep.rhs_b), repr(rep.ratio), repr(cf), repr(self.slope)])
        return rows


def loglog_slope(s_values, ratios) -> float:
    """Least-squares slope of log R against log|log s|."""
    x = np.log(np.abs(np.log(np.asarray(s_values))))
    return float(np.polyfit(x, np.log(np.asarray(ratios)), 1)[0])


def aligned_grid_factory(n_theta: int, levels: int, nodes_per_level: int):
    """alpha -> grid with a node on the gluing circle r = s_alpha."""
    def factory(alpha: float) -> PolarGrid:
        return make_grid(n_theta, levels, nodes_per_level, align=[s_alpha(alpha)])
    return factory


def divergence_sweep(alpha_list, beta: float, grid, solution: str = "glued") -> SweepResult:
    """R(alpha, beta) = || r grad phi || / (||grad b~|| || r |log r|^{beta/2} grad a~||).

    ``grid`` is a PolarGrid or a callable alpha -> PolarGrid (see
    ``aligned_grid_factory``). ``solution="glued"`` takes phi = h_alpha as
    prescribed for the family; ``solution="exact"`` uses the true solution of
    the Jacobian equation (gradient from its closed form).
    """
    if solution not in ("glued", "exact"):
        raise ParameterError(f"solution must be 'glued' or 'exact', got {solution!r}")
    reports, cf, svals = [], [], []
    for alpha in alpha_list:
        g = grid(alpha) if callable(grid) else grid
        fam = build(alpha, g)
        grad_phi = fam.grad_h if solution == "glued" else _exact_gradient(alpha, g)
        lhs = weighted_energy(grad_phi, POW(1))
        rep = ratio_report(
            lhs,
            weighted_energy(fam.grad_b_tilde),
            weighted_energy(fam.grad_a_tilde, CRITBETA(beta)),
            {"experiment": f"counterexample[{solution}]", "alpha": alpha,
             "weight_lhs": "POW(1)", "weight_rhs": f"ONE x {CRITBETA(beta).label}"},
        )
        reports.append(rep)
        svals.append(fam.s)
        cf.append(closed_form_norms(alpha, beta)["ratio"] if solution == "glued" else np.nan)
    alphas = np.asarray(alpha_list, dtype=float)
    svals = np.asarray(svals)
    ratios = np.array([r.ratio for r in reports])
    return SweepResult(beta, alphas, svals, reports, np.asarray(cf), loglog_slope(svals, ratios))


def _exact_gradient(alpha: float, grid: PolarGrid) -> VectorField:
    s = s_alpha(alpha)
    K = k_factor(s, alpha)
    R, T = grid.R, grid.T
    c, sn = np.cos(T), np.sin(T)
    lin = -(1 - s**4) / s**2
    inside = R <= s
    gr = np.where(inside, (K * (alpha + 1) * R**alpha + lin) * c, s**2 * c * (1 / R**2 + 1))
    gt = np.where(inside, -(K * R**alpha + lin) * sn, s**2 * sn * (1 / R**2 - 1))
    return VectorField.from_polar(grid, gr, gt)


def default_alphas() -> list[float]:
    return [2.0**-k for k in range(9)]
