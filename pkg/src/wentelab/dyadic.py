"""Dyadic localisation of a Wente problem around the origin.

``decompose_b`` splits b into pieces b_j whose gradients live on the doubled
annuli B_{2^-j} \\ B_{2^-j-2}; ``localize_a`` cuts a down to a slightly larger
annulus C_j without changing J(a, b_j); each piece is then solved and its
per-level inequalities measured by ``audit_piece``.

The pieces telescope:

    b_j = chi_j (b - nu_j) - chi_{j+1} (b - nu_{j+1}),   chi_0 = 1, nu_0 = 0,

with nu_j the mean of b over the ramp annulus A_j of chi_j. Every gradient
term sits inside A_j or A_{j+1}, the sum over j is b exactly, and the mean
subtraction turns |chi'| (b - nu_j) into a Poincare-controlled quantity.
Gradients are assembled with the product rule from the analytic cutoff
derivatives, so support containment holds to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import profiles
from .errors import ParameterError
from .grid import PolarGrid, ScalarField, VectorField, gradient, jacobian
from .norms import CRIT, POW, weighted_energy, weighted_sup
from .poisson import newton_potential, solve_dirichlet


# -- cutoff profiles --------------------------------------------------------------

@dataclass(frozen=True)
class RadialProfile:
    """A C^1 radial cutoff with its derivative and support interval."""

    name: str
    support: tuple[float, float]
    _f: object = field(repr=False)
    _df: object = field(repr=False)

    def __call__(self, r):
        return self._f(r)

    def deriv(self, r):
        return self._df(r)

    def gradient(self, grid: PolarGrid) -> VectorField:
        return VectorField.from_polar(grid, self.deriv(grid.R), np.zeros(grid.shape))

    def energy(self, grid: PolarGrid) -> float:
        """int |grad profile|^2 dA on ``grid``."""
        return weighted_energy(self.gradient(grid)) ** 2


def cutoff_chi(j: int) -> RadialProfile:
    """1 on r <= 2^{-j-1}, 0 on r >= 2^{-j}; |chi'| <= 1.5 * 2^{j+1}."""
    if j < 0:
        raise ParameterError(f"level must be >= 0, got {j}")
    return RadialProfile(f"chi_{j}", (0.0, 2.0**-j),
                         lambda r: profiles.chi(j, r), lambda r: profiles.chi_deriv(j, r))


def cutoff_psi(j: int, inner_ramp: bool = True) -> RadialProfile:
    """1 on [2^{-j-2}, 2^{-j}], zero below 2^{-j-3} and above 2^{-j} + 2^{-j-3}.

    Without ``inner_ramp`` the plateau extends to the origin.
    """
    if j < 0:
        raise ParameterError(f"level must be >= 0, got {j}")
    lo, hi = profiles.psi_support(j)
    return RadialProfile(f"psi_{j}" + ("" if inner_ramp else "*"), (lo if inner_ramp else 0.0, hi),
                         lambda r: profiles.psi(j, r, inner_ramp),
                         lambda r: profiles.psi_deriv(j, r, inner_ramp))


def _chi_or_one(j: int, grid: PolarGrid):
    if j == 0:
        return np.ones(grid.shape), np.zeros(grid.shape)
    return profiles.chi(j, grid.R), profiles.chi_deriv(j, grid.R)


def _area_mean(values: np.ndarray, grid: PolarGrid, lo: float, hi: float) -> float:
    m = grid.mask(lo, hi)
    w = grid.quad_weights
    return float(np.sum(values[m] * w[m]) / np.sum(w[m]))


def _energy_on(v: VectorField, lo: float, hi: float) -> float:
    return weighted_energy(v, region=(lo, hi)) ** 2


# -- decomposition -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DyadicPiece:
    j: int
    b_j: ScalarField
    grad_b_j: VectorField
    support: tuple[float, float]  # annulus containing spt(grad b_j)
    truncated: bool = False  # last piece: absorbs every level below 2^{-j}
    a_j: ScalarField | None = None
    grad_a_j: VectorField | None = None
    c_j: float = float("nan")
    a_support: tuple = ()  # C_j
    loc_constant: float = float("nan")
    phi_j: ScalarField | None = None
    audit: "AuditRecord | None" = None

    @property
    def energy(self) -> float:
        return weighted_energy(self.grad_b_j) ** 2


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    pieces: list
    J_max: int
    reconstruction_error: float
    level_constants: np.ndarray  # int |grad b_j|^2 / int_{A~_j} |grad b|^2

    @property
    def C_dec(self) -> float:
        finite = self.level_constants[np.isfinite(self.level_constants)]
        return float(finite.max()) if finite.size else 0.0


def decompose_b(b: ScalarField, J_max: int, grad_b: VectorField | None = None) -> DyadicDecomposition:
    """Split b into J_max + 1 pieces with sum_j grad b_j = grad b.

    ``grad_b`` may be supplied in closed form; otherwise it is differentiated
    on the grid. Piece J_max collects everything inside B_{2^-J_max} and is
    flagged ``truncated`` (unless J_max = 0, where it is b itself).
    """
    g = b.grid
    if J_max < 0 or J_max > g.deepest_level():
        raise ParameterError(
            f"J_max={J_max} is not resolved by the grid (deepest level {g.deepest_level()}); "
            "increase levels"
        )
    gb = grad_b if grad_b is not None else gradient(b)
    bv = b.values
    nu = [0.0] + [_area_mean(bv, g, 2.0 ** (-j - 1), 2.0**-j) for j in range(1, J_max + 1)]
    rhat_x, rhat_y = np.cos(g.T), np.sin(g.T)

    def term(j):
        # chi_j (b - nu_j) and its gradient
        c, dc = _chi_or_one(j, g)
        d = bv - nu[j]
        return c * d, VectorField(g, dc * d * rhat_x + c * gb.vx, dc * d * rhat_y + c * gb.vy)

    pieces = []
    cur_v, cur_g = term(0)
    for j in range(J_max + 1):
        if j < J_max:
            nxt_v, nxt_g = term(j + 1)
            vals, grad = cur_v - nxt_v, cur_g - nxt_g
            support = (2.0 ** (-j - 2), 2.0**-j)
        else:
            vals, grad = cur_v, cur_g
            support = (0.0, 2.0**-j)
        pieces.append(DyadicPiece(j, ScalarField(g, vals, f"b_{j}"), grad, support,
                                  truncated=(j == J_max and J_max > 0)))
        if j < J_max:
            cur_v, cur_g = nxt_v, nxt_g

    total = pieces[0].grad_b_j
    for p in pieces[1:]:
        total = total + p.grad_b_j
    denom = weighted_energy(gb)
    recon = weighted_energy(total - gb) / denom if denom > 0 else weighted_energy(total)

    consts = []
    for p in pieces:
        local = _energy_on(gb, *p.support)
        consts.append(p.energy / local if local > 0 else (0.0 if p.energy == 0 else np.inf))
    return DyadicDecomposition(pieces, J_max, float(recon), np.array(consts))


def support_leak(piece: DyadicPiece) -> float:
    """max |grad b_j| at nodes outside the piece's annulus."""
    g = piece.grad_b_j.grid
    outside = ~g.mask(*piece.support)
    mag = np.sqrt(piece.grad_b_j.norm_sq())
    return float(mag[outside].max()) if outside.any() else 0.0


# -- localisation of a ------------------------------------------------------------

def _localize(a: ScalarField, j: int, grad_a: VectorField | None, inner_ramp: bool = True):
    g = a.grid
    ga = grad_a if grad_a is not None else gradient(a)
    prof = cutoff_psi(j, inner_ramp)
    lo, hi = prof.support
    local = _energy_on(ga, lo, hi)
    on = a.values[g.mask(lo, hi)]
    if local <= 0 or np.ptp(on) <= 1e-14 * max(np.max(np.abs(on)), 1e-300):
        zero = np.zeros(g.shape)
        return ScalarField(g, zero, f"a_{j}"), VectorField(g, zero, zero), 0.0, 0.0, (lo, hi)
    c = _area_mean(a.values, g, lo, hi)
    p, dp = prof(g.R), prof.deriv(g.R)
    d = a.values - c
    a_j = ScalarField(g, p * d, f"a_{j}")
    grad = VectorField(g, dp * d * np.cos(g.T) + p * ga.vx, dp * d * np.sin(g.T) + p * ga.vy)
    return a_j, grad, c, weighted_energy(grad) ** 2 / local, (lo, hi)


def localize_a(a: ScalarField, j: int, grad_a: VectorField | None = None,
               inner_ramp: bool = True) -> tuple[ScalarField, float]:
    """a_j = psi_j (a - c_j) with c_j the mean of a over C_j = spt psi_j.

    Returns a_j and int |grad a_j|^2 / int_{C_j} |grad a|^2 (0 when a is
    constant on C_j).
    """
    a_j, _, _, const, _ = _localize(a, j, grad_a, inner_ramp)
    return a_j, const


def solve_pieces(a: ScalarField, dec: DyadicDecomposition, grad_a: VectorField | None = None) -> list:
    """Localise a for every piece and solve Laplacian(phi_j) = J(a_j, b_j)."""
    ga = grad_a if grad_a is not None else gradient(a)
    out = []
    for p in dec.pieces:
        # the last piece reaches the origin, so its cutoff keeps the plateau there
        a_j, g_aj, c, const, spt = _localize(a, p.j, ga, inner_ramp=p.j < dec.J_max)
        phi, _ = solve_dirichlet(jacobian(g_aj, p.grad_b_j))
        out.append(replace(p, a_j=a_j, grad_a_j=g_aj, c_j=c, a_support=spt,
                           loc_constant=const, phi_j=phi))
    return out


def assemble_phi(pieces) -> ScalarField:
    """sum_j phi_j."""
    pieces = list(pieces)
    if not pieces:
        raise ParameterError("no pieces to assemble")
    total = np.zeros(pieces[0].phi_j.grid.shape)
    for p in pieces:
        total = total + p.phi_j.values
    return ScalarField(pieces[0].phi_j.grid, total, "sum phi_j")


# -- audit ------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    j: int
    inequality: str
    lhs: float
    rhs: float

    @property
    def constant(self) -> float:
        return self.lhs / self.rhs if self.rhs > 0 else (0.0 if self.lhs == 0 else np.inf)

    def csv_row(self) -> list:
        return [self.j, self.inequality, repr(self.lhs), repr(self.rhs), repr(self.constant)]


@dataclass(frozen=True)
class AuditRecord:
    j: int
    alpha: float
    rows: tuple = ()
    skipped: bool = False
    reason: str = ""

    CSV_HEADER = ("j", "inequality", "lhs", "rhs", "constant")

    def constant(self, inequality: str) -> float:
        for row in self.rows:
            if row.inequality == inequality:
                return row.constant
        raise KeyError(inequality)

    def csv_rows(self) -> list:
        return [row.csv_row() for row in self.rows]


def wente_rows(j: int, alpha: float, phi: ScalarField, grad_a: VectorField, grad_b: VectorField) -> list:
    """Whole-disk weighted Wente quotients for one solution.

    ``weighted-pow``: (|| r^alpha phi ||_inf^2 + || r^alpha grad phi ||^2) over
    || r^alpha grad b ||^2 || grad a ||^2. ``weighted-crit``: the same with
    r^2 |log r| on b (alpha = 1 only). ``pow-both``: r^{2 alpha} on both
    energies, without the sup term.
    """
    a2 = weighted_energy(grad_a) ** 2
    gphi = gradient(phi)
    w = POW(alpha)
    lhs = weighted_sup(phi, alpha) ** 2 + weighted_energy(gphi, w) ** 2
    rows = [
        AuditRow(j, "weighted-pow", lhs, weighted_energy(grad_b, w) ** 2 * a2),
        AuditRow(j, "pow-both", weighted_energy(gphi, w) ** 2, weighted_energy(grad_b, w) ** 2 * a2),
    ]
    if alpha == 1:
        rows.append(AuditRow(j, "weighted-crit", lhs, weighted_energy(grad_b, CRIT) ** 2 * a2))
    return rows


def audit_piece(a: ScalarField, piece: DyadicPiece, alpha: float,
                grad_a: VectorField | None = None, tail: bool = True) -> AuditRecord:
    """Measured constants of the per-level inequalities for one solved piece.

    ``wente-local``   int |grad phi_j|^2  vs  int |grad b_j|^2 int_{C_j} |grad a|^2
    ``piece-sup``    || r^alpha phi_j ||_inf  vs  || grad a || || r^alpha grad b_j ||
    ``piece-energy`` int r^{2 alpha} |grad phi_j|^2  vs  || grad a ||^2 int w |grad b_j|^2,
                      w = r^{2 alpha} for alpha < 1 and r^2 |log r| at alpha = 1
    ``tail-decay``    max (|x| - 2^-j) |u~_j(x)| over |x| >= 2^{-j+1}
                      vs  || grad a || || r grad b_j ||   (needs j >= 2)
    """
    if piece.phi_j is None:
        raise ParameterError("piece has not been solved; call solve_pieces first")
    if not 0 <= alpha <= 1:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if piece.energy == 0:
        return AuditRecord(piece.j, alpha, skipped=True, reason="b_j has zero energy")
    g = a.grid
    ga = grad_a if grad_a is not None else gradient(a)
    j, phi, gb = piece.j, piece.phi_j, piece.grad_b_j
    a_norm = weighted_energy(ga)
    lo, hi = piece.a_support
    gphi = gradient(phi)
    w_rhs = CRIT if alpha == 1 else POW(alpha)
    rows = [
        AuditRow(j, "wente-local", weighted_energy(gphi) ** 2, piece.energy * _energy_on(ga, lo, hi)),
        AuditRow(j, "piece-sup", weighted_sup(phi, alpha), a_norm * weighted_energy(gb, POW(alpha))),
        AuditRow(j, "piece-energy", weighted_energy(gphi, POW(alpha)) ** 2,
                 a_norm**2 * weighted_energy(gb, w_rhs) ** 2),
    ]
    r_far = 2.0 ** (-j + 1)
    if tail and r_far < 1.0:
        u = newton_potential(jacobian(piece.grad_a_j, gb))
        far = g.mask(r_far, 1.0)
        decay = np.max((g.R[far] - 2.0**-j) * np.abs(u.values[far]))
        rows.append(AuditRow(j, "tail-decay", float(decay), a_norm * weighted_energy(gb, POW(1))))
    return AuditRecord(j, alpha, tuple(rows))
