"""Verification suites behind the command line driver.

Each ``run_*`` function takes an ``ExperimentConfig``, writes its CSV table
when ``cfg.out`` is set and returns a ``SuiteReport`` whose rows are keyed by
acceptance-criterion id (C1 ... C9). All randomness flows from ``cfg.seed``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import counterexample as ce
from . import dyadic as dy
from . import families as fam
from .errors import ParameterError
from .grid import PolarGrid, ScalarField, VectorField, gradient, jacobian, make_grid, sample
from .norms import (CRIT, DGR, POW, l2_norm, lorentz, lorentz_weak, weighted_energy,
                    weighted_sup)
from .poisson import solve_dirichlet, solve_via_potential

# Caps on measured constants that have no closed-form bound. Frozen from the
# first verified run on the reference grid with seed 20240521 (observed value
# in the comment) and rounded up with headroom.
LOCKED_CAPS = {
    "weighted_random": 0.2,  # observed 0.0808 (r^2 |log r| on b, alpha = 1)
    "weighted_adversarial": 0.05,  # observed 0.0134 (alpha = 3/4)
    "clms_random": 1.0,  # observed 0.246
    "c_dec": 2.0,  # observed 1.346 (b = y)
    "loc_constant": 20.0,  # observed 9.81 (a = x)
}


@dataclass(frozen=True)
class ExperimentConfig:
    n_theta: int = 128
    levels: int = 8
    nodes_per_level: int = 16
    seed: int = 20240521
    samples: int = 100
    family: str = "mode"  # random family: "mode" | "poly"
    degree: int = 4  # random-poly degree
    max_mode: int = 4  # random-mode angular cutoff
    radial_degree: int = 2  # random-mode radial profile degree in r^2
    weight_alphas: tuple = (0.25, 0.5, 0.75)
    alpha_list: tuple = tuple(ce.default_alphas())
    betas: tuple = (0.0, 0.5, 1.0)
    annulus_levels: tuple = tuple(range(1, 8))
    j_max: int = 6
    out: Path | None = None

    def grid(self, scale: int = 1) -> PolarGrid:
        """Reference grid, or one refined by ``scale`` in both directions."""
        return make_grid(self.n_theta * scale, self.levels, int(self.nodes_per_level * scale))

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    @classmethod
    def from_pairs(cls, pairs: dict) -> "ExperimentConfig":
        """Build from string key/value pairs (``--config`` files and flags)."""
        kinds = {f.name: f for f in fields(cls)}
        values = {}
        for key, raw in pairs.items():
            key = key.strip().replace("-", "_")
            if key not in kinds:
                raise ParameterError(f"unknown config key {key!r}")
            values[key] = _parse_value(key, str(raw).strip(), getattr(cls, key, None))
        return cls(**values)

    def updated(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _parse_value(key, raw, default):
    if key == "out":
        return Path(raw)
    if isinstance(default, tuple):
        return parse_list(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def parse_list(raw: str) -> tuple:
    """'1, 1/2 0.25' -> (1.0, 0.5, 0.25)."""
    return tuple(_parse_number(x) for x in raw.replace(",", " ").split())


def _parse_number(s: str) -> float:
    if "/" in s:
        num, den = s.split("/")
        return float(num) / float(den)
    return float(s)


def load_config_file(path) -> dict:
    """key = value lines; '#' starts a comment."""
    pairs = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key = value")
        k, v = line.split("=", 1)
        pairs[k.strip()] = v.strip()
    return pairs


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    id: str
    value: float
    threshold: str
    passed: bool

    def line(self) -> str:
        return f"{self.id}  value={self.value:.6g}  threshold={self.threshold}  {'PASS' if self.passed else 'FAIL'}"


@dataclass
class SuiteReport:
    name: str
    rows: list = field(default_factory=list)

    def add(self, id_, value, threshold: str, passed) -> Row:
        row = Row(id_, float(value), threshold, bool(passed))
        self.rows.append(row)
        return row

    def le(self, id_, value, cap):
        return self.add(id_, value, f"<= {cap:g}", value <= cap)

    def ge(self, id_, value, floor):
        return self.add(id_, value, f">= {floor:g}", value >= floor)

    def within(self, id_, value, target, tol):
        return self.add(id_, value, f"{target:g} +- {tol:g}", abs(value - target) <= tol)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def lines(self) -> list[str]:
        return [r.line() for r in self.rows]

    def extend(self, other: "SuiteReport") -> "SuiteReport":
        self.rows.extend(other.rows)
        return self


def _write_csv(cfg: ExperimentConfig, name: str, header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if cfg.out is not None:
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        (Path(cfg.out) / name).write_text(text)
    return text


def _rel(u: ScalarField, v: ScalarField) -> float:
    return l2_norm(u - v) / l2_norm(v)


def _log_slope(values, js) -> float:
    return float(np.polyfit(np.asarray(js, float), np.log(np.asarray(values)), 1)[0])


# -- C1: solver ---------------------------------------------------------------------

def _oracle_error(cfg: ExperimentConfig, grid: PolarGrid) -> float:
    # same seeded random-mode rhs on every grid
    rhs = fam.random_mode(cfg.rng(1), grid, cfg.max_mode, cfg.radial_degree).field
    phi, _ = solve_dirichlet(rhs)
    return _rel(solve_via_potential(rhs), phi)


def run_solver_validation(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("validate-solver")
    g = cfg.grid()
    one = ScalarField(g, np.ones(g.shape))
    phi, srep = solve_dirichlet(one)
    rep.le("C1.exact", np.max(np.abs(phi.values - (g.R**2 - 1) / 4)), 1e-8)
    rep.le("C1.boundary", srep.boundary_max, 1e-12)

    scales = (0.5, 1, 2)
    errs = []
    for sc in scales:
        grid = make_grid(int(cfg.n_theta * sc), cfg.levels, int(cfg.nodes_per_level * sc))
        errs.append(_oracle_error(cfg, grid))
    rep.le("C1.oracle", errs[1], 1e-3)
    order = float(np.log2(errs[1] / errs[2]))
    rep.ge("C1.order", order, 1.9)

    rng = cfg.rng(2)
    f = fam.random_mode(rng, g, cfg.max_mode, cfg.radial_degree).field
    h = fam.random_mode(rng, g, cfg.max_mode, cfg.radial_degree).field
    pf, ph = solve_dirichlet(f)[0], solve_dirichlet(h)[0]
    comb = solve_dirichlet(2.0 * f - 3.0 * h)[0]
    rep.le("C1.linearity", np.max(np.abs(comb.values - (2.0 * pf.values - 3.0 * ph.values))), 1e-10)
    rot = solve_dirichlet(f.rotated(1))[0]
    rep.le("C1.rotation", np.max(np.abs(rot.values - pf.rotated(1).values)), 1e-12)

    rows = [["exact_max_error", repr(rep.rows[0].value)]]
    rows += [[f"oracle_rel_l2_npl{int(cfg.nodes_per_level * s)}", repr(e)] for s, e in zip(scales, errs)]
    rows += [["oracle_order", repr(order)]]
    _write_csv(cfg, "solver_validation.csv", ("quantity", "value"), rows)
    return rep


# -- C2, C3 (random part), C8 (CLMS): random pairs -------------------------------------

RANDOM_HEADER = ("sample", "family", "redraws", "sup_ratio", "weighted_pow_0.25", "weighted_pow_0.5",
                 "weighted_pow_0.75", "weighted_crit_1", "clms_ratio", "weak_le_strong")


def wente_quotients(phi: ScalarField, grad_a: VectorField, grad_b: VectorField, alphas) -> dict:
    """Sup, weighted-energy and Lorentz quotients for one solved pair."""
    na, nb = weighted_energy(grad_a), weighted_energy(grad_b)
    gphi = gradient(phi)
    out = {"sup": weighted_sup(phi) / (na * nb)}
    for al in alphas:
        lhs = weighted_sup(phi, al) ** 2 + weighted_energy(gphi, POW(al)) ** 2
        out[("pow", al)] = lhs / (weighted_energy(grad_b, POW(al)) ** 2 * na**2)
    lhs = weighted_sup(phi, 1.0) ** 2 + weighted_energy(gphi, POW(1)) ** 2
    out[("crit", 1.0)] = lhs / (weighted_energy(grad_b, CRIT) ** 2 * na**2)
    strong = lorentz(gphi, 2, 1)
    out["clms"] = strong / (na * nb)
    out["nesting"] = lorentz_weak(gphi, 2) <= strong
    return out


def run_random_suite(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("random-suite")
    g = cfg.grid()
    rng = cfg.rng(3)
    kw = ({"degree": cfg.degree} if cfg.family == "poly"
          else {"max_mode": cfg.max_mode, "radial_degree": cfg.radial_degree})
    alphas = tuple(cfg.weight_alphas)

    ax, by = sample("x", g), sample("y", g)
    gx = VectorField(g, np.ones(g.shape), np.zeros(g.shape))
    gy = VectorField(g, np.zeros(g.shape), np.ones(g.shape))
    phi0, _ = solve_dirichlet(jacobian(gx, gy))
    det = wente_quotients(phi0, gx, gy, alphas)

    rows, sups, clms, nest = [], [det["sup"]], [], True
    quot = {k: [] for k in [("pow", a) for a in alphas] + [("crit", 1.0)]}
    total_redraws = 0
    for i in range(cfg.samples):
        a, b, redraws = fam.random_pair(rng, g, cfg.family, **kw)
        total_redraws += redraws
        phi, _ = solve_dirichlet(jacobian(a.grad, b.grad))
        q = wente_quotients(phi, a.grad, b.grad, alphas)
        sups.append(q["sup"])
        clms.append(q["clms"])
        nest &= bool(q["nesting"])
        for k in quot:
            quot[k].append(q[k])
        rows.append([i, cfg.family, redraws, repr(q["sup"])]
                    + [repr(q[("pow", a)]) for a in alphas] + [repr(q[("crit", 1.0)]), repr(q["clms"]),
                                                                int(q["nesting"])])
    rows.append(["x,y", "deterministic", 0, repr(det["sup"])]
                + [repr(det[("pow", a)]) for a in alphas] + [repr(det[("crit", 1.0)]), repr(det["clms"]),
                                                             int(det["nesting"])])
    header = RANDOM_HEADER if alphas == (0.25, 0.5, 0.75) else (
        RANDOM_HEADER[:4] + tuple(f"weighted_pow_{a:g}" for a in alphas) + RANDOM_HEADER[7:])
    _write_csv(cfg, "random_suite.csv", header, rows)

    rep.le("C2.sup_constant", max(sups), 1 / (2 * np.pi) + 0.02)
    rep.within("C2.deterministic_xy", det["sup"], 1 / (4 * np.pi), 1e-6)
    for (kind, al), vals in quot.items():
        v = max(vals)
        rep.add(f"C3.random.{kind}({al:g})", v, f"finite, <= {LOCKED_CAPS['weighted_random']:g}",
                np.isfinite(v) and v <= LOCKED_CAPS["weighted_random"])
    rep.le("C8.clms_random", max(clms), LOCKED_CAPS["clms_random"])
    rep.add("C8.nesting_random", float(nest), "== 1", nest)
    return rep


# -- C3 (adversarial part), C4, C7: dyadic machinery ------------------------------------

AUDIT_HEADER = ("source", "alpha") + dy.AuditRecord.CSV_HEADER


def adversarial_constants(cfg: ExperimentConfig, grid: PolarGrid | None = None) -> dict:
    """Measured quotients of the adversarial-annulus family, keyed by
    (row id, alpha) -> list over ``cfg.annulus_levels``."""
    g = grid or cfg.grid()
    out = {}
    for j in cfg.annulus_levels:
        a, b = fam.adversarial_annulus(j, g)
        phi, _ = solve_dirichlet(jacobian(a.grad, b.grad))
        for al in tuple(cfg.weight_alphas) + (1.0,):
            for row in dy.wente_rows(j, al, phi, a.grad, b.grad):
                out.setdefault((row.inequality, al), []).append(row)
    return out


def run_dyadic_audit(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("dyadic-audit")
    g = cfg.grid()
    csv_rows = []

    # C7: decomposition contract on b = y and on a random b
    gy = VectorField(g, np.zeros(g.shape), np.ones(g.shape))
    rb = fam.random_mode(cfg.rng(4), g, cfg.max_mode, cfg.radial_degree)
    recon, leak, cdec = 0.0, 0.0, 0.0
    for b, gb in ((sample("y", g), gy), (rb.field, rb.grad)):
        dec = dy.decompose_b(b, cfg.j_max, gb)
        recon = max(recon, dec.reconstruction_error)
        leak = max(leak, max(dy.support_leak(p) for p in dec.pieces) / weighted_energy(gb))
        cdec = max(cdec, dec.C_dec)
    rep.le("C7.reconstruction", recon, 1e-6)
    rep.le("C7.support_leak", leak, 1e-12)
    rep.le("C7.C_dec", cdec, LOCKED_CAPS["c_dec"])

    # per-level audit for a = x, b = y and assembly
    a = sample("x", g)
    gx = VectorField(g, np.ones(g.shape), np.zeros(g.shape))
    dec = dy.decompose_b(sample("y", g), cfg.j_max, gy)
    pieces = dy.solve_pieces(a, dec, gx)
    direct, _ = solve_dirichlet(jacobian(gx, gy))
    rep.le("C7.assembly_xy", _rel(dy.assemble_phi(pieces), direct), 1e-4)
    rep.le("C7.localization_constant", max(p.loc_constant for p in pieces), LOCKED_CAPS["loc_constant"])
    for al in (0.5, 1.0):
        for p in pieces:
            audit = dy.audit_piece(a, p, al, gx)
            csv_rows += [["xy", al] + r for r in audit.csv_rows()]

    # C3 / C4: adversarial-annulus family over the levels
    js = list(cfg.annulus_levels)
    adv = adversarial_constants(cfg, g)
    for (ineq, al), rows in sorted(adv.items()):
        csv_rows += [["adversarial", al] + r.csv_row() for r in rows]
    for al in cfg.weight_alphas:
        consts = [r.constant for r in adv[("weighted-pow", al)]]
        rep.within(f"C3.adversarial.slope.pow({al:g})", _log_slope(consts, js), 0.0, 0.05)
        rep.le(f"C3.adversarial.max.pow({al:g})", max(consts), LOCKED_CAPS["weighted_adversarial"])
    crit = [r.constant for r in adv[("weighted-crit", 1.0)]]
    rep.within("C3.adversarial.slope.crit(1)", _log_slope(crit, js), 0.0, 0.05)
    rep.le("C3.adversarial.max.crit(1)", max(crit), LOCKED_CAPS["weighted_adversarial"])

    both = np.array([r.constant for r in adv[("pow-both", 1.0)]])
    lin = np.polyfit(js, both, 1)
    fit = np.polyval(lin, js)
    r2 = 1 - np.sum((both - fit) ** 2) / np.sum((both - both.mean()) ** 2)
    rep.add("C4.pow_both.linear_slope", lin[0], "> 0", lin[0] > 0)
    rep.ge("C4.pow_both.linear_r2", r2, 0.99)
    rep.le("C4.crit.log_slope", _log_slope(crit, js), 0.05)

    _write_csv(cfg, "dyadic_audit.csv", AUDIT_HEADER, csv_rows)
    return rep


# -- C5, C6: counterexample --------------------------------------------------------------

QUADRATURE_ALPHAS = (2.0, 1.0, 2.0 / 3.0, 0.5)
SWEEP_HEADER = ("solution",) + ce.SweepResult.CSV_HEADER


def run_counterexample(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("counterexample")
    factory = ce.aligned_grid_factory(cfg.n_theta, cfg.levels, cfg.nodes_per_level)
    rows = []
    for beta in cfg.betas:
        sw = ce.divergence_sweep(cfg.alpha_list, beta, factory, "glued")
        rows += [["glued"] + r for r in sw.csv_rows()]
        ex = ce.divergence_sweep(cfg.alpha_list, beta, factory, "exact")
        rows += [["exact"] + r for r in ex.csv_rows()]
        order = np.argsort(-sw.alphas)  # alpha decreasing, s_alpha -> 0
        R = sw.ratios[order]
        if beta < 1:
            rep.add(f"C5.monotone(beta={beta:g})", float(np.all(np.diff(R) > 0)), "== 1",
                    bool(np.all(np.diff(R) > 0)))
            rep.within(f"C5.slope(beta={beta:g})", sw.slope, (1 - beta) / 2, 0.1)
        else:
            rep.le("C5.bounded(beta=1)", R.max() / R.min(), 2.0)
    _write_csv(cfg, "counterexample.csv", SWEEP_HEADER, rows)

    worst = 0.0
    for al in QUADRATURE_ALPHAS:
        fam_ = ce.build(al, factory(al))
        num = weighted_energy(fam_.grad_a_tilde) ** 2
        worst = max(worst, abs(num / ce.closed_form_norms(al, 0.0)["grad_a_sq"] - 1))
    rep.le("C6.grad_a_quadrature", worst, 0.005)

    errs = []
    for scale in (1, 2):
        g = ce.aligned_grid_factory(cfg.n_theta * scale, cfg.levels, cfg.nodes_per_level * scale)(2 / 3)
        f = ce.build(2 / 3, g)
        phi, _ = solve_dirichlet(f.rhs)
        errs.append(_rel(phi, f.h_field))
    rep.le("C6.solve_vs_h_alpha", errs[0], 0.01)
    # doubling the resolution must at least halve the error (first order)
    rep.le("C6.solve_vs_h_alpha.refines", errs[1] / errs[0], 0.5)

    cont = flux = 0.0
    for al in cfg.alpha_list:
        s = ce.s_alpha(al)
        K = ce.k_factor(s, al)
        cont = max(cont, abs(K * s ** (al + 1) - (1 / s - s)) / (1 / s - s))
        flux = max(flux, ce.flux_residual(al))
    rep.le("C6.continuity", cont, 1e-10)
    rep.le("C6.flux", flux, 1e-10)
    return rep


# -- C8 closed forms, C9: norm engine --------------------------------------------------

def run_lorentz_check(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("lorentz-check")
    g = cfg.grid()
    one = ScalarField(g, np.ones(g.shape))
    rows = []

    def record(name, value, target):
        rows.append([name, repr(value), repr(target)])
        return value

    sq = np.sqrt(np.pi)
    v = record("L21_const", lorentz(one, 2, 1), 2 * sq)
    rep.within("C8.L21_constant", v, 2 * sq, 1e-10)
    v = record("L2inf_const", lorentz_weak(one, 2), sq)
    rep.within("C8.L2inf_constant", v, sq, 1e-10)
    v = record("L2inf_inv_r", lorentz_weak(sample("1/r", g), 2), sq)
    # the step surrogate overshoots by about (rho^-1 - 1)/2 = 2.2% at 16 nodes per level
    rep.add("C8.L2inf_inv_r", v, f"sqrt(pi) +- 3%", abs(v / sq - 1) <= 0.03)

    rng = cfg.rng(5)
    worst_22, nest = 0.0, True
    tested = [one, sample("1/r", g), sample("x", g), sample("log(r)", g)]
    for _ in range(20):
        tested.append(ScalarField(g, rng.standard_normal(g.shape)))
        tested.append(fam.random_mode(rng, g, cfg.max_mode, cfg.radial_degree).field)
    for f in tested:
        worst_22 = max(worst_22, abs(lorentz(f, 2, 2) - l2_norm(f)) / max(l2_norm(f), 1e-300))
        nest &= lorentz_weak(f, 2) <= lorentz(f, 2, 1)
    record("L22_vs_L2_worst_rel", worst_22, 0.0)
    rep.le("C8.L22_equals_L2", worst_22, 1e-8)
    rep.add("C8.nesting", float(nest), "== 1", nest)

    r = np.logspace(-12, np.log10(0.5), 400)
    ratio = float(np.max(CRIT(r) / DGR(r)))
    record("crit_over_dgr_max", ratio, 1.1)
    rep.le("C9.crit_le_dgr", ratio, 1.1)
    _write_csv(cfg, "lorentz_check.csv", ("quantity", "value", "target"), rows)
    return rep


SUITES = {
    "validate-solver": run_solver_validation,
    "random-suite": run_random_suite,
    "dyadic-audit": run_dyadic_audit,
    "counterexample": run_counterexample,
    "lorentz-check": run_lorentz_check,
}


def run_all(cfg: ExperimentConfig) -> SuiteReport:
    rep = SuiteReport("all")
    for fn in SUITES.values():
        rep.extend(fn(cfg))
    return rep
