"""Weighted energies, weighted sup norms and Lorentz quasinorms.

All norms are taken on the quadrature surrogate: node values with their
quadrature areas. The Lorentz integrals are evaluated exactly on the
resulting step distribution function, so no tolerance enters there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .grid import PolarGrid, ScalarField, VectorField


@dataclass(frozen=True)
class Weight:
    """Radial weight w(r) on (0, 1].

    kinds: ``ONE``; ``POW`` (r^{2p}); ``CRIT`` (r^2 |log r|); ``CRITBETA``
    (r^2 |log r|^p); ``DGR`` (r^2 log^2(1 + 1/r) log(1 + log(1/r))).
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ONE", "POW", "CRIT", "CRITBETA", "DGR"):
            raise ParameterError(f"unknown weight kind {self.kind!r}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        lg = np.abs(np.log(r))
        if self.kind == "ONE":
            return np.ones_like(r)
        if self.kind == "POW":
            return r ** (2.0 * self.param)
        if self.kind == "CRIT":
            return r**2 * lg
        if self.kind == "CRITBETA":
            return r**2 * lg**self.param
        # log(1 + log(1/r)) is negative for r > 1, irrelevant on the disk
        return r**2 * np.log1p(1.0 / r) ** 2 * np.log1p(np.log(1.0 / r))

    @property
    def label(self) -> str:
        return self.kind if self.kind in ("ONE", "CRIT", "DGR") else f"{self.kind}({self.param:g})"


ONE = Weight("ONE")
CRIT = Weight("CRIT")
DGR = Weight("DGR")


def POW(alpha: float) -> Weight:
    return ONE if alpha == 0 else Weight("POW", alpha)


def CRITBETA(beta: float) -> Weight:
    return Weight("CRITBETA", beta)


def weighted_energy(v: VectorField, w: Weight = ONE, region: tuple[float, float] | None = None) -> float:
    """sqrt( int w(r) |v|^2 dA ), optionally restricted to r_lo <= r <= r_hi."""
    g = v.grid
    dens = w(g.R) * v.norm_sq() * g.quad_weights
    if region is not None:
        dens = np.where(g.mask(*region), dens, 0.0)
    return float(np.sqrt(np.sum(dens)))


def weighted_sup(f: ScalarField, alpha: float = 0.0) -> float:
    """max over nodes of r^alpha |f|."""
    vals = np.abs(f.values)
    if alpha != 0:
        vals = vals * f.grid.R**alpha
    return float(np.max(vals))


def l2_norm(f: ScalarField | np.ndarray, grid: PolarGrid | None = None) -> float:
    if isinstance(f, ScalarField):
        grid, f = f.grid, f.values
    return float(np.sqrt(np.sum(f**2 * grid.quad_weights)))


def _distribution(values: np.ndarray, areas: np.ndarray):
    """Sorted |values| (descending) and cumulative area of {|f| >= v_k}."""
    v = np.abs(np.ravel(values))
    order = np.argsort(-v, kind="stable")
    return v[order], np.cumsum(np.ravel(areas)[order])


def _as_arrays(f):
    if isinstance(f, VectorField):
        return np.sqrt(f.norm_sq()), f.grid.quad_weights
    return f.values, f.grid.quad_weights


def lorentz(f: ScalarField | VectorField, p: float, q: float) -> float:
    """p^{1/q} ( int_0^inf t^q mu(t)^{q/p} dt/t )^{1/q} for the step surrogate.

    On each interval (v_{k+1}, v_k] the distribution is the constant W_k, so
    the integral is (1/q) sum_k W_k^{q/p} (v_k^q - v_{k+1}^q). Vector fields
    are measured through their pointwise Euclidean length.
    """
    if not (0 < p < np.inf and 0 < q < np.inf):
        raise ParameterError("lorentz needs finite positive p, q")
    vals, areas = _as_arrays(f)
    v, W = _distribution(vals, areas)
    vq = v**q
    steps = vq - np.append(vq[1:], 0.0)
    total = np.sum(W ** (q / p) * steps) / q
    return float((p * total) ** (1.0 / q))


def lorentz_weak(f: ScalarField | VectorField, p: float) -> float:
    """sup_lambda lambda |{|f| >= lambda}|^{1/p} for the step surrogate."""
    vals, areas = _as_arrays(f)
    v, W = _distribution(vals, areas)
    return float(np.max(v * W ** (1.0 / p)))


@dataclass(frozen=True)
class RatioReport:
    lhs: float
    rhs_a: float
    rhs_b: float
    ratio: float
    meta: dict = field(default_factory=dict)

    CSV_HEADER = ("experiment", "weight_lhs", "weight_rhs", "lhs", "rhs_a", "rhs_b", "ratio")

    def csv_row(self) -> list:
        m = self.meta
        return [m.get("experiment", ""), m.get("weight_lhs", ""), m.get("weight_rhs", ""),
                repr(self.lhs), repr(self.rhs_a), repr(self.rhs_b), repr(self.ratio)]


def ratio_report(lhs_value: float, a_norm: float, b_norm: float, meta: dict | None = None) -> RatioReport:
    if a_norm <= 0 or b_norm <= 0:
        raise DegenerateInputError(f"zero denominator in quotient (a={a_norm}, b={b_norm})")
    if lhs_value < 0:
        raise ParameterError("lhs must be nonnegative")
    return RatioReport(lhs_value, a_norm, b_norm, lhs_value / (a_norm * b_norm), dict(meta or {}))
