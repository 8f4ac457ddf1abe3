"""Seeded test-field families with closed-form gradients.

Every generator returns a ``Sampled`` pair (field, gradient). Random fields
are normalised to unit Dirichlet energy on the grid they are sampled on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import profiles
from .errors import ParameterError
from .grid import PolarGrid, ScalarField, VectorField
from .norms import weighted_energy


@dataclass(frozen=True, eq=False)
class Sampled:
    field: ScalarField
    grad: VectorField

    def scaled(self, c: float) -> "Sampled":
        return Sampled(ScalarField(self.field.grid, c * self.field.values, self.field.name),
                       self.grad.scaled(c))

    @property
    def energy(self) -> float:
        return weighted_energy(self.grad) ** 2


def _normalised(s: Sampled) -> Sampled | None:
    e = s.energy
    return None if e <= 1e-14 else s.scaled(1.0 / np.sqrt(e))


def random_poly(rng: np.random.Generator, grid: PolarGrid, degree: int = 4) -> Sampled | None:
    """sum c_pq x^p y^q over 1 <= p + q <= degree with N(0, 1) coefficients.

    Returns None for a degenerate draw (zero gradient).
    """
    if degree < 1:
        raise ParameterError("degree must be >= 1")
    X, Y = grid.X, grid.Y
    v = np.zeros(grid.shape)
    gx = np.zeros(grid.shape)
    gy = np.zeros(grid.shape)
    for n in range(1, degree + 1):
        for p in range(n + 1):
            q = n - p
            c = rng.standard_normal()
            v += c * X**p * Y**q
            if p:
                gx += c * p * X ** (p - 1) * Y**q
            if q:
                gy += c * q * X**p * Y ** (q - 1)
    return _normalised(Sampled(ScalarField(grid, v, f"poly{degree}"), VectorField(grid, gx, gy)))


def random_mode(rng: np.random.Generator, grid: PolarGrid, max_mode: int = 4,
                radial_degree: int = 2) -> Sampled | None:
    """sum_m r^m P_m(r^2) (c_m cos m theta + s_m sin m theta), m <= max_mode.

    P_m is a random polynomial of degree ``radial_degree``; the r^m factor
    keeps every term smooth at the origin.
    """
    if max_mode < 0 or radial_degree < 0:
        raise ParameterError("max_mode and radial_degree must be >= 0")
    R, T = grid.R, grid.T
    v = np.zeros(grid.shape)
    vr = np.zeros(grid.shape)
    vt = np.zeros(grid.shape)
    for m in range(max_mode + 1):
        coef = rng.standard_normal(radial_degree + 1)
        k = np.arange(radial_degree + 1)
        # radial factor r^m sum_k coef_k r^{2k} and its derivative
        P = sum(c * R ** (m + 2 * kk) for c, kk in zip(coef, k))
        dP = sum(c * (m + 2 * kk) * R ** (m + 2 * kk - 1) for c, kk in zip(coef, k) if m + 2 * kk > 0)
        cm, sm = rng.standard_normal(2)
        if m == 0:
            sm = 0.0
        ang = cm * np.cos(m * T) + sm * np.sin(m * T)
        dang = m * (-cm * np.sin(m * T) + sm * np.cos(m * T))
        v += P * ang
        vr += dP * ang
        vt += P * dang / R
    return _normalised(Sampled(ScalarField(grid, v, f"mode{max_mode}"),
                               VectorField.from_polar(grid, vr, vt)))


def random_pair(rng: np.random.Generator, grid: PolarGrid, kind: str = "mode", **kw):
    """Draw (a, b) from one family; redraws degenerate samples.

    Returns (a, b, redraws).
    """
    gen = {"poly": random_poly, "mode": random_mode}.get(kind)
    if gen is None:
        raise ParameterError(f"unknown random family {kind!r}")
    out, redraws = [], 0
    while len(out) < 2:
        s = gen(rng, grid, **kw)
        if s is None:
            redraws += 1
            continue
        out.append(s)
    return out[0], out[1], redraws


# -- adversarial annulus ------------------------------------------------------

def _bump(t):
    # sin^2 bump on [1/4, 1], C^1 at both ends
    inside = (t > 0.25) & (t < 1.0)
    return np.where(inside, np.sin(np.pi * (t - 0.25) / 0.75) ** 2, 0.0)


def _bump_deriv(t):
    inside = (t > 0.25) & (t < 1.0)
    u = (t - 0.25) / 0.75
    return np.where(inside, np.pi * np.sin(2 * np.pi * u) / 0.75, 0.0)


def adversarial_annulus(j: int, grid: PolarGrid) -> tuple[Sampled, Sampled]:
    """(a, b) living at dyadic scale 2^-j.

    b = bump(r 2^j) cos theta with the bump supported in [1/4, 1], and a a
    radial ramp from 1 (r <= 2^{-j-2}) to 0 (r >= 2^{-j}). The right-hand side
    J(a, b) is a mode-1 source with nonzero dipole moment, so the solution
    decays only like 1/r away from the annulus; that far field is what makes
    the r^2-weighted quotient grow with j.
    """
    if j < 0:
        raise ParameterError("level must be >= 0")
    lo = 2.0**-j
    if grid.radii[0] > lo / 4:
        raise ParameterError(f"grid does not reach the annulus of level {j}")
    R, T = grid.R, grid.T
    t = R / lo
    g, dg = _bump(t), _bump_deriv(t) / lo
    b = Sampled(ScalarField(grid, g * np.cos(T), f"bump_{j}"),
                VectorField.from_polar(grid, dg * np.cos(T), -g * np.sin(T) / R))
    s = (t - 0.25) / 0.75
    a = Sampled(ScalarField(grid, 1.0 - profiles.smoothstep(s), f"ramp_{j}"),
                VectorField.from_polar(grid, -profiles.smoothstep_deriv(s) / (0.75 * lo),
                                       np.zeros(grid.shape)))
    return a, b
