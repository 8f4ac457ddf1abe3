"""Dirichlet Poisson solver on the unit disk and its potential-theory oracle.

``solve_dirichlet`` is the workhorse: FFT in theta, one tridiagonal radial
solve per angular mode. ``newton_potential`` and ``harmonic_correction``
rebuild the same solution as u = u~ - v (log-kernel potential minus the
harmonic extension of its boundary trace) and serve as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import SolverError
from .grid import PolarGrid, ScalarField, integrate


@dataclass(frozen=True)
class SolveReport:
    residual_l2: float
    boundary_max: float


def _mode_bands(grid: PolarGrid, m: int) -> np.ndarray:
    """Banded (1, 1) matrix of d_rr + r^-1 d_r - m^2 r^-2 for one mode.

    Row 0 is the regularity closure phi_m ~ c r^m + d r^{m+2}; the last row
    pins phi_m(1) = 0.
    """
    r = grid.radii
    n = r.size
    ab = np.zeros((3, n))
    h1 = r[1:-1] - r[:-2]
    h2 = r[2:] - r[1:-1]
    rc = r[1:-1]
    lower = 2 / (h1 * (h1 + h2)) - h2 / (rc * h1 * (h1 + h2))
    diag = -2 / (h1 * h2) + (h2 - h1) / (rc * h1 * h2) - m**2 / rc**2
    upper = 2 / (h2 * (h1 + h2)) + h1 / (rc * h2 * (h1 + h2))
    ab[1, 1:-1] = diag
    ab[0, 2:] = upper
    ab[2, :-2] = lower
    ab[1, 0] = -1.0
    ab[0, 1] = (r[0] / r[1]) ** m
    ab[1, -1] = 1.0
    return ab


def _closure_rhs(grid: PolarGrid, m: int) -> float:
    r0, r1 = grid.radii[0], grid.radii[1]
    return (r1**2 - r0**2) / (4.0 * (m + 1))


def solve_dirichlet(rhs: ScalarField) -> tuple[ScalarField, SolveReport]:
    """Solve Laplacian(phi) = rhs on B_1 with phi = 0 on the unit circle."""
    g = rhs.grid
    fhat = np.fft.rfft(rhs.values, axis=1)
    phat = np.empty_like(fhat)
    for m in g.modes:
        b = fhat[:, m].copy()
        b[0] *= _closure_rhs(g, m)
        b[-1] = 0.0
        try:
            phat[:, m] = solve_banded((1, 1), _mode_bands(g, m), b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"radial system for mode {m} is singular") from exc
    phi = ScalarField(g, np.fft.irfft(phat, n=g.n_theta, axis=1))
    return phi, SolveReport(residual(phi, rhs), float(np.max(np.abs(phi.values[-1]))))


def apply_operator(phi: ScalarField) -> ScalarField:
    """The solver's discrete Laplacian applied to ``phi`` (interior rows only;
    closure and boundary rows are set to zero)."""
    g = phi.grid
    phat = np.fft.rfft(phi.values, axis=1)
    out = np.zeros_like(phat)
    for m in g.modes:
        ab = _mode_bands(g, m)
        v = phat[:, m]
        out[1:-1, m] = ab[2, :-2] * v[:-2] + ab[1, 1:-1] * v[1:-1] + ab[0, 2:] * v[2:]
    return ScalarField(g, np.fft.irfft(out, n=g.n_theta, axis=1))


def residual(phi: ScalarField, rhs: ScalarField) -> float:
    """Quadrature L2 norm of (discrete Laplacian(phi) - rhs) on interior rings."""
    diff = apply_operator(phi).values - rhs.values
    diff[0] = 0.0
    diff[-1] = 0.0
    return float(np.sqrt(integrate(diff**2, phi.grid)))


def newton_potential(rhs: ScalarField) -> ScalarField:
    """u~(x_i) = (1/2pi) sum_k log|x_i - y_k| rhs(y_k) w_k over all nodes.

    The self term uses the mean of log|x_i - y| over a disk with the cell's
    area, log(R_cell) - 1/2. Because the grid is a tensor product with equally
    spaced angles, the double sum is a circular convolution in theta for each
    pair of rings and is evaluated ring by ring with the FFT; the result is the
    plain O(N^2) sum up to round-off.
    """
    g = rhs.grid
    n = g.n_theta
    r = g.radii
    w = g.quad_weights
    dens_hat = np.fft.rfft(rhs.values * w, axis=1) / (2.0 * np.pi)
    cos_t = np.cos(g.theta)
    out = np.empty(g.shape)
    for i in range(g.n_r):
        d2 = r[i] ** 2 + r[:, None] ** 2 - 2.0 * r[i] * r[:, None] * cos_t[None, :]
        with np.errstate(divide="ignore"):
            kern = 0.5 * np.log(d2)
        kern[i, 0] = np.log(np.sqrt(w[i, 0] / np.pi)) - 0.5
        # kern is even in theta, so convolution and correlation coincide
        acc = np.sum(np.fft.rfft(kern, axis=1) * dens_hat, axis=0)
        out[i] = np.fft.irfft(acc, n=n)
    return ScalarField(g, out)


def harmonic_correction(boundary, grid: PolarGrid) -> ScalarField:
    """Harmonic extension into B_1 of data given at the grid angles on the
    unit circle (mode m grows like r^m)."""
    bhat = np.fft.rfft(np.asarray(boundary, dtype=float))
    scale = grid.radii[:, None] ** grid.modes[None, :]
    return ScalarField(grid, np.fft.irfft(scale * bhat[None, :], n=grid.n_theta, axis=1))


def solve_via_potential(rhs: ScalarField) -> ScalarField:
    """Oracle route: Newton potential minus the harmonic extension of its trace."""
    ut = newton_potential(rhs)
    return ut - harmonic_correction(ut.boundary(), rhs.grid)
