"""Closed-form radial profiles and catalog functions on the unit disk.

Everything here is a plain numpy function of ``r`` (and ``theta`` where
needed) so the same formulas can back field sampling, analytic gradients
and the dyadic cutoffs.
"""

from __future__ import annotations

import numpy as np


def smoothstep(t):
    """C^1 ramp: 0 for t <= 0, 1 for t >= 1, 3t^2 - 2t^3 between."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def smoothstep_deriv(t):
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, 6.0 * t * (1.0 - t), 0.0)


# -- dyadic cutoffs ---------------------------------------------------------

def chi(j: int, r):
    """1 on r <= 2^{-j-1}, 0 on r >= 2^{-j}, C^1 ramp in between."""
    lo = 2.0 ** (-j - 1)
    return 1.0 - smoothstep((np.asarray(r, dtype=float) - lo) / lo)


def chi_deriv(j: int, r):
    lo = 2.0 ** (-j - 1)
    return -smoothstep_deriv((np.asarray(r, dtype=float) - lo) / lo) / lo


def psi_support(j: int) -> tuple[float, float]:
    """Support interval of ``psi(j, .)``, clipped to the unit disk."""
    outer = 2.0 ** -j + 2.0 ** (-j - 3)
    return 2.0 ** (-j - 3), min(outer, 1.0)


def psi(j: int, r, inner_ramp: bool = True):
    """Plateau cutoff: 1 on [2^{-j-2}, 2^{-j}], ramps of width 2^{-j-3} on
    either side. ``inner_ramp=False`` keeps the plateau down to r = 0 (used
    for the truncated last dyadic piece)."""
    r = np.asarray(r, dtype=float)
    w = 2.0 ** (-j - 3)
    outer = 1.0 - smoothstep((r - 2.0 ** -j) / w)
    if j == 0:
        outer = np.ones_like(r)
    if not inner_ramp:
        return outer
    return smoothstep((r - w) / w) * outer


def psi_deriv(j: int, r, inner_ramp: bool = True):
    r = np.asarray(r, dtype=float)
    w = 2.0 ** (-j - 3)
    if j == 0:
        outer, douter = np.ones_like(r), np.zeros_like(r)
    else:
        outer = 1.0 - smoothstep((r - 2.0 ** -j) / w)
        douter = -smoothstep_deriv((r - 2.0 ** -j) / w) / w
    if not inner_ramp:
        return douter
    inner = smoothstep((r - w) / w)
    dinner = smoothstep_deriv((r - w) / w) / w
    return dinner * outer + inner * douter


# -- counterexample catalog -------------------------------------------------

def h(r, theta):
    """x/|x|^2 - x: harmonic on the punctured disk, zero on the unit circle."""
    return np.cos(theta) * (1.0 / r - r)


def f_power(alpha: float, r, theta):
    """x |x|^alpha."""
    return np.cos(theta) * r ** (alpha + 1.0)


def a_power(alpha: float, r):
    """(alpha + 2)|x|^alpha, so that J(a, y) = Laplacian of x|x|^alpha."""
    return (alpha + 2.0) * r**alpha
