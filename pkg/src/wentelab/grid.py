"""Polar tensor grid on the unit disk: sampling, differentiation, quadrature.

Radii are geometrically graded with ratio ``2**(-1/nodes_per_level)`` so each
dyadic annulus ``B_{2^-j} \\ B_{2^-j-1}`` carries exactly ``nodes_per_level``
radial nodes. The origin is never a node; the disk ``B_{r_0}`` inside the
innermost ring is lumped into that ring's quadrature weight.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr

from . import profiles
from .errors import EvaluationError, ParameterError

# the core is always graded down to at least this radius
MIN_CORE_RADIUS = 2.0**-8


@dataclass(frozen=True)
class Grading:
    kind: str  # "geometric" | "custom"
    ratio: float = 1.0
    levels: int = 0
    nodes_per_level: int = 0


@dataclass(frozen=True, eq=False)
class PolarGrid:
    n_theta: int
    radii: np.ndarray
    grading: Grading = field(default_factory=lambda: Grading("custom"))
    interfaces: tuple = ()  # node radii where sampled fields may have a kink

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise ParameterError("need at least three radial nodes")
        if not (np.all(np.diff(r) > 0) and r[0] > 0 and r[-1] == 1.0):
            raise ParameterError("radii must increase strictly from r > 0 to r = 1")
        if self.n_theta < 4 or self.n_theta % 2:
            raise ParameterError(f"n_theta must be even and >= 4, got {self.n_theta}")
        for s in self.interfaces:
            if not np.any(r == s) or s in (r[0], r[-1]):
                raise ParameterError(f"interface r={s} is not an interior node")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "interfaces", tuple(float(s) for s in self.interfaces))

    @property
    def n_r(self) -> int:
        return self.radii.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    @cached_property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @cached_property
    def R(self) -> np.ndarray:
        return np.broadcast_to(self.radii[:, None], self.shape)

    @cached_property
    def T(self) -> np.ndarray:
        return np.broadcast_to(self.theta[None, :], self.shape)

    @cached_property
    def X(self) -> np.ndarray:
        return self.R * np.cos(self.T)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.R * np.sin(self.T)

    @cached_property
    def radial_weights(self) -> np.ndarray:
        """Weights w_k with sum_k w_k g(r_k) ~ int_0^1 g(r) r dr."""
        idx = [int(np.flatnonzero(self.radii == s)[0]) for s in self.interfaces]
        return _radial_weights(self.radii, idx)

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Per-node area weights approximating r dr dtheta."""
        dtheta = 2.0 * np.pi / self.n_theta
        w = np.broadcast_to((self.radial_weights * dtheta)[:, None], self.shape)
        return np.ascontiguousarray(w)

    @cached_property
    def d1(self) -> np.ndarray:
        """Radial first-derivative matrix (3-point, nonuniform)."""
        return _first_derivative_matrix(self.radii)

    @cached_property
    def d2(self) -> np.ndarray:
        """Radial second-derivative matrix; boundary rows use one-sided stencils."""
        return _second_derivative_matrix(self.radii)

    @cached_property
    def modes(self) -> np.ndarray:
        """Angular wavenumbers matching ``np.fft.rfft`` output ordering."""
        return np.arange(self.n_theta // 2 + 1)

    def interface_blend(self, s: float) -> tuple[float, float]:
        """Weights (inner, outer) giving the node value on an interface.

        They are the adjacent spacings normalised to sum 1: the 3-point
        second difference of a C^1 function sees exactly this blend of the
        one-sided second derivatives, and the interface-aware quadrature splits
        the node's weight in the same proportion to leading order.
        """
        i = int(np.flatnonzero(self.radii == s)[0])
        h1, h2 = s - self.radii[i - 1], self.radii[i + 1] - s
        return h1 / (h1 + h2), h2 / (h1 + h2)

    def ring_index(self, r: float) -> int:
        """Index of the radial node closest to ``r``."""
        return int(np.argmin(np.abs(self.radii - r)))

    def mask(self, r_lo: float = 0.0, r_hi: float = np.inf) -> np.ndarray:
        """Boolean node mask for r_lo <= r <= r_hi."""
        return (self.R >= r_lo) & (self.R <= r_hi)

    def deepest_level(self) -> int:
        """Deepest dyadic level j whose annulus holds a full set of graded nodes."""
        return self.grading.levels


def make_grid(n_theta: int, levels: int, nodes_per_level: int, align=()) -> PolarGrid:
    """Geometrically graded polar grid resolving dyadic levels 0..levels.

    Radii are ``rho**k`` with ``rho = 2**(-1/nodes_per_level)``, running from 1
    down to ``min(2**(-levels-1), MIN_CORE_RADIUS)``. Each radius in ``align``
    (an interface where fields have a kink) is made a node by moving the
    nearest eligible node onto it; dyadic radii 2^-j are never moved out of
    their annulus, so every annulus keeps ``nodes_per_level`` nodes.
    """
    if n_theta < 8 or n_theta % 2:
        raise ParameterError(f"n_theta must be even and >= 8, got {n_theta}")
    if levels < 1:
        raise ParameterError(f"levels must be >= 1, got {levels}")
    if nodes_per_level < 4:
        raise ParameterError(f"nodes_per_level must be >= 4, got {nodes_per_level}")
    ratio = 2.0 ** (-1.0 / nodes_per_level)
    octaves = max(levels + 1, int(round(-np.log2(MIN_CORE_RADIUS))))
    k = np.arange(octaves * nodes_per_level, -1, -1)
    radii = 2.0 ** (-k / nodes_per_level)
    radii[-1] = 1.0
    dyadic = (k % nodes_per_level) == 0
    snapped = [float(t) for t in align if _snap(radii, dyadic, float(t))]
    return PolarGrid(n_theta, radii, Grading("geometric", ratio, levels, nodes_per_level), tuple(snapped))


def _snap(radii: np.ndarray, dyadic: np.ndarray, target: float) -> bool:
    """Move one node onto ``target``; False if no node could be moved safely."""
    if not radii[2] < target < radii[-2]:
        raise ParameterError(f"cannot align a node with r={target}")
    i = int(np.argmin(np.abs(radii - target)))
    if radii[i] == target:
        return True
    if dyadic[i] and target > radii[i]:
        # moving a dyadic node outward would empty a slot in its annulus;
        # move its outer neighbour down instead unless that squeezes a cell
        i += 1
        if target - radii[i - 1] < 0.25 * (radii[i] - radii[i - 1]):
            return False
    radii[i] = target
    return True


def _radial_weights(r: np.ndarray, interfaces=()) -> np.ndarray:
    # Each interval is integrated exactly against the quadratic interpolant on
    # the neighbouring 3-node stencils (averaged when two exist), so the rule is
    # exact for g in span{1, r, r^2} on any node layout. Stencils that straddle
    # an interface node are skipped.
    n = r.size
    cut = set(interfaces)
    gx, gw = np.polynomial.legendre.leggauss(3)
    w = np.zeros(n)
    w[0] += 0.5 * r[0] ** 2  # lumped core disk
    for k in range(n - 1):
        a, b = r[k], r[k + 1]
        t = 0.5 * (b - a) * gx + 0.5 * (a + b)
        tw = 0.5 * (b - a) * gw * t
        stencils = []
        if k >= 1 and k not in cut:
            stencils.append((k - 1, k, k + 1))
        if k + 2 <= n - 1 and (k + 1) not in cut:
            stencils.append((k, k + 1, k + 2))
        for st in stencils:
            for i in st:
                others = [q for q in st if q != i]
                li = np.prod([(t - r[q]) / (r[i] - r[q]) for q in others], axis=0)
                w[i] += np.dot(li, tw) / len(stencils)
    return w


def _first_derivative_matrix(r: np.ndarray) -> np.ndarray:
    n = r.size
    D = np.zeros((n, n))
    for k in range(1, n - 1):
        h1, h2 = r[k] - r[k - 1], r[k + 1] - r[k]
        D[k, k - 1] = -h2 / (h1 * (h1 + h2))
        D[k, k] = (h2 - h1) / (h1 * h2)
        D[k, k + 1] = h1 / (h2 * (h1 + h2))
    h1, h2 = r[1] - r[0], r[2] - r[1]
    D[0, :3] = [-(2 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))]
    h1, h2 = r[-1] - r[-2], r[-2] - r[-3]
    D[-1, -3:] = [h1 / (h2 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (2 * h1 + h2) / (h1 * (h1 + h2))]
    return D


def _second_derivative_matrix(r: np.ndarray) -> np.ndarray:
    n = r.size
    D = np.zeros((n, n))
    for k in range(1, n - 1):
        h1, h2 = r[k] - r[k - 1], r[k + 1] - r[k]
        D[k, k - 1 : k + 2] = [2 / (h1 * (h1 + h2)), -2 / (h1 * h2), 2 / (h2 * (h1 + h2))]
    D[0] = D[1]
    D[-1] = D[-2]
    return D


# -- fields -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: PolarGrid
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ParameterError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, ScalarField):
            _check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return ScalarField(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)

    def boundary(self) -> np.ndarray:
        """Values on the unit circle (one per angle)."""
        return self.values[-1].copy()

    def rotated(self, steps: int = 1) -> "ScalarField":
        return ScalarField(self.grid, np.roll(self.values, steps, axis=1))


@dataclass(frozen=True, eq=False)
class VectorField:
    grid: PolarGrid
    vx: np.ndarray
    vy: np.ndarray

    def __post_init__(self):
        for comp in (self.vx, self.vy):
            if np.shape(comp) != self.grid.shape:
                raise ParameterError("vector component shape does not match grid")

    def norm_sq(self) -> np.ndarray:
        return self.vx**2 + self.vy**2

    def __add__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self, other)
        return VectorField(self.grid, self.vx + other.vx, self.vy + other.vy)

    def __sub__(self, other: "VectorField") -> "VectorField":
        _check_same_grid(self, other)
        return VectorField(self.grid, self.vx - other.vx, self.vy - other.vy)

    def scaled(self, s) -> "VectorField":
        s = s.values if isinstance(s, ScalarField) else s
        return VectorField(self.grid, s * self.vx, s * self.vy)

    @classmethod
    def from_polar(cls, grid: PolarGrid, v_r, v_t) -> "VectorField":
        c, s = np.cos(grid.T), np.sin(grid.T)
        return cls(grid, c * v_r - s * v_t, s * v_r + c * v_t)


def _check_same_grid(a, b):
    if a.grid is not b.grid:
        raise ParameterError("fields live on different grids")


# -- sampling -----------------------------------------------------------------

_x, _y, _r, _t, _h = sp.symbols("x y r theta h", real=True)
_CATALOG_FUNCS = ("f", "a_alpha", "psi", "chi")
_LOCALS = {"x": _x, "y": _y, "r": _r, "theta": _t, "h": _h}
_LOCALS.update({name: sp.Function(name) for name in _CATALOG_FUNCS})

Expr = Union[str, Callable]


def sample(expr: Expr, grid: PolarGrid, name: str = "") -> ScalarField:
    """Evaluate an analytic descriptor at every node.

    ``expr`` is either a callable ``(x, y, r, theta) -> array`` or a string in
    x, y, r, theta with numpy-style functions (``cos``, ``log``, ``sqrt``, ...)
    and the catalog entries ``h``, ``f(alpha)``, ``a_alpha(alpha)``, ``psi(j)``
    and ``chi(j)``. Example: ``"r**0.5*cos(theta) + psi(3)"``.
    """
    X, Y, R, T = grid.X, grid.Y, grid.R, grid.T
    with np.errstate(all="ignore"):
        if callable(expr):
            vals = expr(X, Y, R, T)
            label = name or getattr(expr, "__name__", "callable")
        else:
            vals = _eval_string(expr, X, Y, R, T)
            label = name or expr
        vals = np.broadcast_to(np.asarray(vals, dtype=float), grid.shape).copy()
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise EvaluationError(
            f"{label!r} is not finite at node (i={i}, k={j}), r={grid.radii[i]:.6g}, "
            f"theta={grid.theta[j]:.6g}"
        )
    return ScalarField(grid, vals, label)


def _eval_string(expr: str, X, Y, R, T):
    parsed = parse_expr(expr, local_dict=_LOCALS)
    namespace = {
        "f": lambda a: profiles.f_power(float(a), R, T),
        "a_alpha": lambda a: profiles.a_power(float(a), R),
        "psi": lambda j: profiles.psi(int(j), R),
        "chi": lambda j: profiles.chi(int(j), R),
    }
    fn = sp.lambdify((_x, _y, _r, _t, _h), parsed, modules=[namespace, "numpy"])
    return fn(X, Y, R, T, profiles.h(R, T))


# -- calculus -----------------------------------------------------------------

def angular_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral d^order/dtheta^order along the last axis (Nyquist mode dropped
    for odd orders)."""
    n = values.shape[-1]
    m = np.arange(n // 2 + 1)
    factor = (1j * m) ** order
    if order % 2:
        factor[-1] = 0.0
    return np.fft.irfft(np.fft.rfft(values, axis=-1) * factor, n=n, axis=-1)


def gradient(f: ScalarField) -> VectorField:
    """Cartesian gradient: 3-point nonuniform differences in r, FFT in theta."""
    g = f.grid
    dr = g.d1 @ f.values
    dt = angular_derivative(f.values) / g.R
    return VectorField.from_polar(g, dr, dt)


def laplacian(f: ScalarField) -> ScalarField:
    """Discrete polar Laplacian (same stencils as the Dirichlet solver)."""
    g = f.grid
    v = f.values
    lap = g.d2 @ v + (g.d1 @ v) / g.R + angular_derivative(v, 2) / g.R**2
    return ScalarField(g, lap)


def integrate(f: Union[ScalarField, np.ndarray], grid: PolarGrid | None = None) -> float:
    if isinstance(f, ScalarField):
        grid, vals = f.grid, f.values
    else:
        vals = f
    return float(np.sum(vals * grid.quad_weights))


def jacobian(a: ScalarField | VectorField, b: ScalarField | VectorField) -> ScalarField:
    """J(a, b) = a_x b_y - a_y b_x. Accepts fields or precomputed gradients."""
    if a.grid is not b.grid:
        raise ParameterError("jacobian of fields on different grids")
    ga = a if isinstance(a, VectorField) else gradient(a)
    gb = b if isinstance(b, VectorField) else gradient(b)
    return ScalarField(a.grid, ga.vx * gb.vy - ga.vy * gb.vx)


# -- io -------------------------------------------------------------------------

def write_csv(fld: ScalarField | VectorField, path) -> None:
    g = fld.grid
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(fld, ScalarField):
            w.writerow(["r", "theta", "value"])
            cols = (fld.values,)
        else:
            w.writerow(["r", "theta", "vx", "vy"])
            cols = (fld.vx, fld.vy)
        for i in range(g.n_r):
            for k in range(g.n_theta):
                w.writerow([repr(g.radii[i]), repr(g.theta[k])] + [repr(float(c[i, k])) for c in cols])
