"""Numerical laboratory for weighted Wente inequalities on the unit disk."""

from .errors import DegenerateInputError, EvaluationError, ParameterError, SolverError
from .grid import (PolarGrid, ScalarField, VectorField, gradient, integrate, jacobian, laplacian,
                   make_grid, sample)
from .norms import (CRIT, DGR, ONE, POW, CRITBETA, RatioReport, Weight, lorentz, lorentz_weak,
                    ratio_report, weighted_energy, weighted_sup)
from .poisson import harmonic_correction, newton_potential, solve_dirichlet, solve_via_potential

__version__ = "0.1.0"
