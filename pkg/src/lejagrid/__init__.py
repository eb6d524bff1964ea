"""Weighted Leja sequences and dimension-adaptive sparse grids."""

from .orthopoly import (WeightSpec, Recurrence, recurrence_coefficients, eval_orthonormal,
                        gauss_rule, stieltjes_discretized, jacobi, uniform, hermite, gaussian,
                        laguerre, tabulated)
from .leja1d import (LejaSequence, LejaRule, ClenshawCurtisRule, build_sequence,
                     next_leja_point, quadrature_weights, condition_number, interpolate)
from .equilibrium import EquilibriumLaw, law_for, kolmogorov_distance, fekete_determinant_ratio
from .sparsegrid import SparseGrid, isotropic_index_set, build_isotropic
from .adaptive import AdaptiveConfig, run_adaptive
from .models import Model, get_model
from .metrics import mc_rmse, one_d_metrics, moment_errors

__version__ = "0.1.0"
