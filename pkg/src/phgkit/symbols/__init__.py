from .backend import BACKEND, evaluate, evaluate_compiled, evaluate_python
from .checks import (Certificate, DEFAULT_S_SAMPLES, HomogeneousPart,
                     NonHomogeneousError, ResidualPart, decompose_hs,
                     homogeneous_check, hs_check, schwartz_check,
                     symbol_estimate)
from .cutoffs import CutoffFamily, radial_step, t_cutoffs
from .engine import MultiIndex, Symbol, enumerate_multi_indices, fd_derivative
from .expr import (DomainError, Signature, UnsupportedDerivativeError, ZERO,
                   ONE, add, const, differentiate, exp_, glue, guarded, mul,
                   neg, one_minus_step, pow_i, abs_pow, real_pow, step, sub,
                   substitute, t_switch, var, variables)
from .grids import EvaluationGrid
from .quasinorms import (even_power_polynomial, one_plus_qn, quasi_norm_expr,
                         quasi_norm_power)
