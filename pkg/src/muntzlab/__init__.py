"""Numerical laboratory for operators on Müntz spaces of lacunary type."""
from ._accel import BACKEND, HAVE_NUMBA
from .errors import *  # noqa: F401,F403
from .exponents import (BlockPartition, ExponentSequence, check_subgeometric, delta_lemma_check,
                        lacunary_partition, lacunary_sum_ratio, make_geometric,
                        validate_quasi_lacunary, with_subgeometric)
from .measures import (Measure, atom, check_A_condition, check_B_condition, check_Mx_gamma,
                       distribution, jacobi, lebesgue, lp_norm, mixture, moment, zero_measure)
from .muntz_poly import (BlockPolynomial, MuntzPolynomial, block_decompose, evaluate,
                         pointwise_bound_constant, sup_argmax, sup_norm)
from .operators import (DilationOperator, KernelOperator, apply, diagonal, identity,
                        make_counterexample_subcritical, make_counterexample_supercritical,
                        make_dilation_example, make_example_supercritical, zero_operator)
from .typeconst import (InterpolationConfig, TypeConstantReport, bernstein_constant,
                        decoupling_ratio, epsilon_profile, interpolation_theta,
                        restricted_strong_constant, restricted_weak_constant,
                        strong_constant_lower_bound)
from .verify import (ExperimentReport, run_counterexample_growth, run_embedding_corollaries,
                     run_necessity_check, run_remark_strong_limit, run_theorem_A_check,
                     run_theorem_B_check)

__version__ = "0.1.0"
