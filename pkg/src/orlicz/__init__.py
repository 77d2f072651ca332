"""Numerical toolkit for Orlicz function spaces on [0, 1].

Catalog Orlicz functions and grid-based condition checks, constructive
equivalents and perturbations, Luxemburg / Amemiya norms for step
functions, the modular surface with implicit norm-curve derivatives,
support detectors driven by the curvature of the norm curve, and a
verification harness for weighted composition isometries.
"""

from . import _kernels
from .constructions import (ComplementaryFunction, build_delta2plus_equivalent,
                            build_delta2plus_violator, complementary,
                            invert_derivative, verify_equivalence)
from .core import (ConditionReport, ExpTypeFunction, GridSpec, OrliczFunction,
                   PowerFunction, PowerLogFunction, check_axioms, check_delta2,
                   check_delta2plus, classify_second_derivative_at_zero,
                   evaluate, exp_type, load_orlicz, orlicz_from_json, power,
                   power_log, save_orlicz)
from .detector import (LimitClass, Verdict, classify_limit,
                       test_disjointness_zero_case,
                       test_support_deficiency_infinite_case,
                       test_support_equality)
from .differential import (FDCheck, FPartials, F_partials, F_value,
                           NormCurveSample, crossing_alphas,
                           finite_difference_check, norm_curve,
                           sweep_norm_curve, write_curve_csv)
from .experiment import ExperimentResult, run_experiment
from .function_space import (amemiya_dual_norm, luxemburg_norm, modular,
                             normalize, norming_functional)
from .harness import (HalfMixingOperator, IsometryReport, RecoveryResult,
                      ShiftByMeanOperator, WeightedComposition,
                      apply_operator, check_disjointness_preservation,
                      check_isometry, operator_from_json,
                      random_unimodular_composition,
                      recover_weighted_composition, source_is_power_like)
from .piecewise import PiecewiseOrlicz
from .stepfun import (StepFunction, SupportRelation, pairing, refine_pair,
                      support_relation)

__version__ = "0.1.0"

backend_name = _kernels.backend_name
set_backend = _kernels.set_backend
