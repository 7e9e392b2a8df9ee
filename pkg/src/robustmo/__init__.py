"""Quasi-Newton solver for uncertain multiobjective optimization problems
with finite scenario sets, plus the benchmark problems and brute-force
certifiers used to validate it."""

from .bench import CampaignResult, run_campaign, start_point
from .cones import PolyhedralCone, orthant
from .direction import (DirectionSolution, SimplexWeights, Step2Result,
                        SubproblemInstance, solve_fixed_beta, solve_step2,
                        stationarity_value)
from .errors import (CapacityError, ConeDefinitionError, EvaluationError,
                     NonconvergenceError, RobustmoError, SubproblemError)
from .hessians import (HessianStore, bfgs_update, finite_difference_hessian,
                       floor_to_positive_definite, init_store, update_all)
from .oracle import (CertificationReport, GridSpec,
                     certify_robust_weak_efficiency, minmax_grid_value)
from .problems import (ScenarioGrid, UncertainProblem,
                       finite_difference_jacobian, gradient_check,
                       load_problem_file, registry_get, registry_names,
                       uniform_scenarios)
from .setops import (PartitionSet, RegularityReport, ScenarioImage,
                     check_regularity, max_elements, partition_set,
                     weak_max_elements)
from .solver import (STATUS_ERROR, STATUS_MAX_ITERS, STATUS_STATIONARY,
                     STATUS_STEP_FLOOR, IterationRecord, SolveConfig,
                     SolveTrace, armijo_step, model_decrements, solve)
from .stats import StatsTuple, compute_stats

__all__ = [
    "CampaignResult", "CapacityError", "CertificationReport",
    "ConeDefinitionError", "DirectionSolution", "EvaluationError", "GridSpec",
    "HessianStore", "IterationRecord", "NonconvergenceError", "PartitionSet",
    "PolyhedralCone", "RegularityReport", "RobustmoError", "ScenarioGrid",
    "ScenarioImage", "SimplexWeights", "SolveConfig", "SolveTrace",
    "STATUS_ERROR", "STATUS_MAX_ITERS", "STATUS_STATIONARY",
    "STATUS_STEP_FLOOR", "Step2Result", "StatsTuple", "SubproblemError",
    "SubproblemInstance", "UncertainProblem", "armijo_step", "bfgs_update",
    "certify_robust_weak_efficiency", "check_regularity", "compute_stats",
    "finite_difference_hessian", "finite_difference_jacobian",
    "floor_to_positive_definite", "gradient_check", "init_store",
    "load_problem_file", "max_elements", "minmax_grid_value",
    "model_decrements", "orthant", "partition_set", "registry_get",
    "registry_names", "run_campaign", "solve", "solve_fixed_beta",
    "solve_step2", "start_point", "stationarity_value", "uniform_scenarios",
    "update_all", "weak_max_elements",
]

__version__ = "0.1.0"
