"""Mirror-descent and mirror-prox solvers for variational inequalities and saddle problems."""
from .errors import (CapabilityError, ConfigError, ConstantsMisdeclaredError, DivergenceError,
                     NumericalError, PlanningError, RejectedInputError, UncertifiedError,
                     ViproxError)
from .sets import (Ball, Box, FeasibleSet, FullSpace, NonnegBall, Orthant, Product, Simplex,
                   make_set, project_simplex)
from .prox import (ProxSetup, argmin_d, bregman, entropy, euclidean, make_setup, mirror_step,
                   scaled_prox)
from .problems import (GapCertificate, SaddleProblem, VIOperator, affine_vi, audit_monotone,
                       audit_relative_bounded, audit_saddle_constants, bilinear_saddle,
                       constant_vi, quadratic_saddle, saddle_gap, saddle_to_vi,
                       separable_saddle, skew_vi, vi_gap)
from .report import SolveReport, write_trace_csv
from .mirror_descent import MDConfig, md_solve
from .mirror_prox import (RestartConfig, UMPConfig, restart_count, restart_radius_sq,
                          restarted_ump, ump_solve)
from .saddle import (HolderProfile, TolerancePlan, fgm_solve, holder_profile, model_audit,
                     model_L, outer_budget, tolerance_plan)
from .covering import (BenchRow, CoveringInstance, gen_case, lagrangian, lagrangian_operator,
                       run_bench)

__version__ = "0.1.0"
