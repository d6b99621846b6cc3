"""Reinforced jump processes restricted to vertex subsets: simulators for
the processes and their mixing beta field, Schur-complement effective
weights, the subdivision renormalization flow, and the statistical batteries
that check the equivalences between all of these routes.
"""

from ._kernels import backend_name
from .betafield import NuSample, conditional_sample, nu_density, sample_beta, \
    sample_beta_batch
from .flow import BoundReport, FlowState, flow_step, moment_bound, \
    recurrence_threshold, run_flow, verify_bounds
from .graphs import Graph, SubdividedGraph, build_subdivision
from .invgauss import IGParams, c_alpha, exp_integral_e1, frac_moment, \
    ig_density, ig_laplace, ig_sample, log_moment
from .jumps import JumpPath, MJPParams, conductances, drop_loop_params, \
    exact_path_law, remove_self_loops, restrict_path, restricted_params, \
    restricted_prefix_law, simulate_mjp
from .linalg import drop_diagonal, effective_weights, h_matrix, \
    is_positive_definite, u_field, wire_weights
from .processes import decorate_self_loops, errw_as_mixture, simulate_errw, \
    simulate_vrjp_direct, simulate_vrjp_mixture, time_change

__version__ = "0.1.0"

__all__ = [
    "Graph", "SubdividedGraph", "build_subdivision",
    "h_matrix", "is_positive_definite", "effective_weights", "drop_diagonal",
    "wire_weights", "u_field",
    "IGParams", "ig_density", "ig_sample", "ig_laplace", "frac_moment",
    "log_moment", "exp_integral_e1", "c_alpha",
    "NuSample", "nu_density", "sample_beta", "sample_beta_batch",
    "conditional_sample",
    "JumpPath", "MJPParams", "conductances", "simulate_mjp",
    "remove_self_loops", "restrict_path", "restricted_params",
    "drop_loop_params", "exact_path_law", "restricted_prefix_law",
    "simulate_vrjp_direct", "simulate_vrjp_mixture", "time_change",
    "decorate_self_loops", "simulate_errw", "errw_as_mixture",
    "FlowState", "flow_step", "run_flow", "BoundReport", "moment_bound",
    "verify_bounds", "recurrence_threshold",
    "backend_name", "__version__",
]
