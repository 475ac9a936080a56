"""Artificial-noise secrecy-rate optimization for MIMO backscatter links."""

from .errors import ConfigError, ContractError, NumericalError, UnsupportedConfigError
from .model import (
    Rates,
    Solution,
    SystemChannels,
    SystemParams,
    dbm_to_watt,
    rates,
    secrecy_rate,
    watt_to_dbm,
)
from .montecarlo import GeometryParams, SweepResult, SweepSpec, generate_channels, run_sweep
from .nullspace import NullspaceBasis, NullspaceKind, nullspace_basis, solve_srm_nullspace
from .projection import project_feasible, waterfill_level
from .schemes import Scheme, SchemeResult, run_scheme, solve_general
from .single_tag import SingleTagInstance, solve_single, solve_single_nullspace
from .solver import (
    SolverConfig,
    SolverReport,
    SurrogateContext,
    Termination,
    armijo_step,
    build_context,
    solve_inner,
    solve_srm,
    surrogate_gradient,
    surrogate_value,
)

__version__ = "0.1.0"
