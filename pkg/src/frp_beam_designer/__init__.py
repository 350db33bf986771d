"""FRP Beam Designer - least-cost flexural design of FRP-reinforced concrete beams."""

from frp_beam_designer.aci440_checks import CheckReport, check_all
from frp_beam_designer.beam_model import (
    BarCatalog,
    BarSpec,
    DesignProblem,
    InvalidInputError,
    NegativeSpacingError,
    NonPositiveEffectiveDepthError,
    Section,
    SectionGeometryError,
    default_problem,
    load_catalog,
)
from frp_beam_designer.config import ConfigError, RunConfig, read_config, write_config
from frp_beam_designer.constraint_handling import PenaltySchedule, SwarmInitializationError
from frp_beam_designer.cost_model import CostBreakdown, cost
from frp_beam_designer.optimizers import (
    DesignResult,
    OptimizerSpec,
    deterministic_reinforcement,
    optimize1,
    optimize2,
)
from frp_beam_designer.oracle import GridSpec, NoFeasiblePointError, grid_search, verify_result
from frp_beam_designer.pso_core import SwarmConfig

__all__ = [
    "BarCatalog",
    "BarSpec",
    "CheckReport",
    "ConfigError",
    "CostBreakdown",
    "DesignProblem",
    "DesignResult",
    "GridSpec",
    "InvalidInputError",
    "NegativeSpacingError",
    "NoFeasiblePointError",
    "NonPositiveEffectiveDepthError",
    "OptimizerSpec",
    "PenaltySchedule",
    "RunConfig",
    "Section",
    "SectionGeometryError",
    "SwarmConfig",
    "SwarmInitializationError",
    "check_all",
    "cost",
    "default_problem",
    "deterministic_reinforcement",
    "grid_search",
    "load_catalog",
    "optimize1",
    "optimize2",
    "read_config",
    "verify_result",
    "write_config",
]
