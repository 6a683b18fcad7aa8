"""Exact and exhaustive reference computations."""

from .grid import CostMatrix, OracleReport, oracle_dac, static_grid_bounds
from .leading_ones_exact import (
    chain_cost,
    full_state_cost,
    random_level_policy,
    simulate_runtime,
)
from .value_iteration import (
    TabularInstanceMdp,
    ValueIterationResult,
    value_iteration,
    value_iteration_optimal,
)
