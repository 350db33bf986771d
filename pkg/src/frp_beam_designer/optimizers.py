"""The two swarm optimizers for least-cost section design.

``optimize1`` searches width and height only; the bars at each (b, h) come from
``deterministic_reinforcement`` and particles never memorize an infeasible design.
``optimize2`` searches width, height, bar count and bar size together and handles the
constraints with a time-scheduled penalty.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

from .aci440_checks import CheckReport, check_all
from .beam_model import BarSpec, DesignProblem, InvalidInputError, Section, max_bars
from .constraint_handling import Penalization, PenaltySchedule, PreservingFeasibility
from .cost_model import CostBreakdown, design_cost
from .pso_core import Dimension, Evaluation, InertiaSchedule, SearchSpace, SwarmConfig, run

if TYPE_CHECKING:
    from .pso_core import SwarmOutcome

logger = logging.getLogger(__name__)

VARIANTS = ("optimizer1", "optimizer2")


def default_swarm_config(variant: str, **overrides) -> SwarmConfig:
    """Swarm settings of each optimizer: sigmoid inertia for the first, constant 0.8 for the second."""
    if variant not in VARIANTS:
        raise InvalidInputError(f"Unknown optimizer {variant!r}; expected one of {VARIANTS}")
    inertia = InertiaSchedule.sigmoid() if variant == "optimizer1" else InertiaSchedule.constant(0.8)
    return SwarmConfig(**{"inertia": inertia, **overrides})


@dataclass(frozen=True)
class OptimizerSpec:
    """Everything needed to launch one optimizer run apart from the seed."""

    variant: str
    problem: DesignProblem
    swarm: SwarmConfig | None = None
    penalty: PenaltySchedule = field(default_factory=PenaltySchedule)
    penalty_form: str = "squared"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"Unknown optimizer {self.variant!r}; expected one of {VARIANTS}")

    @property
    def swarm_config(self) -> SwarmConfig:
        return self.swarm or default_swarm_config(self.variant)

    def run(self, seed: int | None = None) -> DesignResult:
        if self.variant == "optimizer1":
            return optimize1(self.problem, self.swarm_config, seed)
        return optimize2(self.problem, self.swarm_config, self.penalty, seed, form=self.penalty_form)


@dataclass(frozen=True)
class DesignResult:
    """Outcome of one optimizer run.

    Attributes:
        section: Returned design
        cost: Its cost breakdown
        report: Its full check report
        feasible: Whether every constraint holds at the returned design
        steps_used: Swarm steps flown before ``t_max`` or stagnation
        seed: Seed of the run
        wall_time: Seconds spent
        evaluations: Conflict-function calls (both sub-swarms)
        checks: ``check_all`` calls, including those of the reinforcement scan
        variant: "optimizer1" or "optimizer2"
        trace: Per-step particle positions, when recorded
    """

    section: Section
    cost: CostBreakdown
    report: CheckReport
    feasible: bool
    steps_used: int
    seed: int
    wall_time: float
    evaluations: int
    checks: int
    variant: str
    trace: list[tuple] | None = field(default=None, repr=False, compare=False)
    maximizer_history: list[float] | None = field(default=None, repr=False, compare=False)

    @property
    def total(self) -> float:
        return self.cost.total

    def row(self) -> dict[str, object]:
        """Flat record in the shape of the published result tables."""
        return {
            "variant": self.variant,
            "seed": self.seed,
            "b": self.section.b,
            "h": self.section.h,
            "bars": self.section.label(),
            **self.cost.as_row(),
            "feasible": self.feasible,
            "steps_used": self.steps_used,
            "evaluations": self.evaluations,
            "checks": self.checks,
            "wall_time": self.wall_time,
        }


class _CheckCounter:
    """check_all wrapper that counts its calls."""

    def __init__(self, problem: DesignProblem):
        self.problem = problem
        self.calls = 0

    def __call__(self, section: Section) -> CheckReport:
        self.calls += 1
        return check_all(self.problem, section)

    def feasible(self, section: Section) -> bool:
        return self(section).is_feasible()


def _scan_reinforcement(
    problem: DesignProblem,
    b: float,
    h: float,
    checker: _CheckCounter,
) -> tuple[int, BarSpec] | None:
    limits = problem.limits
    for bar in problem.catalog:
        n_max = max_bars(bar, b, limits)
        if n_max < 2:
            # wider bars fit even fewer
            break
        if not checker.feasible(Section(b, h, n_max, bar)):
            continue
        lo, hi = 2, n_max
        while lo < hi:
            mid = (lo + hi) // 2
            if checker.feasible(Section(b, h, mid, bar)):
                hi = mid
            else:
                lo = mid + 1
        return lo, bar
    return None


def deterministic_reinforcement(problem: DesignProblem, b: float, h: float) -> tuple[int, BarSpec] | None:
    """
    The reinforcement a designer would pick at fixed (b, h): smallest bar size first, then
    the fewest bars of that size that pass every check.

    Bar sizes are tried in catalog order. For each size, feasibility is monotone in the
    bar count at fixed (b, h), so the largest count that fits the width is tried first and
    the smallest passing count is then located by bisection.

    Args:
        problem: Design problem
        b: Width [m]
        h: Height [m]

    Returns:
        Tuple of (n, bar), or None when no size and count passes

    Example:
        >>> n, bar = deterministic_reinforcement(default_problem("A"), 0.2124, 0.5346)
        >>> n, bar.designation
        (3, '#6')
    """
    return _scan_reinforcement(problem, b, h, _CheckCounter(problem))


def _unreinforced_cost(problem: DesignProblem, b: float, h: float) -> float:
    rates = problem.cost_rates
    return rates.c1 * b * h + rates.c2 * (b + 2.0 * h)


def _seeded(config: SwarmConfig, seed: int | None) -> SwarmConfig:
    return config if seed is None else replace(config, rng_seed=seed)


def _log_finish(variant: str, result: DesignResult) -> None:
    logger.info(
        "%s seed %d: %s at b=%.4f h=%.4f, total %.4f after %d steps (%.1f s)",
        variant,
        result.seed,
        result.section.label(),
        result.section.b,
        result.section.h,
        result.total,
        result.steps_used,
        result.wall_time,
    )


def width_height_space(problem: DesignProblem) -> SearchSpace:
    limits = problem.limits
    return SearchSpace(
        (
            Dimension(limits.b_min, limits.b_max, "continuous", "b"),
            Dimension(limits.h_min, limits.h_max, "continuous", "h"),
        )
    )


def full_space(problem: DesignProblem) -> SearchSpace:
    """(b, h, n, bar index); n runs from 2 to the most bars of the smallest size that fit ``b_max``."""
    limits = problem.limits
    n_cap = max_bars(problem.catalog.smallest, limits.b_max, limits)
    if n_cap < 2:
        raise InvalidInputError(
            f"Two {problem.catalog.smallest.designation} bars do not fit the maximum width {limits.b_max} m"
        )
    # integer dimensions need lower < upper; out-of-range decodes are clamped when evaluated
    return SearchSpace(
        (
            Dimension(limits.b_min, limits.b_max, "continuous", "b"),
            Dimension(limits.h_min, limits.h_max, "continuous", "h"),
            Dimension(2, max(n_cap, 3), "integer", "n"),
            Dimension(0, max(len(problem.catalog) - 1, 1), "integer", "bar"),
        )
    )


def optimize1(
    problem: DesignProblem,
    config: SwarmConfig | None = None,
    seed: int | None = None,
) -> DesignResult:
    """
    Optimizer with feasibility preservation over (b, h) and deterministic reinforcement.

    Args:
        problem: Design problem
        config: Swarm settings (defaults to 35 particles, 10000 steps, sigmoid inertia)
        seed: Overrides ``config.rng_seed``

    Returns:
        DesignResult whose section passes every check

    Raises:
        SwarmInitializationError: If no feasible start is found within the retry budget
    """
    config = _seeded(config or default_swarm_config("optimizer1"), seed)
    checker = _CheckCounter(problem)
    space = width_height_space(problem)

    def conflict(position: tuple[float, ...]) -> Evaluation:
        b, h = position
        pair = _scan_reinforcement(problem, b, h, checker)
        if pair is None:
            return Evaluation(_unreinforced_cost(problem, b, h), (1.0,))
        n, bar = pair
        return Evaluation(design_cost(problem, Section(b, h, n, bar)).total, (0.0,))

    logger.info("optimizer1 seed %d: %d particles, t_max %d", config.rng_seed, config.swarm_size, config.t_max)
    started = time.perf_counter()
    outcome = run(config, space, conflict, PreservingFeasibility())
    elapsed = time.perf_counter() - started

    b, h = outcome.best_position
    n, bar = _scan_reinforcement(problem, b, h, checker)
    result = _build_result(problem, Section(b, h, n, bar), outcome, config, checker, elapsed, "optimizer1")
    _log_finish("optimizer1", result)
    return result


def optimize2(
    problem: DesignProblem,
    config: SwarmConfig | None = None,
    penalty: PenaltySchedule | None = None,
    seed: int | None = None,
    form: str = "squared",
) -> DesignResult:
    """
    Optimizer with penalization over (b, h, n, bar size).

    The returned design is the cheapest feasible position seen during the run; when
    none was seen it is the best penalized position, flagged infeasible.

    Args:
        problem: Design problem
        config: Swarm settings (defaults to 35 particles, 10000 steps, constant inertia 0.8)
        penalty: Penalty coefficient schedule (defaults to linear 1e5 to 1e10)
        seed: Overrides ``config.rng_seed``
        form: "squared" or "sum" of the normalized violations

    Returns:
        DesignResult, possibly infeasible
    """
    config = _seeded(config or default_swarm_config("optimizer2"), seed)
    penalty = penalty or PenaltySchedule.linear()
    checker = _CheckCounter(problem)
    space = full_space(problem)
    catalog = problem.catalog

    def section_at(position: tuple) -> Section:
        b, h, n, index = position
        return Section(b, h, int(n), catalog[min(int(index), len(catalog) - 1)])

    def conflict(position: tuple) -> Evaluation:
        section = section_at(position)
        report = checker(section)
        return Evaluation(design_cost(problem, section).total, report.violation_vector)

    logger.info(
        "optimizer2 seed %d: %d particles, t_max %d, penalty %s",
        config.rng_seed,
        config.swarm_size,
        config.t_max,
        penalty.describe(),
    )
    started = time.perf_counter()
    outcome = run(config, space, conflict, Penalization(penalty, form))
    elapsed = time.perf_counter() - started

    if outcome.best_feasible is not None:
        position = outcome.best_feasible[0]
    else:
        position = outcome.best_position
        logger.warning(
            "optimizer2 seed %d found no feasible design; returning the best penalized point",
            config.rng_seed,
        )
    result = _build_result(problem, section_at(position), outcome, config, checker, elapsed, "optimizer2")
    _log_finish("optimizer2", result)
    return result


def _build_result(
    problem: DesignProblem,
    section: Section,
    outcome: SwarmOutcome,
    config: SwarmConfig,
    checker: _CheckCounter,
    elapsed: float,
    variant: str,
) -> DesignResult:
    report = checker(section)
    return DesignResult(
        section=section,
        cost=design_cost(problem, section),
        report=report,
        feasible=report.is_feasible(),
        steps_used=outcome.steps_used,
        seed=config.rng_seed,
        wall_time=elapsed,
        evaluations=outcome.evaluations,
        checks=checker.calls,
        variant=variant,
        trace=outcome.trace,
        maximizer_history=outcome.maximizer_history,
    )
