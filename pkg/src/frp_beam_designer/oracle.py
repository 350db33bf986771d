"""Brute-force reference optimum: exhaustive (b, h) grid with deterministic reinforcement."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from tqdm import tqdm

from .aci440_checks import check_all
from .beam_model import InvalidInputError, Section, min_width
from .cost_model import CostBreakdown, design_cost
from .optimizers import deterministic_reinforcement

if TYPE_CHECKING:
    from .beam_model import BarSpec, DesignProblem
    from .optimizers import DesignResult

logger = logging.getLogger(__name__)

HEATMAP_COLUMNS = ("b", "h", "feasible", "cost")
REFINE_ITERATIONS = 40


class NoFeasiblePointError(RuntimeError):
    """Raised when no grid point admits a feasible reinforcement."""

    def __init__(self, message: str, evaluated: int = 0):
        super().__init__(message)
        self.evaluated = evaluated


@dataclass(frozen=True)
class GridSpec:
    """Grid over (b, h); bounds default to the problem's limits.

    Attributes:
        b_step: Width spacing [m]
        h_step: Height spacing [m]
        include_width_breakpoints: Add every ``min_width(n, bar)`` inside the width range
            to the b-axis, so bar layouts that fill the width exactly are visited
        refine: Bisect the winner's height down towards the previous grid line. The
            refined height lies off the declared grid, so compare grids of different
            spacing with ``refine=False``
        b_min, b_max, h_min, h_max: Optional bound overrides [m]
    """

    b_step: float = 0.001
    h_step: float = 0.001
    include_width_breakpoints: bool = True
    refine: bool = True
    b_min: float | None = None
    b_max: float | None = None
    h_min: float | None = None
    h_max: float | None = None

    def __post_init__(self):
        if not (self.b_step > 0 and self.h_step > 0):
            raise InvalidInputError(f"Grid steps must be positive: {self.b_step}, {self.h_step}")


@dataclass
class OracleResult:
    section: Section
    cost: CostBreakdown
    feasible_count: int
    evaluated_count: int
    grid_points: int
    heatmap: list[tuple[float, float, bool, float]] | None = field(default=None, repr=False)

    @property
    def total(self) -> float:
        return self.cost.total


def _axis(lower: float, upper: float, step: float) -> np.ndarray:
    count = math.floor((upper - lower) / step + 1e-9) + 1
    return np.round(lower + step * np.arange(count), 9)


def grid_axes(problem: DesignProblem, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """The b and h values visited by ``grid_search``, ascending and de-duplicated."""
    limits = problem.limits
    b_lo = grid.b_min if grid.b_min is not None else limits.b_min
    b_hi = grid.b_max if grid.b_max is not None else limits.b_max
    h_lo = grid.h_min if grid.h_min is not None else limits.h_min
    h_hi = grid.h_max if grid.h_max is not None else limits.h_max
    if b_lo > b_hi or h_lo > h_hi:
        raise InvalidInputError(f"Empty grid: b in [{b_lo}, {b_hi}], h in [{h_lo}, {h_hi}]")

    b_values = _axis(b_lo, b_hi, grid.b_step)
    if grid.include_width_breakpoints:
        breakpoints = []
        for bar in problem.catalog:
            n = 2
            while (width := min_width(n, bar, limits)) <= b_hi:
                if width >= b_lo:
                    breakpoints.append(width)
                n += 1
        b_values = np.union1d(b_values, np.array(breakpoints, dtype=float))
    return np.unique(b_values), _axis(h_lo, h_hi, grid.h_step)


def _lower_bound(problem: DesignProblem, b: float, h: float, cheapest_bars: float) -> float:
    rates = problem.cost_rates
    return rates.c1 * b * h + rates.c2 * (b + 2.0 * h) + cheapest_bars


def _design_at(problem: DesignProblem, b: float, h: float) -> tuple[Section, CostBreakdown] | None:
    pair = deterministic_reinforcement(problem, b, h)
    if pair is None:
        return None
    section = Section(b, h, pair[0], pair[1])
    return section, design_cost(problem, section)


def _refine_height(
    problem: DesignProblem,
    section: Section,
    breakdown: CostBreakdown,
    h_floor: float,
) -> tuple[Section, CostBreakdown, int]:
    """Bisect h in ``[h_floor, section.h]`` for the lowest height that is still no dearer."""
    lo, hi = h_floor, section.h
    best = (section, breakdown)
    evaluated = 0
    for _ in range(REFINE_ITERATIONS):
        if hi - lo <= 1e-9:
            break
        mid = 0.5 * (lo + hi)
        candidate = _design_at(problem, section.b, mid)
        evaluated += 1
        if candidate is not None and candidate[1].total <= best[1].total:
            best = candidate
            hi = mid
        else:
            lo = mid
    return best[0], best[1], evaluated


def grid_search(
    problem: DesignProblem,
    grid: GridSpec | None = None,
    heatmap: bool = False,
    progress: bool = False,
) -> OracleResult:
    """
    Cheapest feasible design over a (b, h) grid.

    Every visited point gets its deterministic reinforcement and cost. Points whose cost
    cannot beat the incumbent even with the two cheapest bars are skipped (the bound
    grows with h, so the rest of the column is skipped too) unless a heatmap is wanted.
    Ties go to the smaller b, then the smaller h.

    Args:
        problem: Design problem
        grid: Grid spacing and bounds (defaults to 1 mm x 1 mm over the limits)
        heatmap: Keep (b, h, feasible, cost) for every grid point
        progress: Show a tqdm bar over the b-axis

    Returns:
        OracleResult with the winning section and cost

    Raises:
        NoFeasiblePointError: If no grid point is feasible
    """
    grid = grid or GridSpec()
    b_values, h_values = grid_axes(problem, grid)
    cheapest_bars = 2.0 * min(bar.c3 for bar in problem.catalog)

    best: tuple[Section, CostBreakdown] | None = None
    best_h_index = 0
    evaluated = feasible = 0
    rows: list[tuple[float, float, bool, float]] | None = [] if heatmap else None

    for b in tqdm(b_values, desc="Grid search", unit="width", disable=not progress):
        b = float(b)
        for h_index, h in enumerate(h_values):
            h = float(h)
            if (
                rows is None
                and best is not None
                and _lower_bound(problem, b, h, cheapest_bars) >= best[1].total
            ):
                break
            candidate = _design_at(problem, b, h)
            evaluated += 1
            if candidate is None:
                if rows is not None:
                    rows.append((b, h, False, math.nan))
                continue
            feasible += 1
            if rows is not None:
                rows.append((b, h, True, candidate[1].total))
            if best is None or candidate[1].total < best[1].total:
                best = candidate
                best_h_index = h_index

    grid_points = len(b_values) * len(h_values)
    if best is None:
        raise NoFeasiblePointError(
            f"None of {evaluated} grid points admits a feasible reinforcement", evaluated=evaluated
        )

    section, breakdown = best
    if grid.refine and best_h_index > 0:
        section, breakdown, extra = _refine_height(
            problem, section, breakdown, float(h_values[best_h_index - 1])
        )
        evaluated += extra

    logger.info(
        "Grid search: %s at b=%.5f h=%.5f, total %.4f (%d of %d points evaluated, %d feasible)",
        section.label(),
        section.b,
        section.h,
        breakdown.total,
        evaluated,
        grid_points,
        feasible,
    )
    return OracleResult(
        section=section,
        cost=breakdown,
        feasible_count=feasible,
        evaluated_count=evaluated,
        grid_points=grid_points,
        heatmap=rows,
    )


def enumerate_reinforcement(
    problem: DesignProblem,
    b: float,
    h: float,
) -> list[tuple[int, BarSpec, CostBreakdown]]:
    """Every feasible (n, bar) at a fixed section, cheapest first."""
    options = []
    for bar in problem.catalog:
        n = 2
        while min_width(n, bar, problem.limits) <= b:
            section = Section(b, h, n, bar)
            if check_all(problem, section).is_feasible():
                options.append((n, bar, design_cost(problem, section)))
            n += 1
    return sorted(options, key=lambda option: option[2].total)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    feasible: bool
    flag_consistent: bool
    near_optimal: bool
    local_best: float
    diagnostics: tuple[str, ...] = ()


def verify_result(
    problem: DesignProblem,
    result: DesignResult,
    tolerance: float = 1e-3,
    step: float = 0.002,
) -> Verdict:
    """
    Independent check of an optimizer result.

    Re-runs every check on the returned section, compares against the result's own
    feasibility flag, and compares its cost with the cheapest deterministic design on a
    3 x 3 grid of spacing ``step`` around (b, h).

    Args:
        problem: Design problem the result was obtained for
        result: Optimizer outcome
        tolerance: Relative cost margin allowed over the local best
        step: Spacing of the local grid [m]

    Returns:
        Verdict with diagnostics for every failed aspect
    """
    section = result.section
    report = check_all(problem, section)
    feasible = report.is_feasible()
    diagnostics = []
    if not feasible:
        diagnostics.append(f"Section violates: {', '.join(report.failed())}")
    flag_consistent = feasible == result.feasible
    if not flag_consistent:
        diagnostics.append(f"Result is flagged feasible={result.feasible} but checks say {feasible}")

    limits = problem.limits
    local_best = math.inf
    for db in (-step, 0.0, step):
        for dh in (-step, 0.0, step):
            b, h = section.b + db, section.h + dh
            if not (limits.b_min <= b <= limits.b_max and limits.h_min <= h <= limits.h_max):
                continue
            candidate = _design_at(problem, b, h)
            if candidate is not None:
                local_best = min(local_best, candidate[1].total)

    total = design_cost(problem, section).total
    near_optimal = math.isfinite(local_best) and total <= local_best * (1.0 + tolerance)
    if not near_optimal:
        diagnostics.append(f"Total {total:.4f} exceeds local best {local_best:.4f} by more than {tolerance:.2%}")

    return Verdict(
        passed=feasible and flag_consistent and near_optimal,
        feasible=feasible,
        flag_consistent=flag_consistent,
        near_optimal=near_optimal,
        local_best=local_best,
        diagnostics=tuple(diagnostics),
    )


def write_heatmap_csv(rows: list[tuple[float, float, bool, float]], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows, columns=list(HEATMAP_COLUMNS)).to_csv(path, index=False)
    return path
