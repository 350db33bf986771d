"""Member cost: concrete volume, shuttering perimeter and bars."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .beam_model import DesignProblem, Section


@dataclass(frozen=True)
class CostBreakdown:
    concrete: float
    shuttering: float
    reinforcement: float

    @property
    def total(self) -> float:
        return self.concrete + self.shuttering + self.reinforcement

    def as_row(self) -> dict[str, float]:
        return {
            "concrete": self.concrete,
            "shuttering": self.shuttering,
            "reinforcement": self.reinforcement,
            "total": self.total,
        }


def cost(section: Section, c1: float, c2: float) -> CostBreakdown:
    """
    Cost of a section: ``c1·b·h + c2·(b + 2h) + c3·n``.

    The bar price ``c3`` is the per-bar figure carried by the section's ``BarSpec``.

    Example:
        >>> bar = load_catalog("A").by_designation("#6")
        >>> round(cost(Section(0.2124, 0.5346, 3, bar), 100, 25).total, 4)
        53.2507
    """
    return CostBreakdown(
        concrete=c1 * section.b * section.h,
        shuttering=c2 * (section.b + 2.0 * section.h),
        reinforcement=section.bar.c3 * section.n,
    )


def design_cost(problem: DesignProblem, section: Section) -> CostBreakdown:
    return cost(section, problem.cost_rates.c1, problem.cost_rates.c2)
