"""Constraint handling for the swarm: feasibility preservation and time-scheduled penalties."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .beam_model import InvalidInputError
from .pso_core import Evaluation

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from .pso_core import SearchSpace

logger = logging.getLogger(__name__)

PENALTY_MODES = ("linear", "constant")
PENALTY_FORMS = ("squared", "sum")


class SwarmInitializationError(RuntimeError):
    """Raised when rejection sampling runs out of attempts before filling the swarm."""

    def __init__(self, message: str, attempts: int = 0, found: int = 0):
        super().__init__(message)
        self.attempts = attempts
        self.found = found


@dataclass(frozen=True)
class PenaltySchedule:
    """Penalty coefficient ``k(t)``: linear from ``k_start`` to ``k_end``, or constant ``k_start``."""

    mode: str = "linear"
    k_start: float = 1e5
    k_end: float = 1e10

    def __post_init__(self):
        if self.mode not in PENALTY_MODES:
            raise InvalidInputError(f"Unknown penalty mode {self.mode!r}; expected one of {PENALTY_MODES}")
        if self.k_start < 0 or self.k_end < 0:
            raise InvalidInputError(f"Penalty coefficients must be non-negative: {self}")
        if self.mode == "linear" and self.k_start > self.k_end:
            raise InvalidInputError(f"Linear penalty must not decrease: {self.k_start} > {self.k_end}")

    @classmethod
    def linear(cls, k_start: float = 1e5, k_end: float = 1e10) -> PenaltySchedule:
        return cls(mode="linear", k_start=k_start, k_end=k_end)

    @classmethod
    def constant(cls, k: float = 1e8) -> PenaltySchedule:
        return cls(mode="constant", k_start=k, k_end=k)

    @classmethod
    def parse(cls, text: str) -> PenaltySchedule:
        """
        Parse ``constant:K`` or ``linear:K_START:K_END``.

        Example:
            >>> PenaltySchedule.parse("constant:1e8")
            PenaltySchedule(mode='constant', k_start=100000000.0, k_end=100000000.0)
        """
        parts = [part.strip() for part in text.split(":")]
        try:
            if parts[0] == "constant" and len(parts) == 2:
                return cls.constant(float(parts[1]))
            if parts[0] == "linear" and len(parts) == 3:
                return cls.linear(float(parts[1]), float(parts[2]))
        except ValueError as e:
            raise InvalidInputError(f"Invalid penalty schedule {text!r}: {e}") from e
        raise InvalidInputError(
            f"Invalid penalty schedule {text!r}; use 'constant:K' or 'linear:K_START:K_END'"
        )

    def describe(self) -> str:
        if self.mode == "constant":
            return f"constant:{self.k_start!r}"
        return f"linear:{self.k_start!r}:{self.k_end!r}"


def schedule_at(schedule: PenaltySchedule, t: int, t_max: int) -> float:
    """Penalty coefficient at step ``t`` of ``t_max`` (a one-step run uses ``k_end``)."""
    if schedule.mode == "constant" or t_max <= 1:
        return schedule.k_end
    fraction = (t - 1) / (t_max - 1)
    return schedule.k_start + (schedule.k_end - schedule.k_start) * fraction


def penalized_conflict(
    cost: float,
    violations: Sequence[float],
    k_t: float,
    form: str = "squared",
) -> tuple[float, bool]:
    """
    Cost plus ``k_t`` times the squared (or plain) sum of the violations.

    Returns:
        Tuple of (penalized value, feasible flag); a feasible point returns its cost unchanged

    Example:
        >>> penalized_conflict(50.0, [0.0, 0.0], 1e5)
        (50.0, True)
    """
    if form not in PENALTY_FORMS:
        raise InvalidInputError(f"Unknown penalty form {form!r}; expected one of {PENALTY_FORMS}")
    feasible = all(v <= 0.0 for v in violations)
    if feasible:
        return cost, True
    if form == "squared":
        penalty = sum(v * v for v in violations)
    else:
        penalty = sum(violations)
    return cost + k_t * penalty, False


def accept_preserving_feasibility(
    candidate: Evaluation,
    pbest: Evaluation | None,
    sign: float = 1.0,
) -> Evaluation | None:
    """
    The personal-best record after offering ``candidate``.

    Infeasible candidates are never memorized. A feasible candidate replaces an unset
    record, or a record it strictly improves on.
    """
    if not candidate.feasible:
        return pbest
    if pbest is None or sign * candidate.cost < sign * pbest.cost:
        return candidate
    return pbest


def feasible_initializer(
    space: SearchSpace,
    feasibility: Callable[[np.ndarray], bool],
    retry_budget: int,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Rejection-sample ``count`` uniform positions that pass ``feasibility``.

    Args:
        space: Bounds to sample within
        feasibility: Predicate over a raw position
        retry_budget: Maximum number of positions drawn
        count: Number of feasible positions wanted
        rng: Random generator

    Returns:
        Array of shape ``(count, len(space))``

    Raises:
        SwarmInitializationError: If the budget runs out first
    """
    if retry_budget < 1:
        raise InvalidInputError(f"Retry budget must be at least 1: {retry_budget}")

    found: list[np.ndarray] = []
    attempts = 0
    while len(found) < count:
        if attempts >= retry_budget:
            raise SwarmInitializationError(
                f"Found {len(found)} of {count} feasible positions in {attempts} attempts",
                attempts=attempts,
                found=len(found),
            )
        position = space.sample(rng, 1)[0]
        attempts += 1
        if feasibility(position):
            found.append(position)

    logger.debug("Feasible initialization: %d positions from %d attempts", count, attempts)
    return np.array(found)


class PreservingFeasibility:
    """Particles only remember feasible positions and start from feasible ones."""

    requires_feasible_init = True

    def value(self, evaluation: Evaluation, t: int, t_max: int) -> float:
        return evaluation.cost

    def accepts(self, candidate, incumbent, t, t_max, sign=1.0) -> bool:
        return accept_preserving_feasibility(candidate, incumbent, sign) is not incumbent

    def initial_positions(self, space, conflict, count, rng, retry_budget) -> np.ndarray:
        return feasible_initializer(
            space,
            lambda position: conflict(space.decode(position)).feasible,
            retry_budget,
            count,
            rng,
        )

    def describe(self) -> str:
        return "preserving-feasibility"


@dataclass(frozen=True)
class Penalization:
    """Particles compare penalized values, re-weighted at the current step's coefficient."""

    schedule: PenaltySchedule = PenaltySchedule()
    form: str = "squared"

    requires_feasible_init = False

    def __post_init__(self):
        if self.form not in PENALTY_FORMS:
            raise InvalidInputError(f"Unknown penalty form {self.form!r}; expected one of {PENALTY_FORMS}")

    def value(self, evaluation: Evaluation, t: int, t_max: int) -> float:
        k_t = schedule_at(self.schedule, t, t_max)
        return penalized_conflict(evaluation.cost, evaluation.violations, k_t, self.form)[0]

    def accepts(self, candidate, incumbent, t, t_max, sign=1.0) -> bool:
        if incumbent is None:
            return True
        return sign * self.value(candidate, t, t_max) < sign * self.value(incumbent, t, t_max)

    def initial_positions(self, space, conflict, count, rng, retry_budget) -> np.ndarray:
        return space.sample(rng, count)

    def describe(self) -> str:
        return f"penalization {self.schedule.describe()} ({self.form})"
