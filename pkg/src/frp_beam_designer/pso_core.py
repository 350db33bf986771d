"""Global-topology particle swarm engine.

Positions are stored as real vectors for every dimension; integer dimensions are decoded by
round-to-nearest (after clamping to bounds) only when a position is evaluated. Personal and
global bests are kept as raw ``Evaluation`` records and compared through an accept strategy
at the current step, so strategies whose comparison drifts over time (a growing penalty)
stay consistent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Protocol

import numpy as np
import pandas as pd

from .beam_model import InvalidInputError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)

DIMENSION_KINDS = ("continuous", "integer")
INERTIA_KINDS = ("sigmoid", "constant")
OBJECTIVES = ("minimize", "maximize")


@dataclass(frozen=True)
class Dimension:
    lower: float
    upper: float
    kind: str = "continuous"
    name: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise InvalidInputError(f"Dimension {self.name!r} needs finite bounds")
        if not self.lower < self.upper:
            raise InvalidInputError(
                f"Dimension {self.name!r} needs lower < upper, got [{self.lower}, {self.upper}]"
            )
        if self.kind not in DIMENSION_KINDS:
            raise InvalidInputError(f"Unknown dimension kind {self.kind!r}")

    @property
    def span(self) -> float:
        return self.upper - self.lower

    def decode(self, value: float) -> float | int:
        clipped = min(max(float(value), self.lower), self.upper)
        if self.kind == "integer":
            return int(math.floor(clipped + 0.5))
        return clipped


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple[Dimension, ...]

    def __post_init__(self):
        if not self.dims:
            raise InvalidInputError("Search space needs at least one dimension")

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def lower(self) -> np.ndarray:
        return np.array([d.lower for d in self.dims], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([d.upper for d in self.dims], dtype=float)

    @property
    def ranges(self) -> np.ndarray:
        return self.upper - self.lower

    def decode(self, position: Sequence[float]) -> tuple[float | int, ...]:
        return tuple(dim.decode(x) for dim, x in zip(self.dims, position, strict=True))

    def sample(self, rng: np.random.Generator, count: int = 1) -> np.ndarray:
        """Uniform positions over the bounds, shape ``(count, len(dims))``."""
        return rng.uniform(self.lower, self.upper, size=(count, len(self.dims)))


@dataclass(frozen=True)
class InertiaSchedule:
    kind: str = "sigmoid"
    w_start: float = 0.9
    w_end: float = 0.4
    steepness: float = 10.0
    w: float = 0.8

    def __post_init__(self):
        if self.kind not in INERTIA_KINDS:
            raise InvalidInputError(f"Unknown inertia schedule {self.kind!r}")

    @classmethod
    def sigmoid(cls, w_start: float = 0.9, w_end: float = 0.4, steepness: float = 10.0) -> InertiaSchedule:
        return cls(kind="sigmoid", w_start=w_start, w_end=w_end, steepness=steepness)

    @classmethod
    def constant(cls, w: float = 0.8) -> InertiaSchedule:
        return cls(kind="constant", w=w)

    @classmethod
    def parse(cls, text: str) -> InertiaSchedule:
        """Parse ``constant:W`` or ``sigmoid:W_START:W_END:STEEPNESS``."""
        parts = [part.strip() for part in text.split(":")]
        try:
            if parts[0] == "constant" and len(parts) == 2:
                return cls.constant(float(parts[1]))
            if parts[0] == "sigmoid" and len(parts) == 4:
                return cls.sigmoid(float(parts[1]), float(parts[2]), float(parts[3]))
        except ValueError as e:
            raise InvalidInputError(f"Invalid inertia schedule {text!r}: {e}") from e
        raise InvalidInputError(
            f"Invalid inertia schedule {text!r}; use 'constant:W' or 'sigmoid:W_START:W_END:STEEPNESS'"
        )

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant:{self.w!r}"
        return f"sigmoid:{self.w_start!r}:{self.w_end!r}:{self.steepness!r}"


def inertia_at(schedule: InertiaSchedule, t: int, t_max: int) -> float:
    """
    Inertia weight at step ``t`` of ``t_max``.

    The sigmoid falls from ``w_start`` towards ``w_end`` and passes their mean at
    ``t = t_max / 2``.

    Example:
        >>> inertia_at(InertiaSchedule.sigmoid(), 5000, 10000)
        0.65
    """
    if schedule.kind == "constant":
        return schedule.w
    exponent = schedule.steepness * (t / t_max - 0.5)
    return schedule.w_end + (schedule.w_start - schedule.w_end) / (1.0 + math.exp(exponent))


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm size, step budget, weights and stopping rule of one PSO run.

    Attributes:
        swarm_size: Number of particles
        t_max: Maximum number of steps
        iw: Individuality weight (pull towards the particle's own best)
        sw: Sociality weight (pull towards the swarm's best)
        inertia: Inertia-weight schedule
        vmax_fraction: Velocity clamp as a fraction of each dimension's range
        rng_seed: Seed of the run
        stagnation_window: Stop after this many steps without relative improvement
            above ``stagnation_tolerance``; None runs all ``t_max`` steps
        stagnation_tolerance: Relative improvement counted as progress
        maximizer: Also fly a companion swarm seeking the worst value
        record_trace: Keep every particle's position at every step
        init_retry_budget: Rejection-sampling attempts for feasible initialization
    """

    swarm_size: int = 35
    t_max: int = 10000
    iw: float = 1.5
    sw: float = 1.5
    inertia: InertiaSchedule = field(default_factory=InertiaSchedule.sigmoid)
    vmax_fraction: float = 0.5
    rng_seed: int = 0
    stagnation_window: int | None = 500
    stagnation_tolerance: float = 1e-10
    maximizer: bool = False
    record_trace: bool = False
    init_retry_budget: int = 100_000

    def __post_init__(self):
        if self.swarm_size < 2:
            raise InvalidInputError(f"Swarm size must be at least 2: {self.swarm_size}")
        if self.t_max < 1:
            raise InvalidInputError(f"t_max must be at least 1: {self.t_max}")
        if self.iw < 0 or self.sw < 0:
            raise InvalidInputError(f"Weights must be non-negative: iw={self.iw}, sw={self.sw}")
        if not 0 < self.vmax_fraction <= 1:
            raise InvalidInputError(f"vmax_fraction must be in (0, 1]: {self.vmax_fraction}")
        if self.stagnation_window is not None and self.stagnation_window < 1:
            raise InvalidInputError(f"Stagnation window must be positive: {self.stagnation_window}")
        if self.init_retry_budget < 1:
            raise InvalidInputError(f"Retry budget must be at least 1: {self.init_retry_budget}")


@dataclass(frozen=True)
class Evaluation:
    """Raw outcome of evaluating one position: cost and normalized violations."""

    cost: float
    violations: tuple[float, ...] = ()

    @property
    def feasible(self) -> bool:
        return all(v <= 0.0 for v in self.violations)


class AcceptStrategy(Protocol):
    """How a swarm initializes, scores and memorizes positions."""

    requires_feasible_init: bool

    def value(self, evaluation: Evaluation, t: int, t_max: int) -> float: ...

    def accepts(
        self,
        candidate: Evaluation,
        incumbent: Evaluation | None,
        t: int,
        t_max: int,
        sign: float = 1.0,
    ) -> bool: ...

    def initial_positions(
        self,
        space: SearchSpace,
        conflict: Callable,
        count: int,
        rng: np.random.Generator,
        retry_budget: int,
    ) -> np.ndarray: ...


class PlainComparison:
    """Memorize any strictly better value; violations are ignored."""

    requires_feasible_init = False

    def value(self, evaluation: Evaluation, t: int, t_max: int) -> float:
        return evaluation.cost

    def accepts(self, candidate, incumbent, t, t_max, sign=1.0) -> bool:
        if incumbent is None:
            return True
        return sign * candidate.cost < sign * incumbent.cost

    def initial_positions(self, space, conflict, count, rng, retry_budget) -> np.ndarray:
        return space.sample(rng, count)


@dataclass(frozen=True)
class Particle:
    x: np.ndarray
    v: np.ndarray
    pbest: np.ndarray
    pbest_evaluation: Evaluation | None

    @property
    def pbest_feasible(self) -> bool:
        return self.pbest_evaluation is not None and self.pbest_evaluation.feasible


@dataclass
class SwarmState:
    """Mutable state of one swarm; ``sign`` is +1 for a minimizer and -1 for a maximizer."""

    space: SearchSpace
    X: np.ndarray
    V: np.ndarray
    P: np.ndarray
    pbest: list[Evaluation | None]
    vmax: np.ndarray
    rng: np.random.Generator
    sign: float = 1.0
    label: str = "min"
    t: int = 0
    gbest_index: int | None = None
    evaluations: int = 0
    best_feasible: tuple[np.ndarray, Evaluation] | None = None
    history: list[float] = field(default_factory=list)
    trace: list[tuple] | None = None

    @property
    def swarm_size(self) -> int:
        return self.X.shape[0]

    @property
    def gbest_position(self) -> np.ndarray | None:
        return None if self.gbest_index is None else self.P[self.gbest_index]

    @property
    def gbest_evaluation(self) -> Evaluation | None:
        return None if self.gbest_index is None else self.pbest[self.gbest_index]

    def particle(self, index: int) -> Particle:
        return Particle(
            x=self.X[index].copy(),
            v=self.V[index].copy(),
            pbest=self.P[index].copy(),
            pbest_evaluation=self.pbest[index],
        )


def _select_gbest(state: SwarmState, accept: AcceptStrategy, t: int, t_max: int) -> int | None:
    # Sequential fold in particle order keeps ties seed-reproducible.
    best = None
    for i, record in enumerate(state.pbest):
        if record is None:
            continue
        if best is None or accept.accepts(record, state.pbest[best], t, t_max, state.sign):
            best = i
    return best


def _evaluate(
    state: SwarmState,
    index: int,
    conflict: Callable,
    accept: AcceptStrategy,
    t: int,
    t_max: int,
) -> Evaluation:
    evaluation = conflict(state.space.decode(state.X[index]))
    state.evaluations += 1

    if evaluation.feasible and (
        state.best_feasible is None
        or state.sign * evaluation.cost < state.sign * state.best_feasible[1].cost
    ):
        state.best_feasible = (state.X[index].copy(), evaluation)

    if accept.accepts(evaluation, state.pbest[index], t, t_max, state.sign):
        state.P[index] = state.X[index]
        state.pbest[index] = evaluation

    if state.trace is not None:
        state.trace.append(
            (
                t,
                state.label,
                index,
                *state.X[index].tolist(),
                accept.value(evaluation, max(t, 1), t_max),
                evaluation.feasible,
            )
        )
    return evaluation


def _record_gbest(state: SwarmState, accept: AcceptStrategy, t: int, t_max: int) -> None:
    state.gbest_index = _select_gbest(state, accept, t, t_max)
    gbest = state.gbest_evaluation
    state.history.append(math.nan if gbest is None else accept.value(gbest, t, t_max))


def initialize_state(
    config: SwarmConfig,
    space: SearchSpace,
    conflict: Callable,
    accept: AcceptStrategy,
    rng: np.random.Generator,
    sign: float = 1.0,
    label: str = "min",
    positions: np.ndarray | None = None,
    velocities: np.ndarray | None = None,
) -> SwarmState:
    """
    Place the particles, evaluate them once and elect the first global best.

    Positions default to the accept strategy's initializer (rejection-sampled when the
    strategy needs feasible starts); velocities default to uniform in ``[-vmax, vmax]``.

    Raises:
        SwarmInitializationError: From a feasibility-preserving initializer whose retry
            budget runs out
    """
    size, dims = config.swarm_size, len(space)
    vmax = config.vmax_fraction * space.ranges

    if positions is None:
        positions = accept.initial_positions(space, conflict, size, rng, config.init_retry_budget)
    X = np.array(positions, dtype=float).reshape(size, dims)
    if velocities is None:
        velocities = rng.uniform(-vmax, vmax, size=(size, dims))
    V = np.array(velocities, dtype=float).reshape(size, dims)

    state = SwarmState(
        space=space,
        X=X,
        V=V,
        P=X.copy(),
        pbest=[None] * size,
        vmax=vmax,
        rng=rng,
        sign=sign,
        label=label,
        trace=[] if config.record_trace else None,
    )
    for i in range(size):
        _evaluate(state, i, conflict, accept, 0, config.t_max)
    _record_gbest(state, accept, 1, config.t_max)
    return state


def step(
    state: SwarmState,
    config: SwarmConfig,
    conflict: Callable,
    accept: AcceptStrategy,
) -> SwarmState:
    """
    Advance the swarm by one step.

    Both random factors are drawn independently for every particle and dimension. The
    new velocity is clamped to ``vmax`` before the position moves; the new position is
    evaluated and offered to the particle's best through ``accept``, and the global best
    is re-elected at the new step.
    """
    t = state.t + 1
    w = inertia_at(config.inertia, t, config.t_max)
    r1 = state.rng.random(state.X.shape)
    r2 = state.rng.random(state.X.shape)
    gbest = state.gbest_position
    social = np.zeros_like(state.X) if gbest is None else gbest - state.X

    V = w * state.V + config.iw * r1 * (state.P - state.X) + config.sw * r2 * social
    state.V = np.clip(V, -state.vmax, state.vmax)
    state.X = state.X + state.V

    for i in range(state.swarm_size):
        _evaluate(state, i, conflict, accept, t, config.t_max)
    state.t = t
    _record_gbest(state, accept, t, config.t_max)
    return state


@dataclass
class SwarmOutcome:
    """What a run leaves behind.

    ``best_position`` is decoded (integer dimensions as int). ``best_feasible`` is the
    cheapest feasible evaluation ever seen by the primary swarm, whether or not the
    accept strategy memorized it.
    """

    best_position: tuple[float | int, ...] | None
    best_evaluation: Evaluation | None
    best_value: float
    steps_used: int
    evaluations: int
    best_feasible: tuple[tuple[float | int, ...], Evaluation] | None
    history: list[float]
    maximizer_history: list[float] | None = None
    trace: list[tuple] | None = None


def _stagnated(
    accept: AcceptStrategy,
    reference: Evaluation | None,
    current: Evaluation | None,
    t: int,
    t_max: int,
    sign: float,
    tolerance: float,
) -> bool:
    """True when ``current`` is not a relative improvement over ``reference`` at step ``t``."""
    if current is None:
        return True
    if reference is None:
        return False
    before = accept.value(reference, t, t_max)
    after = accept.value(current, t, t_max)
    scale = abs(before) if before != 0 else 1.0
    return sign * (before - after) / scale <= tolerance


def run(
    config: SwarmConfig,
    space: SearchSpace,
    conflict: Callable,
    accept: AcceptStrategy | None = None,
    objective: str = "minimize",
    positions: np.ndarray | None = None,
) -> SwarmOutcome:
    """
    Fly a swarm until ``t_max`` steps or stagnation.

    Args:
        config: Swarm size, budget, weights, seed and stopping rule
        space: Bounds and kinds of the dimensions
        conflict: Maps a decoded position to an ``Evaluation``; must never raise
        accept: Strategy deciding what a particle memorizes (defaults to ``PlainComparison``)
        objective: "minimize" or "maximize" for the primary swarm
        positions: Optional explicit initial positions of the primary swarm

    Returns:
        SwarmOutcome of the primary swarm; with ``config.maximizer`` the companion
        swarm's best value per step is attached as ``maximizer_history``

    Raises:
        SwarmInitializationError: If a feasibility-preserving start cannot be found
    """
    if objective not in OBJECTIVES:
        raise InvalidInputError(f"Unknown objective {objective!r}; expected one of {OBJECTIVES}")
    accept = accept or PlainComparison()
    sign = 1.0 if objective == "minimize" else -1.0

    primary_seq, companion_seq = np.random.SeedSequence(config.rng_seed).spawn(2)
    primary = initialize_state(
        config,
        space,
        conflict,
        accept,
        np.random.default_rng(primary_seq),
        sign=sign,
        label="min" if sign > 0 else "max",
        positions=positions,
    )
    companion = None
    if config.maximizer:
        companion = initialize_state(
            config,
            space,
            conflict,
            accept,
            np.random.default_rng(companion_seq),
            sign=-sign,
            label="max" if sign > 0 else "min",
        )
        if primary.trace is not None:
            primary.trace.extend(companion.trace or [])
            companion.trace = primary.trace

    reference = primary.gbest_evaluation
    reference_step = 0
    for _ in range(config.t_max):
        step(primary, config, conflict, accept)
        if companion is not None:
            step(companion, config, conflict, accept)

        if config.stagnation_window is None:
            continue
        current = primary.gbest_evaluation
        if not _stagnated(
            accept, reference, current, primary.t, config.t_max, sign, config.stagnation_tolerance
        ):
            reference, reference_step = current, primary.t
        elif primary.t - reference_step >= config.stagnation_window:
            logger.debug(
                "Swarm stagnated at step %d (no relative progress for %d steps)",
                primary.t,
                config.stagnation_window,
            )
            break

    gbest = primary.gbest_evaluation
    best_position = None if primary.gbest_position is None else space.decode(primary.gbest_position)
    best_feasible = None
    if primary.best_feasible is not None:
        best_feasible = (space.decode(primary.best_feasible[0]), primary.best_feasible[1])

    return SwarmOutcome(
        best_position=best_position,
        best_evaluation=gbest,
        best_value=math.nan if gbest is None else accept.value(gbest, max(primary.t, 1), config.t_max),
        steps_used=primary.t,
        evaluations=primary.evaluations + (companion.evaluations if companion else 0),
        best_feasible=best_feasible,
        history=primary.history,
        maximizer_history=companion.history if companion else None,
        trace=primary.trace,
    )


def write_trace_csv(trace: Sequence[tuple], dims: int, path: str | Path) -> Path:
    """
    Write a swarm trace with columns t, swarm, particle, x_1..x_D, value, feasible.

    Returns:
        The written path
    """
    columns = ["t", "swarm", "particle", *[f"x_{j + 1}" for j in range(dims)], "value", "feasible"]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(list(trace), columns=columns).to_csv(path, index=False)
    return path
