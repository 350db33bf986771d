"""Tests for the optimizers module."""

import logging

import pytest

from frp_beam_designer.aci440_checks import check_all
from frp_beam_designer.beam_model import InvalidInputError, Section, default_problem
from frp_beam_designer.constraint_handling import PenaltySchedule, SwarmInitializationError
from frp_beam_designer.experiments import PUBLISHED_DESIGNS, run_replications
from frp_beam_designer.optimizers import (
    OptimizerSpec,
    default_swarm_config,
    deterministic_reinforcement,
    full_space,
    optimize1,
    optimize2,
    width_height_space,
)
from frp_beam_designer.pso_core import SwarmConfig


@pytest.fixture
def problem():
    return default_problem("A")


@pytest.fixture
def small_swarm():
    """A short run: 10 particles, 40 steps."""
    return SwarmConfig(swarm_size=10, t_max=40)


class TestDeterministicReinforcement:
    """Tests for the smallest-bar, fewest-bars reinforcement rule."""

    @pytest.mark.parametrize(
        "b,h,expected",
        [
            (0.2124, 0.5346, (3, "#6")),
            (0.88013, 0.3447, (21, "#3")),
            (0.8801, 0.3447, (14, "#4")),
            (0.5067, 0.3482, (9, "#6")),
        ],
    )
    def test_published_sections(self, problem, b, h, expected):
        """Test that the rule recovers the published reinforcement."""
        n, bar = deterministic_reinforcement(problem, b, h)
        assert (n, bar.designation) == expected

    def test_too_small_section(self, problem):
        """Test that a 0.2 x 0.2 section cannot be reinforced."""
        assert deterministic_reinforcement(problem, 0.2, 0.2) is None

    def test_result_is_feasible_and_minimal(self, problem):
        """Test that the chosen count passes and one bar fewer fails."""
        n, bar = deterministic_reinforcement(problem, 0.5067, 0.3482)
        assert check_all(problem, Section(0.5067, 0.3482, n, bar)).is_feasible()
        assert not check_all(problem, Section(0.5067, 0.3482, n - 1, bar)).is_feasible()


class TestSearchSpaces:
    """Tests for the optimizer search spaces."""

    def test_width_height_space(self, problem):
        """Test the box of the first optimizer."""
        space = width_height_space(problem.with_limits(h_max=0.35))
        assert space.lower.tolist() == [0.2, 0.2]
        assert space.upper.tolist() == [1.0, 0.35]

    def test_full_space(self, problem):
        """Test that n runs up to the most #2 bars that fit b_max and the bar index covers the catalog."""
        space = full_space(problem)
        assert [dim.name for dim in space.dims] == ["b", "h", "n", "bar"]
        assert [dim.kind for dim in space.dims] == ["continuous", "continuous", "integer", "integer"]
        assert (space.dims[2].lower, space.dims[2].upper) == (2, 26)
        assert (space.dims[3].lower, space.dims[3].upper) == (0, 7)

    def test_full_space_rejects_narrow_width(self, problem):
        """Test that a b_max too narrow for two bars is rejected."""
        with pytest.raises(InvalidInputError, match="do not fit"):
            full_space(problem.with_limits(b_min=0.05, b_max=0.1))


def test_default_swarm_configs():
    """Test the inertia schedule of each optimizer."""
    assert default_swarm_config("optimizer1").inertia.kind == "sigmoid"
    second = default_swarm_config("optimizer2", swarm_size=12)
    assert second.inertia.describe() == "constant:0.8"
    assert second.swarm_size == 12
    assert second.t_max == 10000
    with pytest.raises(InvalidInputError, match="Unknown optimizer"):
        default_swarm_config("optimizer3")


class TestOptimize1:
    """Tests for the feasibility-preserving optimizer."""

    def test_result_is_feasible(self, problem, small_swarm):
        """Test that a short run returns a feasible design near the optimum."""
        result = optimize1(problem, small_swarm, seed=0)
        assert result.feasible
        assert result.report == check_all(problem, result.section)
        assert result.total >= 53.2
        assert result.total < 100.0
        assert result.variant == "optimizer1"
        assert result.checks > result.evaluations

    def test_seed_reproducible(self, problem, small_swarm):
        """Test that the same seed returns the same design."""
        first = optimize1(problem, small_swarm, seed=5)
        second = optimize1(problem, small_swarm, seed=5)
        assert first.section == second.section
        assert first.seed == 5

    def test_infeasible_problem_fails_to_start(self, problem):
        """Test that an unreachable problem raises SwarmInitializationError."""
        shallow = problem.with_limits(h_max=0.21)
        config = SwarmConfig(swarm_size=5, t_max=5, init_retry_budget=20)
        with pytest.raises(SwarmInitializationError):
            optimize1(shallow, config)


class TestOptimize2:
    """Tests for the penalized optimizer."""

    def test_counts_and_report(self, problem, small_swarm):
        """Test that the result carries a consistent report and call counts."""
        result = optimize2(problem, small_swarm, seed=1)
        assert result.report == check_all(problem, result.section)
        assert result.feasible == result.report.is_feasible()
        assert result.evaluations == 10 * 41
        assert result.checks == result.evaluations + 1
        assert result.steps_used == 40
        assert 2 <= result.section.n

    def test_seed_reproducible(self, problem, small_swarm):
        """Test that the same seed returns the same design."""
        first = optimize2(problem, small_swarm, PenaltySchedule.constant(1e8), seed=2)
        second = optimize2(problem, small_swarm, PenaltySchedule.constant(1e8), seed=2)
        assert first.section == second.section

    def test_no_feasible_design(self, problem, caplog):
        """Test that an unreachable problem returns a flagged infeasible design."""
        shallow = problem.with_limits(h_max=0.21)
        with caplog.at_level(logging.WARNING):
            result = optimize2(shallow, SwarmConfig(swarm_size=5, t_max=10))
        assert not result.feasible
        assert "found no feasible design" in caplog.text

    def test_maximizer_doubles_evaluations(self, problem):
        """Test that the companion maximizer evaluates its own swarm."""
        config = SwarmConfig(swarm_size=4, t_max=5, maximizer=True)
        result = optimize2(problem, config)
        assert result.evaluations == 2 * 4 * 6
        assert len(result.maximizer_history) == 6


def test_optimizer_spec_dispatch(problem):
    """Test that OptimizerSpec runs the chosen variant with the given seed."""
    spec = OptimizerSpec("optimizer2", problem, SwarmConfig(swarm_size=4, t_max=5))
    result = spec.run(seed=3)
    assert result.variant == "optimizer2"
    assert result.seed == 3
    row = result.row()
    assert row["bars"] == result.section.label()
    assert row["total"] == pytest.approx(result.total)
    with pytest.raises(InvalidInputError):
        OptimizerSpec("pso", problem)


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["optimizer1", "optimizer2"])
def test_full_budget_reaches_case_a_optimum(problem, variant):
    """Test that a full-budget run lands within 1% of the Case A optimum."""
    result = OptimizerSpec(variant, problem).run(seed=0)
    assert result.feasible
    assert result.total == pytest.approx(53.25, rel=0.01)


FIRST_OPTIMIZER_ROWS = [d for d in PUBLISHED_DESIGNS if d.variant == "optimizer1"]


@pytest.mark.slow
@pytest.mark.parametrize("design", FIRST_OPTIMIZER_ROWS, ids=lambda d: d.name)
def test_first_optimizer_best_of_five_seeds(design):
    """Test that the best of five seeded runs meets each published first-optimizer row."""
    spec = OptimizerSpec("optimizer1", design.problem())
    best = run_replications(spec, range(5)).best
    assert best.feasible
    assert best.total == pytest.approx(design.total, rel=design.tolerance)
    if design.h_max is None:
        assert best.section.label() == f"{design.n} x {design.bar}"
