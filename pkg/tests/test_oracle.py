"""Tests for the oracle module."""

import pandas as pd
import pytest

from frp_beam_designer.aci440_checks import check_all
from frp_beam_designer.beam_model import InvalidInputError, Section, default_problem
from frp_beam_designer.cost_model import design_cost
from frp_beam_designer.experiments import PUBLISHED_DESIGNS
from frp_beam_designer.optimizers import DesignResult
from frp_beam_designer.oracle import (
    GridSpec,
    NoFeasiblePointError,
    enumerate_reinforcement,
    grid_axes,
    grid_search,
    verify_result,
    write_heatmap_csv,
)


@pytest.fixture
def problem():
    return default_problem("A")


def make_result(problem, section, feasible=None):
    """DesignResult for a hand-picked section."""
    report = check_all(problem, section)
    return DesignResult(
        section=section,
        cost=design_cost(problem, section),
        report=report,
        feasible=report.is_feasible() if feasible is None else feasible,
        steps_used=0,
        seed=0,
        wall_time=0.0,
        evaluations=0,
        checks=1,
        variant="optimizer1",
    )


class TestGridAxes:
    """Tests for the grid definition."""

    def test_plain_axes(self, problem):
        """Test evenly spaced axes over the limits."""
        b_values, h_values = grid_axes(problem, GridSpec(0.1, 0.1, include_width_breakpoints=False))
        assert b_values.tolist() == pytest.approx([0.2 + 0.1 * i for i in range(9)])
        assert len(h_values) == 19
        assert h_values[-1] == pytest.approx(2.0)

    def test_breakpoints_added(self, problem):
        """Test that exact-fit widths of the published designs are on the axis."""
        b_values, _ = grid_axes(problem, GridSpec(0.1, 0.1))
        assert 0.2124 in b_values
        assert 0.88013 in b_values
        assert 0.5067 in b_values
        assert (b_values[1:] > b_values[:-1]).all()
        assert b_values[0] >= 0.2 and b_values[-1] <= 1.0

    def test_bound_overrides(self, problem):
        """Test that the grid bounds can be narrowed."""
        b_values, h_values = grid_axes(
            problem, GridSpec(0.01, 0.01, include_width_breakpoints=False, b_min=0.3, b_max=0.35, h_max=0.25)
        )
        assert len(b_values) == 6
        assert h_values.tolist() == pytest.approx([0.2, 0.21, 0.22, 0.23, 0.24, 0.25])

    def test_empty_grid(self, problem):
        """Test that inverted bounds raise."""
        with pytest.raises(InvalidInputError, match="Empty grid"):
            grid_axes(problem, GridSpec(b_min=0.9, b_max=0.5))

    def test_steps_positive(self):
        """Test that grid steps must be positive."""
        with pytest.raises(InvalidInputError, match="positive"):
            GridSpec(b_step=0.0)


class TestGridSearch:
    """Tests for the exhaustive search."""

    def test_case_a_narrow_grid_with_refinement(self, problem):
        """Test that a 1 mm grid around the optimum plus height refinement finds it."""
        grid = GridSpec(b_step=0.01, h_step=0.001, b_max=0.3, h_min=0.45, h_max=0.65)
        result = grid_search(problem, grid)
        assert result.section.label() == "3 x #6"
        assert result.section.b == 0.2124
        assert result.total == pytest.approx(53.250, abs=2e-3)
        assert check_all(problem, result.section).is_feasible()
        assert result.evaluated_count < result.grid_points

    def test_refinement_never_increases_cost(self, problem):
        """Test that refining the winner's height can only help."""
        grid = GridSpec(b_step=0.05, h_step=0.02)
        plain = grid_search(problem, GridSpec(b_step=0.05, h_step=0.02, refine=False))
        refined = grid_search(problem, grid)
        assert refined.total <= plain.total
        assert refined.section.b == plain.section.b

    @pytest.mark.parametrize("breakpoints", [False, True])
    def test_finer_grid_never_worse(self, problem, breakpoints):
        """Test that halving both steps of an unrefined grid never raises the best cost."""
        bounds = {"b_max": 0.4, "h_min": 0.4, "h_max": 0.7, "refine": False, "include_width_breakpoints": breakpoints}
        coarse = grid_search(problem, GridSpec(b_step=0.02, h_step=0.02, **bounds))
        fine = grid_search(problem, GridSpec(b_step=0.01, h_step=0.01, **bounds))
        assert fine.grid_points > coarse.grid_points
        assert fine.total <= coarse.total + 1e-9

    def test_heatmap(self, problem, tmp_path):
        """Test that the heatmap covers every grid point."""
        grid = GridSpec(b_step=0.2, h_step=0.3, include_width_breakpoints=False, refine=False)
        result = grid_search(problem, grid, heatmap=True)
        assert len(result.heatmap) == result.grid_points == 5 * 7
        assert result.evaluated_count == result.grid_points

        path = write_heatmap_csv(result.heatmap, tmp_path / "heatmap.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["b", "h", "feasible", "cost"]
        assert frame["feasible"].sum() == result.feasible_count
        assert frame.loc[frame["feasible"], "cost"].min() == pytest.approx(result.total)

    def test_no_feasible_point(self, problem):
        """Test that a grid with no feasible point raises."""
        shallow = problem.with_limits(h_max=0.21)
        with pytest.raises(NoFeasiblePointError, match="feasible reinforcement") as excinfo:
            grid_search(shallow, GridSpec(b_step=0.1, h_step=0.005, include_width_breakpoints=False))
        assert excinfo.value.evaluated == 9 * 3


def test_enumerate_reinforcement(problem):
    """Test that every feasible option at the Case A optimum is listed, cheapest first."""
    options = enumerate_reinforcement(problem, 0.2124, 0.5346)
    totals = [option[2].total for option in options]
    assert totals == sorted(totals)
    assert (3, "#6") in [(n, bar.designation) for n, bar, _ in options]
    for n, bar, _ in options:
        assert check_all(problem, Section(0.2124, 0.5346, n, bar)).is_feasible()


class TestVerifyResult:
    """Tests for the independent result check."""

    def test_published_optimum_passes(self, problem):
        """Test that the Case A optimum is feasible, consistent and locally optimal."""
        section = Section(0.2124, 0.5346, 3, problem.catalog.by_designation("#6"))
        verdict = verify_result(problem, make_result(problem, section))
        assert verdict.passed
        assert verdict.diagnostics == ()

    def test_taller_section_not_near_optimal(self, problem):
        """Test that a 10% taller section is flagged as dearer than its neighbours."""
        section = Section(0.2124, 0.5346 * 1.1, 3, problem.catalog.by_designation("#6"))
        verdict = verify_result(problem, make_result(problem, section))
        assert verdict.feasible
        assert not verdict.near_optimal
        assert not verdict.passed
        assert "local best" in verdict.diagnostics[0]

    def test_flag_mismatch(self, problem):
        """Test that a feasibility flag contradicting the checks is reported."""
        section = Section(0.2124, 0.45, 3, problem.catalog.by_designation("#6"))
        verdict = verify_result(problem, make_result(problem, section, feasible=True))
        assert not verdict.feasible
        assert not verdict.flag_consistent
        assert any("flagged feasible=True" in line for line in verdict.diagnostics)


@pytest.mark.slow
@pytest.mark.parametrize(
    "design",
    [d for d in PUBLISHED_DESIGNS if d.variant == "optimizer1"],
    ids=lambda d: d.name,
)
def test_fine_grid_matches_first_optimizer(design):
    """Test that the 1 mm grid agrees with each first-optimizer total within 0.1%, full and restricted height."""
    problem = design.problem()
    result = grid_search(problem)
    assert result.total == pytest.approx(design.total, rel=1e-3)
    assert check_all(problem, result.section).is_feasible()
    if design.h_max is not None:
        assert result.section.h <= design.h_max
