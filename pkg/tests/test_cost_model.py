"""Tests for the cost_model module."""

import pytest

from frp_beam_designer.beam_model import Section, default_problem, load_catalog
from frp_beam_designer.cost_model import CostBreakdown, cost, design_cost
from frp_beam_designer.experiments import PUBLISHED_DESIGNS


def test_cost_components():
    """Test c1·b·h, c2·(b + 2h) and c3·n for the Case A optimum."""
    bar = load_catalog("A").by_designation("#6")
    breakdown = cost(Section(0.2124, 0.5346, 3, bar), 100.0, 25.0)
    assert breakdown.concrete == pytest.approx(11.35490, abs=1e-4)
    assert breakdown.shuttering == pytest.approx(32.04, abs=1e-4)
    assert breakdown.reinforcement == pytest.approx(9.85576, abs=1e-4)
    assert breakdown.total == pytest.approx(53.2507, abs=1e-4)


def test_cost_is_linear_in_bar_count():
    """Test that each extra bar adds its unit price."""
    bar = load_catalog("C").by_designation("#4")
    base = cost(Section(0.5, 0.4, 4, bar), 100.0, 35.0)
    more = cost(Section(0.5, 0.4, 5, bar), 100.0, 35.0)
    assert more.total - base.total == pytest.approx(bar.c3)
    assert more.concrete == base.concrete


def test_zero_rates():
    """Test that zero rates leave only the bar cost."""
    bar = load_catalog("B").by_designation("#3")
    breakdown = cost(Section(0.88013, 0.3447, 21, bar), 0.0, 0.0)
    assert breakdown.total == pytest.approx(21 * 0.514049937)


def test_as_row():
    """Test that the row lists the components and the total."""
    row = CostBreakdown(1.0, 2.0, 3.0).as_row()
    assert row == {"concrete": 1.0, "shuttering": 2.0, "reinforcement": 3.0, "total": 6.0}


def test_design_cost_uses_case_rates():
    """Test that design_cost reads c1 and c2 from the problem."""
    problem = default_problem("B", "reconciled")
    section = Section(0.2124, 0.5346, 3, problem.catalog.by_designation("#6"))
    breakdown = design_cost(problem, section)
    assert breakdown.shuttering == pytest.approx(2.95 * (0.2124 + 2 * 0.5346))
    assert breakdown.reinforcement == pytest.approx(11.5950)


@pytest.mark.parametrize("design", PUBLISHED_DESIGNS, ids=lambda d: d.name)
def test_published_costs(design):
    """Test that recomputed costs match the published breakdown to print precision."""
    problem = design.problem()
    breakdown = design_cost(problem, design.section(problem))
    # b and h are printed to four decimals
    assert breakdown.concrete == pytest.approx(design.concrete, abs=5e-3)
    assert breakdown.shuttering == pytest.approx(design.shuttering, abs=5e-3)
    assert breakdown.reinforcement == pytest.approx(design.reinforcement, abs=1e-3)
    assert breakdown.total == pytest.approx(design.total, abs=5e-3)
