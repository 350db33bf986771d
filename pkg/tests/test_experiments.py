"""Tests for the experiments module."""

from dataclasses import replace
from unittest.mock import patch

import pytest

from frp_beam_designer.aci440_checks import check_all
from frp_beam_designer.beam_model import default_problem
from frp_beam_designer.config import RunConfig
from frp_beam_designer.cost_model import design_cost
from frp_beam_designer.experiments import (
    PUBLISHED_DESIGNS,
    Comparison,
    ReplicationSummary,
    comparison_frame,
    published_designs,
    read_report,
    report_entries,
    reproduce,
    result_frame,
    run_replications,
    write_report,
)
from frp_beam_designer.optimizers import DesignResult, OptimizerSpec
from frp_beam_designer.oracle import GridSpec
from frp_beam_designer.pso_core import SwarmConfig


def result_for(design, seed=0, scale_h=1.0):
    """DesignResult holding a published section with its height scaled."""
    problem = design.problem()
    section = design.section(problem)
    if scale_h != 1.0:
        section = replace(section, h=section.h * scale_h)
    report = check_all(problem, section)
    return DesignResult(
        section=section,
        cost=design_cost(problem, section),
        report=report,
        feasible=report.max_violation <= 0.0,
        steps_used=10,
        seed=seed,
        wall_time=0.5,
        evaluations=100,
        checks=120,
        variant=design.variant,
    )


@pytest.fixture
def case_a():
    return published_designs("table2")[0]


class TestPublishedDesigns:
    """Tests for the reproduction scenarios."""

    def test_twelve_scenarios(self):
        """Test that both tables hold six scenarios each."""
        assert len(PUBLISHED_DESIGNS) == 12
        assert len(published_designs("table2")) == 6
        assert len(published_designs("table3")) == 6
        assert len({design.name for design in PUBLISHED_DESIGNS}) == 12
        with pytest.raises(ValueError, match="Unknown table"):
            published_designs("table4")

    def test_restricted_height(self):
        """Test that the second table's scenarios cap h at 0.35 m."""
        for design in published_designs("table3"):
            assert design.problem().limits.h_max == 0.35
        for design in published_designs("table2"):
            assert design.problem().limits.h_max == 2.0

    def test_case_b_first_table_uses_reconciled_prices(self):
        """Test that the first table's Case B scenarios use the reconciled #6 price."""
        design = next(d for d in published_designs("table2") if d.case == "B")
        assert design.problem().catalog.by_designation("#6").c3 == pytest.approx(3.865)

    def test_accepts(self, case_a):
        """Test the two-sided and one-sided acceptance rules."""
        assert case_a.accepts(53.2499 * 1.004)
        assert not case_a.accepts(53.2499 * 0.99)
        one_sided = next(d for d in PUBLISHED_DESIGNS if d.one_sided)
        assert one_sided.accepts(one_sided.total * 0.9)
        assert not one_sided.accepts(one_sided.total * 1.02)


class TestReplications:
    """Tests for multi-seed runs and their summaries."""

    def test_run_replications(self):
        """Test one result per seed, in seed order."""
        spec = OptimizerSpec("optimizer2", default_problem("A"), SwarmConfig(swarm_size=5, t_max=5))
        summary = run_replications(spec, [4, 2])
        assert [r.seed for r in summary.results] == [4, 2]
        assert summary.table()["seed"].tolist() == [4, 2]

    def test_summary_prefers_feasible(self, case_a):
        """Test that the best run is the cheapest feasible one."""
        feasible = result_for(case_a, seed=0, scale_h=1.1)
        cheaper_infeasible = result_for(case_a, seed=1, scale_h=0.8)
        summary = ReplicationSummary((feasible, cheaper_infeasible))
        assert summary.best is feasible
        assert summary.feasible_runs == 1
        assert summary.median_total == pytest.approx((feasible.total + cheaper_infeasible.total) / 2)

    def test_summary_without_feasible_runs(self, case_a):
        """Test that the cheapest run is reported when none is feasible."""
        first = result_for(case_a, seed=0, scale_h=0.8)
        second = result_for(case_a, seed=1, scale_h=0.7)
        assert ReplicationSummary((first, second)).best is second

    def test_result_frame(self, case_a):
        """Test the published-table layout."""
        frame = result_frame([result_for(case_a)])
        assert list(frame.columns) == [
            "seed", "b", "h", "bars", "concrete", "shuttering", "reinforcement", "total", "feasible", "steps_used",
        ]
        assert frame.loc[0, "bars"] == "3 x #6"
        assert frame.loc[0, "total"] == pytest.approx(53.2507)


class TestComparison:
    """Tests for published-versus-obtained comparisons."""

    def test_published_section_is_within_target(self, case_a):
        """Test that re-obtaining the published section meets the target."""
        comparison = Comparison(case_a, ReplicationSummary((result_for(case_a),)))
        assert comparison.within_target
        assert comparison.relative_error == pytest.approx(1.43e-5, abs=1e-7)
        row = comparison.row()
        assert row["scenario"] == "table2/optimizer1/A"
        assert row["obtained_design"] == "3 x #6"
        assert row["oracle_total"] is None

    def test_dearer_section_misses_target(self, case_a):
        """Test that a 10% taller design misses the target."""
        comparison = Comparison(case_a, ReplicationSummary((result_for(case_a, scale_h=1.1),)))
        assert not comparison.within_target
        assert not comparison_frame([comparison]).loc[0, "within_target"]


class TestReports:
    """Tests for key = value reports."""

    def test_report_entries(self, case_a):
        """Test stable keys for the best run and each seed."""
        summary = ReplicationSummary((result_for(case_a, seed=3), result_for(case_a, seed=5, scale_h=1.1)))
        entries = report_entries(summary, label="case-a")
        assert entries["label"] == "case-a"
        assert entries["runs"] == 2
        assert entries["seeds"] == "3,5"
        assert entries["best.seed"] == 3
        assert entries["best.bar"] == "#6"
        assert entries["best.total"] == "53.250662"
        assert entries["seed.5.feasible"] == "true"
        assert "seed.3.wall_time" in entries

    def test_write_and_read(self, case_a, tmp_path):
        """Test that the report file reads back as strings."""
        entries = report_entries(ReplicationSummary((result_for(case_a),)))
        path = write_report(entries, tmp_path / "reports" / "run.txt")
        read = read_report(path)
        assert list(read) == list(entries)
        assert read == {key: str(value) for key, value in entries.items()}
        assert path.read_text().splitlines()[0] == "label = "


def test_reproduce_short_runs():
    """Test that reproduce returns one comparison per scenario, with a shared oracle bound."""
    comparisons = reproduce(
        seeds=[0],
        only="table2",
        t_max=3,
        with_oracle=True,
        oracle_grid=GridSpec(b_step=0.1, h_step=0.05),
    )
    assert [c.design.name for c in comparisons] == [d.name for d in published_designs("table2")]
    for comparison in comparisons:
        assert len(comparison.summary.results) == 1
        assert comparison.summary.best.steps_used <= 3
        assert comparison.oracle_total is not None
    # both variants of a cost case share the bound
    assert comparisons[0].oracle_total == comparisons[3].oracle_total



def test_reproduce_uses_config_swarm_settings(case_a):
    """Test that a RunConfig sets the swarm of every scenario but not its penalty schedule."""
    config = RunConfig(swarm_size=6, t_max=25, penalty_form="sum", init_retry_budget=500)
    specs = []

    def record(spec, seeds):
        specs.append(spec)
        return ReplicationSummary((result_for(case_a),))

    with patch("frp_beam_designer.experiments.run_replications", side_effect=record):
        reproduce(seeds=[0], only="table3", config=config)

    assert [s.variant for s in specs] == [d.variant for d in published_designs("table3")]
    for spec, design in zip(specs, published_designs("table3"), strict=True):
        assert spec.swarm.swarm_size == 6
        assert spec.swarm.t_max == 25
        assert spec.swarm.init_retry_budget == 500
        assert spec.penalty_form == "sum"
        assert spec.problem.limits.h_max == design.h_max
        if design.penalty is not None:
            assert spec.penalty == design.penalty
    # each optimizer keeps its own inertia schedule
    assert specs[0].swarm.inertia != specs[-1].swarm.inertia

@pytest.mark.slow
def test_reproduce_published_tables():
    """Test that the full-budget runs meet every published target."""
    comparisons = reproduce()
    failed = [c.row() for c in comparisons if not c.within_target]
    assert failed == []
