"""Tests for the config module."""

from pathlib import Path

import pytest

from frp_beam_designer.config import ConfigError, RunConfig, read_config, write_config
from frp_beam_designer.constraint_handling import PenaltySchedule
from frp_beam_designer.pso_core import InertiaSchedule

EXAMPLE_INI = Path(__file__).parent.parent / "config" / "example.ini"


def test_defaults_match_worked_example():
    """Test that the default config builds the worked-example problem."""
    config = RunConfig()
    problem = config.build_problem()
    assert problem.loading.L == 5.0
    assert problem.cost_rates.c2 == 25.0
    assert problem.catalog.by_designation("#6").c3 == pytest.approx(3.285252527)
    assert config.seeds == (0, 1, 2, 3, 4)


def test_example_ini_equals_defaults():
    """Test that the shipped example file spells out the defaults."""
    assert read_config(EXAMPLE_INI) == RunConfig()


def test_round_trip(tmp_path):
    """Test that writing and reading a config gives an equal config."""
    config = RunConfig(
        case="custom",
        c1=120.0,
        c2=10.5,
        bar_prices="C",
        optimizer="optimizer2",
        swarm_size=20,
        t_max=500,
        inertia=InertiaSchedule.constant(0.72),
        stagnation_window=None,
        maximizer=True,
        penalty=PenaltySchedule.constant(1e8),
        penalty_form="sum",
        seeds=(7, 8),
        output_dir=tmp_path / "out",
        record_trace=True,
    ).with_overrides(h_max=0.35, delta_LT_max=0.02)
    path = write_config(config, tmp_path / "nested" / "run.ini")
    assert read_config(path) == config


def test_partial_file(tmp_path):
    """Test that missing keys fall back to defaults."""
    path = tmp_path / "run.ini"
    path.write_text("[problem]\ncase = C\n\n[limits]\nh_max = 0.35\nexposure = exterior\n\n[run]\nseeds = 3 4\n")
    config = read_config(path)
    assert config.case == "C"
    assert config.limits.h_max == 0.35
    assert config.limits.w_max == 0.5
    assert config.seeds == (3, 4)
    assert config.t_max == 10000
    assert config.build_problem().cost_rates.c2 == 35.0


def test_custom_case_uses_own_rates():
    """Test that a custom case prices with c1, c2 and the chosen bar column."""
    config = RunConfig(case="custom", c1=90.0, c2=5.0, bar_prices="B", catalog_variant="reconciled")
    problem = config.build_problem()
    assert (problem.cost_rates.c1, problem.cost_rates.c2) == (90.0, 5.0)
    assert problem.catalog.by_designation("#6").c3 == pytest.approx(3.865)


def test_swarm_config_follows_optimizer():
    """Test that the inertia defaults to the optimizer's own schedule."""
    assert RunConfig().swarm_config().inertia.kind == "sigmoid"
    second = RunConfig(optimizer="optimizer2", t_max=50)
    assert second.swarm_config(seed=9).inertia.describe() == "constant:0.8"
    assert second.swarm_config(seed=9).rng_seed == 9
    assert second.swarm_config().t_max == 50
    assert second.optimizer_spec().variant == "optimizer2"


def test_with_overrides():
    """Test that None values are ignored and limit fields reach the limits."""
    config = RunConfig().with_overrides(t_max=100, swarm_size=None, h_max=0.35, w_max=None)
    assert config.t_max == 100
    assert config.swarm_size == 35
    assert config.limits.h_max == 0.35
    assert config.limits.w_max == 0.7


@pytest.mark.parametrize(
    "kwargs,message",
    [
        ({"case": "D"}, "Unknown cost case"),
        ({"case": "custom", "c1": 100.0}, "needs both c1 and c2"),
        ({"bar_prices": "X"}, "bar_prices"),
        ({"catalog_variant": "adjusted"}, "catalog variant"),
        ({"optimizer": "optimizer3"}, "Unknown optimizer"),
        ({"penalty_form": "cubic"}, "penalty form"),
        ({"seeds": ()}, "At least one seed"),
        ({"t_max": 0}, "t_max"),
        ({"catalog_path": Path("/nonexistent/bars.csv")}, "not found"),
    ],
)
def test_invalid_values(kwargs, message):
    """Test that invalid settings raise ConfigError."""
    with pytest.raises(ConfigError, match=message):
        RunConfig(**kwargs)


def test_invalid_limit_override():
    """Test that inconsistent limit overrides raise ConfigError."""
    with pytest.raises(ConfigError, match="Height bounds"):
        RunConfig().with_overrides(h_max=0.1)


class TestReadErrors:
    """Tests for unreadable configuration files."""

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigError."""
        with pytest.raises(ConfigError, match="not found"):
            read_config(tmp_path / "absent.ini")

    def test_unknown_section(self, tmp_path):
        """Test that unknown sections are rejected."""
        path = tmp_path / "run.ini"
        path.write_text("[optimiser]\nt_max = 5\n")
        with pytest.raises(ConfigError, match=r"Unknown section \[optimiser\]"):
            read_config(path)

    def test_bad_number(self, tmp_path):
        """Test that unparsable numbers are reported with the file name."""
        path = tmp_path / "run.ini"
        path.write_text("[swarm]\nt_max = many\n")
        with pytest.raises(ConfigError, match="Invalid value"):
            read_config(path)

    def test_bad_exposure(self, tmp_path):
        """Test that an unknown exposure class is rejected."""
        path = tmp_path / "run.ini"
        path.write_text("[limits]\nexposure = marine\n")
        with pytest.raises(ConfigError, match="Unknown exposure"):
            read_config(path)

    def test_invalid_domain_value(self, tmp_path):
        """Test that values breaking a domain invariant are reported."""
        path = tmp_path / "run.ini"
        path.write_text("[problem]\nC_E = 1.5\n")
        with pytest.raises(ConfigError, match="Invalid value"):
            read_config(path)

    def test_malformed_ini(self, tmp_path):
        """Test that text outside any section is rejected."""
        path = tmp_path / "run.ini"
        path.write_text("t_max = 5\n")
        with pytest.raises(ConfigError, match="Cannot parse"):
            read_config(path)
