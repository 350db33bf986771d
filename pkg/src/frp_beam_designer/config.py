"""Run configuration: named cost cases, INI file reading and writing, and CLI overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .beam_model import (
    CATALOG_VARIANTS,
    COST_CASES,
    EXPOSURE_CRACK_LIMITS_MM,
    ClearanceRule,
    CodeOptions,
    Concrete,
    CostRates,
    DesignProblem,
    Frp,
    InvalidInputError,
    Limits,
    Loading,
    load_catalog,
)
from .constraint_handling import PENALTY_FORMS, PenaltySchedule
from .optimizers import VARIANTS, OptimizerSpec, default_swarm_config
from .pso_core import InertiaSchedule, SwarmConfig

CUSTOM_CASE = "custom"
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class ConfigError(Exception):
    """Raised when a configuration file or value cannot be used."""

    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run needs, with defaults equal to the worked example.

    ``case`` selects both the rates (c1, c2) and the bar-price column. With
    ``case = "custom"`` the rates come from ``c1``/``c2`` and the prices from
    ``bar_prices``. ``inertia`` of None means the chosen optimizer's own schedule.
    """

    case: str = "A"
    catalog_variant: str = "as-printed"
    catalog_path: Path | None = None
    bar_prices: str = "A"
    c1: float | None = None
    c2: float | None = None
    concrete: Concrete = field(default_factory=Concrete)
    frp: Frp = field(default_factory=Frp)
    loading: Loading = field(default_factory=Loading)
    limits: Limits = field(default_factory=Limits)
    code: CodeOptions = field(default_factory=CodeOptions)
    optimizer: str = "optimizer1"
    swarm_size: int = 35
    t_max: int = 10000
    iw: float = 1.5
    sw: float = 1.5
    inertia: InertiaSchedule | None = None
    vmax_fraction: float = 0.5
    stagnation_window: int | None = 500
    stagnation_tolerance: float = 1e-10
    maximizer: bool = False
    init_retry_budget: int = 100_000
    penalty: PenaltySchedule = field(default_factory=PenaltySchedule)
    penalty_form: str = "squared"
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    output_dir: Path | None = None
    record_trace: bool = False

    def __post_init__(self):
        if self.case not in (*COST_CASES, CUSTOM_CASE):
            raise ConfigError(f"Unknown cost case {self.case!r}; expected one of {(*COST_CASES, CUSTOM_CASE)}")
        if self.case == CUSTOM_CASE and (self.c1 is None or self.c2 is None):
            raise ConfigError("A custom cost case needs both c1 and c2")
        if self.bar_prices not in COST_CASES:
            raise ConfigError(f"bar_prices must be one of {COST_CASES}, got {self.bar_prices!r}")
        if self.catalog_variant not in CATALOG_VARIANTS:
            raise ConfigError(f"Unknown catalog variant {self.catalog_variant!r}; expected one of {CATALOG_VARIANTS}")
        if self.optimizer not in VARIANTS:
            raise ConfigError(f"Unknown optimizer {self.optimizer!r}; expected one of {VARIANTS}")
        if self.penalty_form not in PENALTY_FORMS:
            raise ConfigError(f"Unknown penalty form {self.penalty_form!r}; expected one of {PENALTY_FORMS}")
        if not self.seeds:
            raise ConfigError("At least one seed is required")
        if self.catalog_path is not None and not Path(self.catalog_path).exists():
            raise ConfigError(f"Bar catalog not found: {self.catalog_path}")
        # fail at load time rather than mid-run
        try:
            self.swarm_config()
        except InvalidInputError as e:
            raise ConfigError(str(e)) from e

    @property
    def price_case(self) -> str:
        return self.bar_prices if self.case == CUSTOM_CASE else self.case

    def cost_rates(self) -> CostRates:
        if self.case == CUSTOM_CASE:
            return CostRates(self.c1, self.c2)
        return CostRates.for_case(self.case)

    def build_problem(self) -> DesignProblem:
        return DesignProblem(
            concrete=self.concrete,
            frp=self.frp,
            loading=self.loading,
            limits=self.limits,
            catalog=load_catalog(self.price_case, self.catalog_variant, self.catalog_path),
            cost_rates=self.cost_rates(),
            code=self.code,
        )

    def swarm_config(self, seed: int | None = None) -> SwarmConfig:
        overrides = {
            "swarm_size": self.swarm_size,
            "t_max": self.t_max,
            "iw": self.iw,
            "sw": self.sw,
            "vmax_fraction": self.vmax_fraction,
            "stagnation_window": self.stagnation_window,
            "stagnation_tolerance": self.stagnation_tolerance,
            "maximizer": self.maximizer,
            "record_trace": self.record_trace,
            "init_retry_budget": self.init_retry_budget,
            "rng_seed": self.seeds[0] if seed is None else seed,
        }
        if self.inertia is not None:
            overrides["inertia"] = self.inertia
        return default_swarm_config(self.optimizer, **overrides)

    def optimizer_spec(self) -> OptimizerSpec:
        return OptimizerSpec(
            variant=self.optimizer,
            problem=self.build_problem(),
            swarm=self.swarm_config(),
            penalty=self.penalty,
            penalty_form=self.penalty_form,
        )

    def with_overrides(self, **changes) -> RunConfig:
        """
        Copy with selected fields replaced; None values are ignored.

        Limit fields (``b_min`` .. ``w_max``, ``h_max`` etc.) are routed to ``limits``.
        """
        limit_names = {f.name for f in fields(Limits)}
        limit_changes = {k: changes.pop(k) for k in list(changes) if k in limit_names}
        limit_changes = {k: v for k, v in limit_changes.items() if v is not None}
        changes = {k: v for k, v in changes.items() if v is not None}
        try:
            limits = replace(self.limits, **limit_changes) if limit_changes else self.limits
        except InvalidInputError as e:
            raise ConfigError(str(e)) from e
        return replace(self, limits=limits, **changes)


def _parse_optional_float(text: str) -> float | None:
    text = text.strip()
    return None if text.lower() in ("", "none") else float(text)


def _parse_optional_int(text: str) -> int | None:
    text = text.strip()
    return None if text.lower() in ("", "none") else int(text)


def _parse_seeds(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.replace(",", " ").split())


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_config(path: str | Path) -> RunConfig:
    """
    Read a RunConfig from an INI file; every key is optional.

    Args:
        path: INI file with any of the sections [problem], [limits], [swarm], [penalty], [run]

    Returns:
        RunConfig with file values over the defaults

    Raises:
        ConfigError: If the file is missing, unparsable or holds invalid values
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")

    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse {path}: {e}") from e

    for section in parser.sections():
        if section not in ("problem", "limits", "swarm", "penalty", "run"):
            raise ConfigError(f"Unknown section [{section}] in {path}")

    try:
        return _from_parser(parser)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e
    except (ValueError, configparser.Error) as e:
        raise ConfigError(f"Invalid value in {path}: {e}") from e


def _from_parser(parser: configparser.ConfigParser) -> RunConfig:
    defaults = RunConfig()
    p = parser["problem"] if parser.has_section("problem") else {}
    lim = parser["limits"] if parser.has_section("limits") else {}
    sw = parser["swarm"] if parser.has_section("swarm") else {}
    pen = parser["penalty"] if parser.has_section("penalty") else {}
    run = parser["run"] if parser.has_section("run") else {}

    def number(section, key, default, cast=float):
        return cast(section[key]) if key in section else default

    def flag(section, key, default):
        return section.getboolean(key) if key in section else default

    concrete = Concrete(
        f_c=number(p, "f_c", defaults.concrete.f_c),
        E_c=number(p, "E_c", defaults.concrete.E_c),
        eps_cu=number(p, "eps_cu", defaults.concrete.eps_cu),
        gamma_c=number(p, "gamma_c", defaults.concrete.gamma_c),
    )
    frp = Frp(
        E_f=number(p, "E_f", defaults.frp.E_f),
        C_E=number(p, "C_E", defaults.frp.C_E),
        k_b=number(p, "k_b", defaults.frp.k_b),
        creep_limit_factor=number(p, "creep_limit_factor", defaults.frp.creep_limit_factor),
    )
    loading = Loading(
        L=number(p, "L", defaults.loading.L),
        w_SDL=number(p, "w_SDL", defaults.loading.w_SDL),
        w_LL=number(p, "w_LL", defaults.loading.w_LL),
        sustained_fraction=number(p, "sustained_fraction", defaults.loading.sustained_fraction),
        xi=number(p, "xi", defaults.loading.xi),
    )
    code = CodeOptions(
        min_ratio_coefficient=number(p, "min_ratio_coefficient", defaults.code.min_ratio_coefficient),
        min_ratio_floor=number(p, "min_ratio_floor", defaults.code.min_ratio_floor),
        cap_tension_stiffening=flag(p, "cap_tension_stiffening", defaults.code.cap_tension_stiffening),
    )

    base = defaults.limits
    w_max = base.w_max
    if "exposure" in lim:
        exposure = lim["exposure"].strip()
        if exposure not in EXPOSURE_CRACK_LIMITS_MM:
            raise ConfigError(f"Unknown exposure {exposure!r}; expected one of {sorted(EXPOSURE_CRACK_LIMITS_MM)}")
        w_max = EXPOSURE_CRACK_LIMITS_MM[exposure]
    limits = Limits(
        b_min=number(lim, "b_min", base.b_min),
        b_max=number(lim, "b_max", base.b_max),
        h_min=number(lim, "h_min", base.h_min),
        h_max=number(lim, "h_max", base.h_max),
        w_max=number(lim, "w_max", w_max),
        delta_LT_max=_parse_optional_float(lim["delta_LT_max"]) if "delta_LT_max" in lim else base.delta_LT_max,
        deflection_span_ratio=number(lim, "deflection_span_ratio", base.deflection_span_ratio),
        gap_rule=ClearanceRule(
            number(lim, "gap_factor", base.gap_rule.factor),
            number(lim, "gap_floor_mm", base.gap_rule.floor_mm),
        ),
        cover_rule=ClearanceRule(
            number(lim, "cover_factor", base.cover_rule.factor),
            number(lim, "cover_floor_mm", base.cover_rule.floor_mm),
        ),
    )

    inertia_text = sw.get("inertia", "default").strip()
    catalog_path = p.get("catalog_path", "").strip()
    output_dir = run.get("output_dir", "").strip()

    return RunConfig(
        case=p.get("case", defaults.case).strip(),
        catalog_variant=p.get("catalog_variant", defaults.catalog_variant).strip(),
        catalog_path=Path(catalog_path) if catalog_path and catalog_path != "none" else None,
        bar_prices=p.get("bar_prices", defaults.bar_prices).strip(),
        c1=_parse_optional_float(p["c1"]) if "c1" in p else defaults.c1,
        c2=_parse_optional_float(p["c2"]) if "c2" in p else defaults.c2,
        concrete=concrete,
        frp=frp,
        loading=loading,
        limits=limits,
        code=code,
        optimizer=sw.get("optimizer", defaults.optimizer).strip(),
        swarm_size=number(sw, "swarm_size", defaults.swarm_size, int),
        t_max=number(sw, "t_max", defaults.t_max, int),
        iw=number(sw, "iw", defaults.iw),
        sw=number(sw, "sw", defaults.sw),
        inertia=None if inertia_text == "default" else InertiaSchedule.parse(inertia_text),
        vmax_fraction=number(sw, "vmax_fraction", defaults.vmax_fraction),
        stagnation_window=(
            _parse_optional_int(sw["stagnation_window"]) if "stagnation_window" in sw else defaults.stagnation_window
        ),
        stagnation_tolerance=number(sw, "stagnation_tolerance", defaults.stagnation_tolerance),
        maximizer=flag(sw, "maximizer", defaults.maximizer),
        init_retry_budget=number(sw, "init_retry_budget", defaults.init_retry_budget, int),
        penalty=PenaltySchedule.parse(pen["schedule"]) if "schedule" in pen else defaults.penalty,
        penalty_form=pen.get("form", defaults.penalty_form).strip(),
        seeds=_parse_seeds(run["seeds"]) if "seeds" in run else defaults.seeds,
        output_dir=Path(output_dir) if output_dir and output_dir != "none" else None,
        record_trace=flag(run, "trace", defaults.record_trace),
    )


def config_sections(config: RunConfig) -> dict[str, dict[str, str]]:
    """The INI sections of ``config`` as strings, every key written out."""
    limits = config.limits
    return {
        "problem": {
            "case": config.case,
            "catalog_variant": config.catalog_variant,
            "catalog_path": _format(config.catalog_path),
            "bar_prices": config.bar_prices,
            "c1": _format(config.c1),
            "c2": _format(config.c2),
            "f_c": _format(config.concrete.f_c),
            "E_c": _format(config.concrete.E_c),
            "eps_cu": _format(config.concrete.eps_cu),
            "gamma_c": _format(config.concrete.gamma_c),
            "E_f": _format(config.frp.E_f),
            "C_E": _format(config.frp.C_E),
            "k_b": _format(config.frp.k_b),
            "creep_limit_factor": _format(config.frp.creep_limit_factor),
            "L": _format(config.loading.L),
            "w_SDL": _format(config.loading.w_SDL),
            "w_LL": _format(config.loading.w_LL),
            "sustained_fraction": _format(config.loading.sustained_fraction),
            "xi": _format(config.loading.xi),
            "min_ratio_coefficient": _format(config.code.min_ratio_coefficient),
            "min_ratio_floor": _format(config.code.min_ratio_floor),
            "cap_tension_stiffening": _format(config.code.cap_tension_stiffening),
        },
        "limits": {
            "b_min": _format(limits.b_min),
            "b_max": _format(limits.b_max),
            "h_min": _format(limits.h_min),
            "h_max": _format(limits.h_max),
            "w_max": _format(limits.w_max),
            "delta_LT_max": _format(limits.delta_LT_max),
            "deflection_span_ratio": _format(limits.deflection_span_ratio),
            "gap_factor": _format(limits.gap_rule.factor),
            "gap_floor_mm": _format(limits.gap_rule.floor_mm),
            "cover_factor": _format(limits.cover_rule.factor),
            "cover_floor_mm": _format(limits.cover_rule.floor_mm),
        },
        "swarm": {
            "optimizer": config.optimizer,
            "swarm_size": _format(config.swarm_size),
            "t_max": _format(config.t_max),
            "iw": _format(config.iw),
            "sw": _format(config.sw),
            "inertia": "default" if config.inertia is None else config.inertia.describe(),
            "vmax_fraction": _format(config.vmax_fraction),
            "stagnation_window": _format(config.stagnation_window),
            "stagnation_tolerance": _format(config.stagnation_tolerance),
            "maximizer": _format(config.maximizer),
            "init_retry_budget": _format(config.init_retry_budget),
        },
        "penalty": {
            "schedule": config.penalty.describe(),
            "form": config.penalty_form,
        },
        "run": {
            "seeds": ", ".join(str(seed) for seed in config.seeds),
            "output_dir": _format(config.output_dir),
            "trace": _format(config.record_trace),
        },
    }


def write_config(config: RunConfig, path: str | Path) -> Path:
    """Write every key of ``config``; reading the file back gives an equal RunConfig."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_dict(config_sections(config))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        parser.write(f)
    return path

