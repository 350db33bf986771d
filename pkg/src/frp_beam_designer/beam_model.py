"""Domain types for FRP bars, materials, loads, limits and candidate beam sections.

Units follow the ACI 440.1R-06 flexural procedure: lengths in m, bar diameters and
crack widths in mm, stresses and moduli in MPa, line loads in kN/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING

import pandas as pd

if TYPE_CHECKING:
    from collections.abc import Iterator

COST_CASES = ("A", "B", "C")
CATALOG_VARIANTS = ("as-printed", "reconciled")
EXPOSURE_CRACK_LIMITS_MM = {"interior": 0.7, "exterior": 0.5}

CATALOG_COLUMNS = (
    "designation",
    "diameter_mm",
    "f_fu_star_MPa",
    "cost_case_A",
    "cost_case_B",
    "cost_case_C",
)

# designation, diameter [mm], f_fu* [MPa], bar cost for cases A, B, C
BAR_TABLE: tuple[tuple[str, float, float, float, float, float], ...] = (
    ("#2", 6.35, 825.0, 0.498361392, 0.58630752, 0.274098766),
    ("#3", 9.53, 760.0, 1.099572057, 0.514049937, 0.76970044),
    ("#4", 12.70, 690.0, 1.543445568, 1.815818315, 0.848895062),
    ("#5", 15.88, 655.0, 2.328630417, 2.739565196, 1.280746729),
    ("#6", 19.05, 620.0, 3.285252527, 3.285252527, 1.80688889),
    ("#7", 22.23, 586.0, 4.419347369, 5.199232198, 2.430641053),
    ("#8", 25.40, 550.0, 5.72378227, 6.733861494, 3.148080249),
    ("#9", 28.65, 517.0, 7.241397324, 8.519290969, 3.982768528),
)

# Case B price of #6 implied by the published 3 x #6 reinforcement cost (11.5950 / 3).
RECONCILED_PRICES: dict[tuple[str, str], float] = {("#6", "B"): 3.8650}

COST_CASE_RATES: dict[str, tuple[float, float]] = {
    "A": (100.0, 25.0),
    "B": (100.0, 2.95),
    "C": (100.0, 35.0),
}


class InvalidInputError(ValueError):
    """Raised when a domain value violates its invariants."""

    pass


class SectionGeometryError(ValueError):
    """Raised when a section's derived geometry is not computable."""

    pass


class NonPositiveEffectiveDepthError(SectionGeometryError):
    """Raised when cover plus half a bar diameter consumes the whole height."""

    pass


class NegativeSpacingError(SectionGeometryError):
    """Raised when the bars' centre-to-centre spacing comes out negative."""

    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidInputError(message)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class BarSpec:
    """One FRP bar size with its guaranteed strength and unit price.

    Attributes:
        designation: Bar label, e.g. ``"#6"``
        phi_b: Nominal diameter [mm]
        f_fu_star: Guaranteed tensile strength [MPa]
        c3: Cost per bar for the active cost case
        eps_fu_star: Guaranteed rupture strain, when the manufacturer supplies it
    """

    designation: str
    phi_b: float
    f_fu_star: float
    c3: float = 0.0
    eps_fu_star: float | None = None

    def __post_init__(self):
        _require(_finite(self.phi_b, self.f_fu_star, self.c3), f"Non-finite bar data: {self}")
        _require(self.phi_b > 0, f"Bar diameter must be positive: {self.phi_b}")
        _require(self.f_fu_star > 0, f"Guaranteed strength must be positive: {self.f_fu_star}")
        _require(self.c3 >= 0, f"Bar cost must be non-negative: {self.c3}")
        if self.eps_fu_star is not None:
            _require(self.eps_fu_star > 0, f"Rupture strain must be positive: {self.eps_fu_star}")


@dataclass(frozen=True)
class BarCatalog:
    """Bar sizes available to a design, ascending by diameter."""

    bars: tuple[BarSpec, ...]

    def __post_init__(self):
        _require(len(self.bars) > 0, "Bar catalog must not be empty")
        for smaller, larger in zip(self.bars, self.bars[1:], strict=False):
            _require(
                larger.phi_b > smaller.phi_b,
                f"Catalog diameters must strictly increase: {smaller.designation} -> {larger.designation}",
            )
            _require(
                larger.f_fu_star <= smaller.f_fu_star,
                f"Guaranteed strength must not increase with diameter: {smaller.designation} -> {larger.designation}",
            )

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self) -> Iterator[BarSpec]:
        return iter(self.bars)

    def __getitem__(self, index: int) -> BarSpec:
        return self.bars[index]

    @property
    def smallest(self) -> BarSpec:
        return self.bars[0]

    def by_designation(self, designation: str) -> BarSpec:
        """Look up a bar by its label (``"#6"`` or ``"6"``)."""
        wanted = designation if designation.startswith("#") else f"#{designation}"
        for bar in self.bars:
            if bar.designation == wanted:
                return bar
        available = ", ".join(bar.designation for bar in self.bars)
        raise InvalidInputError(f"Unknown bar {designation!r}; catalog has {available}")

    def index_of(self, designation: str) -> int:
        return self.bars.index(self.by_designation(designation))


@dataclass(frozen=True)
class Concrete:
    f_c: float = 30.0
    E_c: float = 26016.8
    eps_cu: float = 0.003
    gamma_c: float = 24.0

    def __post_init__(self):
        _require(_finite(self.f_c, self.E_c, self.eps_cu, self.gamma_c), f"Non-finite concrete data: {self}")
        _require(min(self.f_c, self.E_c, self.gamma_c) > 0, f"Concrete properties must be positive: {self}")
        _require(0 < self.eps_cu < 0.01, f"Ultimate concrete strain out of range: {self.eps_cu}")


@dataclass(frozen=True)
class Frp:
    E_f: float = 44800.0
    C_E: float = 0.8
    k_b: float = 1.4
    creep_limit_factor: float = 0.20

    def __post_init__(self):
        _require(_finite(self.E_f, self.C_E, self.k_b, self.creep_limit_factor), f"Non-finite FRP data: {self}")
        _require(self.E_f > 0, f"FRP modulus must be positive: {self.E_f}")
        _require(0 < self.C_E <= 1, f"Environmental reduction factor must be in (0, 1]: {self.C_E}")
        _require(self.k_b > 0, f"Bond coefficient must be positive: {self.k_b}")
        _require(self.creep_limit_factor > 0, f"Creep limit factor must be positive: {self.creep_limit_factor}")


@dataclass(frozen=True)
class Loading:
    L: float = 5.0
    w_SDL: float = 8.0
    w_LL: float = 7.0
    sustained_fraction: float = 0.2
    xi: float = 2.0

    def __post_init__(self):
        _require(_finite(self.L, self.w_SDL, self.w_LL, self.sustained_fraction, self.xi), f"Non-finite loading: {self}")
        _require(self.L > 0, f"Span must be positive: {self.L}")
        _require(self.w_SDL >= 0 and self.w_LL >= 0, f"Loads must be non-negative: {self}")
        _require(0 <= self.sustained_fraction <= 1, f"Sustained fraction must be in [0, 1]: {self.sustained_fraction}")
        _require(self.xi >= 0, f"Time factor must be non-negative: {self.xi}")


@dataclass(frozen=True)
class ClearanceRule:
    """A clearance of ``max(factor * phi_b, floor_mm)`` millimetres."""

    factor: float
    floor_mm: float

    def __post_init__(self):
        _require(self.factor >= 0 and self.floor_mm >= 0, f"Clearance rule must be non-negative: {self}")

    def resolve(self, phi_b: float) -> float:
        return max(self.factor * phi_b, self.floor_mm)


@dataclass(frozen=True)
class Limits:
    """Geometric bounds and serviceability limits.

    ``delta_LT_max`` may be left unset, in which case the long-term deflection limit is
    ``L / deflection_span_ratio``.
    """

    b_min: float = 0.20
    b_max: float = 1.00
    h_min: float = 0.20
    h_max: float = 2.00
    w_max: float = 0.7
    delta_LT_max: float | None = None
    deflection_span_ratio: float = 240.0
    gap_rule: ClearanceRule = field(default_factory=lambda: ClearanceRule(1.4, 30.0))
    cover_rule: ClearanceRule = field(default_factory=lambda: ClearanceRule(2.5, 40.0))

    def __post_init__(self):
        _require(_finite(self.b_min, self.b_max, self.h_min, self.h_max, self.w_max), f"Non-finite limits: {self}")
        _require(0 < self.b_min <= self.b_max, f"Width bounds invalid: [{self.b_min}, {self.b_max}]")
        _require(0 < self.h_min <= self.h_max, f"Height bounds invalid: [{self.h_min}, {self.h_max}]")
        _require(self.w_max > 0, f"Crack width limit must be positive: {self.w_max}")
        _require(self.deflection_span_ratio > 0, f"Span ratio must be positive: {self.deflection_span_ratio}")
        if self.delta_LT_max is not None:
            _require(self.delta_LT_max > 0, f"Deflection limit must be positive: {self.delta_LT_max}")

    @classmethod
    def for_exposure(cls, exposure: str, **overrides) -> Limits:
        """Limits whose crack-width cap follows the exposure class (interior 0.7 mm, exterior 0.5 mm)."""
        if exposure not in EXPOSURE_CRACK_LIMITS_MM:
            raise InvalidInputError(
                f"Unknown exposure {exposure!r}; expected one of {sorted(EXPOSURE_CRACK_LIMITS_MM)}"
            )
        return cls(w_max=EXPOSURE_CRACK_LIMITS_MM[exposure], **overrides)

    def deflection_limit(self, span: float) -> float:
        if self.delta_LT_max is not None:
            return self.delta_LT_max
        return span / self.deflection_span_ratio


@dataclass(frozen=True)
class CostRates:
    c1: float = 100.0
    c2: float = 25.0

    def __post_init__(self):
        _require(_finite(self.c1, self.c2) and self.c1 >= 0 and self.c2 >= 0, f"Cost rates must be non-negative: {self}")

    @classmethod
    def for_case(cls, case: str) -> CostRates:
        if case not in COST_CASE_RATES:
            raise InvalidInputError(f"Unknown cost case {case!r}; expected one of {COST_CASES}")
        c1, c2 = COST_CASE_RATES[case]
        return cls(c1=c1, c2=c2)


@dataclass(frozen=True)
class CodeOptions:
    """Tunable constants of the design procedure."""

    min_ratio_coefficient: float = 0.4070
    min_ratio_floor: float = 2.256
    cap_tension_stiffening: bool = True


@dataclass(frozen=True)
class Section:
    """A candidate design: ``n`` bars of one size in a single layer of a b x h rectangle."""

    b: float
    h: float
    n: int
    bar: BarSpec

    def __post_init__(self):
        _require(_finite(self.b, self.h), f"Non-finite section dimensions: b={self.b}, h={self.h}")
        _require(self.b >= 0 and self.h >= 0, f"Section dimensions must be non-negative: b={self.b}, h={self.h}")
        _require(isinstance(self.n, int) and self.n >= 1, f"Number of bars must be a positive integer: {self.n}")

    def label(self) -> str:
        return f"{self.n} x {self.bar.designation}"


@dataclass(frozen=True)
class DesignProblem:
    concrete: Concrete = field(default_factory=Concrete)
    frp: Frp = field(default_factory=Frp)
    loading: Loading = field(default_factory=Loading)
    limits: Limits = field(default_factory=Limits)
    catalog: BarCatalog = field(default_factory=lambda: load_catalog("A"))
    cost_rates: CostRates = field(default_factory=CostRates)
    code: CodeOptions = field(default_factory=CodeOptions)

    def with_limits(self, **changes) -> DesignProblem:
        return replace(self, limits=replace(self.limits, **changes))


def read_bar_table(path: str | Path) -> tuple[tuple, ...]:
    """
    Read a bar table from CSV.

    Args:
        path: CSV with columns designation, diameter_mm, f_fu_star_MPa, cost_case_A,
            cost_case_B, cost_case_C and, optionally, eps_fu_star

    Returns:
        Rows shaped like ``BAR_TABLE``, with a trailing rupture strain (or None)

    Raises:
        FileNotFoundError: If the file doesn't exist
        InvalidInputError: If required columns are missing
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Bar catalog not found: {path}")

    frame = pd.read_csv(path, dtype={"designation": str})
    missing = [column for column in CATALOG_COLUMNS if column not in frame.columns]
    if missing:
        raise InvalidInputError(f"Bar catalog {path} is missing columns: {', '.join(missing)}")

    has_strain = "eps_fu_star" in frame.columns
    rows = []
    for record in frame.sort_values("diameter_mm").to_dict("records"):
        strain = record["eps_fu_star"] if has_strain and pd.notna(record["eps_fu_star"]) else None
        rows.append(
            (
                str(record["designation"]).strip(),
                float(record["diameter_mm"]),
                float(record["f_fu_star_MPa"]),
                float(record["cost_case_A"]),
                float(record["cost_case_B"]),
                float(record["cost_case_C"]),
                None if strain is None else float(strain),
            )
        )
    return tuple(rows)


def load_catalog(
    case: str = "A",
    variant: str = "as-printed",
    path: str | Path | None = None,
) -> BarCatalog:
    """
    Build the bar catalog priced for one cost case.

    Args:
        case: Cost case whose bar prices become each bar's ``c3`` ("A", "B" or "C")
        variant: "as-printed" keeps the published prices; "reconciled" replaces the
            Case B price of #6 with the value implied by the published Case B designs
        path: Optional CSV to read instead of the embedded table

    Returns:
        BarCatalog ascending by diameter

    Example:
        >>> catalog = load_catalog("B", variant="reconciled")
        >>> catalog.by_designation("#6").c3
        3.865
    """
    if case not in COST_CASES:
        raise InvalidInputError(f"Unknown cost case {case!r}; expected one of {COST_CASES}")
    if variant not in CATALOG_VARIANTS:
        raise InvalidInputError(f"Unknown catalog variant {variant!r}; expected one of {CATALOG_VARIANTS}")

    rows = read_bar_table(path) if path is not None else tuple((*row, None) for row in BAR_TABLE)
    price_column = 3 + COST_CASES.index(case)

    bars = []
    for row in rows:
        designation = row[0]
        price = row[price_column]
        if variant == "reconciled":
            price = RECONCILED_PRICES.get((designation, case), price)
        bars.append(
            BarSpec(
                designation=designation,
                phi_b=row[1],
                f_fu_star=row[2],
                c3=price,
                eps_fu_star=row[6],
            )
        )
    return BarCatalog(tuple(bars))


def default_problem(
    case: str = "A",
    catalog_variant: str = "as-printed",
    h_max: float | None = None,
) -> DesignProblem:
    """The worked example: a 5 m simply supported GFRP-reinforced beam, priced for ``case``."""
    limits = Limits() if h_max is None else Limits(h_max=h_max)
    return DesignProblem(
        limits=limits,
        catalog=load_catalog(case, catalog_variant),
        cost_rates=CostRates.for_case(case),
    )


def bar_area(section: Section) -> float:
    """Total reinforcement area A_f [m²]."""
    diameter = section.bar.phi_b / 1000.0
    return section.n * math.pi * diameter**2 / 4.0


def cover_and_depth(section: Section, limits: Limits | None = None) -> tuple[float, float]:
    """
    Distance from the tension face to the bar centreline, and the effective depth.

    Cover is measured to the bar surface, so ``d_c = cover + phi_b / 2``.

    Args:
        section: Candidate section
        limits: Source of the cover rule (defaults to ``max(2.5 * phi_b, 40 mm)``)

    Returns:
        Tuple of (d_c, d) in m

    Raises:
        NonPositiveEffectiveDepthError: If ``d <= 0``
    """
    rule = (limits or Limits()).cover_rule
    phi_b = section.bar.phi_b
    d_c = round((rule.resolve(phi_b) + phi_b / 2.0) / 1000.0, 9)
    d = section.h - d_c
    if d <= 0:
        raise NonPositiveEffectiveDepthError(
            f"Effective depth {d:.6f} m is not positive for h={section.h} m with {section.bar.designation} bars"
        )
    return d_c, d


def min_width(n: int, bar: BarSpec, limits: Limits | None = None) -> float:
    """
    Narrowest width that fits ``n`` bars in one layer with the cover and gap rules.

    The result is resolved to the nanometre so exact fits compare equal.

    Example:
        >>> min_width(3, load_catalog().by_designation("#6"))
        0.2124
    """
    if n < 2:
        raise InvalidInputError(f"A single layer needs at least two bars, got {n}")
    limits = limits or Limits()
    phi_b = bar.phi_b
    width_mm = (
        2.0 * limits.cover_rule.resolve(phi_b)
        + n * phi_b
        + (n - 1) * limits.gap_rule.resolve(phi_b)
    )
    return round(width_mm / 1000.0, 9)


def max_bars(bar: BarSpec, width: float, limits: Limits | None = None) -> int:
    """Largest ``n`` with ``min_width(n, bar) <= width``; 1 when not even two bars fit."""
    limits = limits or Limits()
    phi_b = bar.phi_b
    gap = limits.gap_rule.resolve(phi_b)
    available = width * 1000.0 - 2.0 * limits.cover_rule.resolve(phi_b) + gap
    n = max(1, math.floor(available / (phi_b + gap)))
    # floor() can land one either side of an exact fit
    while n >= 2 and min_width(n, bar, limits) > width:
        n -= 1
    while min_width(n + 1, bar, limits) <= width:
        n += 1
    return n


def bar_spacing(section: Section, limits: Limits | None = None) -> float:
    """
    Centre-to-centre spacing ``s = (b - 2 d_c) / (n - 1)`` [m].

    Raises:
        InvalidInputError: If the section has fewer than two bars
        NonPositiveEffectiveDepthError: If the effective depth is not positive
        NegativeSpacingError: If the bars cannot be placed inside the width
    """
    if section.n < 2:
        raise InvalidInputError(f"Bar spacing needs at least two bars, got {section.n}")
    d_c, _ = cover_and_depth(section, limits)
    spacing = (section.b - 2.0 * d_c) / (section.n - 1)
    if spacing < 0:
        raise NegativeSpacingError(
            f"Spacing {spacing:.6f} m is negative: b={section.b} m is narrower than 2 d_c={2 * d_c:.6f} m"
        )
    return spacing


def self_weight(section: Section, concrete: Concrete) -> float:
    """Self-weight line load ``gamma_c * b * h`` [kN/m]."""
    return concrete.gamma_c * section.b * section.h


def initial_depth_estimate(span: float, span_to_depth: float = 10.0) -> float:
    """First-guess height from a span/depth ratio; FRP beams warrant deeper sections than steel."""
    if span <= 0 or span_to_depth <= 0:
        raise InvalidInputError(f"Span and ratio must be positive: {span}, {span_to_depth}")
    return span / span_to_depth
