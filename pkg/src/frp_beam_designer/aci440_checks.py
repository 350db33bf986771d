"""Flexural design checks for FRP-reinforced rectangular sections (ACI 440.1R-06).

Every check is a pure function of immutable inputs. ``check_all`` strings them together
and reports each constraint as a normalized violation: 0 when satisfied, otherwise the
relative amount by which the limit is exceeded.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .beam_model import (
    BarSpec,
    CodeOptions,
    Concrete,
    DesignProblem,
    Frp,
    InvalidInputError,
    Limits,
    Section,
    SectionGeometryError,
    bar_area,
    bar_spacing,
    cover_and_depth,
    min_width,
    self_weight,
)

VIOLATION_NAMES = (
    "geometry_width",
    "b_min",
    "b_max",
    "h_min",
    "h_max",
    "min_ratio",
    "strength",
    "crack_width",
    "long_term_deflection",
    "creep_rupture",
)

# Constraints that cannot be evaluated when the section geometry is degenerate.
_STRUCTURAL = ("min_ratio", "strength", "crack_width", "long_term_deflection", "creep_rupture")

PHI_UNDER_REINFORCED = 0.55
PHI_OVER_REINFORCED = 0.65

# field, unit, design stage, governing expression
REPORT_FIELDS: tuple[tuple[str, str, str, str], ...] = (
    ("A_f", "m2", "ratios", "n pi d_b^2 / 4"),
    ("d_c", "m", "geometry", "cover + d_b / 2"),
    ("d", "m", "geometry", "h - d_c"),
    ("spacing", "m", "geometry", "(b - 2 d_c) / (n - 1)"),
    ("min_width", "m", "geometry", "2 cover + n d_b + (n - 1) gap"),
    ("w_DL", "kN/m", "loads", "w_SDL + gamma_c b h"),
    ("w_u", "kN/m", "loads", "1.2 w_DL + 1.6 w_LL"),
    ("M_u", "kN.m", "loads", "w_u L^2 / 8"),
    ("M_service", "kN.m", "loads", "(w_DL + w_LL) L^2 / 8"),
    ("f_fu", "MPa", "material", "C_E f*_fu"),
    ("eps_fu", "-", "material", "C_E eps*_fu or f_fu / E_f"),
    ("beta1", "-", "ratios", "0.85 - 0.05 (f'c - 27.58) / 6.895, in [0.65, 0.85]"),
    ("rho_fb", "-", "ratios", "0.85 beta1 (f'c / f_fu) E_f eps_cu / (E_f eps_cu + f_fu)"),
    ("rho_f", "-", "ratios", "A_f / (b d)"),
    ("rho_f_min", "-", "ratios", "max(0.407 sqrt(f'c) / f_fu, 2.256 / f_fu)"),
    ("f_f_ultimate", "MPa", "strength", "sqrt((E_f eps_cu)^2 / 4 + 0.85 beta1 f'c E_f eps_cu / rho_f) - 0.5 E_f eps_cu"),
    ("M_n", "kN.m", "strength", "A_f f_fu d (1 - beta1 c_b / 2d) or A_f f_f (d - a / 2)"),
    ("phi", "-", "strength", "0.55 | 0.3 + 0.25 rho_f / rho_fb | 0.65"),
    ("phi_M_n", "kN.m", "strength", "phi M_n >= M_u"),
    ("n_f", "-", "cracking", "E_f / E_c"),
    ("k", "-", "cracking", "sqrt((rho_f n_f)^2 + 2 rho_f n_f) - rho_f n_f"),
    ("f_f", "MPa", "cracking", "M_service / (A_f d (1 - k / 3))"),
    ("crack_w", "mm", "cracking", "2 / E_f (h - kd) / (d (1 - k)) k_b f_f sqrt(d_c^2 + (s / 2)^2)"),
    ("I_g", "m4", "deflection", "b h^3 / 12"),
    ("I_cr", "m4", "deflection", "b d^3 k^3 / 3 + n_f A_f d^2 (1 - k)^2"),
    ("I_e", "m4", "deflection", "(M_cr / M_a)^3 beta_d I_g + (1 - (M_cr / M_a)^3) I_cr"),
    ("M_cr", "kN.m", "deflection", "0.62 sqrt(f'c) I_g / (h / 2)"),
    ("delta_i_total", "m", "deflection", "5 (w_DL + w_LL) L^4 / (384 E_c I_e)"),
    ("delta_i_DL", "m", "deflection", "w_DL / (w_DL + w_LL) delta_i_total"),
    ("delta_i_LL", "m", "deflection", "w_LL / (w_DL + w_LL) delta_i_total"),
    ("delta_LT", "m", "deflection", "delta_LL + 0.6 xi (delta_DL + sustained delta_LL)"),
    ("delta_LT_max", "m", "deflection", "L / 240"),
    ("M_s", "kN.m", "creep", "M_service (w_DL + sustained w_LL) / (w_DL + w_LL)"),
    ("f_fs", "MPa", "creep", "M_s / (A_f d (1 - k / 3))"),
    ("F_fs", "MPa", "creep", "0.2 f_fu"),
)


@dataclass(frozen=True)
class CheckReport:
    """Every intermediate quantity of the flexural procedure plus the violation vector.

    Quantities that cannot be computed for a degenerate section are NaN.
    """

    A_f: float
    d_c: float
    d: float
    spacing: float
    min_width: float
    w_DL: float
    w_u: float
    M_u: float
    M_service: float
    f_fu: float
    eps_fu: float
    beta1: float
    rho_fb: float
    rho_f: float
    rho_f_min: float
    f_f_ultimate: float
    M_n: float
    phi: float
    phi_M_n: float
    n_f: float
    k: float
    f_f: float
    crack_w: float
    I_g: float
    I_cr: float
    I_e: float
    M_cr: float
    delta_i_total: float
    delta_i_DL: float
    delta_i_LL: float
    delta_LT: float
    delta_LT_max: float
    M_s: float
    f_fs: float
    F_fs: float
    violations: tuple[tuple[str, float], ...]

    @property
    def violation_vector(self) -> tuple[float, ...]:
        return tuple(magnitude for _, magnitude in self.violations)

    @property
    def max_violation(self) -> float:
        return max(self.violation_vector)

    def violation(self, name: str) -> float:
        for key, magnitude in self.violations:
            if key == name:
                return magnitude
        raise KeyError(name)

    def failed(self, tolerance: float = 0.0) -> list[str]:
        """Names of the constraints violated by more than ``tolerance``."""
        return [name for name, magnitude in self.violations if magnitude > tolerance]

    def is_feasible(self, tolerance: float = 0.0) -> bool:
        return all(magnitude <= tolerance for _, magnitude in self.violations)

    def as_dict(self) -> dict[str, object]:
        return asdict(self)


def _upper(value: float, limit: float) -> float:
    """Normalized violation of ``value <= limit``."""
    if value <= limit:
        return 0.0
    if limit == 0:
        return 1.0 + (value - limit)
    return (value - limit) / abs(limit)


def _lower(value: float, limit: float) -> float:
    """Normalized violation of ``value >= limit``."""
    if value >= limit:
        return 0.0
    if limit == 0:
        return 1.0 + (limit - value)
    return (limit - value) / abs(limit)


def factored_load(problem: DesignProblem, section: Section) -> tuple[float, float]:
    """Dead load including self-weight and the factored load ``1.2 w_DL + 1.6 w_LL`` [kN/m]."""
    w_DL = problem.loading.w_SDL + self_weight(section, problem.concrete)
    w_u = 1.2 * w_DL + 1.6 * problem.loading.w_LL
    return w_DL, w_u


def bending_moments(problem: DesignProblem, section: Section) -> tuple[float, float]:
    """Ultimate and service midspan moments of a simply supported span [kN·m]."""
    w_DL, w_u = factored_load(problem, section)
    span_factor = problem.loading.L**2 / 8.0
    return w_u * span_factor, (w_DL + problem.loading.w_LL) * span_factor


def design_material(frp: Frp, bar: BarSpec) -> tuple[float, float]:
    """
    Design tensile strength and rupture strain after the environmental reduction.

    When the bar carries no guaranteed rupture strain the strain follows from the
    linear-elastic law, ``eps_fu = f_fu / E_f``.
    """
    f_fu = frp.C_E * bar.f_fu_star
    if bar.eps_fu_star is not None:
        return f_fu, frp.C_E * bar.eps_fu_star
    return f_fu, f_fu / frp.E_f


def beta1(f_c: float) -> float:
    """Stress-block factor: 0.85 up to 27.58 MPa, minus 0.05 per 6.895 MPa above, floored at 0.65."""
    if f_c <= 27.58:
        return 0.85
    return max(0.65, 0.85 - 0.05 * (f_c - 27.58) / 6.895)


def balanced_ratio(concrete: Concrete, frp: Frp, f_fu: float) -> float:
    """Balanced reinforcement ratio rho_fb."""
    crushing_stress = frp.E_f * concrete.eps_cu
    return (
        0.85
        * beta1(concrete.f_c)
        * (concrete.f_c / f_fu)
        * crushing_stress
        / (crushing_stress + f_fu)
    )


def min_ratio(concrete: Concrete, f_fu: float, code: CodeOptions | None = None) -> float:
    """Minimum reinforcement ratio, f'_c and f_fu in MPa."""
    code = code or CodeOptions()
    return max(
        code.min_ratio_coefficient * math.sqrt(concrete.f_c) / f_fu,
        code.min_ratio_floor / f_fu,
    )


def reinforcement_ratio(section: Section, limits: Limits | None = None) -> float:
    """rho_f = A_f / (b d)."""
    _, d = cover_and_depth(section, limits)
    return bar_area(section) / (section.b * d)


def ultimate_bar_stress(concrete: Concrete, frp: Frp, f_fu: float, rho_f: float) -> float:
    """Bar stress at concrete crushing for an over-reinforced section, capped at f_fu."""
    crushing_stress = frp.E_f * concrete.eps_cu
    f_f = (
        math.sqrt(
            crushing_stress**2 / 4.0
            + 0.85 * beta1(concrete.f_c) * concrete.f_c * crushing_stress / rho_f
        )
        - 0.5 * crushing_stress
    )
    return min(f_f, f_fu)


def strength_reduction_factor(rho_f: float, rho_fb: float) -> float:
    """phi: 0.55 under-reinforced, 0.65 above 1.4 rho_fb, linear in between."""
    if rho_f <= rho_fb:
        return PHI_UNDER_REINFORCED
    if rho_f > 1.4 * rho_fb:
        return PHI_OVER_REINFORCED
    return 0.3 + 0.25 * rho_f / rho_fb


def flexural_strength(
    section: Section,
    concrete: Concrete,
    frp: Frp,
    f_fu: float,
    eps_fu: float,
    rho_f: float,
    rho_fb: float,
    limits: Limits | None = None,
) -> tuple[float, float]:
    """
    Nominal moment capacity and strength-reduction factor.

    Args:
        section: Candidate section
        concrete: Concrete properties
        frp: FRP properties
        f_fu: Design tensile strength [MPa]
        eps_fu: Design rupture strain
        rho_f: Reinforcement ratio
        rho_fb: Balanced reinforcement ratio
        limits: Source of the cover rule

    Returns:
        Tuple of (M_n [kN·m], phi)
    """
    _, d = cover_and_depth(section, limits)
    A_f = bar_area(section)
    if rho_f <= rho_fb:
        b1 = beta1(concrete.f_c)
        eps_cu = concrete.eps_cu
        M_n = 1000.0 * A_f * f_fu * d * (1.0 - b1 / 2.0 * eps_cu / (eps_cu + eps_fu))
        return M_n, PHI_UNDER_REINFORCED

    f_f = ultimate_bar_stress(concrete, frp, f_fu, rho_f)
    M_n = 1000.0 * A_f * f_f * (d - A_f * f_f / (1.7 * concrete.f_c * section.b))
    return M_n, strength_reduction_factor(rho_f, rho_fb)


def neutral_axis_factor(rho_f: float, n_f: float) -> float:
    """Cracked-section neutral-axis depth ratio k."""
    rho_n = rho_f * n_f
    return math.sqrt(rho_n**2 + 2.0 * rho_n) - rho_n


def service_stress_state(
    section: Section,
    concrete: Concrete,
    frp: Frp,
    M_service: float,
    limits: Limits | None = None,
) -> tuple[float, float, float]:
    """Modular ratio, neutral-axis factor and bar stress under service moment."""
    _, d = cover_and_depth(section, limits)
    A_f = bar_area(section)
    rho_f = A_f / (section.b * d)
    n_f = frp.E_f / concrete.E_c
    k = neutral_axis_factor(rho_f, n_f)
    f_f = M_service / (1000.0 * A_f * d * (1.0 - k / 3.0))
    return n_f, k, f_f


def crack_width(
    section: Section,
    frp: Frp,
    k: float,
    f_f: float,
    limits: Limits | None = None,
) -> float:
    """Estimated service crack width [mm]."""
    d_c, d = cover_and_depth(section, limits)
    s = bar_spacing(section, limits)
    width = (
        (2.0 / frp.E_f)
        * (section.h - k * d)
        / (d * (1.0 - k))
        * frp.k_b
        * f_f
        * math.sqrt(d_c**2 + (s / 2.0) ** 2)
    )
    return width * 1000.0


def inertias(
    section: Section,
    concrete: Concrete,
    n_f: float,
    k: float,
    rho_f: float,
    rho_fb: float,
    M_service: float,
    limits: Limits | None = None,
    cap_tension_stiffening: bool = True,
) -> tuple[float, float, float, float]:
    """
    Gross, cracked and effective moments of inertia and the cracking moment.

    The effective inertia is bounded to ``[I_cr, I_g]``; with ``cap_tension_stiffening``
    the factor ``0.2 rho_f / rho_fb`` is additionally capped at 1.

    Returns:
        Tuple of (I_g [m⁴], I_cr [m⁴], M_cr [kN·m], I_e [m⁴])
    """
    _, d = cover_and_depth(section, limits)
    A_f = bar_area(section)
    I_g = section.b * section.h**3 / 12.0
    I_cr = section.b * d**3 / 3.0 * k**3 + n_f * A_f * d**2 * (1.0 - k) ** 2
    M_cr = 1240.0 * math.sqrt(concrete.f_c) * I_g / section.h

    if M_service <= M_cr:
        return I_g, I_cr, M_cr, I_g

    cracking_ratio = (M_cr / M_service) ** 3
    beta_d = 0.2 * rho_f / rho_fb
    if cap_tension_stiffening:
        beta_d = min(beta_d, 1.0)
    I_e = cracking_ratio * beta_d * I_g + (1.0 - cracking_ratio) * I_cr
    I_e = min(I_g, max(I_cr, I_e))
    return I_g, I_cr, M_cr, I_e


def deflections(problem: DesignProblem, section: Section, I_e: float) -> tuple[float, float, float]:
    """
    Immediate dead- and live-load deflections and the long-term deflection [m].

    The combined immediate deflection is ``5 w L^4 / (384 E_c I_e)`` for a simply supported span.
    """
    loading = problem.loading
    w_DL, _ = factored_load(problem, section)
    w_total = w_DL + loading.w_LL
    if w_total == 0:
        return 0.0, 0.0, 0.0

    E_c = problem.concrete.E_c * 1000.0  # kN/m²
    delta_total = 5.0 * w_total * loading.L**4 / (384.0 * E_c * I_e)
    delta_DL = w_DL / w_total * delta_total
    delta_LL = loading.w_LL / w_total * delta_total
    delta_LT = delta_LL + 0.6 * loading.xi * (delta_DL + loading.sustained_fraction * delta_LL)
    return delta_DL, delta_LL, delta_LT


def creep_rupture(
    problem: DesignProblem,
    section: Section,
    k: float,
    M_service: float,
    f_fu: float,
) -> tuple[float, float, float]:
    """Sustained moment, sustained bar stress and creep-rupture stress limit."""
    loading = problem.loading
    w_DL, _ = factored_load(problem, section)
    w_total = w_DL + loading.w_LL
    sustained = (w_DL + loading.sustained_fraction * loading.w_LL) / w_total if w_total else 0.0
    M_s = sustained * M_service

    _, d = cover_and_depth(section, problem.limits)
    f_fs = M_s / (1000.0 * bar_area(section) * d * (1.0 - k / 3.0))
    F_fs = problem.frp.creep_limit_factor * f_fu
    return M_s, f_fs, F_fs


def _bound_violations(problem: DesignProblem, section: Section) -> dict[str, float]:
    limits = problem.limits
    return {
        "b_min": _lower(section.b, limits.b_min),
        "b_max": _upper(section.b, limits.b_max),
        "h_min": _lower(section.h, limits.h_min),
        "h_max": _upper(section.h, limits.h_max),
    }


def _degenerate_report(
    problem: DesignProblem,
    section: Section,
    error: SectionGeometryError,
) -> CheckReport:
    limits = problem.limits
    phi_b = section.bar.phi_b
    d_c = (limits.cover_rule.resolve(phi_b) + phi_b / 2.0) / 1000.0
    width = min_width(section.n, section.bar, limits)

    if section.h <= d_c:
        overshoot = (d_c - section.h) / d_c
    else:
        overshoot = (2.0 * d_c - section.b) / (2.0 * d_c)
    magnitude = 1.0 + max(0.0, overshoot)

    violations = {"geometry_width": max(_lower(section.b, width), magnitude)}
    violations.update(_bound_violations(problem, section))
    violations.update(dict.fromkeys(_STRUCTURAL, magnitude))

    w_DL, w_u = factored_load(problem, section)
    M_u, M_service = bending_moments(problem, section)
    f_fu, eps_fu = design_material(problem.frp, section.bar)
    nan = math.nan
    return CheckReport(
        A_f=bar_area(section),
        d_c=d_c,
        d=section.h - d_c,
        spacing=nan,
        min_width=width,
        w_DL=w_DL,
        w_u=w_u,
        M_u=M_u,
        M_service=M_service,
        f_fu=f_fu,
        eps_fu=eps_fu,
        beta1=beta1(problem.concrete.f_c),
        rho_fb=balanced_ratio(problem.concrete, problem.frp, f_fu),
        rho_f=nan,
        rho_f_min=min_ratio(problem.concrete, f_fu, problem.code),
        f_f_ultimate=nan,
        M_n=nan,
        phi=nan,
        phi_M_n=nan,
        n_f=problem.frp.E_f / problem.concrete.E_c,
        k=nan,
        f_f=nan,
        crack_w=nan,
        I_g=section.b * section.h**3 / 12.0,
        I_cr=nan,
        I_e=nan,
        M_cr=nan,
        delta_i_total=nan,
        delta_i_DL=nan,
        delta_i_LL=nan,
        delta_LT=nan,
        delta_LT_max=limits.deflection_limit(problem.loading.L),
        M_s=nan,
        f_fs=nan,
        F_fs=problem.frp.creep_limit_factor * f_fu,
        violations=tuple((name, violations[name]) for name in VIOLATION_NAMES),
    )


def check_all(problem: DesignProblem, section: Section) -> CheckReport:
    """
    Run the flexural, serviceability and geometric checks on one section.

    Checks never short-circuit: every constraint is evaluated so the full violation
    vector is available. A section whose effective depth or bar spacing is not
    computable is reported with violations of magnitude ``1 + overshoot`` instead of
    raising.

    Args:
        problem: Materials, loads, limits and catalog
        section: Candidate section (at least two bars)

    Returns:
        CheckReport with violations in ``VIOLATION_NAMES`` order

    Raises:
        InvalidInputError: If the section has fewer than two bars

    Example:
        >>> problem = default_problem("A")
        >>> section = Section(0.2124, 0.5346, 3, problem.catalog.by_designation("#6"))
        >>> check_all(problem, section).is_feasible()
        True
    """
    if section.n < 2:
        raise InvalidInputError(f"A single layer needs at least two bars, got {section.n}")

    limits = problem.limits
    concrete = problem.concrete
    frp = problem.frp

    try:
        d_c, d = cover_and_depth(section, limits)
        spacing = bar_spacing(section, limits)
    except SectionGeometryError as error:
        return _degenerate_report(problem, section, error)

    # loads
    w_DL, w_u = factored_load(problem, section)
    M_u, M_service = bending_moments(problem, section)

    # material and ratios
    f_fu, eps_fu = design_material(frp, section.bar)
    rho_fb = balanced_ratio(concrete, frp, f_fu)
    A_f = bar_area(section)
    rho_f = A_f / (section.b * d)
    rho_f_min = min_ratio(concrete, f_fu, problem.code)

    # strength
    M_n, phi = flexural_strength(section, concrete, frp, f_fu, eps_fu, rho_f, rho_fb, limits)
    f_f_ultimate = ultimate_bar_stress(concrete, frp, f_fu, rho_f) if rho_f > rho_fb else f_fu

    # cracking
    n_f, k, f_f = service_stress_state(section, concrete, frp, M_service, limits)
    crack_w = crack_width(section, frp, k, f_f, limits)

    # deflection
    I_g, I_cr, M_cr, I_e = inertias(
        section,
        concrete,
        n_f,
        k,
        rho_f,
        rho_fb,
        M_service,
        limits,
        cap_tension_stiffening=problem.code.cap_tension_stiffening,
    )
    delta_DL, delta_LL, delta_LT = deflections(problem, section, I_e)
    delta_LT_max = limits.deflection_limit(problem.loading.L)

    # creep rupture
    M_s, f_fs, F_fs = creep_rupture(problem, section, k, M_service, f_fu)

    width = min_width(section.n, section.bar, limits)
    violations = {"geometry_width": _lower(section.b, width)}
    violations.update(_bound_violations(problem, section))
    violations["min_ratio"] = _lower(rho_f, rho_f_min)
    violations["strength"] = _upper(M_u, phi * M_n)
    violations["crack_width"] = _upper(crack_w, limits.w_max)
    violations["long_term_deflection"] = _upper(delta_LT, delta_LT_max)
    violations["creep_rupture"] = _upper(f_fs, F_fs)

    return CheckReport(
        A_f=A_f,
        d_c=d_c,
        d=d,
        spacing=spacing,
        min_width=width,
        w_DL=w_DL,
        w_u=w_u,
        M_u=M_u,
        M_service=M_service,
        f_fu=f_fu,
        eps_fu=eps_fu,
        beta1=beta1(concrete.f_c),
        rho_fb=rho_fb,
        rho_f=rho_f,
        rho_f_min=rho_f_min,
        f_f_ultimate=f_f_ultimate,
        M_n=M_n,
        phi=phi,
        phi_M_n=phi * M_n,
        n_f=n_f,
        k=k,
        f_f=f_f,
        crack_w=crack_w,
        I_g=I_g,
        I_cr=I_cr,
        I_e=I_e,
        M_cr=M_cr,
        delta_i_total=delta_DL + delta_LL,
        delta_i_DL=delta_DL,
        delta_i_LL=delta_LL,
        delta_LT=delta_LT,
        delta_LT_max=delta_LT_max,
        M_s=M_s,
        f_fs=f_fs,
        F_fs=F_fs,
        violations=tuple((name, violations[name]) for name in VIOLATION_NAMES),
    )
