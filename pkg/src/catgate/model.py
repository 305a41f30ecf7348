"""Physical parameters, derived dispersive coefficients and the regime audit.

Internal units: angular frequency in rad/µs, time in µs. Frequencies quoted as
ν = ω/2π in GHz (or MHz for couplings) are converted only at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError, ConstraintError, SingularChiError

TWO_PI = 2.0 * math.pi


def ghz(nu: float) -> float:
    """ν in GHz -> ω in rad/µs."""
    return TWO_PI * 1e3 * nu


def mhz(nu: float) -> float:
    """ν in MHz -> ω in rad/µs."""
    return TWO_PI * nu


def to_ghz(omega: float) -> float:
    return omega / (TWO_PI * 1e3)


def to_mhz(omega: float) -> float:
    return omega / TWO_PI


@dataclass(frozen=True)
class SystemParams:
    omega_eg: float
    omega_fe: float
    omega_a: float
    omega_b: float
    omega_a_t: float
    omega_b_t: float
    g: float
    mu: float
    # None -> solved from the Stark-cancellation constraint
    g_t: float | None = None
    g_prime_ratio: float = math.sqrt(2.0)
    mu_prime_ratio: float = 1.0 / math.sqrt(2.0)
    g_t_prime_ratio: float = math.sqrt(2.0)
    # None -> 1% of g
    g_ab: float | None = None
    g_ab_t: float | None = None

    @property
    def g_prime(self) -> float:
        return self.g_prime_ratio * self.g

    @property
    def mu_prime(self) -> float:
        return self.mu_prime_ratio * self.mu

    @property
    def g_ab_value(self) -> float:
        return 0.01 * self.g if self.g_ab is None else self.g_ab

    @property
    def g_ab_t_value(self) -> float:
        return 0.01 * self.g if self.g_ab_t is None else self.g_ab_t

    @property
    def g_t_auto(self) -> bool:
        return self.g_t is None

    def g_t_value(self) -> float:
        return solve_g_tilde(self) if self.g_t is None else self.g_t

    @property
    def g_t_prime(self) -> float:
        return self.g_t_prime_ratio * self.g_t_value()


@dataclass(frozen=True)
class NoiseParams:
    """Decay and dephasing rates in 1/µs."""

    kappa_a: float = 0.0
    kappa_b: float = 0.0
    gamma_eg: float = 0.0
    gamma_fe: float = 0.0
    gamma_fg: float = 0.0
    gamma_phi_e: float = 0.0
    gamma_phi_f: float = 0.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value >= 0.0:
                raise ConfigurationError(f"noise rate {name} must be >= 0, got {value}")

    def with_kappa(self, kappa: float) -> NoiseParams:
        return replace(self, kappa_a=kappa, kappa_b=kappa)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.__dict__.values())


@dataclass(frozen=True)
class DerivedParams:
    delta_a: float
    delta_b: float
    delta_a_p: float
    delta_b_p: float
    delta_a_t: float
    delta_a_tp: float
    lambda_a: float
    lambda_b: float
    lam: float
    chi: float
    lambda_a_t: float
    Delta: float
    Delta_ab: float
    Delta_ab_t: float
    g_t: float
    t1: float
    t2: float

    @property
    def stark_residual(self) -> float:
        """λ_a t1 + λ̃_a t2; zero when the stage-2 Stark phase cancels stage 1."""
        return self.lambda_a * self.t1 + self.lambda_a_t * self.t2


def paper_defaults() -> tuple[SystemParams, NoiseParams]:
    system = SystemParams(
        omega_eg=ghz(6.5),
        omega_fe=ghz(6.0),
        omega_a=ghz(7.5),
        omega_b=ghz(4.9),
        omega_a_t=ghz(5.5),
        omega_b_t=ghz(3.5),
        g=mhz(95.0),
        mu=mhz(95.0),
    )
    noise = NoiseParams(
        kappa_a=1.0 / 300.0,
        kappa_b=1.0 / 300.0,
        gamma_eg=1.0 / 60.0,
        gamma_fe=1.0 / 30.0,
        gamma_fg=1.0 / 150.0,
        gamma_phi_e=1.0 / 20.0,
        gamma_phi_f=1.0 / 20.0,
    )
    return system, noise


def _check_signs(p: SystemParams) -> None:
    delta_a = p.omega_eg - p.omega_a
    delta_b = p.omega_fe - p.omega_b
    delta_a_t = p.omega_eg - p.omega_a_t
    if not delta_a < 0:
        raise ConfigurationError(
            f"sign convention violated: delta_a = omega_eg - omega_a must be < 0 (got {to_ghz(delta_a):.6g} GHz)"
        )
    if not delta_b > 0:
        raise ConfigurationError(
            f"sign convention violated: delta_b = omega_fe - omega_b must be > 0 (got {to_ghz(delta_b):.6g} GHz)"
        )
    if not delta_a_t > 0:
        raise ConfigurationError(
            f"sign convention violated: stage-2 detuning omega_eg - omega_a_t must be > 0 "
            f"(got {to_ghz(delta_a_t):.6g} GHz)"
        )


def solve_g_tilde(params: SystemParams) -> float:
    """Stage-2 coupling g̃ that makes the stage-2 Stark shift cancel stage 1.

    Solves g²/δ_a = -g̃²/δ̃_a for g̃ > 0.
    """
    delta_a = params.omega_eg - params.omega_a
    delta_a_t = params.omega_eg - params.omega_a_t
    if not (delta_a < 0 and delta_a_t > 0):
        raise ConstraintError(
            "g_t cannot cancel the stage-1 Stark shift: need delta_a < 0 and stage-2 detuning > 0 "
            f"(got {to_ghz(delta_a):.6g} GHz, {to_ghz(delta_a_t):.6g} GHz)"
        )
    return params.g * math.sqrt(delta_a_t / abs(delta_a))


def derive(params: SystemParams) -> DerivedParams:
    _check_signs(params)
    p = params
    delta_a = p.omega_eg - p.omega_a
    delta_b = p.omega_fe - p.omega_b
    Delta = abs(delta_b) - abs(delta_a)
    if abs(Delta) <= 1e-12 * abs(delta_a):
        raise SingularChiError("|delta_b| == |delta_a|: chi = lambda^2 / Delta is singular")
    lam = 0.5 * p.g * p.mu * (1.0 / abs(delta_a) + 1.0 / abs(delta_b))
    chi = lam**2 / Delta
    delta_a_t = p.omega_eg - p.omega_a_t
    g_t = p.g_t_value()
    t = math.pi / abs(chi)
    return DerivedParams(
        delta_a=delta_a,
        delta_b=delta_b,
        delta_a_p=p.omega_fe - p.omega_a,
        delta_b_p=p.omega_eg - p.omega_b,
        delta_a_t=delta_a_t,
        delta_a_tp=p.omega_fe - p.omega_a_t,
        lambda_a=p.g**2 / delta_a,
        lambda_b=p.mu**2 / delta_b,
        lam=lam,
        chi=chi,
        lambda_a_t=g_t**2 / delta_a_t,
        Delta=Delta,
        Delta_ab=p.omega_a - p.omega_b,
        Delta_ab_t=p.omega_a_t - p.omega_b_t,
        g_t=g_t,
        t1=t,
        t2=t,
    )


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    value: float
    status: str  # "pass" | "warn" | "fail" | "info"


@dataclass
class RegimeReport:
    checks: list[RegimeCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(c.status == "fail" for c in self.checks)

    def failures(self) -> list[RegimeCheck]:
        return [c for c in self.checks if c.status == "fail"]

    def format(self) -> str:
        lines = [f"{'check':<28}{'value':>14}  status"]
        for c in self.checks:
            lines.append(f"{c.name:<28}{c.value:>14.6g}  {c.status}")
        return "\n".join(lines)


def validate_regime(
    params: SystemParams,
    derived: DerivedParams,
    pass_ratio: float = 5.0,
    warn_ratio: float = 3.0,
) -> RegimeReport:
    """Ratios behind each "≫" condition of the dispersive approximations.

    ratio >= pass_ratio -> pass, warn_ratio <= ratio < pass_ratio -> warn, else fail.
    """
    d = derived

    def ratio(num: float, den: float) -> float:
        return math.inf if den == 0.0 else abs(num) / abs(den)

    ratios = [
        ("|delta_a|/g", ratio(d.delta_a, params.g)),
        ("|delta_b|/mu", ratio(d.delta_b, params.mu)),
        ("Delta/lambda_a", ratio(d.Delta, d.lambda_a)),
        ("Delta/lambda_b", ratio(d.Delta, d.lambda_b)),
        ("Delta/lambda", ratio(d.Delta, d.lam)),
        ("delta_a_t/g_t", ratio(d.delta_a_t, d.g_t)),
        ("|delta_a_p|/g_prime", ratio(d.delta_a_p, params.g_prime)),
        ("|delta_b_p|/mu_prime", ratio(d.delta_b_p, params.mu_prime)),
        ("|delta_a_tp|/g_t_prime", ratio(d.delta_a_tp, params.g_t_prime_ratio * d.g_t)),
    ]
    report = RegimeReport()
    for name, value in ratios:
        status = "pass" if value >= pass_ratio else "warn" if value >= warn_ratio else "fail"
        report.checks.append(RegimeCheck(name, value, status))
    if not params.g_t_auto:
        report.checks.append(RegimeCheck("lambda_a+lambda_a_t", d.lambda_a + d.lambda_a_t, "info"))
    return report
