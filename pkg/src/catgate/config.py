"""TOML run configuration.

Three tables, with unit suffixes on every dimensional key::

    [system]      omega_*_ghz, g_mhz, mu_mhz, g_t_mhz?, *_ratio, g_ab_mhz?, g_ab_t_mhz?
    [noise]       lifetimes kappa_a_inv_us, gamma_eg_inv_us, ... (inf = channel off)
    [simulation]  alpha, n_trunc, eps, samples_per_period, max_step_us, ...

Values are kept exactly as written so that loading and re-serializing is lossless;
conversion to internal angular units happens in :meth:`RunConfig.system_params`.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import tomli_w

from .catstates import CatEncoding
from .errors import ConfigParseError
from .hilbert import SpaceDescriptor
from .model import NoiseParams, SystemParams, ghz, mhz
from .propagate import IntegratorConfig

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

ENV_CONFIG = "CATGATE_CONFIG"

_SYSTEM_REQUIRED = (
    "omega_eg_ghz",
    "omega_fe_ghz",
    "omega_a_ghz",
    "omega_b_ghz",
    "omega_a_t_ghz",
    "omega_b_t_ghz",
    "g_mhz",
    "mu_mhz",
)
_SYSTEM_OPTIONAL = {
    "g_t_mhz": None,
    "g_prime_ratio": math.sqrt(2.0),
    "mu_prime_ratio": 1.0 / math.sqrt(2.0),
    "g_t_prime_ratio": math.sqrt(2.0),
    "g_ab_mhz": None,
    "g_ab_t_mhz": None,
}
_NOISE_KEYS = (
    "kappa_a_inv_us",
    "kappa_b_inv_us",
    "gamma_eg_inv_us",
    "gamma_fe_inv_us",
    "gamma_fg_inv_us",
    "gamma_phi_e_inv_us",
    "gamma_phi_f_inv_us",
)
_SIMULATION_DEFAULTS = {
    "alpha": 0.5,
    "n_trunc": 10,
    "eps": 1e-9,
    "samples_per_period": 64,
    "max_step_us": 1e-3,
    "leakage_bound": 0.05,
    "pass_ratio": 5.0,
    "warn_ratio": 3.0,
}


@dataclass(frozen=True)
class RunConfig:
    system: dict
    noise: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    source: str | None = None

    def system_params(self) -> SystemParams:
        s = self.system

        def opt_mhz(key):
            v = s.get(key)
            return None if v is None else mhz(v)

        return SystemParams(
            omega_eg=ghz(s["omega_eg_ghz"]),
            omega_fe=ghz(s["omega_fe_ghz"]),
            omega_a=ghz(s["omega_a_ghz"]),
            omega_b=ghz(s["omega_b_ghz"]),
            omega_a_t=ghz(s["omega_a_t_ghz"]),
            omega_b_t=ghz(s["omega_b_t_ghz"]),
            g=mhz(s["g_mhz"]),
            mu=mhz(s["mu_mhz"]),
            g_t=opt_mhz("g_t_mhz"),
            g_prime_ratio=s.get("g_prime_ratio", _SYSTEM_OPTIONAL["g_prime_ratio"]),
            mu_prime_ratio=s.get("mu_prime_ratio", _SYSTEM_OPTIONAL["mu_prime_ratio"]),
            g_t_prime_ratio=s.get("g_t_prime_ratio", _SYSTEM_OPTIONAL["g_t_prime_ratio"]),
            g_ab=opt_mhz("g_ab_mhz"),
            g_ab_t=opt_mhz("g_ab_t_mhz"),
        )

    def noise_params(self) -> NoiseParams:
        def rate(key):
            lifetime = self.noise.get(key, math.inf)
            return 0.0 if math.isinf(lifetime) else 1.0 / lifetime

        return NoiseParams(
            kappa_a=rate("kappa_a_inv_us"),
            kappa_b=rate("kappa_b_inv_us"),
            gamma_eg=rate("gamma_eg_inv_us"),
            gamma_fe=rate("gamma_fe_inv_us"),
            gamma_fg=rate("gamma_fg_inv_us"),
            gamma_phi_e=rate("gamma_phi_e_inv_us"),
            gamma_phi_f=rate("gamma_phi_f_inv_us"),
        )

    def sim(self, key: str):
        return self.simulation.get(key, _SIMULATION_DEFAULTS[key])

    def encoding(self) -> CatEncoding:
        return CatEncoding(alpha=self.sim("alpha"), n_trunc=self.sim("n_trunc"), eps=self.sim("eps"))

    def space(self) -> SpaceDescriptor:
        n = self.sim("n_trunc")
        return SpaceDescriptor(n, n)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            samples_per_period=self.sim("samples_per_period"),
            max_step=self.sim("max_step_us"),
            convergence_tol=self.simulation.get("convergence_tol"),
        )

    def with_simulation(self, **updates) -> RunConfig:
        sim = dict(self.simulation)
        sim.update({k: v for k, v in updates.items() if v is not None})
        return replace(self, simulation=sim)

    def as_dict(self) -> dict:
        out = {"system": dict(self.system)}
        if self.noise:
            out["noise"] = dict(self.noise)
        if self.simulation:
            out["simulation"] = dict(self.simulation)
        return out

    def to_toml(self) -> str:
        return tomli_w.dumps(self.as_dict())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_toml(), encoding="utf-8")


def _line_of(text: str, key: str) -> int | None:
    pat = re.compile(rf"^\s*{re.escape(key)}\s*=", re.MULTILINE)
    m = pat.search(text)
    return None if m is None else text.count("\n", 0, m.start()) + 1


def _number(text, table, key, value, integer=False):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok:
        kind = "an integer" if integer else "a number"
        raise ConfigParseError(
            f"[{table}] {key} must be {kind}, got {value!r}", key=key, line=_line_of(text, key)
        )
    return value if integer else float(value)


def loads(text: str, source: str | None = None) -> RunConfig:
    where = source or "<config>"
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigParseError(f"{where}: {exc}", line=int(m.group(1)) if m else None) from None

    for table in doc:
        if table not in ("system", "noise", "simulation"):
            raise ConfigParseError(f"{where}: unknown table [{table}]", key=table)
        if not isinstance(doc[table], dict):
            raise ConfigParseError(f"{where}: '{table}' must be a table", key=table, line=_line_of(text, table))
    if "system" not in doc:
        raise ConfigParseError(f"{where}: missing required table [system]", key="system")

    allowed = {
        "system": set(_SYSTEM_REQUIRED) | set(_SYSTEM_OPTIONAL),
        "noise": set(_NOISE_KEYS),
        "simulation": set(_SIMULATION_DEFAULTS) | {"convergence_tol"},
    }
    for table, keys in allowed.items():
        for key in doc.get(table, {}):
            if key not in keys:
                raise ConfigParseError(
                    f"{where}:{_line_of(text, key) or '?'}: unknown key '{key}' in [{table}]",
                    key=key,
                    line=_line_of(text, key),
                )

    system = {}
    for key in _SYSTEM_REQUIRED:
        if key not in doc["system"]:
            raise ConfigParseError(f"{where}: missing required key '{key}' in [system]", key=key)
        system[key] = _number(text, "system", key, doc["system"][key])
    for key in _SYSTEM_OPTIONAL:
        if key in doc["system"]:
            system[key] = _number(text, "system", key, doc["system"][key])

    noise = {}
    for key, value in doc.get("noise", {}).items():
        value = _number(text, "noise", key, value)
        if not value > 0:
            raise ConfigParseError(f"{where}: [noise] {key} must be > 0 (use inf to disable)", key=key,
                                   line=_line_of(text, key))
        noise[key] = value

    simulation = {}
    for key, value in doc.get("simulation", {}).items():
        simulation[key] = _number(text, "simulation", key, value, integer=key in ("n_trunc", "samples_per_period"))
    return RunConfig(system, noise, simulation, source)


def load(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {p}: {exc.strerror}") from None
    return loads(text, str(p))


def default_config_text() -> str:
    return resources.files("catgate").joinpath("data/paper_defaults.toml").read_text(encoding="utf-8")


def default_config() -> RunConfig:
    return loads(default_config_text(), "paper_defaults.toml")
