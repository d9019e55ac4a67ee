"""Engine configuration, unit policy, and derived parameters.

Everything is SI internally: fields in tesla, frequencies in rad/s, energies
in joules, inverse temperature in 1/J. The config file uses the natural
input units (electron masses, elementary charges, trap frequency as a
multiple of the work-field Larmor frequency); conversion happens once, in
the loader. All derived quantities live in one immutable record so there is
a single source of truth for the dimensionless ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .constants import HBAR, K_BOLTZMANN, M_ELECTRON, Q_ELEMENTARY
from .errors import ConfigError, NoWorkRegimeError


@dataclass(frozen=True)
class GridSpec:
    """One sweep axis: `count` values from `min` to `max`, linear or log."""

    min: float
    max: float
    count: int
    spacing: str = "linear"

    def validate(self, name: str) -> None:
        if not (self.min > 0.0 and self.max >= self.min):
            raise ConfigError(f"{name}: need 0 < min <= max, got [{self.min}, {self.max}]")
        if self.count < 2:
            raise ConfigError(f"{name}: count must be >= 2, got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"{name}: spacing must be 'linear' or 'log', got {self.spacing!r}")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class NumericsConfig:
    """Tolerances and grid sizes shared by the numerical routines."""

    quad_rel_tol: float = 1e-9
    ode_step: float = 0.0          # seconds; 0 picks a step from the kernel scales
    history_grid: int = 20000      # max solver steps / kernel table points
    root_tol: float = 1e-10        # dimensionless root-finding tolerance
    lambda_grid: GridSpec = field(default_factory=lambda: GridSpec(0.02, 0.98, 25, "linear"))
    gamma_grid: GridSpec = field(default_factory=lambda: GridSpec(1e-10, 1e-8, 25, "log"))

    def validate(self) -> None:
        if self.quad_rel_tol <= 0.0:
            raise ConfigError("quad_rel_tol must be > 0")
        if self.root_tol <= 0.0:
            raise ConfigError("root_tol must be > 0")
        if self.ode_step < 0.0:
            raise ConfigError("ode_step_s must be >= 0 (0 means auto)")
        if self.history_grid < 2:
            raise ConfigError("history_grid must be >= 2")
        self.lambda_grid.validate("lambda grid")
        self.gamma_grid.validate("gamma grid")


@dataclass(frozen=True)
class EngineConfig:
    """Physical inputs in SI units.

    B0/B1 are the work-field start and end values along z, B2 the probe
    field along x, T the bath temperature, (m, q) the particle, and
    omega_trap the harmonic trap angular frequency that sets the position
    spread.
    """

    B0: float
    B1: float
    B2: float
    T: float
    m: float
    q: float
    omega_trap: float
    numerics: NumericsConfig = field(default_factory=NumericsConfig)


@dataclass(frozen=True)
class DerivedParams:
    """Every derived scalar the rest of the code consumes.

    Immutable after construction; safe to share across tasks.
    """

    mu: float        # magnetic moment, J/T
    Omega0: float    # rad/s, mu*B0/hbar
    Omega1: float    # rad/s, mu*B1/hbar
    Omega2: float    # rad/s, mu*B2/hbar
    Omega: float     # rad/s, sqrt(Omega1^2 + Omega2^2)
    theta: float     # rad, tan(theta) = B1/B2
    lam: float       # Omega0/Omega1
    gamma: float     # Omega1/Omega2
    sigma: float     # m, trap ground-state width
    beta: float      # 1/J
    Delta: float     # tanh(beta*hbar*Omega0)

    @property
    def sin_theta(self) -> float:
        return self.Omega1 / self.Omega

    @property
    def cos_theta(self) -> float:
        return self.Omega2 / self.Omega


class ThermalPolarization(NamedTuple):
    delta: float
    p_plus: float
    p_minus: float


def thermal_polarization(beta: float, omega0: float) -> ThermalPolarization:
    """Spin polarization of the thermal state in a field with splitting hbar*omega0.

    Returns Delta = p+ - p- = tanh(beta*hbar*omega0) together with the level
    populations. beta = 0 gives the unpolarized (infinite temperature) state.
    """
    if beta < 0.0:
        raise ValueError("beta must be >= 0")
    x = beta * HBAR * omega0
    delta = math.tanh(x) if math.isfinite(x) else 1.0
    if math.isfinite(x):
        p_plus = 1.0 / (1.0 + math.exp(-2.0 * x))
    else:
        p_plus = 1.0
    return ThermalPolarization(delta, p_plus, 1.0 - p_plus)


def derive_params(config: EngineConfig, *, allow_degenerate: bool = False) -> DerivedParams:
    """Populate DerivedParams from a validated EngineConfig.

    Pure and deterministic: equal inputs give bitwise-equal outputs.
    `allow_degenerate` relaxes the B0 < B1 requirement to B0 <= B1 for
    limiting checks (lambda = 1 has no work regime).
    """
    for name, value in (("B0", config.B0), ("B1", config.B1), ("B2", config.B2),
                        ("T", config.T), ("m", config.m), ("q", config.q),
                        ("omega_trap", config.omega_trap)):
        if not (value > 0.0 and math.isfinite(value)):
            raise ConfigError(f"{name} must be positive and finite, got {value}")
    if config.B0 > config.B1 or (config.B0 == config.B1 and not allow_degenerate):
        raise NoWorkRegimeError(
            f"need B1 > B0 for a work stroke, got B0={config.B0}, B1={config.B1}"
        )
    if config.B2 < config.B1:
        raise ConfigError(
            f"probe field must satisfy B2 >= B1, got B2={config.B2}, B1={config.B1}"
        )
    config.numerics.validate()

    mu = config.q * HBAR / (2.0 * config.m)
    omega0 = mu * config.B0 / HBAR
    omega1 = mu * config.B1 / HBAR
    omega2 = mu * config.B2 / HBAR
    omega = math.hypot(omega1, omega2)
    beta = 1.0 / (K_BOLTZMANN * config.T)
    return DerivedParams(
        mu=mu,
        Omega0=omega0,
        Omega1=omega1,
        Omega2=omega2,
        Omega=omega,
        theta=math.atan2(config.B1, config.B2),
        lam=omega0 / omega1,
        gamma=omega1 / omega2,
        sigma=math.sqrt(HBAR / (config.m * config.omega_trap)),
        beta=beta,
        Delta=math.tanh(beta * HBAR * omega0),
    )


# ---------------------------------------------------------------------------
# Config file handling: one `key = value` per line, '#' comments.
# ---------------------------------------------------------------------------

def _parse_spacing(text: str) -> str:
    if text not in ("linear", "log"):
        raise ValueError("expected 'linear' or 'log'")
    return text


# key -> (converter, default). Units follow the reported parameterization:
# mass in electron masses, charge in elementary charges, trap frequency as a
# multiple of Omega1. The default temperature puts the work-field level
# splitting at k_B T so the polarization trade-off is visible.
CONFIG_SCHEMA: dict[str, tuple] = {
    "B0_tesla": (float, 0.05),
    "B1_tesla": (float, 0.1),
    "B2_tesla": (float, 0.2),
    "T_kelvin": (float, 3.3586e-05),
    "mass_me": (float, 2000.0),
    "charge_qe": (float, 1.0),
    "trap_omega_over_omega1": (float, 100.0),
    "quad_rel_tol": (float, 1e-9),
    "ode_step_s": (float, 0.0),
    "history_grid": (int, 20000),
    "root_tol": (float, 1e-10),
    "lambda_min": (float, 0.02),
    "lambda_max": (float, 0.98),
    "lambda_count": (int, 25),
    "lambda_spacing": (_parse_spacing, "linear"),
    "gamma_min": (float, 1e-10),
    "gamma_max": (float, 1e-8),
    "gamma_count": (int, 25),
    "gamma_spacing": (_parse_spacing, "log"),
}


def default_file_values() -> dict:
    return {key: default for key, (_, default) in CONFIG_SCHEMA.items()}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse `key = value` lines into a raw (file-layer) value dict."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        values[key] = convert_config_value(key, val, where=f"{source}:{lineno}")
    return values


def convert_config_value(key: str, text: str, where: str = "<set>"):
    if key not in CONFIG_SCHEMA:
        raise ConfigError(f"{where}: unknown config key '{key}'")
    converter = CONFIG_SCHEMA[key][0]
    try:
        return converter(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: malformed value for key '{key}': {text!r} ({exc})") from exc


def config_from_values(values: dict) -> EngineConfig:
    """Build an SI EngineConfig from file-layer values."""
    merged = default_file_values()
    merged.update(values)
    m = merged["mass_me"] * M_ELECTRON
    q = merged["charge_qe"] * Q_ELEMENTARY
    b1 = merged["B1_tesla"]
    # Omega1 = mu*B1/hbar = q*B1/(2m); the trap frequency is specified
    # relative to it.
    omega1 = q * b1 / (2.0 * m)
    numerics = NumericsConfig(
        quad_rel_tol=merged["quad_rel_tol"],
        ode_step=merged["ode_step_s"],
        history_grid=merged["history_grid"],
        root_tol=merged["root_tol"],
        lambda_grid=GridSpec(merged["lambda_min"], merged["lambda_max"],
                             merged["lambda_count"], merged["lambda_spacing"]),
        gamma_grid=GridSpec(merged["gamma_min"], merged["gamma_max"],
                            merged["gamma_count"], merged["gamma_spacing"]),
    )
    return EngineConfig(
        B0=merged["B0_tesla"],
        B1=b1,
        B2=merged["B2_tesla"],
        T=merged["T_kelvin"],
        m=m,
        q=q,
        omega_trap=merged["trap_omega_over_omega1"] * omega1,
        numerics=numerics,
    )


def load_config(path: str | Path | None, overrides: dict | None = None) -> tuple[EngineConfig, dict]:
    """Load a config file (optional) and apply `--set` overrides.

    Returns (config, resolved file-layer values) so callers can write an
    exact manifest of what was used.
    """
    values = default_file_values()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        values.update(parse_config_text(p.read_text(), source=str(p)))
    for key, text in (overrides or {}).items():
        values[key] = convert_config_value(key, text)
    return config_from_values(values), values


def sweep_point_config(config: EngineConfig, lam: float, gamma: float) -> EngineConfig:
    """Config for one sweep point: B1 fixed, B0 = lambda*B1, B2 = B1/gamma."""
    return replace(config, B0=lam * config.B1, B2=config.B1 / gamma)
