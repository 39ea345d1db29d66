"""Scenario configuration: a flat key/value mapping read from YAML.

Keys mirror the SystemParams and DopplerProfile field names, plus grid and
output settings. Unknown keys are rejected so that typos do not silently
fall back to defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .model import SOURCES, ModelError, SystemParams, _errors, validate


class ConfigError(ModelError):
    pass


@dataclass
class ScenarioConfig:
    params: SystemParams = field(default_factory=SystemParams)
    # Doppler inputs; a list runs one pass per value
    temperature: list[float] | None = None
    W_L: list[float] | None = None
    mass: float | None = None
    wavelength: float | None = None
    # grids
    delta_p_min: float = -15.0
    delta_p_max: float = 25.0
    delta_p_points: int = 401
    wl_min: float = 50.0
    wl_max: float = 1000.0
    wl_points: int = 20
    omega_s_min: float = 1.0
    omega_s_max: float = 12.0
    omega_s_points: int = 23
    omega_c_min: float = 5.0
    omega_c_max: float = 40.0
    omega_c_points: int = 15
    t_max: float = 5.0
    t_points: int = 501
    # selectors
    sweep: str | None = None            # "W_L", "omega_s" or "omega_c" for widths/slopes
    windows: list[int] = field(default_factory=lambda: [1, 2])
    sources: list[str] = field(default_factory=lambda: ["stationary"])
    population_mode: str = "clamped"   # or "self-consistent"
    mode: str = "steady"                # populations: "steady" or "trajectory"
    rho0: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.0, 0.0])
    pump_on: bool = True
    dephasing_on: bool = True
    suppress_i2: bool = False
    lorentzian_form: str = "residue"
    method: str = "faddeeva"
    nodes: int = 201
    # output
    out: str = "out"
    threads: int = 1
    svg: bool = False
    label: str = ""

    # ------------------------------------------------------------------
    @classmethod
    def keys(cls) -> set[str]:
        own = {f.name for f in dataclasses.fields(cls)} - {"params"}
        return own | set(SystemParams.field_names())

    @classmethod
    def from_mapping(cls, data: dict[str, Any] | None) -> "ScenarioConfig":
        data = dict(data or {})
        unknown = sorted(set(data) - cls.keys())
        if unknown:
            raise ConfigError("unknown configuration key(s): " + ", ".join(unknown))
        pnames = set(SystemParams.field_names())
        pvals = {k: data.pop(k) for k in list(data) if k in pnames}
        try:
            params = SystemParams(**{k: _number(k, v) for k, v in pvals.items()})
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        for key in ("temperature", "W_L"):
            if key in data and data[key] is not None:
                data[key] = [float(x) for x in np.atleast_1d(data[key])]
        cfg = cls(params=params, **data)
        cfg.check()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path, base: dict[str, Any] | None = None) -> "ScenarioConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a flat key/value mapping")
        for k, v in data.items():
            if isinstance(v, dict):
                raise ConfigError(f"config is flat; key {k!r} holds a nested mapping")
        merged = dict(base or {})
        merged.update(data)
        return cls.from_mapping(merged)

    def as_mapping(self) -> dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "params"}
        out.update(dataclasses.asdict(self.params))
        return out

    def updated(self, **changes) -> "ScenarioConfig":
        m = self.as_mapping()
        m.update(changes)
        return ScenarioConfig.from_mapping(m)

    # ------------------------------------------------------------------
    def check(self) -> None:
        errs = _errors(validate(self.params))
        if errs:
            raise ConfigError("invalid parameters: " + "; ".join(errs))
        for src in self.sources:
            if src not in SOURCES:
                raise ConfigError(f"unknown source {src!r}; choose from {', '.join(SOURCES)}")
        for name in ("delta_p", "wl", "omega_s", "omega_c"):
            lo, hi, n = (getattr(self, f"{name}_{s}") for s in ("min", "max", "points"))
            if int(n) < 1 or (int(n) > 1 and not hi > lo):
                raise ConfigError(f"empty {name} range [{lo}, {hi}] with {n} point(s)")
        if self.t_max <= 0 or self.t_points < 2:
            raise ConfigError("trajectory needs t_max > 0 and t_points >= 2")
        if self.sweep not in (None, "W_L", "omega_s", "omega_c"):
            raise ConfigError(f"unknown sweep {self.sweep!r}")
        if any(w not in (1, 2) for w in self.windows):
            raise ConfigError("windows must be drawn from 1 and 2")
        if self.population_mode not in ("clamped", "self-consistent"):
            raise ConfigError("population_mode is 'clamped' or 'self-consistent'")
        if self.mode not in ("steady", "trajectory"):
            raise ConfigError("mode is 'steady' or 'trajectory'")
        if self.lorentzian_form not in ("residue", "printed"):
            raise ConfigError("lorentzian_form is 'residue' or 'printed'")
        if self.method not in ("faddeeva", "quad", "gauss-hermite"):
            raise ConfigError(f"unknown quadrature method {self.method!r}")
        if len(self.rho0) != 4 or abs(sum(self.rho0) - 1) > 1e-9 or min(self.rho0) < 0:
            raise ConfigError("rho0 must be four non-negative populations summing to 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.temperature is not None and self.W_L is not None:
            raise ConfigError("give either temperature or W_L, not both")
        for v in (self.temperature or []) + (self.W_L or []):
            if v < 0:
                raise ConfigError("temperature and W_L must be >= 0")

    # ------------------------------------------------------------------
    def grid(self, name: str) -> np.ndarray:
        lo, hi, n = (getattr(self, f"{name}_{s}") for s in ("min", "max", "points"))
        return np.linspace(float(lo), float(hi), int(n))

    def doppler_widths(self) -> list[float]:
        """W_L values in MHz, from W_L directly or converted from temperatures."""
        from .doppler import RB87_D1_WAVELENGTH, RB87_MASS, profile_from_temperature

        if self.W_L is not None:
            return list(self.W_L)
        if self.temperature is not None:
            return [profile_from_temperature(T, self.mass or RB87_MASS,
                                             self.wavelength or RB87_D1_WAVELENGTH).W_L
                    for T in self.temperature]
        return []

    @property
    def clamp(self):
        from .susceptibility import CLAMPED

        return CLAMPED if self.population_mode == "clamped" else None


def _number(key, value):
    if key in ("omega_p", "omega_c", "omega_s"):
        if isinstance(value, str):
            try:
                value = complex(value.replace(" ", ""))
            except ValueError as exc:
                raise ConfigError(f"{key} is not a number: {value!r}") from exc
        v = complex(value)
        return v.real if v.imag == 0 else v
    if key == "gamma_4" and value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} is not a number: {value!r}") from exc
