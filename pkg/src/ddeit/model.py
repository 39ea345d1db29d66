"""Parameter records, derived rates and validation for the tripod atom.

Every rate, Rabi frequency, detuning and Doppler width is expressed in one
shared unit (MHz). No factors of 2*pi are inserted anywhere in the core.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class ModelError(Exception):
    """Base class for all errors raised by the package."""


class InvalidParams(ModelError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid parameters: " + "; ".join(self.problems))


@dataclass(frozen=True)
class SystemParams:
    """Field, detuning and relaxation parameters of the four-level atom.

    States are labelled 1, 2, 3 (lower) and 4 (excited). ``gamma_4`` is an
    optional override of the total excited-state width; when set, the three
    radiative channels are rescaled proportionally so that their sum plus
    ``gamma_phi4`` equals it.
    """

    omega_p: complex = 0.0
    omega_c: complex = 0.0
    omega_s: complex = 0.0
    delta_p: float = 0.0
    delta_c: float = 0.0
    delta_s: float = 0.0
    gamma_41: float = 6.0
    gamma_42: float = 6.0
    gamma_43: float = 6.0
    gamma_phi2: float = 0.04
    gamma_phi3: float = 0.01
    gamma_phi4: float = 0.0
    extra_dephasing_14: float = 0.0
    extra_dephasing_34: float = 0.0
    pump_rate: float = 0.0
    eta: float = 1.0
    gamma_4: float | None = None

    def replace(self, **changes: Any) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def decay_channels(self) -> tuple[float, float, float]:
        """Radiative rates (4->1, 4->2, 4->3) after any gamma_4 override."""
        chans = (float(self.gamma_41), float(self.gamma_42), float(self.gamma_43))
        if self.gamma_4 is None:
            return chans
        total = sum(chans)
        target = float(self.gamma_4) - float(self.gamma_phi4)
        if total <= 0.0:
            raise InvalidParams(["gamma_4 override needs at least one positive channel rate"])
        if target < 0.0:
            raise InvalidParams(["gamma_4 override is smaller than gamma_phi4"])
        return tuple(c * target / total for c in chans)  # type: ignore[return-value]

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))


@dataclass(frozen=True)
class DerivedRates:
    gamma_4: float
    gamma_2: float
    gamma_3: float
    Gamma_32: float
    Gamma_42: float
    Gamma_43: float
    delta_pc: float
    delta_ps: float
    delta_sc: float


def validate(params: SystemParams, conditions: bool = False) -> list[str]:
    """Return a list of problems with ``params``; empty means usable.

    Entries starting with ``"warning:"`` do not make the parameters invalid.
    With ``conditions=True`` the strong-field regime checks are appended as
    warnings when they fail.
    """
    problems: list[str] = []
    rate_fields = ("gamma_41", "gamma_42", "gamma_43", "gamma_phi2", "gamma_phi3",
                   "gamma_phi4", "extra_dephasing_14", "extra_dephasing_34", "pump_rate")
    for name in rate_fields:
        value = getattr(params, name)
        if not math.isfinite(value):
            problems.append(f"{name} is not finite")
        elif value < 0:
            problems.append(f"{name} must be >= 0 (got {value})")
    if params.gamma_4 is not None and not (math.isfinite(params.gamma_4) and params.gamma_4 >= 0):
        problems.append(f"gamma_4 must be finite and >= 0 (got {params.gamma_4})")
    if max(params.gamma_41, params.gamma_42, params.gamma_43) <= 0:
        problems.append("at least one of gamma_41, gamma_42, gamma_43 must be > 0")
    for name in ("delta_p", "delta_c", "delta_s"):
        if not math.isfinite(getattr(params, name)):
            problems.append(f"{name} is not finite")
    for name in ("omega_p", "omega_c", "omega_s"):
        if not np.isfinite(complex(getattr(params, name))):
            problems.append(f"{name} is not finite")
    if not math.isfinite(params.eta):
        problems.append("eta is not finite")
    if problems:
        return problems

    if params.omega_c == 0:
        problems.append("warning: omega_c = 0, the first transparency window is absent")
    if params.omega_s == 0:
        problems.append("warning: omega_s = 0, the second transparency window is absent")
    if conditions:
        from .conditions import condition_ledger

        for cond in condition_ledger(params):
            if not cond.satisfied:
                problems.append(f"warning: condition {cond.name} not satisfied "
                                f"({cond.lhs:.4g} vs {cond.rhs:.4g})")
    return problems


def _errors(problems: list[str]) -> list[str]:
    return [p for p in problems if not p.startswith("warning:")]


def check(params: SystemParams) -> SystemParams:
    """Raise InvalidParams unless ``params`` is valid; return it otherwise."""
    errs = _errors(validate(params))
    if errs:
        raise InvalidParams(errs)
    return params


def derive_rates(params: SystemParams) -> DerivedRates:
    """Total widths, coherence decay sums and two-photon detunings.

    With a pump rate r > 0 the substitution gamma_4 -> gamma_4 + 2r,
    gamma_3 -> gamma_3 + r, gamma_2 -> gamma_2 + r is applied before the
    sums are formed, so Gamma_kl = gamma_k + gamma_l holds exactly.
    """
    check(params)
    g4 = sum(params.decay_channels()) + params.gamma_phi4
    g2 = float(params.gamma_phi2)
    g3 = float(params.gamma_phi3)
    r = float(params.pump_rate)
    if r > 0:
        g4 += 2 * r
        g3 += r
        g2 += r
    dpc = params.delta_p - params.delta_c
    dps = params.delta_p - params.delta_s
    dsc = params.delta_s - params.delta_c
    return DerivedRates(
        gamma_4=g4, gamma_2=g2, gamma_3=g3,
        Gamma_32=g3 + g2, Gamma_42=g4 + g2, Gamma_43=g4 + g3,
        delta_pc=dpc, delta_ps=dps, delta_sc=dsc,
    )


SOURCES = ("stationary", "stationary-numeric", "doppler-numeric", "doppler-lorentzian")


@dataclass(frozen=True)
class Spectrum:
    """Complex susceptibility sampled on a strictly increasing detuning grid."""

    delta_p: np.ndarray
    chi: np.ndarray
    source: str
    params: SystemParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.delta_p, dtype=float)
        chi = np.asarray(self.chi, dtype=complex)
        if grid.ndim != 1:
            raise ValueError("spectrum grid must be a 1-D array")
        if grid.size != chi.size:
            raise ValueError("sample count does not match grid count")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("spectrum grid must be strictly increasing")
        if self.source not in SOURCES:
            raise ValueError(f"unknown spectrum source {self.source!r}")
        object.__setattr__(self, "delta_p", grid)
        object.__setattr__(self, "chi", chi)

    @property
    def absorption(self) -> np.ndarray:
        return self.chi.imag

    @property
    def dispersion(self) -> np.ndarray:
        return self.chi.real


def standard_params(**overrides: Any) -> SystemParams:
    """Figure-set defaults: gamma_4 = 18 split evenly, gamma_3 = 0.01, gamma_2 = 0.04."""
    base = dict(gamma_41=6.0, gamma_42=6.0, gamma_43=6.0,
                gamma_phi2=0.04, gamma_phi3=0.01, gamma_phi4=0.0)
    base.update(overrides)
    return SystemParams(**base)
