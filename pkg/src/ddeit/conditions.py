"""Regime predicates attached to results.

A "much greater than" condition counts as satisfied when the left side
exceeds the right side by ``MUCH_GREATER`` (a factor of ten by default).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import SystemParams, derive_rates

MUCH_GREATER = 10.0


@dataclass(frozen=True)
class Condition:
    name: str
    description: str
    lhs: float
    rhs: float
    strict: bool  # True for "much greater than", False for plain ">"

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else float("inf")

    @property
    def satisfied(self) -> bool:
        if self.strict:
            return self.lhs >= MUCH_GREATER * self.rhs
        return self.lhs > self.rhs


def condition_ledger(params: SystemParams, W_L: float | None = None) -> list[Condition]:
    """Evaluate the homogeneous and (if ``W_L`` is given) Doppler conditions."""
    rates = derive_rates(params)
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    g2, g3, g4 = rates.gamma_2, rates.gamma_3, rates.gamma_4
    out = [
        Condition("coupling_homogeneous", "|Omega_c|^2 >> gamma_2 gamma_4", oc2, g2 * g4, True),
        Condition("signal_homogeneous", "|Omega_s|^2 >> gamma_3 gamma_4", os2, g3 * g4, True),
    ]
    if W_L is not None:
        out += [
            Condition("doppler_dominant", "W_L^2 >> gamma_4^2", W_L ** 2, g4 ** 2, True),
            Condition("coupling_inhomogeneous", "|Omega_c|^2 > gamma_2 W_L", oc2, g2 * W_L, False),
            Condition("signal_inhomogeneous", "|Omega_s|^2 > gamma_3 W_L", os2, g3 * W_L, False),
        ]
    return out


def ledger_columns(params: SystemParams, W_L: float | None = None) -> dict[str, bool]:
    """Flat ``{name: satisfied}`` mapping for CSV output."""
    return {f"cond_{c.name}": c.satisfied for c in condition_ledger(params, W_L)}


def doppler_gain_predicate(params: SystemParams, W_L: float) -> float:
    """The quantity (|Omega_s|^2 + W_L) / (gamma_3 W_L) whose positivity signals gain."""
    g3 = derive_rates(params).gamma_3
    return (abs(params.omega_s) ** 2 + W_L) / (g3 * W_L) if g3 * W_L else float("inf")
