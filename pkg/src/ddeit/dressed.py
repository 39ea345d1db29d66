"""Dressed states of the rotating-frame Hamiltonian and dark-state populations.

The numeric eigensystem is primary. The analytic cubic eigenvalue equations
are used only as residual checks, which sidesteps root ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .liouvillian import build_hamiltonian
from .model import ModelError, SystemParams, derive_rates

CASE_TOL = 1e-9
DARK_TOL = 1e-10


class NoAnalyticCase(ModelError):
    pass


class InfeasibleFit(ModelError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray   # (4,) real, ascending
    vectors: np.ndarray  # (4, 4), column k belongs to values[k]

    def residuals(self, h: np.ndarray) -> np.ndarray:
        return np.array([np.linalg.norm(h @ self.vectors[:, k] - self.values[k] * self.vectors[:, k])
                         for k in range(len(self.values))])

    def orthonormality_error(self) -> float:
        v = self.vectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))


def eigensystem(h: np.ndarray) -> EigenSystem:
    """Eigenpairs of a Hermitian H', sorted by eigenvalue then by excited-state weight."""
    vals, vecs = np.linalg.eigh(h)
    order = sorted(range(len(vals)), key=lambda k: (round(float(vals[k]), 12), abs(vecs[3, k])))
    return EigenSystem(vals[order].astype(float), vecs[:, order])


def is_dark(h: np.ndarray, psi: np.ndarray, tol: float = DARK_TOL) -> bool:
    """No excited-state amplitude and no coupling to |4> through H'."""
    return abs(psi[3]) < tol and abs(np.vdot(psi, h[:, 3])) < tol


def detect_case(params: SystemParams, tol: float = CASE_TOL) -> str:
    rt = derive_rates(params)
    pc = abs(rt.delta_pc) < tol
    ps = abs(rt.delta_ps) < tol
    if pc and ps:
        return "all-equal"
    if pc:
        return "delta_pc=0"
    if ps:
        return "delta_ps=0"
    return "generic"


def cubic_coefficients(params: SystemParams, case: str) -> np.ndarray:
    """Coefficients (highest power first) of the bright-state eigenvalue cubic."""
    rt = derive_rates(params)
    op2, oc2, os2 = (abs(params.omega_p) ** 2, abs(params.omega_c) ** 2, abs(params.omega_s) ** 2)
    dp = params.delta_p
    total = op2 + oc2 + os2
    if case == "delta_pc=0":
        d = rt.delta_ps
        return np.array([4.0, -4 * (d + dp), 4 * d * dp - total, d * (oc2 + op2)])
    if case == "delta_ps=0":
        d = rt.delta_pc
        return np.array([4.0, -4 * (d + dp), 4 * d * dp - total, d * (os2 + op2)])
    raise NoAnalyticCase(f"no eigenvalue cubic for case {case!r}")


def cubic_residuals(params: SystemParams, values, case: str | None = None) -> np.ndarray:
    """Normalised residual |c(lambda)| / sum|c_k lambda^k| of each eigenvalue in the cubic."""
    case = case or detect_case(params)
    coeffs = cubic_coefficients(params, case)
    out = []
    for lam in np.asarray(values, dtype=float):
        terms = coeffs * lam ** np.arange(3, -1, -1)
        out.append(abs(terms.sum()) / max(np.sum(np.abs(terms)), 1e-300))
    return np.array(out)


def lambda_tilde_pm(params: SystemParams) -> tuple[float, float]:
    """Bright eigenvalues of the equal-detuning case, (1/2)(delta_p +- sqrt(delta_p^2 + sum Omega^2))."""
    dp = params.delta_p
    root = np.sqrt(dp ** 2 + abs(params.omega_p) ** 2 + abs(params.omega_c) ** 2
                   + abs(params.omega_s) ** 2)
    return 0.5 * (dp + root), 0.5 * (dp - root)


@dataclass(frozen=True)
class DarkStateInfo:
    case: str
    eigen: EigenSystem
    dark_flags: tuple[bool, ...]
    vectors: dict = field(default_factory=dict)
    populations: dict = field(default_factory=dict)


def analytic_dark_vectors(params: SystemParams, case: str) -> dict[str, np.ndarray]:
    op, oc, os_ = complex(params.omega_p), complex(params.omega_c), complex(params.omega_s)
    out = {}
    if case in ("delta_pc=0",):
        out["psi_D"] = np.array([-np.conj(oc), np.conj(op), 0, 0]) / np.sqrt(abs(oc) ** 2 + abs(op) ** 2)
    if case in ("delta_ps=0",):
        out["psi_D_prime"] = np.array([-np.conj(os_), 0, np.conj(op), 0]) / np.sqrt(abs(os_) ** 2 + abs(op) ** 2)
    if case == "all-equal":
        out["psi_D1"] = np.array([-np.conj(os_), 0, np.conj(op), 0]) / np.sqrt(abs(os_) ** 2 + abs(op) ** 2)
        norm = np.sqrt((abs(oc) ** 2 + abs(op) ** 2 + abs(os_) ** 2) * (abs(op) ** 2 + abs(os_) ** 2))
        out["psi_D2"] = np.array([oc * op, -(op ** 2 + os_ ** 2), oc * os_, 0]) / norm
    return out


def mixture_populations(params: SystemParams, p_d2: float) -> tuple[float, float, float]:
    """P~1, P~2, P~3 of the mixture p_D1 |D1><D1| + p_D2 |D2><D2|."""
    op2, oc2, os2 = (abs(params.omega_p) ** 2, abs(params.omega_c) ** 2, abs(params.omega_s) ** 2)
    total = op2 + oc2 + os2
    p_d1 = 1.0 - p_d2
    ps = op2 + os2
    P1 = (p_d1 * os2 + p_d2 * op2 * oc2 / total) / ps
    P2 = p_d2 * abs(complex(params.omega_p) ** 2 + complex(params.omega_s) ** 2) ** 2 / (total * ps)
    P3 = (p_d1 * op2 + p_d2 * os2 * oc2 / total) / ps
    return P1, P2, P3


def dark_states(params: SystemParams, tol: float = CASE_TOL) -> DarkStateInfo:
    """Classify the detuning case and return analytic dark states with their populations.

    Raises NoAnalyticCase for generic detunings; the numeric eigensystem is
    then available from ``eigensystem(build_hamiltonian(params))``.
    """
    h = build_hamiltonian(params)
    eig = eigensystem(h)
    flags = tuple(bool(is_dark(h, eig.vectors[:, k])) for k in range(4))
    case = detect_case(params, tol)
    if case == "generic":
        raise NoAnalyticCase("no analytic dark state for generic detunings")
    op2, oc2, os2 = (abs(params.omega_p) ** 2, abs(params.omega_c) ** 2, abs(params.omega_s) ** 2)
    pops = {}
    if case == "delta_pc=0":
        pops["P1"] = oc2 / (oc2 + op2)
        pops["P2"] = op2 / (oc2 + op2)
    elif case == "delta_ps=0":
        pops["P1_prime"] = os2 / (os2 + op2)
        pops["P3_prime"] = op2 / (os2 + op2)
    else:
        pops["P1_D1"] = os2 / (os2 + op2)
        pops["P3_D1"] = op2 / (os2 + op2)
    return DarkStateInfo(case, eig, flags, analytic_dark_vectors(params, case), pops)


@dataclass(frozen=True)
class MixtureFit:
    p_d1: float
    p_d2: float
    predicted: tuple[float, float, float]
    numeric: tuple[float, float, float]

    @property
    def deviation(self) -> tuple[float, float, float]:
        return tuple(abs(a - b) for a, b in zip(self.predicted, self.numeric))


def fit_mixture(params: SystemParams, rho, eps: float = 1e-9) -> MixtureFit:
    """Fit p_D2 from the numeric |2> population and predict the |1>, |3> populations.

    ``rho`` is a 4x4 density matrix or an object with a ``rho`` attribute.
    """
    if detect_case(params) != "all-equal":
        raise InfeasibleFit("the mixture model needs delta_p = delta_c = delta_s")
    rho = np.asarray(getattr(rho, "rho", rho))
    r11, r22, r33 = (float(rho[k, k].real) for k in range(3))
    unit = mixture_populations(params, 1.0)[1]
    if unit <= 0:
        raise InfeasibleFit("P~2 does not depend on p_D2 for these fields")
    p_d2 = r22 / unit
    if not -eps <= p_d2 <= 1 + eps:
        raise InfeasibleFit(f"fitted p_D2 = {p_d2:.4g} lies outside [0, 1]")
    return MixtureFit(1.0 - p_d2, p_d2, mixture_populations(params, p_d2), (r11, r22, r33))
