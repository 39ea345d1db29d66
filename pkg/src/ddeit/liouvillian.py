"""Rotating-frame Hamiltonian, Lindblad generator and population solvers.

The density matrix is vectorised by stacking columns, so that
vec(A X B) = (B^T kron A) vec(X) and the element rho[i, j] sits at index
4*j + i.  Indices 0..3 correspond to the bare states |1>..|4>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import ModelError, SystemParams, check, derive_rates

N = 4
IDENT = np.eye(N)
DIAG_IDX = [N * i + i for i in range(N)]
OFF_IDX = [k for k in range(N * N) if k not in DIAG_IDX]
TRACE_ROW = IDENT.reshape(-1, order="F")


class SingularSystem(ModelError):
    def __init__(self, message, condition):
        self.condition = condition
        super().__init__(f"{message} (condition number {condition:.3g})")


class StepFailure(ModelError):
    def __init__(self, t, message=""):
        self.t = t
        super().__init__(f"time integration failed at t={t:.6g}: {message}")


class DegenerateFormula(ModelError):
    pass


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(N, N, order="F")


def sigma(i: int, j: int) -> np.ndarray:
    """|i+1><j+1| as a dense 4x4 matrix (0-based arguments)."""
    m = np.zeros((N, N), dtype=complex)
    m[i, j] = 1.0
    return m


def build_hamiltonian(params: SystemParams) -> np.ndarray:
    r"""H' = delta_pc s22 + delta_ps s33 + delta_p s44 + (1/2)(Op s14 + Oc s24 + Os s34 + h.c.)."""
    rates = derive_rates(params)
    h = np.diag([0.0, rates.delta_pc, rates.delta_ps, params.delta_p]).astype(complex)
    h[0, 3] = params.omega_p / 2
    h[1, 3] = params.omega_c / 2
    h[2, 3] = params.omega_s / 2
    h[3, 0] = np.conj(h[0, 3])
    h[3, 1] = np.conj(h[1, 3])
    h[3, 2] = np.conj(h[2, 3])
    return h


@dataclass(frozen=True)
class Channel:
    kind: str  # "decay", "dephasing", "pump" or "coherence"
    rate: float
    label: str


@dataclass(frozen=True)
class LindbladGenerator:
    matrix: np.ndarray
    hamiltonian: np.ndarray
    channels: tuple[Channel, ...] = ()

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho))


def commutator_super(h: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> -i[h, rho]."""
    return -1j * (np.kron(IDENT, h) - np.kron(h.T, IDENT))


def dissipator(c: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> c rho c^+ - {c^+ c, rho}/2."""
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * np.kron(IDENT, cdc) - 0.5 * np.kron(cdc.T, IDENT)


def _coherence_damping(i: int, j: int, rate: float) -> np.ndarray:
    """Extra pure decay -rate*rho_ij (and its conjugate element)."""
    m = np.zeros((N * N, N * N), dtype=complex)
    for a, b in ((i, j), (j, i)):
        k = N * b + a
        m[k, k] = -rate
    return m


def build_generator(params: SystemParams) -> LindbladGenerator:
    """Lindblad generator L with d vec(rho)/dt = L vec(rho)."""
    check(params)
    h = build_hamiltonian(params)
    L = commutator_super(h)
    channels = []
    g41, g42, g43 = params.decay_channels()
    for lower, rate in enumerate((g41, g42, g43)):
        if rate > 0:
            L = L + rate * dissipator(sigma(lower, 3))
            channels.append(Channel("decay", rate, f"4->{lower + 1}"))
    for level, rate in ((1, params.gamma_phi2), (2, params.gamma_phi3), (3, params.gamma_phi4)):
        if rate > 0:
            L = L + rate * dissipator(sigma(level, level))
            channels.append(Channel("dephasing", rate, f"phi{level + 1}"))
    if params.pump_rate > 0:
        L = L + params.pump_rate * dissipator(sigma(3, 0))
        channels.append(Channel("pump", params.pump_rate, "1->4"))
    if params.extra_dephasing_14 > 0:
        L = L + _coherence_damping(0, 3, params.extra_dephasing_14)
        channels.append(Channel("coherence", params.extra_dephasing_14, "rho14"))
    if params.extra_dephasing_34 > 0:
        L = L + _coherence_damping(2, 3, params.extra_dephasing_34)
        channels.append(Channel("coherence", params.extra_dephasing_34, "rho34"))
    return LindbladGenerator(matrix=L, hamiltonian=h, channels=tuple(channels))


def coherence_decay_rates(generator: LindbladGenerator) -> dict[tuple[int, int], float]:
    """Damping rate of each coherence rho_ij (i<j, 1-based) read off the generator diagonal."""
    out = {}
    for i in range(N):
        for j in range(i + 1, N):
            k = N * j + i
            out[(i + 1, j + 1)] = float(-generator.matrix[k, k].real)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray
    residual: float = 0.0
    condition: float = float("nan")
    clamped: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.rho)).copy()

    def element(self, i: int, j: int) -> complex:
        """rho_ij with 1-based indices, as written in the equations."""
        return complex(self.rho[i - 1, j - 1])

    def check(self, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-8) -> list[str]:
        problems = []
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
            problems.append("not Hermitian")
        if abs(np.trace(rho) - 1) > trace_tol:
            problems.append("trace differs from 1")
        if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -pos_tol:
            problems.append("negative eigenvalue")
        return problems


def _hermitize(rho):
    return 0.5 * (rho + rho.conj().T)


def steady_state(generator: LindbladGenerator, clamp=None, allow_degenerate=False,
                 cond_limit=1e12) -> DensityMatrix:
    """Stationary state of ``generator``.

    Default: self-consistent solve of L rho = 0 with the first row replaced by
    the trace condition. With ``clamp=(p1, p2, p3, p4)`` the populations are
    held fixed and only the twelve coherences are solved for, which is the
    analytic regime used for the first-order susceptibility.
    """
    L = generator.matrix
    if clamp is not None:
        pops = np.asarray(clamp, dtype=float)
        A = L[np.ix_(OFF_IDX, OFF_IDX)]
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > cond_limit:
            raise SingularSystem("coherence block is singular", cond)
        x = np.linalg.solve(A, -L[np.ix_(OFF_IDX, DIAG_IDX)] @ pops)
        v = np.zeros(N * N, dtype=complex)
        v[DIAG_IDX] = pops
        v[OFF_IDX] = x
        residual = float(np.max(np.abs((L @ v)[OFF_IDX])))
        return DensityMatrix(_hermitize(unvec(v)), residual, cond, clamped=True)

    A = L.copy()
    b = np.zeros(N * N, dtype=complex)
    A[0, :] = TRACE_ROW
    b[0] = 1.0
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_limit:
        if not allow_degenerate:
            raise SingularSystem("steady state is not unique", cond)
        v = np.linalg.lstsq(A, b, rcond=None)[0]
    else:
        v = np.linalg.solve(A, b)
    rho = _hermitize(unvec(v))
    residual = float(np.max(np.abs(L @ vec(rho))))
    return DensityMatrix(rho, residual, cond, clamped=False,
                         meta={"degenerate": bool(cond > cond_limit or not np.isfinite(cond))})


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    rho: np.ndarray  # shape (len(t), 4, 4)
    max_trace_error: float

    def element(self, i: int, j: int) -> np.ndarray:
        return self.rho[:, i - 1, j - 1]


def time_evolve(generator: LindbladGenerator, rho0, t_grid, rtol=1e-8, atol=1e-11,
                trace_tol=1e-7) -> Trajectory:
    """Integrate d rho/dt = L rho with an adaptive 8th-order Runge-Kutta scheme."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    L = generator.matrix
    y0 = vec(rho0)
    if t_grid[0] == 0 and t_grid.size == 1:
        return Trajectory(t_grid, unvec(y0)[None], 0.0)
    sol = solve_ivp(lambda _t, y: L @ y, (0.0, float(t_grid[-1])), y0, method="DOP853",
                    t_eval=t_grid, rtol=rtol, atol=atol)
    if not sol.success:
        raise StepFailure(float(sol.t[-1]) if sol.t.size else 0.0, sol.message)
    rhos = np.stack([unvec(sol.y[:, k]) for k in range(sol.y.shape[1])])
    trace_err = float(np.max(np.abs(np.trace(rhos, axis1=1, axis2=2) - np.trace(unvec(y0)))))
    if trace_err > trace_tol:
        raise StepFailure(float(t_grid[-1]), f"trace drifted by {trace_err:.3g}")
    return Trajectory(t_grid, rhos, trace_err)


@dataclass(frozen=True)
class PopulationReport:
    rho11: float
    rho22: float
    rho33: float
    rho44: float
    X: float
    Y: float
    Z: float
    pumped: bool

    @property
    def total(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)


def population_intermediates(params: SystemParams) -> tuple[float, float, float]:
    """X, Y, Z of the closed-form populations (pump substitution included when r > 0)."""
    rt = derive_rates(params)
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    dc, ds, dsc = params.delta_c, params.delta_s, rt.delta_sc
    G42, G43, G32 = rt.Gamma_42, rt.Gamma_43, rt.Gamma_32
    a = G43 + oc2 * G32 / (G32 ** 2 + 4 * dsc ** 2)
    b = oc2 * dsc / (G32 ** 2 + 4 * dsc ** 2) - ds
    den = a * a + 4 * b * b
    X = os2 * oc2 / ((G42 ** 2 + 4 * dc ** 2) * (G32 ** 2 + 4 * dsc ** 2)) * (
        a * (4 * ds * dsc + G32 * G42) / den + b * (4 * G32 * dc - G42 * dsc) / den)
    Y = oc2 * G42 / (G42 ** 2 + 4 * dc ** 2)
    Z = os2 * a / den
    return X, Y, Z


def populations_closed_form(params: SystemParams, rho0=(1.0, 0.0, 0.0, 0.0),
                            rel_guard=1e-12) -> PopulationReport:
    """Weak-probe closed-form steady populations, evaluated as printed.

    The probe is treated as absent. Without pumping the result depends on
    the initial populations ``rho0``; with pumping it does not.
    """
    X, Y, Z = population_intermediates(params)
    g41, g42, g43 = params.decay_channels()
    r = params.pump_rate
    p11, p22, p33, _ = (float(x) for x in rho0)
    if r > 0:
        D = Z * (-r * g42 + 4 * r * Y + g41 * Y) + r * g43 * (Y - X)
        scale = abs(Z) * (r * g42 + 4 * r * abs(Y) + g41 * abs(Y)) + r * g43 * (abs(Y) + abs(X))
        if abs(D) < rel_guard * max(scale, 1e-300):
            raise DegenerateFormula("pumped population denominator vanishes")
        return PopulationReport(
            Z * Y * (g41 + r) / D, r * (Z * (Y - g42) - g43 * X) / D,
            r * Y * (Z + g43) / D, r * Z * Y / D, X, Y, Z, True)

    D = g41 * Z * Y + g43 * (X - Y)
    scale = g41 * abs(Z * Y) + g43 * (abs(X) + abs(Y))
    if abs(D) < rel_guard * max(scale, 1e-300):
        raise DegenerateFormula("population denominator vanishes")
    D_plus = g41 * Z * Y + g43 * (X + Y)
    rho11 = g41 * Z * Y / D
    rho22 = (g41 * Z * p22 + (Z * (Y - g42) - X * g43) * (1 - p11)) / D_plus + X * g41 * p33 / D
    rho33 = Y * ((Z + g43) * (1 - p11) + g41 * p33) / D
    rho44 = Z * (1 - p11) * Y / D
    return PopulationReport(rho11, rho22, rho33, rho44, X, Y, Z, False)
