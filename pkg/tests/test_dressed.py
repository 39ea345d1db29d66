import numpy as np
import pytest

from ddeit import dressed
from ddeit.dressed import (InfeasibleFit, NoAnalyticCase, cubic_residuals, dark_states, eigensystem,
                           fit_mixture, lambda_tilde_pm, mixture_populations)
from ddeit.liouvillian import build_generator, build_hamiltonian, steady_state, time_evolve
from ddeit.model import SystemParams, standard_params

FIG8A = standard_params(omega_c=18.0, omega_s=5.4, omega_p=5.4, delta_s=9.0)
FIG9A = standard_params(omega_c=18.0, omega_s=5.4, omega_p=5.4)
FIG10A = standard_params(omega_c=18.0, omega_s=9.0, omega_p=9.0, delta_s=9.0, delta_p=9.0)


def test_all_fields_off_gives_four_zero_eigenvalues():
    eig = eigensystem(build_hamiltonian(SystemParams()))
    assert np.array_equal(eig.values, np.zeros(4))


@pytest.mark.parametrize("p", [FIG8A, FIG9A, FIG10A, FIG8A.replace(delta_p=3.0)])
def test_numeric_eigensystem_quality(p):
    h = build_hamiltonian(p)
    eig = eigensystem(h)
    assert np.max(eig.residuals(h)) < 1e-12
    assert eig.orthonormality_error() < 1e-12


def test_delta_pc_zero_dark_state():
    info = dark_states(FIG8A)
    assert info.case == "delta_pc=0"
    k = int(np.argmin(np.abs(info.eigen.values)))
    assert abs(info.eigen.values[k]) < 1e-12
    assert info.dark_flags[k]
    psi = info.vectors["psi_D"]
    assert abs(np.vdot(psi, info.eigen.vectors[:, k])) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(psi * np.sqrt(18 ** 2 + 5.4 ** 2), [-18, 5.4, 0, 0])


def test_delta_pc_zero_populations():
    pops = dark_states(FIG8A).populations
    assert pops["P1"] == pytest.approx(0.917, abs=5e-4)
    assert pops["P2"] == pytest.approx(0.083, abs=5e-4)


@pytest.mark.parametrize("p", [FIG8A, FIG10A, FIG8A.replace(delta_p=4.0, delta_c=4.0)])
def test_bright_eigenvalues_solve_cubic(p):
    info = dark_states(p)
    bright = [v for v, dark in zip(info.eigen.values, info.dark_flags) if not dark]
    assert len(bright) == 3
    assert np.max(cubic_residuals(p, bright)) < 1e-8


def test_delta_ps_zero_equal_fields_split_evenly():
    info = dark_states(FIG10A)
    assert info.case == "delta_ps=0"
    assert info.populations["P1_prime"] == pytest.approx(0.5)
    assert info.populations["P3_prime"] == pytest.approx(0.5)


def test_all_equal_dark_states_have_no_excited_amplitude():
    info = dark_states(FIG9A)
    assert info.case == "all-equal"
    assert sum(info.dark_flags) == 2
    h = build_hamiltonian(FIG9A)
    for psi in info.vectors.values():
        assert psi[3] == 0
        assert np.linalg.norm(h @ psi) < 1e-12
    d1, d2 = info.vectors["psi_D1"], info.vectors["psi_D2"]
    assert abs(np.vdot(d1, d2)) < 1e-12


def test_all_equal_bright_eigenvalues():
    for dp in (0.0, 2.5):
        p = FIG9A.replace(delta_p=dp, delta_c=dp, delta_s=dp)
        info = dark_states(p)
        bright = sorted(v for v, dark in zip(info.eigen.values, info.dark_flags) if not dark)
        assert bright == pytest.approx(sorted(lambda_tilde_pm(p)), abs=1e-9)
    lp, lm = lambda_tilde_pm(FIG9A)
    half_root = 0.5 * np.sqrt(18 ** 2 + 2 * 5.4 ** 2)
    assert (lp, lm) == pytest.approx((half_root, -half_root))


def test_generic_detunings_have_no_analytic_case():
    with pytest.raises(NoAnalyticCase):
        dark_states(FIG8A.replace(delta_p=2.0))
    with pytest.raises(NoAnalyticCase):
        dressed.cubic_coefficients(FIG9A, "generic")


def test_mixture_endpoints():
    # p_D2 = 0 is pure |D1>, whose |2> weight vanishes
    assert mixture_populations(FIG9A, 0.0)[1] == 0.0
    assert sum(mixture_populations(FIG9A, 0.37)) == pytest.approx(1.0)


def test_mixture_fit_recovers_rho22():
    rho = steady_state(build_generator(FIG9A))
    fit = fit_mixture(FIG9A, rho)
    assert fit.predicted[1] == pytest.approx(fit.numeric[1], abs=1e-12)
    assert 0.0 <= fit.p_d2 <= 1.0


def test_mixture_fit_needs_equal_detunings():
    with pytest.raises(InfeasibleFit):
        fit_mixture(FIG8A, np.eye(4) / 4)


def test_mixture_fit_rejects_impossible_rho22():
    rho = np.diag([0.0, 1.0, 0.0, 0.0])
    with pytest.raises(InfeasibleFit):
        fit_mixture(FIG9A, rho)


def test_trajectory_ends_in_dark_state():
    g = build_generator(FIG8A)
    traj = time_evolve(g, np.diag([1, 0, 0, 0]).astype(complex), [0.0, 5.0, 400.0])
    psi = dark_states(FIG8A).vectors["psi_D"]
    overlap = np.vdot(psi, traj.rho[-1] @ psi).real
    assert 1 - overlap < 0.02
