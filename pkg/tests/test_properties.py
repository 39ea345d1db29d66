"""Randomised invariants over the physical parameter space."""

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from ddeit.doppler import chi_doppler_lorentzian, chi_doppler_numeric, lorentzian_weighted_integral
from ddeit.dressed import eigensystem
from ddeit.liouvillian import build_generator, build_hamiltonian, steady_state, time_evolve
from ddeit.model import SystemParams
from ddeit.susceptibility import chi_first_order

rate = st.floats(0.1, 20.0)
small_rate = st.floats(0.0, 1.0)
rabi = st.floats(0.0, 30.0)
detuning = st.floats(-30.0, 30.0)

PROFILE = settings(max_examples=50, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def params(draw, min_dephasing=0.0, driven=False):
    lo = 0.5 if driven else 0.0
    return SystemParams(
        gamma_41=draw(rate), gamma_42=draw(rate), gamma_43=draw(rate),
        gamma_phi2=draw(st.floats(min_dephasing, min_dephasing + 1.0)),
        gamma_phi3=draw(st.floats(min_dephasing, min_dephasing + 1.0)),
        pump_rate=draw(small_rate),
        omega_p=draw(st.floats(lo, 30.0)), omega_c=draw(st.floats(lo, 30.0)),
        omega_s=draw(st.floats(lo, 30.0)),
        delta_p=draw(detuning), delta_c=draw(detuning), delta_s=draw(detuning))


def random_rho(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    r = a @ a.conj().T
    return r / np.trace(r)


@PROFILE
@given(params(), st.integers(0, 2 ** 32 - 1))
def test_generator_keeps_trace_and_hermiticity(p, seed):
    d = build_generator(p).apply(random_rho(seed))
    assert abs(np.trace(d)) < 1e-9
    assert np.max(np.abs(d - d.conj().T)) < 1e-9


@PROFILE
@given(params(min_dephasing=0.05, driven=True))
def test_steady_state_is_a_density_matrix(p):
    rho = steady_state(build_generator(p))
    assert rho.check(herm_tol=1e-8, trace_tol=1e-8, pos_tol=1e-7) == []


@PROFILE
@given(params(), st.lists(detuning, min_size=1, max_size=8))
def test_vectorised_chi_equals_scalar(p, grid):
    vec = chi_first_order(p, np.array(grid))
    ref = np.array([chi_first_order(p, d) for d in grid])
    assert np.allclose(vec, ref, rtol=1e-12, atol=0)


@PROFILE
@given(params(min_dephasing=0.01), st.floats(1.0, 500.0), detuning)
def test_faddeeva_agrees_with_quadrature(p, W, d):
    assert chi_doppler_numeric(p, W, d).check_rel < 1e-7


@PROFILE
@given(params(min_dephasing=0.01), st.floats(5.0, 500.0), detuning)
def test_residue_form_matches_lorentzian_integral(p, W, d):
    res = chi_doppler_lorentzian(p, W, d).total
    ref = lorentzian_weighted_integral(p, W, d)
    assert abs(res - ref) <= 1e-7 * abs(ref) + 1e-14


@PROFILE
@given(params())
def test_eigenpairs_are_accurate(p):
    h = build_hamiltonian(p)
    eig = eigensystem(h)
    scale = max(1.0, np.max(np.abs(h)))
    assert np.max(eig.residuals(h)) < 1e-12 * scale
    assert eig.orthonormality_error() < 1e-12


def relaxation_rate(g):
    """Slowest nonzero decay rate of the generator (its spectral gap)."""
    ev = np.sort(-np.linalg.eigvals(g.matrix).real)
    return ev[1]


@PROFILE
@given(params(min_dephasing=0.5, driven=True), st.integers(0, 2 ** 32 - 1))
def test_long_evolution_reaches_steady_state(p, seed):
    # optical pumping through weak fields can make the gap small, so the
    # horizon is set in units of the slowest relaxation time
    g = build_generator(p)
    gap = relaxation_rate(g)
    assume(gap > 1e-2)
    traj = time_evolve(g, random_rho(seed), [0.0, 30.0 / gap])
    ss = steady_state(g).rho
    assert np.max(np.abs(traj.rho[-1] - ss)) < 1e-6
