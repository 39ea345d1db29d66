import numpy as np
import pytest

from ddeit.conditions import condition_ledger, doppler_gain_predicate, ledger_columns
from ddeit.model import (InvalidParams, Spectrum, SystemParams, check, derive_rates,
                         standard_params, validate)


def test_even_split_gives_gamma4_18():
    assert derive_rates(SystemParams(gamma_41=6, gamma_42=6, gamma_43=6)).gamma_4 == 18.0


def test_single_channel():
    p = SystemParams(gamma_41=1, gamma_42=0, gamma_43=0, gamma_phi2=0, gamma_phi3=0)
    rt = derive_rates(p)
    assert (rt.gamma_4, rt.Gamma_43, rt.gamma_3) == (1.0, 1.0, 0.0)


def test_pump_substitution():
    p = standard_params(pump_rate=1.0)
    rt = derive_rates(p)
    assert rt.gamma_4 == pytest.approx(20.0)
    assert rt.gamma_2 == pytest.approx(0.04 + 1)
    assert rt.gamma_3 == pytest.approx(0.01 + 1)
    assert rt.Gamma_43 == pytest.approx(rt.gamma_4 + rt.gamma_3)


def test_gamma4_override_rescales_channels():
    p = SystemParams(gamma_41=6, gamma_42=6, gamma_43=12, gamma_4=18.0)
    assert p.decay_channels() == pytest.approx((4.5, 4.5, 9.0))
    assert derive_rates(p).gamma_4 == pytest.approx(18.0)


def test_gamma4_override_below_phi4_rejected():
    with pytest.raises(InvalidParams):
        SystemParams(gamma_phi4=2.0, gamma_4=1.0).decay_channels()


def test_negative_rate_invalid():
    problems = validate(SystemParams(gamma_41=-1))
    assert any("gamma_41" in m for m in problems)
    with pytest.raises(InvalidParams):
        check(SystemParams(gamma_41=-1))


def test_zero_coupling_warns_only():
    problems = validate(standard_params(omega_s=5.0))
    assert problems and all(m.startswith("warning:") for m in problems)
    assert any("first transparency window" in m for m in problems)


def test_non_finite_rejected():
    assert validate(SystemParams(delta_p=float("nan")))


def test_condition_coupling_homogeneous():
    cond = {c.name: c for c in condition_ledger(standard_params(omega_c=18.0, omega_s=5.4))}
    c = cond["coupling_homogeneous"]
    assert (c.lhs, c.rhs) == pytest.approx((324.0, 0.72))
    assert c.satisfied


def test_conditions_with_doppler_width():
    cols = ledger_columns(standard_params(omega_c=18.0, omega_s=1.0), W_L=700.0)
    assert cols["cond_doppler_dominant"]
    assert not cols["cond_signal_inhomogeneous"]  # 1 < 0.01 * 700


@pytest.mark.parametrize("os_,W", [(0.1, 1.0), (6.3, 700.0), (30.0, 5000.0)])
def test_gain_predicate_positive(os_, W):
    assert doppler_gain_predicate(standard_params(omega_s=os_), W) > 0


def test_spectrum_rejects_bad_grids():
    p = SystemParams()
    with pytest.raises(ValueError):
        Spectrum([0, 0], [0, 0], "stationary", p)
    with pytest.raises(ValueError):
        Spectrum([0, 1], [0], "stationary", p)
    with pytest.raises(ValueError):
        Spectrum([0, 1], [0, 0], "made-up", p)


def test_spectrum_views():
    s = Spectrum([0.0, 1.0], [1 + 2j, 3 + 4j], "stationary", SystemParams())
    assert np.array_equal(s.absorption, [2, 4]) and np.array_equal(s.dispersion, [1, 3])
