import math

import numpy as np
import pytest
from scipy.integrate import quad

from ddeit import doppler, spectral
from ddeit.doppler import (chi_doppler_lorentzian, chi_doppler_numeric, gaussian_lineshape,
                           lorentzian_lineshape, lorentzian_weighted_integral,
                           profile_from_temperature, profile_from_wl)
from ddeit.model import standard_params
from ddeit.susceptibility import chi_first_order


def test_zero_temperature_has_zero_width():
    assert profile_from_temperature(0.0).W_L == 0.0


def test_one_kelvin_anchor():
    # W_L = 2u/lambda for Rb-87 on the D1 line
    assert profile_from_temperature(1.0).W_L == pytest.approx(34.80, abs=0.01)


def test_wl_and_wg():
    prof = profile_from_wl(100.0)
    assert prof.W_G == pytest.approx(100.0 * math.sqrt(math.log(2)))


def test_peak_values():
    u, W = 3.0, 7.0
    assert doppler.maxwell_boltzmann(0.0, u) == pytest.approx(1 / (u * math.sqrt(math.pi)))
    assert lorentzian_lineshape(0.0, W) == pytest.approx(1 / (math.sqrt(math.pi) * W))


def test_lineshape_masses():
    W = 5.0
    g = quad(lambda x: gaussian_lineshape(x, W * math.sqrt(math.log(2))), -np.inf, np.inf)[0]
    lz = quad(lambda x: lorentzian_lineshape(x, W), -np.inf, np.inf)[0]
    assert g == pytest.approx(1.0)
    assert lz == pytest.approx(math.sqrt(math.pi))


def test_lineshapes_agree_near_centre():
    W_G = 10.0
    W_L = W_G / math.sqrt(math.log(2))
    x = np.linspace(-0.3, 0.3, 31) * W_G / math.sqrt(math.log(2))
    f = gaussian_lineshape(x, W_G)
    assert np.max(np.abs(f - lorentzian_lineshape(x, W_L)) / f) < 0.1


@pytest.mark.parametrize("W", [0.5, 34.8, 348.0])
@pytest.mark.parametrize("d", [-7.0, 0.0, 4.5, 9.0])
def test_faddeeva_matches_quadrature(fig3_params, W, d):
    res = chi_doppler_numeric(fig3_params, W, d)
    assert res.check_rel < 1e-9
    assert res.warning is None


def test_gauss_hermite_accurate_for_narrow_profiles(fig3_params):
    a = chi_doppler_numeric(fig3_params, 3.48, 5.0).value
    b = chi_doppler_numeric(fig3_params, 3.48, 5.0, method="gauss-hermite").value
    assert abs(a - b) / abs(a) < 1e-9


def test_unequal_wavevectors_use_quadrature(fig3_params):
    res = chi_doppler_numeric(fig3_params, 20.0, 1.0, method="quad", ratios=(1.0, 0.98, 1.02))
    assert res.check_rel < 1e-6
    with pytest.raises(ValueError):
        chi_doppler_numeric(fig3_params, 20.0, 1.0, ratios=(1.0, 0.98, 1.02))


def test_zero_width_is_stationary(fig3_params):
    assert chi_doppler_numeric(fig3_params, 0.0, 2.0).value == chi_first_order(fig3_params, 2.0)


def test_vectorised_average(fig3_params):
    grid = np.linspace(-10, 20, 7)
    vec = doppler.chi_doppler_average(fig3_params, 110.0, grid)
    ref = [chi_doppler_numeric(fig3_params, 110.0, d, cross_check=False).value for d in grid]
    assert np.allclose(vec, ref, rtol=1e-13)


def test_second_window_survives_heating(fig3_params):
    cold = spectral.hwhm_from_evaluator(fig3_params, 2, "doppler-numeric", 34.8)[0]
    hot = spectral.hwhm_from_evaluator(fig3_params, 2, "doppler-numeric", 348.0)[0]
    cold1 = spectral.hwhm_from_evaluator(fig3_params, 1, "doppler-numeric", 34.8)[0]
    hot1 = spectral.hwhm_from_evaluator(fig3_params, 1, "doppler-numeric", 348.0)[0]
    # window 2 shrinks far less than window 1 over the same tenfold change
    assert hot / cold > 0.5 and hot1 / cold1 < 0.3


@pytest.mark.xfail(strict=True, reason="window-2 HWHM drops 27% between W_L=34.8 and 348")
def test_second_window_width_unchanged_by_heating(fig3_params):
    cold = spectral.hwhm_from_evaluator(fig3_params, 2, "doppler-numeric", 34.8)[0]
    hot = spectral.hwhm_from_evaluator(fig3_params, 2, "doppler-numeric", 348.0)[0]
    assert abs(hot - cold) / cold < 0.10


def test_first_window_depth_shrinks(fig3_params):
    depth = []
    for W in (34.8, 110.0, 348.0):
        ext = spectral.numeric_extrema(fig3_params, 1, "doppler-numeric", W)
        depth.append(ext.h_max - ext.h_min)
    assert depth[0] > depth[1] > depth[2]


# Lorentzian approximation ----------------------------------------------------

def test_no_signal_means_no_i2():
    p = standard_params(omega_c=18.0, omega_p=0.9)
    res = chi_doppler_lorentzian(p, 348.0, 1.0)
    assert res.i2 == 0
    assert res.total == res.i1


@pytest.mark.parametrize("W", [34.8, 110.0, 348.0])
@pytest.mark.parametrize("d", [-5.0, 0.3, 9.0, 14.0])
def test_residue_form_matches_direct_integral(fig3_params, W, d):
    res = chi_doppler_lorentzian(fig3_params, W, d).total
    ref = lorentzian_weighted_integral(fig3_params, W, d)
    assert abs(res - ref) / abs(ref) < 1e-8


def test_printed_i2_differs_from_residue(fig3_params):
    gaps = [doppler.i2_form_discrepancy(fig3_params, 348.0, d) for d in np.linspace(-10, 20, 31)]
    assert max(gaps) > 1e-3


def test_suppressed_i2_drops_only_i2(fig3_params):
    full = chi_doppler_lorentzian(fig3_params, 110.0, 9.0)
    sup = chi_doppler_lorentzian(fig3_params, 110.0, 9.0, suppress_i2=True)
    assert sup.total == full.i1 and sup.i2 == full.i2


def test_lorentzian_needs_positive_width(fig3_params):
    with pytest.raises(ValueError):
        chi_doppler_lorentzian(fig3_params, 0.0, 1.0)
