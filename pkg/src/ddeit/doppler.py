"""Thermal velocity averaging of the probe susceptibility.

Doppler variable
----------------
Widths are quoted in MHz with W_L = 2u/lambda, where u = sqrt(2kT/m) is the
most probable speed. With that choice the Maxwell-Boltzmann profile in the
variable x = 2v/lambda has 1/e half-width W_L and HWHM W_G = W_L sqrt(ln 2),
and every one-photon detuning of an atom moving at speed v is shifted by
s = x/2 = v/lambda. In terms of s the velocity distribution is a Gaussian
with 1/e half-width a = W_L/2 and the Lorentzian stand-in has HWHM W_L/2.

Because the two-photon detunings are unchanged by the shift, chi(s) is a
rational function of s with two simple poles. Its Gaussian average is then
exact in terms of the Faddeeva function, and its Lorentzian average is a
residue sum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants
from scipy.integrate import IntegrationWarning, quad
from scipy.special import wofz

from .model import ModelError, SystemParams
from .susceptibility import CLAMPED, PoleError, chi_first_order, chi_terms

RB87_MASS = 86.909180531 * constants.atomic_mass
RB87_D1_WAVELENGTH = 794.979e-9
SQRT_PI = math.sqrt(math.pi)
SQRT_LN2 = math.sqrt(math.log(2.0))


class QuadratureFailure(ModelError):
    pass


@dataclass(frozen=True)
class DopplerProfile:
    temperature: float | None
    mass: float | None
    wavelength: float | None
    u: float | None
    W_G: float
    W_L: float


def profile_from_temperature(T: float, mass: float = RB87_MASS,
                             wavelength: float = RB87_D1_WAVELENGTH) -> DopplerProfile:
    """Thermal speed and Doppler widths (MHz) at temperature ``T`` in kelvin."""
    if T < 0 or mass <= 0 or wavelength <= 0:
        raise ValueError("need T >= 0, mass > 0 and wavelength > 0")
    u = math.sqrt(2.0 * constants.k * T / mass)
    W_L = 2.0 * u / wavelength * 1e-6
    return DopplerProfile(T, mass, wavelength, u, W_L * SQRT_LN2, W_L)


def profile_from_wl(W_L: float) -> DopplerProfile:
    if W_L < 0:
        raise ValueError("W_L must be >= 0")
    return DopplerProfile(None, None, None, None, W_L * SQRT_LN2, W_L)


def resolve_wl(profile=None, W_L=None) -> float:
    if W_L is not None:
        return float(W_L)
    if profile is None:
        raise ValueError("a Doppler profile or W_L is required")
    return float(getattr(profile, "W_L", profile))


def maxwell_boltzmann(v, u):
    """Velocity density exp(-v^2/u^2) / (u sqrt(pi))."""
    v = np.asarray(v, dtype=float)
    return np.exp(-(v / u) ** 2) / (u * SQRT_PI)


def gaussian_lineshape(x, W_G):
    """Maxwell-Boltzmann density in the Doppler variable x, HWHM ``W_G``."""
    x = np.asarray(x, dtype=float)
    return SQRT_LN2 / (SQRT_PI * W_G) * np.exp(-math.log(2.0) * (x / W_G) ** 2)


def lorentzian_lineshape(x, W_L):
    """(1/sqrt(pi)) W_L / (W_L^2 + x^2), normalised as printed (total mass sqrt(pi))."""
    x = np.asarray(x, dtype=float)
    return W_L / (SQRT_PI * (W_L ** 2 + x ** 2))


# ---------------------------------------------------------------------------
# Gaussian average


def _gauss_inverse_mean(p, a):
    """E[1/(s - p)] for s ~ exp(-s^2/a^2)/(a sqrt(pi)), Im p != 0."""
    p = np.asarray(p, dtype=complex)
    out = np.empty(p.shape, dtype=complex)
    upper = p.imag > 0
    out[upper] = 1j * SQRT_PI / a * wofz(p[upper] / a)
    out[~upper] = -1j * SQRT_PI / a * wofz(-p[~upper] / a)
    return out


def _pole_parts(params, delta_p, populations):
    """Coefficients of chi(s) = i eta [alpha/(B - 2is) + beta/(A' + 2is)]."""
    t = chi_terms(params, delta_p)
    B, Ap, C = t.B, t.A, t.C
    p11, _, p33, p44 = populations
    P1, P2 = p11 - p44, p44 - p33
    beta = P2 * C / (Ap + B)
    alpha = P1 + beta
    return B, Ap, alpha, beta


def velocity_response(params, delta_p, populations=CLAMPED, ratios=None):
    """Return s -> chi for atoms whose one-photon detunings are shifted by s (MHz).

    ``ratios`` scales the shift per field (probe, coupling, signal).
    """
    if ratios is None:
        B, Ap, alpha, beta = (complex(x) for x in _pole_parts(params, delta_p, populations))
        eta = params.eta

        def chi_s(s):
            s = np.asarray(s, dtype=float)
            return 1j * eta * (alpha / (B - 2j * s) + beta / (Ap + 2j * s))
        return chi_s
    kp, kc, ks = ratios

    def chi_s_general(s):
        if np.ndim(s):
            return np.array([chi_s_general(x) for x in np.asarray(s, dtype=float)])
        shifted = params.replace(delta_c=params.delta_c + kc * s, delta_s=params.delta_s + ks * s)
        return chi_first_order(shifted, delta_p + kp * s, populations=populations)
    return chi_s_general


def chi_velocity(params, delta_p, s, populations=CLAMPED, ratios=None):
    """chi for atoms whose one-photon detunings are all shifted by ``s`` (MHz)."""
    return velocity_response(params, delta_p, populations, ratios)(s)


def _faddeeva_average(params, W_L, delta_p, populations):
    a = W_L / 2.0
    B, Ap, alpha, beta = _pole_parts(params, delta_p, populations)
    shape = np.shape(B)
    B, Ap = np.atleast_1d(B), np.atleast_1d(Ap)
    e_b = 0.5j * _gauss_inverse_mean(-0.5j * B, a)
    e_a = -0.5j * _gauss_inverse_mean(0.5j * Ap, a)
    val = 1j * params.eta * (np.atleast_1d(alpha) * e_b + np.atleast_1d(beta) * e_a)
    return val.reshape(shape)


def _quad_average(params, W_L, delta_p, populations, ratios=None, span=6.0, epsrel=1e-11):
    a = W_L / 2.0
    lim = span * a
    points = []
    if ratios is None:
        t = chi_terms(params, delta_p)
        for pole in (float(t.B2), float(t.A2)):
            if -lim < pole < lim:
                points.append(pole)
    else:
        for target in (0.0, params.delta_s - delta_p):
            if -lim < target < lim:
                points.append(target)

    chi_s = velocity_response(params, delta_p, populations, ratios)

    def f(s):
        return chi_s(s) * math.exp(-(s / a) ** 2)

    opts = dict(points=sorted(points) or None, limit=4000, epsabs=0.0, epsrel=epsrel)
    # a near-zero real or imaginary part makes the pure relative target
    # unreachable; the result is judged by the cross-check, not by quad itself
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        re = quad(lambda s: complex(f(s)).real, -lim, lim, **opts)[0]
        im = quad(lambda s: complex(f(s)).imag, -lim, lim, **opts)[0]
    return complex(re, im) / (a * SQRT_PI)


def _hermite_average(params, W_L, delta_p, populations, nodes, ratios=None):
    a = W_L / 2.0
    t, w = np.polynomial.hermite.hermgauss(nodes)
    vals = velocity_response(params, delta_p, populations, ratios)(a * t)
    return complex(np.sum(w * vals) / SQRT_PI)


@dataclass(frozen=True)
class DopplerChi:
    value: complex
    method: str
    check_value: complex | None = None
    check_rel: float | None = None
    warning: str | None = None


def chi_doppler_numeric(params: SystemParams, profile, delta_p, method="faddeeva", nodes=201,
                        populations=CLAMPED, cross_check=True, ratios=None,
                        warn_tol=1e-6, fail_tol=1e-3) -> DopplerChi:
    """Maxwell-Boltzmann average of the first-order susceptibility at one detuning.

    ``method`` selects the primary evaluation: "faddeeva" (closed form, the
    default), "quad" (adaptive quadrature over +-6 thermal widths) or
    "gauss-hermite" with ``nodes`` points. With ``cross_check`` the value is
    compared with adaptive quadrature (or with the Faddeeva form when quad is
    primary); a relative gap above ``warn_tol`` attaches a warning and one
    above ``fail_tol`` raises QuadratureFailure. ``ratios`` gives per-field
    wavevector ratios (probe, coupling, signal); the default treats all three
    as equal, which keeps the two-photon detunings velocity independent.
    """
    W_L = resolve_wl(profile)
    delta_p = float(delta_p)
    if W_L == 0:
        return DopplerChi(chi_first_order(params, delta_p, populations=populations), "exact")
    if ratios is not None and tuple(ratios) == (1, 1, 1):
        ratios = None
    if method == "faddeeva":
        if ratios is not None:
            raise ValueError("the Faddeeva form needs equal wavevectors; use method='quad'")
        value = complex(_faddeeva_average(params, W_L, delta_p, populations))
    elif method == "quad":
        value = _quad_average(params, W_L, delta_p, populations, ratios)
    elif method == "gauss-hermite":
        value = _hermite_average(params, W_L, delta_p, populations, nodes, ratios)
    else:
        raise ValueError(f"unknown quadrature method {method!r}")
    if not cross_check:
        return DopplerChi(value, method)

    if method == "quad":
        if ratios is not None:
            check_value = _hermite_average(params, W_L, delta_p, populations, nodes, ratios)
        else:
            check_value = complex(_faddeeva_average(params, W_L, delta_p, populations))
    else:
        check_value = _quad_average(params, W_L, delta_p, populations, ratios)
    rel = abs(value - check_value) / max(abs(check_value), 1e-300)
    if rel > fail_tol:
        raise QuadratureFailure(f"quadrature cross-check differs by {rel:.3g} at delta_p={delta_p}")
    warning = f"quadrature cross-check differs by {rel:.3g}" if rel > warn_tol else None
    return DopplerChi(value, method, check_value, rel, warning)


def chi_doppler_average(params: SystemParams, W_L: float, delta_p, populations=CLAMPED):
    """Vectorised Maxwell-Boltzmann average (Faddeeva form) over an array of detunings."""
    if W_L == 0:
        return chi_first_order(params, delta_p, populations=populations)
    out = _faddeeva_average(params, float(W_L), np.asarray(delta_p, dtype=float), populations)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Lorentzian approximation


@dataclass(frozen=True)
class LorentzianChi:
    i1: complex
    i2: complex
    form: str
    suppressed: bool

    @property
    def total(self) -> complex:
        return self.i1 if self.suppressed else self.i1 + self.i2


def chi_doppler_lorentzian(params: SystemParams, profile, delta_p, form="residue",
                           suppress_i2=False, pole_tol=1e-12) -> LorentzianChi:
    """Susceptibility averaged with the Lorentzian line shape, split into I1 and I2.

    I1 = (i eta/2) sqrt(pi) / (B1 + 2i B2 + W_L). For I2, ``form="residue"``
    uses C1 + 2i C2 (the residue sum, written in a form free of the removable
    pole at A1 - 2i A2 = W_L); ``form="printed"`` evaluates the published
    three-term expression with C1 + i C2 verbatim. ``suppress_i2`` drops I2
    from the total (both parts are still returned).
    """
    W_L = resolve_wl(profile)
    if W_L <= 0:
        raise ValueError("the Lorentzian approximation needs W_L > 0")
    t = chi_terms(params, float(delta_p))
    eta = params.eta
    B = complex(t.B)
    Ap = complex(t.A)
    A1, A2 = float(t.A1), float(t.A2)
    scale = abs(B) + abs(Ap) + W_L
    if abs(B + W_L) < pole_tol * scale:
        raise PoleError("B1 + 2i B2 + W_L vanishes")
    i1 = 0.5j * eta * SQRT_PI / (B + W_L)
    if form == "residue":
        C = complex(t.C)
        if abs(Ap + B) < pole_tol * scale or abs(Ap + W_L) < pole_tol * scale:
            raise PoleError("I2 denominator vanishes")
        i2 = -0.5j * eta * SQRT_PI * C * (Ap + B + 2 * W_L) / ((Ap + B) * (B + W_L) * (Ap + W_L))
    elif form == "printed":
        C = complex(float(t.C1) + 1j * float(t.C2))
        d1 = A1 - W_L - 2j * A2
        d2 = W_L ** 2 + 4 * A2 ** 2 - A1 ** 2 + 4j * A1 * A2
        d3 = Ap + B
        if abs(d1) < pole_tol * scale or abs(d2) < pole_tol * scale ** 2 or abs(d3) < pole_tol * scale:
            raise PoleError("I2 denominator vanishes")
        i2 = (-0.5j * eta * SQRT_PI / (B + W_L) * C / d1
              - C / d3 * 1j * eta * W_L * SQRT_PI / d2)
    else:
        raise ValueError(f"unknown I2 form {form!r}")
    return LorentzianChi(complex(i1), complex(i2), form, bool(suppress_i2))


def lorentzian_weighted_integral(params: SystemParams, W_L: float, delta_p,
                                 populations=CLAMPED) -> complex:
    """Direct quadrature of chi(s) against the Lorentzian weight, the third path.

    The weight is (1/sqrt(pi)) w/(w^2 + s^2) with w = W_L/2, i.e. the printed
    line shape written in the shift variable s. The whole real line is covered.
    """
    w = W_L / 2.0
    t = chi_terms(params, float(delta_p))
    poles = sorted({float(t.B2), float(t.A2), 0.0})
    R = 50.0 * W_L + max(abs(p) for p in poles)

    chi_s = velocity_response(params, delta_p, populations)

    def f(s):
        return complex(chi_s(s)) * w / (w * w + s * s) / SQRT_PI

    total = 0j
    pieces = [(-np.inf, -R, None), (-R, R, [p for p in poles if -R < p < R]), (R, np.inf, None)]
    for lo, hi, pts in pieces:
        kw = dict(limit=4000, epsabs=1e-15, epsrel=1e-11)
        if pts:
            kw["points"] = pts
        re = quad(lambda s: f(s).real, lo, hi, **kw)[0]
        im = quad(lambda s: f(s).imag, lo, hi, **kw)[0]
        total += complex(re, im)
    return total


def i2_form_discrepancy(params: SystemParams, W_L: float, delta_p) -> float:
    """|I2(printed) - I2(residue)| relative to |I1 + I2(residue)|."""
    res = chi_doppler_lorentzian(params, W_L, delta_p, form="residue")
    prn = chi_doppler_lorentzian(params, W_L, delta_p, form="printed")
    return abs(prn.i2 - res.i2) / max(abs(res.total), 1e-300)
