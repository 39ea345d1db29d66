"""Transparency-window analysis: extrema, half widths, slopes, group velocity, regime boundaries.

Window 1 is centred at delta_p = delta_c and window 2 at delta_p = delta_s.
Every quantity has a numeric extraction from a susceptibility evaluator and
one or more closed forms; the numeric value is the arbiter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .doppler import SQRT_PI, chi_doppler_average, chi_doppler_lorentzian
from .model import ModelError, Spectrum, SystemParams, derive_rates
from .susceptibility import CLAMPED, chi_first_order, chi_numeric

# probe transition frequency (Rb D1) in the shared MHz unit
OMEGA_0_MHZ = 299792458.0 / 794.979e-9 * 1e-6

STATIONARY_VARIANTS = ("stationary",)
DOPPLER_VARIANTS = ("doppler-full", "doppler-strong-field", "doppler-large-WL", "doppler-no-gain")


class WindowNotFound(ModelError):
    pass


class UnresolvedWindow(ModelError):
    pass


class InvalidVariant(ModelError):
    pass


# ---------------------------------------------------------------------------
# evaluators


def window_centre(params: SystemParams, window: int) -> float:
    if window == 1:
        return float(params.delta_c)
    if window == 2:
        return float(params.delta_s)
    raise ValueError("window must be 1 or 2")


def outer_side(params: SystemParams, window: int) -> int:
    """Direction (+1 or -1) pointing from the window centre away from the other window."""
    sep = params.delta_s - params.delta_c
    direction = 1 if sep >= 0 else -1
    return -direction if window == 1 else direction


def evaluator(params: SystemParams, source="stationary", W_L=None, populations=CLAMPED,
              suppress_i2=False, form="residue", clamp=CLAMPED):
    """Scalar function delta_p -> chi for the requested model.

    Master-equation spectra default to clamped populations here: with the
    window-forming fields removed the self-consistent steady state is not
    unique, so the background height would be undefined.
    """
    if source == "stationary":
        return lambda d: chi_first_order(params, float(d), populations=populations)
    if source == "stationary-numeric":
        return lambda d: chi_numeric(params, float(d), clamp=clamp)
    if source == "doppler-numeric":
        return lambda d: chi_doppler_average(params, W_L, float(d), populations=populations)
    if source == "doppler-lorentzian":
        return lambda d: chi_doppler_lorentzian(params, W_L, float(d), form=form,
                                                suppress_i2=suppress_i2).total
    raise ValueError(f"unknown source {source!r}")


def fields_off(params: SystemParams, window: int) -> SystemParams:
    """Parameters giving the absorption background the window is cut into."""
    if window == 1:
        return params.replace(omega_c=0.0, omega_s=0.0)
    return params.replace(omega_s=0.0)


def _require_window(params: SystemParams, window: int):
    if window == 1 and params.omega_c == 0:
        raise WindowNotFound("window 1 needs a nonzero coupling field")
    if window == 2 and (params.omega_s == 0 or params.delta_s == params.delta_c):
        raise WindowNotFound("window 2 needs a nonzero signal field and delta_s != delta_c")


def _scale(params: SystemParams, window: int) -> float:
    """Rough width used to size search intervals."""
    sep = abs(params.delta_s - params.delta_c)
    base = hwhm_closed_form(params, window, "stationary")
    if sep > 0:
        base = min(base, 0.5 * sep)
    return max(base, 1e-3)


# ---------------------------------------------------------------------------
# numeric extraction


def locate_minimum(f, lo: float, hi: float, n: int = 801) -> tuple[float, float]:
    """Minimum of a real function on [lo, hi]: dense grid followed by bounded refinement."""
    xs = np.linspace(lo, hi, n)
    vals = np.array([f(x) for x in xs])
    k = int(np.argmin(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, n - 1)]
    if b > a:
        res = minimize_scalar(f, bounds=(a, b), method="bounded",
                              options={"xatol": 1e-9 * max(1.0, abs(xs[k]))})
        if res.fun <= vals[k]:
            return float(res.x), float(res.fun)
    return float(xs[k]), float(vals[k])


def find_crossing(f, start: float, side: int, level: float, max_span: float, xtol: float,
                  n: int = 600) -> float | None:
    """First point beyond ``start`` (in direction ``side``) where f rises to ``level``."""
    offsets = np.geomspace(max_span * 1e-7, max_span, n)
    prev_x, prev_v = start, f(start) - level
    if prev_v >= 0:
        return None
    for off in offsets:
        x = start + side * off
        v = f(x) - level
        if v >= 0:
            lo, hi = sorted((prev_x, x))
            return float(brentq(lambda d: f(d) - level, lo, hi, xtol=xtol))
        prev_x, prev_v = x, v
    return None


@dataclass(frozen=True)
class Extrema:
    h_max: float
    h_min: float
    kappa: float
    h_min_location: float | None = None
    kappa_printed: float | None = None


def numeric_extrema(params: SystemParams, window: int, source="stationary", W_L=None,
                    **ev_opts) -> Extrema:
    """h_max from the same model with the window-forming fields removed, h_min located numerically."""
    _require_window(params, window)
    centre = window_centre(params, window)
    f = evaluator(params, source, W_L, **ev_opts)
    g = evaluator(fields_off(params, window), source, W_L, **ev_opts)
    h_max = float(complex(g(centre)).imag)
    span = _scale(params, window)
    x_min, h_min = locate_minimum(lambda d: complex(f(d)).imag, centre - span, centre + span)
    if not h_max > h_min:
        raise WindowNotFound(f"no absorption dip at window {window}")
    return Extrema(h_max, h_min, 0.5 * (h_max + h_min), x_min)


def hwhm_from_evaluator(params: SystemParams, window: int, source="stationary", W_L=None,
                        kappa=None, side=None, **ev_opts) -> tuple[float, Extrema]:
    """Numeric half width of a window, measured from its nominal centre."""
    ext = numeric_extrema(params, window, source, W_L, **ev_opts)
    if kappa is not None:
        ext = Extrema(ext.h_max, ext.h_min, float(kappa), ext.h_min_location)
    f = evaluator(params, source, W_L, **ev_opts)
    im = lambda d: complex(f(d)).imag  # noqa: E731
    centre = window_centre(params, window)
    side = outer_side(params, window) if side is None else side
    gamma_4 = derive_rates(params).gamma_4
    max_span = 20.0 * (_scale(params, window) + gamma_4) + (W_L or 0.0)
    x = find_crossing(im, ext.h_min_location, side, ext.kappa, max_span, xtol=1e-6 * gamma_4)
    if x is None:
        raise UnresolvedWindow(f"half-maximum crossing of window {window} not bracketed")
    return abs(x - centre), ext


def hwhm_numeric(spectrum: Spectrum, window: int, kappa=None, min_samples=20) -> float:
    """Half width of a window from a sampled spectrum (linear interpolation between samples).

    The half maximum defaults to the mean of the fields-off background and the
    sampled minimum.
    """
    params = spectrum.params
    _require_window(params, window)
    centre = window_centre(params, window)
    side = outer_side(params, window)
    x, y = spectrum.delta_p, spectrum.chi.imag
    span = _scale(params, window)
    inside = np.abs(x - centre) <= span
    if not np.any(inside):
        raise UnresolvedWindow("spectrum does not cover the window")
    k_min = int(np.flatnonzero(inside)[np.argmin(y[inside])])
    if kappa is None:
        W_L = spectrum.meta.get("W_L")
        source = spectrum.source
        if source == "stationary-numeric":
            source = "stationary"
        g = evaluator(fields_off(params, window), source, W_L)
        kappa = 0.5 * (float(complex(g(centre)).imag) + float(y[k_min]))
    if not float(y[k_min]) < kappa:
        raise WindowNotFound(f"no absorption dip at window {window}")
    step = 1 if side > 0 else -1
    k = k_min
    while 0 <= k + step < len(x) and y[k + step] < kappa:
        k += step
    if not 0 <= k + step < len(x):
        raise UnresolvedWindow("half-maximum crossing lies outside the sampled range")
    x0, x1, y0, y1 = x[k], x[k + step], y[k], y[k + step]
    cross = x0 + (kappa - y0) * (x1 - x0) / (y1 - y0)
    width = abs(cross - centre)
    n_inside = int(np.count_nonzero(np.abs(x - centre) <= width))
    if n_inside < min_samples:
        raise UnresolvedWindow(f"only {n_inside} samples inside window {window}")
    return float(width)


# ---------------------------------------------------------------------------
# closed forms


def window_extrema(params: SystemParams, window: int, W_L=None, populations=CLAMPED,
                   h_max2="corrected") -> Extrema:
    """Closed-form window heights; stationary when ``W_L`` is None, Doppler otherwise.

    ``h_max2`` picks the window-2 background height: "printed" reproduces the
    published expression, whose detuning term mixes Omega_c^2/(4 delta_sc^2)
    with delta_s; "corrected" uses Omega_c^2/(4 delta_sc) so both terms are
    detunings.
    """
    _require_window(params, window)
    rt = derive_rates(params)
    eta = params.eta
    p11, _, p33, p44 = populations
    P1, P2 = p11 - p44, p44 - p33
    g2, g3, g4, G43 = rt.gamma_2, rt.gamma_3, rt.gamma_4, rt.Gamma_43
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    if W_L is None:
        if window == 1:
            h_max = eta * P1 / g4
            h_min = eta * P1 * g2 / (g4 * g2 + oc2)
            return Extrema(h_max, h_min, 0.5 * (h_max + h_min), params.delta_c,
                           eta * P1 * (2 * g4 * g2 + oc2) / (2 * g4 * (g4 * g2 + oc2)))
        dsc = rt.delta_sc
        num = g4 + oc2 * g2 / (4 * dsc ** 2)
        if h_max2 == "printed":
            det = oc2 / (4 * dsc ** 2) - params.delta_s
            h_max = eta * P1 * num / (g4 ** 2 + 4 * det ** 2)
        elif h_max2 == "corrected":
            det = oc2 / (4 * dsc) - params.delta_s
            h_max = eta * P1 * num / (num ** 2 + 4 * det ** 2)
        else:
            raise InvalidVariant(f"unknown h_max2 variant {h_max2!r}")
        h_min = eta * (P1 * g3 / (g4 * g3 + os2) + P2 * os2 / (G43 * (g4 * g3 + os2)))
        printed = eta * (P1 * (2 * g4 * g3 + os2) / (g4 * (g4 * g3 + os2))
                         + P2 * os2 / (G43 * (g4 * g3 + os2)))
        return Extrema(h_max, h_min, 0.5 * (h_max + h_min), params.delta_s, printed)

    W = float(W_L)
    h_max = eta * SQRT_PI * P1 / (g4 + W)
    if window == 1:
        h_min = eta * SQRT_PI * P1 * g2 / (oc2 + g2 * (g4 + W))
        printed = 0.5 * eta * SQRT_PI * P1 * (2 * g2 * W + oc2) / (g2 * W ** 2 + oc2 * (g4 + W))
        return Extrema(h_max, h_min, 0.5 * (h_max + h_min), params.delta_c, printed)
    h_min = eta * SQRT_PI * (P1 * g3 / (g3 * (g4 + W) + os2)
                             - P2 * os2 / (g3 * W ** 2 + (W - g4) * os2)
                             + 2 * P2 * os2 / (W * (2 * g3 * g4 + os2)))
    printed = 0.5 * eta * SQRT_PI * (
        P1 * (2 * g3 * (g4 + W) + os2) / ((g3 * (g4 + W) + os2) * (g4 + W))
        + P2 * os2 / (W * (2 * g3 * g4 + os2))
        * (2 * g3 * W * (g4 - W) + os2 * (2 * g4 - W)) / (-g3 * W ** 2 + os2 * (g4 - W)))
    return Extrema(h_max, h_min, 0.5 * (h_max + h_min), params.delta_s, printed)


def kappa_bar2(params: SystemParams, W_L: float) -> float:
    """Half maximum of the Doppler-broadened second window, equal-population form."""
    rt = derive_rates(params)
    g3, g4 = rt.gamma_3, rt.gamma_4
    os2 = abs(params.omega_s) ** 2
    W = float(W_L)
    return params.eta * SQRT_PI / 4 * (
        (2 * g3 * W + os2) / ((g4 + W) * (g3 * W + os2))
        + (2 * g3 * W * (g4 - W) + os2 * (2 * g4 - W)) / (W * (g3 * W ** 2 + (W - g4) * os2)))


def _gamma1_doppler(o2, g, g4, W):
    return o2 / 2 * math.sqrt((2 * g * W + o2) / (
        2 * (g4 + W) ** 2 * (g * W + o2) - W * (W + 2 * g4) * (2 * g * W + o2)))


def hwhm_closed_form(params: SystemParams, window: int, variant="stationary", W_L=None) -> float:
    """Closed-form half width of a window.

    Variants: "stationary"; "doppler-full" (window 2 uses the half maximum
    from ``kappa_bar2``); "doppler-strong-field" (window 1 only);
    "doppler-large-WL"; "doppler-no-gain" (window 2 only: the window-1 form
    with (Omega_c, gamma_2) -> (Omega_s, gamma_3)).
    """
    rt = derive_rates(params)
    g2, g3, g4 = rt.gamma_2, rt.gamma_3, rt.gamma_4
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    if window not in (1, 2):
        raise ValueError("window must be 1 or 2")
    if variant == "stationary":
        if window == 1:
            return oc2 / (g4 + math.sqrt(4 * oc2 + g4 ** 2))
        return os2 / (2 * math.sqrt(g4 ** 2 + os2))
    if variant not in DOPPLER_VARIANTS:
        raise InvalidVariant(f"unknown variant {variant!r}")
    if W_L is None:
        raise ValueError(f"variant {variant!r} needs W_L")
    W = float(W_L)
    if variant == "doppler-full":
        if window == 1:
            return _gamma1_doppler(oc2, g2, g4, W)
        k2 = kappa_bar2(params, W)
        num = (g4 + W) + W * (k2 * (g4 + W) - 0.5)
        den = 4 * W * g4 ** 2 * (0.5 - k2 * (g4 + W)) + os2 * (g4 + W)
        return os2 / 2 * math.sqrt(num / den)
    if variant == "doppler-strong-field":
        if window != 1:
            raise InvalidVariant("the strong-field form exists for window 1 only")
        return oc2 / (2 * math.sqrt(W * (2 * g4 + W)))
    if variant == "doppler-large-WL":
        if window == 1:
            return oc2 / (2 * W)
        return os2 / (2 * math.sqrt(2) * math.sqrt(g4 ** 2 + 2 * os2))
    if window != 2:
        raise InvalidVariant("the no-gain form applies to window 2")
    return _gamma1_doppler(os2, g3, g4, W)


# ---------------------------------------------------------------------------
# slopes and group velocity


def richardson_slope(f, centre: float, h: float) -> float:
    """Central difference of f at ``centre`` with one Richardson step."""
    d1 = (f(centre + h) - f(centre - h)) / (2 * h)
    d2 = (f(centre + h / 2) - f(centre - h / 2)) / h
    return (4 * d2 - d1) / 3


def dispersion_slope(params: SystemParams, window: int, method="finite-difference", W_L=None,
                     source=None, hwhm=None, suppress_i2=False, **ev_opts) -> float:
    """d Re chi / d delta_p at the window centre.

    "finite-difference" differentiates the chosen model with step hwhm/100
    (hwhm defaults to the matching closed form). "closed-stationary" and
    "closed-doppler" evaluate the published expressions; with
    ``suppress_i2`` the Doppler window-2 value uses the window-1 form with
    (Omega_c, gamma_2) -> (Omega_s, gamma_3).
    """
    _require_window(params, window)
    rt = derive_rates(params)
    g2, g3, g4 = rt.gamma_2, rt.gamma_3, rt.gamma_4
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    eta = params.eta
    if method == "closed-stationary":
        if window == 1:
            return eta * oc2 / (g2 * g4 + oc2) ** 2
        return eta * os2 / (g3 * g4 + os2) ** 2
    if method == "closed-doppler":
        if W_L is None:
            raise ValueError("closed-doppler needs W_L")
        W = float(W_L)
        if window == 1:
            return eta * SQRT_PI * oc2 / (g2 * W + oc2) ** 2
        if suppress_i2:
            return eta * SQRT_PI * os2 / (g3 * W + os2) ** 2
        return (2 * eta * SQRT_PI * os2 * g4 / ((g4 - W) * (g3 * W + os2) ** 2)
                + 4 * eta * SQRT_PI * os2 * g4 / (W * os2 ** 2))
    if method != "finite-difference":
        raise InvalidVariant(f"unknown slope method {method!r}")
    if source is None:
        source = "stationary" if W_L is None else "doppler-numeric"
    if hwhm is None:
        if W_L is None:
            hwhm = hwhm_closed_form(params, window, "stationary")
        else:
            hwhm = hwhm_closed_form(params, window, "doppler-large-WL", W_L)
    f = evaluator(params, source, W_L, suppress_i2=suppress_i2, **ev_opts)
    return float(richardson_slope(lambda d: complex(f(d)).real, window_centre(params, window),
                                  hwhm / 100.0))


@dataclass(frozen=True)
class GroupVelocity:
    n_g: float
    v_g: float  # fraction of c; inf when the slope vanishes


def group_velocity(slope: float, omega_0: float = OMEGA_0_MHZ, delta_p: float = 0.0,
                   factor_two: bool = True) -> GroupVelocity:
    """n_g = (omega_0 - delta_p) * slope and v_g = 2c/n_g (or c/n_g without the factor two)."""
    n_g = (omega_0 - delta_p) * slope
    if n_g == 0:
        return GroupVelocity(0.0, math.inf)
    return GroupVelocity(n_g, (2.0 if factor_two else 1.0) / n_g)


def reduced_group_velocities(params: SystemParams, omega_14: float = OMEGA_0_MHZ,
                             omega_34: float = OMEGA_0_MHZ) -> tuple[float, float]:
    """Strong-field group velocities of both windows as fractions of c."""
    return (2.0 / params.eta * abs(params.omega_c) ** 2 / omega_14,
            2.0 / params.eta * abs(params.omega_s) ** 2 / omega_34)


def lambda_system_group_index(params: SystemParams, W_L: float) -> float:
    """Shape of the Lambda-system Lorentzian group index, up to a constant factor."""
    rt = derive_rates(params)
    oc2 = abs(params.omega_c) ** 2
    return rt.gamma_4 * oc2 / (rt.gamma_2 * (rt.gamma_4 + W_L) + oc2) ** 2


# ---------------------------------------------------------------------------
# reports and regime boundaries


@dataclass(frozen=True)
class WindowReport:
    window: int
    centre: float
    h_max: float
    h_min: float
    kappa: float
    hwhm_numeric: float
    hwhm_closed: float
    slope_numeric: float
    slope_closed: float
    n_g: float
    v_g: float
    min_location: float
    hwhm_inner: float | None = None
    diagnostics: dict = field(default_factory=dict)


def window_report(params: SystemParams, window: int, W_L=None, source=None,
                  omega_0: float = OMEGA_0_MHZ, suppress_i2=False) -> WindowReport:
    """Numeric and closed-form characterisation of one window."""
    if source is None:
        source = "stationary" if W_L is None else "doppler-numeric"
    opts = {"suppress_i2": suppress_i2} if source == "doppler-lorentzian" else {}
    width, ext = hwhm_from_evaluator(params, window, source, W_L, **opts)
    try:
        inner, _ = hwhm_from_evaluator(params, window, source, W_L,
                                       side=-outer_side(params, window), **opts)
    except ModelError:
        inner = None
    if W_L is None:
        closed = hwhm_closed_form(params, window, "stationary")
        slope_closed = dispersion_slope(params, window, "closed-stationary")
    else:
        variant = "doppler-no-gain" if (suppress_i2 and window == 2) else "doppler-full"
        closed = hwhm_closed_form(params, window, variant, W_L)
        slope_closed = dispersion_slope(params, window, "closed-doppler", W_L,
                                        suppress_i2=suppress_i2)
    slope = dispersion_slope(params, window, "finite-difference", W_L, source=source,
                             hwhm=width, suppress_i2=suppress_i2)
    centre = window_centre(params, window)
    gv = group_velocity(slope, omega_0, centre)
    return WindowReport(window, centre, ext.h_max, ext.h_min, ext.kappa, width, closed,
                        slope, slope_closed, gv.n_g, gv.v_g, ext.h_min_location, inner)


@dataclass(frozen=True)
class RegimeBoundaries:
    omega_s_low: float
    omega_s_high: float

    def classify(self, omega_s: float) -> str:
        o = abs(omega_s)
        if o < self.omega_s_low:
            return "low"
        if o <= self.omega_s_high:
            return "middle"
        return "high"

    @property
    def ordered(self) -> bool:
        return 0 < self.omega_s_low < self.omega_s_high


def boundary_rabi(params: SystemParams, W_L: float) -> RegimeBoundaries:
    """Signal Rabi frequencies of matched width (low) and matched slope (high)."""
    rt = derive_rates(params)
    if W_L <= 0 or rt.gamma_3 <= 0:
        raise ValueError("boundaries need W_L > 0 and gamma_3 > 0")
    g3, g4 = rt.gamma_3, rt.gamma_4
    oc = abs(params.omega_c)
    W = float(W_L)
    low = 2 ** 0.75 * oc * math.sqrt(g4 / W)
    high = 2.0 / 3.0 * math.sqrt(4.5 * g3 * W + g4 * oc ** 2 / (3 * W)
                                 * (19 + 2 * g4 * oc ** 2 / (W ** 2 * g3)))
    return RegimeBoundaries(low, high)


def _root_in(f, lo, hi, n=40):
    xs = np.linspace(lo, hi, n)
    vals = [f(x) for x in xs]
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0:
            return float(a)
        if fa * fb < 0:
            return float(brentq(f, a, b, xtol=1e-10))
    return None


def matched_width_rabi(params: SystemParams, W_L: float, bracket=(1.0, 12.0),
                       method="numeric") -> float | None:
    """Omega_s at which the two window half widths coincide.

    "numeric" uses Maxwell-Boltzmann averaged spectra; "closed" intersects the
    large-W_L closed forms.
    """
    if method == "closed":
        w1 = hwhm_closed_form(params, 1, "doppler-large-WL", W_L)
        return _root_in(lambda o: hwhm_closed_form(params.replace(omega_s=o), 2,
                                                   "doppler-large-WL", W_L) - w1, *bracket)
    w1, _ = hwhm_from_evaluator(params, 1, "doppler-numeric", W_L)
    return _root_in(lambda o: hwhm_from_evaluator(params.replace(omega_s=o), 2,
                                                  "doppler-numeric", W_L)[0] - w1, *bracket)


def matched_slope_rabi(params: SystemParams, W_L: float, bracket=(1.0, 12.0),
                       method="numeric") -> float | None:
    """Omega_s at which the two window dispersion slopes coincide."""
    if method == "closed":
        s1 = dispersion_slope(params, 1, "closed-doppler", W_L)
        return _root_in(lambda o: dispersion_slope(params.replace(omega_s=o), 2,
                                                   "closed-doppler", W_L) - s1, *bracket)

    def slope(p, window):
        width, _ = hwhm_from_evaluator(p, window, "doppler-numeric", W_L)
        return dispersion_slope(p, window, "finite-difference", W_L, hwhm=width)

    s1 = slope(params, 1)
    return _root_in(lambda o: slope(params.replace(omega_s=o), 2) - s1, *bracket)
