"""Stationary-atom probe susceptibility, closed form and master-equation based."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .liouvillian import build_generator, steady_state
from .model import ModelError, Spectrum, SystemParams, derive_rates

CLAMPED = (0.5, 0.0, 0.5, 0.0)


class PoleError(ModelError):
    pass


class ScanError(ModelError):
    def __init__(self, failures, partial):
        self.failures = failures  # list of (index, delta_p, message)
        self.partial = partial
        super().__init__(f"{len(failures)} grid point(s) failed, first at index "
                         f"{failures[0][0]}: {failures[0][2]}")


@dataclass(frozen=True)
class ChiTerms:
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray

    @property
    def B(self):
        """B1 + 2i B2."""
        return self.B1 + 2j * self.B2

    @property
    def A(self):
        """A1 - 2i A2."""
        return self.A1 - 2j * self.A2

    @property
    def C(self):
        """C1 + 2i C2."""
        return self.C1 + 2j * self.C2


def chi_terms(params: SystemParams, delta_p=None) -> ChiTerms:
    """The six real intermediates of the first-order susceptibility.

    ``delta_p`` may be an array; the coupling and signal detunings are taken
    from ``params``.
    """
    rt = derive_rates(params)
    dp = np.asarray(params.delta_p if delta_p is None else delta_p, dtype=float)
    dc, ds = params.delta_c, params.delta_s
    g2, g3, g4 = rt.gamma_2, rt.gamma_3, rt.gamma_4
    oc2 = abs(params.omega_c) ** 2
    os2 = abs(params.omega_s) ** 2
    dpc = dp - dc
    dps = dp - ds
    dsc = ds - dc
    G43, G32 = rt.Gamma_43, rt.Gamma_32

    A1_c, A2_c = _pair(oc2, G32, dsc)
    B1_c, B2_c = _pair(oc2, g2, dpc)
    C1, C2 = _pair(os2, g3, dps)
    A1 = G43 + A1_c + 0 * dp
    A2 = A2_c - ds + 0 * dp
    B1 = g4 + B1_c + C1
    B2 = B2_c + C2 - dp
    return ChiTerms(A1, A2, B1, B2, C1, C2)


def _pair(strength, width, detuning):
    """strength * (width, detuning) / (width^2 + 4 detuning^2), zero when strength is zero."""
    detuning = np.asarray(detuning, dtype=float)
    if strength == 0:
        z = np.zeros_like(detuning)
        return z, z.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        den = width ** 2 + 4 * detuning ** 2
        return strength * width / den, strength * detuning / den


def chi_from_terms(t: ChiTerms, eta=1.0, populations=CLAMPED):
    """chi = i eta [(rho11-rho44) D_A + (rho44-rho33) C] / (D_A D_B)."""
    p11, _, p33, p44 = populations
    DA, DB, C = t.A, t.B, t.C
    return 1j * eta * ((p11 - p44) * DA + (p44 - p33) * C) / (DA * DB)


def chi_first_order(params: SystemParams, delta_p=None, populations=CLAMPED, pole_tol=1e-14):
    """First-order probe susceptibility in the weak-probe limit.

    With the default populations (1/2, 0, 1/2, 0) this is
    i eta / (2 (B1 + 2i B2)) * (1 - (C1 + 2i C2) / (A1 - 2i A2)).
    Im chi is absorption and Re chi dispersion.
    """
    t = chi_terms(params, delta_p)
    scale = derive_rates(params).gamma_4 + abs(params.omega_c) + abs(params.omega_s) + 1.0
    if np.any(np.abs(t.B) < pole_tol * scale) or np.any(np.abs(t.A) < pole_tol * scale):
        raise PoleError("susceptibility denominator vanishes")
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = chi_from_terms(t, params.eta, populations)
    if not np.all(np.isfinite(chi)):
        raise PoleError("susceptibility is not finite (zero width at exact resonance)")
    return complex(chi) if np.ndim(chi) == 0 else chi


def chi_numeric(params: SystemParams, delta_p=None, clamp=None):
    """eta * rho_14 / Omega_p from the steady state of the full master equation.

    ``clamp`` fixes the populations (e.g. ``CLAMPED``); the default solves
    populations self-consistently.
    """
    if params.omega_p == 0:
        raise ValueError("chi_numeric needs a nonzero probe Rabi frequency")
    if delta_p is None:
        delta_p = params.delta_p
    if np.ndim(delta_p) == 0:
        rho = steady_state(build_generator(params.replace(delta_p=float(delta_p))), clamp=clamp)
        return params.eta * rho.rho[0, 3] / params.omega_p
    return np.array([chi_numeric(params, d, clamp) for d in np.asarray(delta_p, dtype=float)])


def _parallel_map(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def spectrum_scan(params: SystemParams, grid, source="stationary", threads=1, evaluator=None,
                  **options) -> Spectrum:
    """Evaluate the chosen susceptibility on ``grid`` and wrap it as a Spectrum.

    ``source`` is one of "stationary", "stationary-numeric", "doppler-numeric"
    or "doppler-lorentzian". Doppler sources need ``profile=`` (or ``W_L=``)
    in ``options``. Results are ordered by grid index regardless of the
    thread count. Failed points raise ScanError carrying the partial result.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if evaluator is None:
        evaluator = make_evaluator(params, source, **options)

    def one(item):
        i, d = item
        try:
            return i, complex(evaluator(d)), None
        except (ModelError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return i, complex(float("nan"), float("nan")), str(exc)

    results = _parallel_map(one, list(enumerate(grid)), threads)
    results.sort(key=lambda r: r[0])
    chi = np.array([r[1] for r in results])
    failures = [(i, float(grid[i]), msg) for i, _, msg in results if msg]
    spec = Spectrum(grid, chi, source, params, meta=dict(options_summary(options)))
    if failures:
        raise ScanError(failures, spec)
    return spec


def options_summary(options):
    out = {}
    for k, v in options.items():
        out[k] = getattr(v, "W_L", v)
    return out


def make_evaluator(params: SystemParams, source: str, **options):
    """Return a scalar function delta_p -> chi for the named source."""
    if source == "stationary":
        pops = options.get("populations", CLAMPED)
        return lambda d: chi_first_order(params, float(d), populations=pops)
    if source == "stationary-numeric":
        clamp = options.get("clamp")
        return lambda d: chi_numeric(params, float(d), clamp=clamp)
    from . import doppler

    W_L = doppler.resolve_wl(options.get("profile"), options.get("W_L"))
    if source == "doppler-numeric":
        method = options.get("method", "faddeeva")
        pops = options.get("populations", CLAMPED)
        return lambda d: doppler.chi_doppler_numeric(params, W_L, float(d), method=method,
                                                     populations=pops,
                                                     cross_check=False).value
    if source == "doppler-lorentzian":
        form = options.get("form", "residue")
        suppress = options.get("suppress_i2", False)
        return lambda d: doppler.chi_doppler_lorentzian(params, W_L, float(d), form=form,
                                                        suppress_i2=suppress).total
    raise ValueError(f"unknown source {source!r}")
