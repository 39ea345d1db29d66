"""Sweep runners behind the command-line interface.

Every runner takes a ScenarioConfig, writes one or more CSV files into the
output directory and returns a RunResult. Per-point failures are written to
an ``error`` column and counted; they never abort the sweep.

CSV schemas (first row is the header):

spectrum_<source>[_WL<W>].csv
    delta_p_MHz, im_chi, re_chi, source, error
widths.csv / slopes.csv
    <sweep column>, then per window k: hwhm<k>_numeric, hwhm<k>_closed (or
    slope<k>_...), the no-gain pair for window 2 when I2 is suppressed,
    condition-ledger columns, error
group_velocity.csv
    window, centre_MHz, hwhm_numeric, hwhm_closed, slope_numeric,
    slope_closed, n_g, v_g_over_c, v_g_strong_field_over_c, error
boundaries.csv
    quantity, closed_form, numeric, closed_over_gamma4, numeric_over_gamma4
boundaries_sweep.csv
    omega_s_MHz, omega_s_over_gamma4, hwhm1, hwhm2, slope1, slope2 (numeric
    and closed), regime, error
populations_steady.csv
    delta_p_MHz, rho11..rho44, im_rho14, closed_rho11..closed_rho44, error
populations_trajectory.csv
    t_us, rho11..rho44, im_rho14
dressed.csv
    index, eigenvalue_MHz, dark, weight1..weight4, residual, cubic_residual
dressed_summary.csv
    quantity, value
conditions.csv
    name, description, lhs, rhs, ratio, satisfied
lineshapes.csv
    x_over_WL, gaussian, lorentzian
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import conditions, doppler, dressed, spectral
from .config import ScenarioConfig
from .liouvillian import (DegenerateFormula, build_generator, build_hamiltonian,
                          populations_closed_form, steady_state, time_evolve)
from .model import ModelError, derive_rates
from .susceptibility import CLAMPED, ScanError, _parallel_map, spectrum_scan

POINT_ERRORS = (ModelError, ValueError, ArithmeticError, np.linalg.LinAlgError)


@dataclass
class RunResult:
    files: list[Path] = field(default_factory=list)
    failures: int = 0
    rows: dict[str, list[dict]] = field(default_factory=dict)


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10e}"
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(row.get(h)) for h in header])
    return path


def _stem(cfg: ScenarioConfig, name: str) -> str:
    return f"{cfg.label}_{name}" if cfg.label else name


def _guarded(fn, x):
    try:
        return fn(x), None
    except POINT_ERRORS as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _nan_or(v):
    return float("nan") if v is None else v


# ---------------------------------------------------------------------------
# spectrum


def run_spectrum(cfg: ScenarioConfig, out: Path) -> RunResult:
    res = RunResult()
    grid = cfg.grid("delta_p")
    widths = cfg.doppler_widths()
    svg_series = {}
    for source in cfg.sources:
        wl_list = widths if source.startswith("doppler") else [None]
        if source.startswith("doppler") and not wl_list:
            raise ModelError(f"source {source} needs temperature or W_L")
        for W in wl_list:
            opts = {}
            if W is not None:
                opts["W_L"] = W
            if source == "stationary-numeric":
                opts["clamp"] = cfg.clamp
            if source == "doppler-lorentzian":
                opts.update(suppress_i2=cfg.suppress_i2, form=cfg.lorentzian_form)
            if source == "doppler-numeric":
                opts["method"] = cfg.method
            errors = {}
            try:
                spec = spectrum_scan(cfg.params, grid, source, threads=cfg.threads, **opts)
            except ScanError as exc:
                spec = exc.partial
                errors = {i: msg for i, _, msg in exc.failures}
            rows = [dict(delta_p_MHz=d, im_chi=c.imag, re_chi=c.real, source=source,
                         error=errors.get(i, ""))
                    for i, (d, c) in enumerate(zip(spec.delta_p, spec.chi))]
            res.failures += len(errors)
            tag = source if W is None else f"{source}_WL{W:.4g}"
            path = write_csv(out / f"{_stem(cfg, 'spectrum_' + tag)}.csv",
                             ["delta_p_MHz", "im_chi", "re_chi", "source", "error"], rows)
            res.files.append(path)
            res.rows[tag] = rows
            svg_series[tag] = (spec.delta_p, spec.chi)
    if cfg.svg:
        from .plotting import spectrum_svg

        res.files.append(spectrum_svg(out / f"{_stem(cfg, 'spectrum')}.svg", svg_series))
    return res


# ---------------------------------------------------------------------------
# widths, slopes and group velocity


def _sweep_values(cfg: ScenarioConfig):
    if cfg.sweep == "W_L":
        return "W_L_MHz", cfg.grid("wl"), lambda v: (cfg.params, v)
    wl = cfg.doppler_widths()
    W = wl[0] if wl else None
    if cfg.sweep == "omega_s":
        return "omega_s_MHz", cfg.grid("omega_s"), lambda v: (cfg.params.replace(omega_s=v), W)
    if cfg.sweep == "omega_c":
        return "omega_c_MHz", cfg.grid("omega_c"), lambda v: (cfg.params.replace(omega_c=v), W)
    return "W_L_MHz", np.array([np.nan if W is None else W]), lambda v: (cfg.params, W)


def _numeric_source(W):
    return "stationary" if W is None else "doppler-numeric"


def _width_row(p, W, windows, suppress_i2):
    row = {}
    for k in windows:
        row[f"hwhm{k}_numeric"], _ = spectral.hwhm_from_evaluator(p, k, _numeric_source(W), W)
        variant = "stationary" if W is None else "doppler-full"
        row[f"hwhm{k}_closed"] = spectral.hwhm_closed_form(p, k, variant, W)
        if k == 2 and suppress_i2 and W is not None:
            row["hwhm2_numeric_no_gain"], _ = spectral.hwhm_from_evaluator(
                p, 2, "doppler-lorentzian", W, suppress_i2=True)
            row["hwhm2_closed_no_gain"] = spectral.hwhm_closed_form(p, 2, "doppler-no-gain", W)
    return row


def _slope_row(p, W, windows, suppress_i2):
    row = {}
    for k in windows:
        width, _ = spectral.hwhm_from_evaluator(p, k, _numeric_source(W), W)
        row[f"slope{k}_numeric"] = spectral.dispersion_slope(p, k, "finite-difference", W,
                                                             hwhm=width)
        method = "closed-stationary" if W is None else "closed-doppler"
        row[f"slope{k}_closed"] = spectral.dispersion_slope(p, k, method, W)
        if k == 2 and suppress_i2 and W is not None:
            w_ng, _ = spectral.hwhm_from_evaluator(p, 2, "doppler-lorentzian", W, suppress_i2=True)
            row["slope2_numeric_no_gain"] = spectral.dispersion_slope(
                p, 2, "finite-difference", W, source="doppler-lorentzian", hwhm=w_ng,
                suppress_i2=True)
            row["slope2_closed_no_gain"] = spectral.dispersion_slope(p, 2, "closed-doppler", W,
                                                                     suppress_i2=True)
    return row


def _run_sweep(cfg: ScenarioConfig, out: Path, name: str, row_fn, prefix: str) -> RunResult:
    col, values, at = _sweep_values(cfg)
    value_cols = []
    for k in cfg.windows:
        value_cols += [f"{prefix}{k}_numeric", f"{prefix}{k}_closed"]
        if k == 2 and cfg.suppress_i2:
            value_cols += [f"{prefix}2_numeric_no_gain", f"{prefix}2_closed_no_gain"]

    def one(v):
        p, W = at(v)
        row, err = _guarded(lambda _: row_fn(p, W, cfg.windows, cfg.suppress_i2), v)
        row = dict(row or {})
        row[col] = v
        if p is not None:
            row.update(conditions.ledger_columns(p, W))
        row["error"] = err or ""
        return row

    rows = _parallel_map(one, list(values), cfg.threads)
    cond_cols = sorted({k for r in rows for k in r if k.startswith("cond_")})
    header = [col] + value_cols + cond_cols + ["error"]
    res = RunResult(failures=sum(bool(r["error"]) for r in rows), rows={name: rows})
    res.files.append(write_csv(out / f"{_stem(cfg, name)}.csv", header, rows))
    if cfg.svg:
        from .plotting import sweep_svg

        res.files.append(sweep_svg(out / f"{_stem(cfg, name)}.svg", col, value_cols, rows))
    return res


def run_widths(cfg: ScenarioConfig, out: Path) -> RunResult:
    return _run_sweep(cfg, out, "widths", _width_row, "hwhm")


def run_slopes(cfg: ScenarioConfig, out: Path) -> RunResult:
    return _run_sweep(cfg, out, "slopes", _slope_row, "slope")


def run_group_velocity(cfg: ScenarioConfig, out: Path) -> RunResult:
    wl = cfg.doppler_widths()
    W = wl[0] if wl else None
    vg_strong = spectral.reduced_group_velocities(cfg.params)
    rows = []
    for k in cfg.windows:
        rep, err = _guarded(lambda _: spectral.window_report(cfg.params, k, W,
                                                             suppress_i2=cfg.suppress_i2), k)
        row = dict(window=k, centre_MHz=spectral.window_centre(cfg.params, k),
                   v_g_strong_field_over_c=vg_strong[k - 1], error=err or "")
        if rep is not None:
            row.update(hwhm_numeric=rep.hwhm_numeric, hwhm_closed=rep.hwhm_closed,
                       slope_numeric=rep.slope_numeric, slope_closed=rep.slope_closed,
                       n_g=rep.n_g, v_g_over_c=rep.v_g)
        rows.append(row)
    header = ["window", "centre_MHz", "hwhm_numeric", "hwhm_closed", "slope_numeric",
              "slope_closed", "n_g", "v_g_over_c", "v_g_strong_field_over_c", "error"]
    res = RunResult(failures=sum(bool(r["error"]) for r in rows), rows={"group_velocity": rows})
    res.files.append(write_csv(out / f"{_stem(cfg, 'group_velocity')}.csv", header, rows))
    return res


# ---------------------------------------------------------------------------
# boundaries


def run_boundaries(cfg: ScenarioConfig, out: Path) -> RunResult:
    wl = cfg.doppler_widths()
    if not wl:
        raise ModelError("boundaries need temperature or W_L")
    W = wl[0]
    p = cfg.params
    g4 = derive_rates(p).gamma_4
    b = spectral.boundary_rabi(p, W)
    res = RunResult()
    low, err_low = _guarded(lambda _: spectral.matched_width_rabi(p, W), None)
    high, err_high = _guarded(lambda _: spectral.matched_slope_rabi(p, W), None)
    res.failures += bool(err_low) + bool(err_high)
    rows = []
    for name, closed, num, err in (("omega_s_low", b.omega_s_low, low, err_low),
                                   ("omega_s_high", b.omega_s_high, high, err_high)):
        num = _nan_or(num)
        rows.append(dict(quantity=name, closed_form=closed, numeric=num,
                         closed_over_gamma4=closed / g4, numeric_over_gamma4=num / g4,
                         error=err or ("" if not math.isnan(num) else "no crossing in bracket")))
    res.files.append(write_csv(out / f"{_stem(cfg, 'boundaries')}.csv",
                               ["quantity", "closed_form", "numeric", "closed_over_gamma4",
                                "numeric_over_gamma4", "error"], rows))
    res.rows["boundaries"] = rows

    def one(o):
        q = p.replace(omega_s=o)
        row = dict(omega_s_MHz=o, omega_s_over_gamma4=o / g4, regime=b.classify(o))
        vals, err = _guarded(lambda _: {**_width_row(q, W, [1, 2], False),
                                        **_slope_row(q, W, [1, 2], False)}, o)
        row.update(vals or {})
        row["error"] = err or ""
        return row

    sweep = _parallel_map(one, list(cfg.grid("omega_s")), cfg.threads)
    res.failures += sum(bool(r["error"]) for r in sweep)
    cols = ["hwhm1_numeric", "hwhm1_closed", "hwhm2_numeric", "hwhm2_closed",
            "slope1_numeric", "slope1_closed", "slope2_numeric", "slope2_closed"]
    res.files.append(write_csv(out / f"{_stem(cfg, 'boundaries_sweep')}.csv",
                               ["omega_s_MHz", "omega_s_over_gamma4"] + cols + ["regime", "error"],
                               sweep))
    res.rows["boundaries_sweep"] = sweep
    if cfg.svg:
        from .plotting import sweep_svg

        res.files.append(sweep_svg(out / f"{_stem(cfg, 'boundaries_sweep')}.svg",
                                   "omega_s_MHz", cols, sweep))
    return res


# ---------------------------------------------------------------------------
# populations


def _population_params(cfg: ScenarioConfig):
    p = cfg.params
    if not cfg.pump_on:
        p = p.replace(pump_rate=0.0)
    if not cfg.dephasing_on:
        p = p.replace(extra_dephasing_14=0.0, extra_dephasing_34=0.0)
    return p


def run_populations(cfg: ScenarioConfig, out: Path) -> RunResult:
    p = _population_params(cfg)
    res = RunResult()
    pops = ["rho11", "rho22", "rho33", "rho44"]
    if cfg.mode == "trajectory":
        t = np.linspace(0.0, cfg.t_max, int(cfg.t_points))
        traj = time_evolve(build_generator(p), np.diag(cfg.rho0).astype(complex), t)
        rows = [dict(t_us=tk, **{n: traj.rho[k, i, i].real for i, n in enumerate(pops)},
                     im_rho14=traj.rho[k, 0, 3].imag) for k, tk in enumerate(t)]
        header = ["t_us"] + pops + ["im_rho14"]
        name = "populations_trajectory"
    else:
        clamp = CLAMPED if cfg.population_mode == "clamped" else None

        def one(d):
            q = p.replace(delta_p=float(d))
            row = dict(delta_p_MHz=d)
            rho, err = _guarded(lambda _: steady_state(build_generator(q), clamp=clamp), d)
            if rho is not None:
                row.update({n: rho.rho[i, i].real for i, n in enumerate(pops)})
                row["im_rho14"] = rho.rho[0, 3].imag
            try:
                cf = populations_closed_form(q, tuple(cfg.rho0))
                row.update({f"closed_{n}": v for n, v in zip(pops, cf.as_tuple())})
            except (DegenerateFormula, ArithmeticError):
                pass
            row["error"] = err or ""
            return row

        rows = _parallel_map(one, list(cfg.grid("delta_p")), cfg.threads)
        res.failures = sum(bool(r["error"]) for r in rows)
        header = ["delta_p_MHz"] + pops + ["im_rho14"] + [f"closed_{n}" for n in pops] + ["error"]
        name = "populations_steady"
    res.rows[name] = rows
    res.files.append(write_csv(out / f"{_stem(cfg, name)}.csv", header, rows))
    if cfg.svg:
        from .plotting import sweep_svg

        res.files.append(sweep_svg(out / f"{_stem(cfg, name)}.svg", header[0], pops, rows))
    return res


# ---------------------------------------------------------------------------
# dressed states and conditions


def run_dressed(cfg: ScenarioConfig, out: Path) -> RunResult:
    p = cfg.params
    h = build_hamiltonian(p)
    eig = dressed.eigensystem(h)
    case = dressed.detect_case(p)
    resid = eig.residuals(h)
    flags = [dressed.is_dark(h, eig.vectors[:, k]) for k in range(4)]
    cubic = [None] * 4
    if case in ("delta_pc=0", "delta_ps=0"):
        idx = [k for k in range(4) if not flags[k]]
        for k, r in zip(idx, dressed.cubic_residuals(p, eig.values[idx], case)):
            cubic[k] = r
    rows = [dict(index=k + 1, eigenvalue_MHz=eig.values[k], dark=bool(flags[k]),
                 **{f"weight{i + 1}": abs(eig.vectors[i, k]) ** 2 for i in range(4)},
                 residual=resid[k], cubic_residual=cubic[k]) for k in range(4)]
    res = RunResult(rows={"dressed": rows})
    res.files.append(write_csv(out / f"{_stem(cfg, 'dressed')}.csv",
                               ["index", "eigenvalue_MHz", "dark", "weight1", "weight2", "weight3",
                                "weight4", "residual", "cubic_residual"], rows))
    summary = [dict(quantity="case", value=case),
               dict(quantity="orthonormality_error", value=eig.orthonormality_error())]
    if case != "generic":
        info = dressed.dark_states(p)
        summary += [dict(quantity=k, value=v) for k, v in info.populations.items()]
    if case == "all-equal":
        lp, lm = dressed.lambda_tilde_pm(p)
        summary += [dict(quantity="lambda_tilde_plus", value=lp),
                    dict(quantity="lambda_tilde_minus", value=lm)]
        rho, err = _guarded(lambda _: steady_state(build_generator(p)), None)
        fit, ferr = (None, err) if rho is None else _guarded(lambda _: dressed.fit_mixture(p, rho),
                                                             None)
        if fit is not None:
            summary += [dict(quantity="p_D1", value=fit.p_d1), dict(quantity="p_D2", value=fit.p_d2)]
            for n, pred, num in zip(("1", "2", "3"), fit.predicted, fit.numeric):
                summary += [dict(quantity=f"P_tilde{n}", value=pred),
                            dict(quantity=f"rho{n}{n}_steady", value=num)]
        else:
            summary.append(dict(quantity="mixture_fit_error", value=ferr))
            res.failures += 1
    res.rows["dressed_summary"] = summary
    res.files.append(write_csv(out / f"{_stem(cfg, 'dressed_summary')}.csv",
                               ["quantity", "value"], summary))
    return res


def run_check_conditions(cfg: ScenarioConfig, out: Path) -> RunResult:
    wl = cfg.doppler_widths()
    rows = [dict(name=c.name, description=c.description, lhs=c.lhs, rhs=c.rhs, ratio=c.ratio,
                 satisfied=c.satisfied)
            for c in conditions.condition_ledger(cfg.params, wl[0] if wl else None)]
    res = RunResult(rows={"conditions": rows})
    res.files.append(write_csv(out / f"{_stem(cfg, 'conditions')}.csv",
                               ["name", "description", "lhs", "rhs", "ratio", "satisfied"], rows))
    return res


def run_lineshapes(cfg: ScenarioConfig, out: Path) -> RunResult:
    wl = cfg.doppler_widths() or [1.0]
    W = wl[0]
    xs = np.linspace(-4.0, 4.0, 401)
    rows = [dict(x_over_WL=x, gaussian=float(doppler.gaussian_lineshape(x * W, W * doppler.SQRT_LN2)),
                 lorentzian=float(doppler.lorentzian_lineshape(x * W, W))) for x in xs]
    res = RunResult(rows={"lineshapes": rows})
    res.files.append(write_csv(out / f"{_stem(cfg, 'lineshapes')}.csv",
                               ["x_over_WL", "gaussian", "lorentzian"], rows))
    if cfg.svg:
        from .plotting import sweep_svg

        res.files.append(sweep_svg(out / f"{_stem(cfg, 'lineshapes')}.svg", "x_over_WL",
                                   ["gaussian", "lorentzian"], rows))
    return res


RUNNERS = {
    "spectrum": run_spectrum,
    "widths": run_widths,
    "slopes": run_slopes,
    "group-velocity": run_group_velocity,
    "boundaries": run_boundaries,
    "populations": run_populations,
    "dressed": run_dressed,
    "check-conditions": run_check_conditions,
    "lineshapes": run_lineshapes,
}
