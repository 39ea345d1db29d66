"""Named scenarios that regenerate the figure-style datasets.

Each preset is a command name plus a flat config mapping. Multi-panel
figures are stored as ``figNa``, ``figNb`` ... and ``figN`` expands to all
of its panels.
"""

from __future__ import annotations

from .config import ConfigError

# gamma_4 = 18 MHz split evenly, gamma_3 = 10 kHz, gamma_2 = 40 kHz
RATES = dict(gamma_41=6.0, gamma_42=6.0, gamma_43=6.0, gamma_phi2=0.04, gamma_phi3=0.01)
G4 = 18.0

_two_window = dict(RATES, omega_c=G4, omega_s=0.3 * G4, omega_p=0.05 * G4,
                   delta_c=0.0, delta_s=9.0)
_doppler_window = dict(RATES, omega_c=G4, omega_s=0.35 * G4, omega_p=0.05 * G4,
                       delta_c=0.0, delta_s=9.0)


def _panels(common, **panels):
    return {k: dict(common, **v) for k, v in panels.items()}


PRESETS: dict[str, tuple[str, dict]] = {
    "fig2": ("spectrum", dict(_two_window, delta_p_min=-15, delta_p_max=25, delta_p_points=2001,
                              sources=["stationary", "stationary-numeric"])),
    "fig3": ("spectrum", dict(_doppler_window, temperature=[1.0, 10.0, 100.0],
                              delta_p_min=-30, delta_p_max=40, delta_p_points=701,
                              sources=["doppler-numeric", "doppler-lorentzian"])),
    "fig4": ("lineshapes", dict(RATES, W_L=[1.0])),
    "fig5": ("widths", dict(_doppler_window, sweep="W_L", wl_min=50, wl_max=1000, wl_points=20,
                            suppress_i2=True)),
    "fig6": ("slopes", dict(RATES, omega_c=1.5 * G4, omega_s=0.5 * G4, omega_p=0.05 * G4,
                            delta_c=0.0, delta_s=13.5, sweep="W_L", wl_min=50, wl_max=1000,
                            wl_points=20, suppress_i2=True)),
    "fig7": ("boundaries", dict(RATES, omega_c=G4, omega_s=0.35 * G4, omega_p=0.05 * G4,
                                delta_c=0.0, delta_s=9.0, W_L=[700.0], omega_s_min=1.0,
                                omega_s_max=12.0, omega_s_points=23)),
    "coupling-sweep": ("slopes", dict(RATES, omega_c=G4, omega_s=0.35 * G4, omega_p=0.05 * G4,
                                      delta_c=0.0, delta_s=9.0, W_L=[409.0], sweep="omega_c",
                                      windows=[1], omega_c_min=5, omega_c_max=40,
                                      omega_c_points=15)),
    "fixed-detuning-a": ("populations", dict(RATES, omega_c=G4, omega_s=0.3 * G4, omega_p=0.3 * G4,
                                             delta_c=0.0, delta_s=0.5 * G4, mode="steady",
                                             population_mode="self-consistent",
                                             delta_p_min=-10, delta_p_max=25, delta_p_points=71)),
    "fixed-detuning-b": ("populations", dict(RATES, omega_c=G4, omega_s=0.3 * G4, omega_p=0.01 * G4,
                                             delta_c=0.0, delta_s=0.5 * G4, mode="steady",
                                             population_mode="self-consistent",
                                             delta_p_min=-10, delta_p_max=25, delta_p_points=71)),
}

_traj = dict(RATES, mode="trajectory", population_mode="self-consistent", t_max=5.0, t_points=501,
             rho0=[1.0, 0.0, 0.0, 0.0])

# dark state |D> (delta_pc = 0)
for _k, _v in _panels(dict(_traj, omega_c=G4, omega_s=0.3 * G4, delta_s=0.5 * G4,
                           delta_p=0.0, delta_c=0.0),
                      fig8a=dict(omega_p=0.3 * G4),
                      fig8b=dict(omega_p=G4)).items():
    PRESETS[_k] = ("populations", _v)

# mixture of |D1> and |D2> (all detunings equal)
for _k, _v in _panels(dict(_traj, delta_p=0.0, delta_c=0.0, delta_s=0.0),
                      fig9a=dict(omega_c=G4, omega_s=0.3 * G4, omega_p=0.3 * G4),
                      fig9b=dict(omega_c=G4, omega_s=0.3 * G4, omega_p=G4),
                      fig9c=dict(omega_c=G4, omega_s=G4, omega_p=0.3 * G4)).items():
    PRESETS[_k] = ("populations", _v)

# dark state |D'> (delta_ps = 0, delta_s = delta_p = Omega_c / 2)
for _k, _v in _panels(dict(_traj, delta_c=0.0),
                      fig10a=dict(omega_c=G4, omega_s=0.5 * G4, omega_p=0.5 * G4,
                                  delta_s=0.5 * G4, delta_p=0.5 * G4),
                      fig10b=dict(omega_c=0.35 * G4, omega_s=0.35 * G4, omega_p=0.35 * G4,
                                  delta_s=0.175 * G4, delta_p=0.175 * G4),
                      fig10c=dict(omega_c=G4, omega_s=0.5 * G4, omega_p=0.15 * G4,
                                  delta_s=0.5 * G4, delta_p=0.5 * G4)).items():
    PRESETS[_k] = ("populations", _v)

# strong extra dephasing; set dephasing_on to false for the reference run
for _k, _v in _panels(dict(RATES, gamma_phi2=0.8, extra_dephasing_14=150.0,
                           extra_dephasing_34=150.0, omega_c=G4, omega_s=0.3 * G4,
                           delta_c=0.0, delta_s=0.5 * G4, mode="steady",
                           population_mode="self-consistent",
                           delta_p_min=-10, delta_p_max=25, delta_p_points=71),
                      fig11a=dict(omega_p=0.3 * G4),
                      fig11b=dict(omega_p=0.01 * G4)).items():
    PRESETS[_k] = ("populations", _v)

PRESETS["fig12a"] = ("populations", dict(
    gamma_41=6.0, gamma_42=6.0, gamma_43=12.0, gamma_phi2=0.04, gamma_phi3=0.01,
    pump_rate=1.0, omega_c=G4, omega_s=0.3 * G4, omega_p=0.01 * G4, delta_c=0.0, delta_s=13.5,
    mode="steady", population_mode="self-consistent",
    delta_p_min=-10, delta_p_max=25, delta_p_points=71))

# dressed-state analysis at the population scenarios with an analytic dark state
for _name in ("fig8a", "fig9a", "fig10a"):
    _cfg = {k: v for k, v in PRESETS[_name][1].items() if k not in ("mode", "t_max", "t_points")}
    PRESETS[f"dressed-{_name}"] = ("dressed", _cfg)


def names() -> list[str]:
    return sorted(PRESETS)


def resolve(name: str) -> list[tuple[str, str, dict]]:
    """Expand a preset name into (label, command, config) triples."""
    if name in PRESETS:
        cmd, cfg = PRESETS[name]
        return [(name, cmd, dict(cfg, label=name))]
    panels = sorted(k for k in PRESETS if k.startswith(name) and len(k) == len(name) + 1
                    and k[-1].isalpha())
    if not panels:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(names())}")
    return [(k, PRESETS[k][0], dict(PRESETS[k][1], label=k)) for k in panels]
