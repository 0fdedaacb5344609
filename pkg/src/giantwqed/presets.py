"""Named scenarios, one per spectrum panel (ids such as ``fig5a``).

Panels that are sketches or parameter maps without a scattering calculation
have no preset.
"""
from __future__ import annotations

import math

import numpy as np

from giantwqed.io import Grid, Layout, ScenarioConfig

__all__ = ["PRESETS", "DESCRIPTIONS", "get_preset", "preset_ids"]

PI = math.pi
PRESETS: dict[str, ScenarioConfig] = {}
DESCRIPTIONS: dict[str, str] = {}


def _add(pid, description, generator, params, grid, outputs=("spectrum", "features")):
    PRESETS[pid] = ScenarioConfig(
        layout=Layout(generator, params),
        sweep=Grid(*grid),
        outputs=tuple(outputs),
        name=pid,
    )
    DESCRIPTIONS[pid] = description


def _theta_scan(count):
    return [float(v) for v in np.linspace(0.0, 2 * PI, count)]


# separate, maximum symmetry: R(Delta, theta) maps
_add("fig2a", "separate N=3 M=2, theta scan over [0, 2pi]", "separate",
     {"n_atoms": 3, "n_points": 2, "theta": _theta_scan(73)}, (-10, 10, 801), ("spectrum",))
_add("fig2b", "separate N=3 M=3, theta scan over [0, 2pi]", "separate",
     {"n_atoms": 3, "n_points": 3, "theta": _theta_scan(73)}, (-15, 15, 1201), ("spectrum",))

# superradiant cross sections and collective modes
_add("fig3a", "separate N=3 M=2 at the superradiant phases", "separate",
     {"n_atoms": 3, "n_points": 2, "theta": [0.0, PI / 2, 3 * PI / 2, 2 * PI]}, (-20, 20, 2001))
_add("fig3b", "separate N=3 M=3 at the superradiant phases", "separate",
     {"n_atoms": 3, "n_points": 3, "theta": [0.0, PI / 3, PI, 5 * PI / 3, 2 * PI]}, (-40, 40, 2001))
for pid, m in (("fig3c", 2), ("fig3d", 3), ("fig3e", 2), ("fig3f", 3)):
    kind = "detunings" if pid in ("fig3c", "fig3d") else "decay rates"
    _add(pid, f"collective-mode {kind} vs theta, N=3 M={m}", "separate",
         {"n_atoms": 3, "n_points": m, "theta": _theta_scan(121)}, (-10, 10, 201), ("modes",))

# multiple reflection minima, N=3 M=2
_FANO = {"a": 0.35 * PI, "b": PI / 6, "c": PI / 4}
for panel, theta in _FANO.items():
    _add(f"fig4{panel}", f"separate N=3 M=2, theta={theta / PI:.4g}pi, reflection minima", "separate",
         {"n_atoms": 3, "n_points": 2, "theta": theta}, (-6, 6, 1201))
for panel, src in zip("def", "abc"):
    theta = _FANO[src]
    _add(f"fig4{panel}", f"mode decomposition of fig4{src}", "separate",
         {"n_atoms": 3, "n_points": 2, "theta": theta}, (-6, 6, 1201), ("spectrum", "modes"))

# photonic band gap
_add("fig5a", "band gap, separate N=10 M=2 theta=pi/4", "separate",
     {"n_atoms": 10, "n_points": 2, "theta": PI / 4}, (-8, 8, 3201))
_add("fig5b", "mode decomposition of the band gap", "separate",
     {"n_atoms": 10, "n_points": 2, "theta": PI / 4}, (-8, 8, 3201), ("spectrum", "modes"))
for pid, what in (("fig5c", "most subradiant width"), ("fig5d", "innermost pair spacing")):
    _add(pid, f"{what} vs N for M=2 theta=pi/4", "separate",
         {"n_atoms": list(range(8, 25)), "n_points": 2, "theta": PI / 4}, (-8, 8, 401), ("modes", "features"))

# SSH energy levels vs beta with phi1 + phi2 = pi/2
_add("fig6d", "SSH levels vs beta, N=16, phi1+phi2=pi/2", "ssh",
     {"n_atoms": 16, "beta": [float(b) for b in np.linspace(-0.48 * PI, 0.48 * PI, 49)], "epsilon": 0.0},
     (-2, 2, 101), ("modes",))

# probed SSH chain
_ATS = {"n_atoms": 16, "phi1": 0.2 * PI, "phi2": 0.3 * PI, "epsilon": 0.1 * PI}
_EIT = {"n_atoms": 16, "phi1": PI / 6, "phi2": PI / 3, "epsilon": 0.1 * PI}
_add("fig8c", "probed SSH chain, ATS parameters, full band", "ssh", _ATS, (-1.6, 1.6, 6401))
_add("fig8d", "probed SSH chain, ATS parameters, edge-state window", "ssh", _ATS,
     (-0.1, 0.1, 2001), ("spectrum", "modes", "features"))
_add("fig8e", "probed SSH chain, EIT parameters, full band", "ssh", _EIT, (-1.6, 1.6, 6401))
_add("fig8f", "probed SSH chain, EIT parameters, edge-state window", "ssh", _EIT,
     (-0.05, 0.05, 2001), ("spectrum", "modes", "features"))

# braided and nested chains of two-point atoms
for pid, n in (("fig10a", 3), ("fig10b", 4)):
    _add(pid, f"braided N={n}, theta scan", "braided", {"n_atoms": n, "theta": _theta_scan(73)},
         (-20, 20, 801), ("spectrum",))
for panels, n in (("cdef", 3), ("ghij", 4)):
    for panel, theta in zip(panels, (0.0, PI / 4, 0.35 * PI, 3 * PI / 4)):
        _add(f"fig10{panel}", f"braided N={n}, theta={theta / PI:.4g}pi", "braided",
             {"n_atoms": n, "theta": theta}, (-20, 20, 2001))
for pid, n in (("fig11a", 3), ("fig11b", 4)):
    _add(pid, f"nested N={n}, theta scan", "nested", {"n_atoms": n, "theta": _theta_scan(73)},
         (-20, 20, 801), ("spectrum",))
for panels, n in (("cde", 3), ("fgh", 4)):
    for panel, theta in zip(panels, (0.0, PI / 4, PI / 2)):
        _add(f"fig11{panel}", f"nested N={n}, theta={theta / PI:.4g}pi", "nested",
             {"n_atoms": n, "theta": theta}, (-20, 20, 2001))


def preset_ids() -> list[str]:
    return list(PRESETS)


def get_preset(pid: str) -> ScenarioConfig:
    try:
        return PRESETS[pid]
    except KeyError:
        raise KeyError(f"unknown preset {pid!r}; available: {', '.join(PRESETS)}") from None
