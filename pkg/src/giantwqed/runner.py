"""Scenario execution and the oracle-equivalence report."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from giantwqed import analysis, transfer
from giantwqed.engine import (
    DegenerateSpectrumError,
    SingularSystemError,
    collective_modes,
    mode_components,
    reconstruct_from_modes,
    scatter_sweep,
)
from giantwqed.io import (
    ConfigError,
    ScenarioConfig,
    Solver,
    SpectrumTable,
    build_layout,
    gamma_unit,
    layout_variants,
)
from giantwqed.model import (
    AtomArray,
    Configuration,
    Regime,
    build_separate_array,
    classify_configuration,
    single_atom_characteristics,
)
from giantwqed.io import _ssh_spec
from giantwqed.ssh import edge_state_model, ssh_bands

__all__ = ["VariantResult", "ScenarioResult", "run_scenario", "run_layout", "verify", "POLE_OFFSET"]

log = logging.getLogger(__name__)

#: Grid points on an exact pole are moved by this many ``gamma``.
POLE_OFFSET = 1e-9
_POLE_TOL = 1e-12


@dataclass
class VariantResult:
    scan: dict
    table: SpectrumTable | None = None
    modes: list | None = None
    features: list = field(default_factory=list)
    comparison: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"scan": self.scan}
        if self.table is not None:
            out["spectrum"] = self.table.to_json_dict()
        if self.modes is not None:
            out["modes"] = [_mode_dict(k, m) for k, m in enumerate(self.modes)]
        if self.features:
            out["features"] = self.features
        if self.comparison:
            out["comparison"] = self.comparison
        return out


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    variants: list[VariantResult]
    notices: list[str] = field(default_factory=list)

    @property
    def table(self) -> SpectrumTable | None:
        return self.variants[0].table

    def to_dict(self) -> dict:
        return {
            "name": self.config.name,
            "solver": self.config.solver.value,
            "variants": [v.to_dict() for v in self.variants],
            "notices": self.notices,
        }


def _mode_dict(k, m) -> dict:
    return {
        "index": k + 1,
        "energy_detuning": m.energy_detuning,
        "decay": m.decay,
        "eta": m.weight_t,
        "eta_r": m.weight_r,
    }


def _is_separate(array: AtomArray) -> bool:
    return classify_configuration(array) is Configuration.SEPARATE


def _is_periodic(array: AtomArray) -> bool:
    try:
        transfer.periodic_parameters(array)
    except ValueError:
        return False
    return True


def _check_pairing(array: AtomArray, solver: Solver) -> None:
    if solver is Solver.CASCADE and not (_is_separate(array) and array.regime is Regime.MARKOVIAN):
        raise ConfigError("the cascade solver needs a separate layout in the Markovian regime")
    if solver is Solver.CLOSED and not _is_periodic(array):
        raise ConfigError("the closed-form solver needs identical, periodically spaced separate atoms")


def _pole_candidates(array: AtomArray, solver: Solver) -> np.ndarray:
    scale = array.rate_scale
    poles = []
    if array.regime is Regime.MARKOVIAN:
        from giantwqed.engine import build_system_matrices

        w = np.linalg.eigvals(build_system_matrices(array).detuned_hamiltonian)
        poles.extend(w[np.abs(w.imag) <= _POLE_TOL * scale].real)
    if solver is not Solver.GENERAL and _is_separate(array):
        det = array.atom_detunings()
        for i in range(array.n_atoms):
            poles.append(det[i] + single_atom_characteristics(array, i)[0])
    return np.array(poles, dtype=float)


def _offset_poles(grid: np.ndarray, poles: np.ndarray, unit: float, notices: list) -> np.ndarray:
    if poles.size == 0:
        return grid
    grid = grid.copy()
    hit = np.min(np.abs(grid[:, None] - poles[None, :]), axis=1) <= _POLE_TOL * unit
    for k in np.flatnonzero(hit):
        new = grid[k] + POLE_OFFSET * unit
        msg = f"grid point {grid[k] / unit:.12g} lies on a pole; moved by {POLE_OFFSET:g} gamma"
        log.info(msg)
        notices.append(msg)
        grid[k] = new
    return grid


def _sweep(array, grid, solver, notices):
    """Run one solver, moving grid points off exact poles on demand."""
    for _ in range(grid.size + 1):
        try:
            if solver is Solver.GENERAL:
                return (*scatter_sweep(array, grid), None, None)
            if solver is Solver.CASCADE:
                return (*transfer.cascade_sweep(array, grid), None, None)
            t, r = transfer.closed_form_amplitudes(array, grid)
            big_t, big_r = transfer.closed_form_sweep(array, grid)
            return t, r, big_t, big_r
        except (SingularSystemError, transfer.PoleError) as exc:
            bad = getattr(exc, "detuning", None)
            k = int(np.argmin(np.abs(grid - bad))) if bad is not None else None
            if k is None:
                raise
            msg = f"solver hit a singular point at {grid[k]:.12g}; moved by {POLE_OFFSET:g} gamma"
            log.info(msg)
            notices.append(msg)
            grid = grid.copy()
            grid[k] += POLE_OFFSET * array.rate_scale
    raise RuntimeError("could not move the grid off the poles")


def _features(generator: str, params: dict, array: AtomArray, grid, table) -> list[dict]:
    # detunings and widths are reported in units of gamma
    feats = []
    unit = gamma_unit(generator, params)
    if generator == "separate":
        n, m, theta = int(params["n_atoms"]), int(params["n_points"]), float(params["theta"])
        idx = analysis.phase_index(m, theta % (2 * math.pi))
        if idx is not None:
            f = analysis.superradiance_params(m, idx, 1.0, n_atoms=n)
            feats.append(f.as_dict())
        else:
            mins = analysis.reflection_minima(n, m, theta, 1.0)
            feats.append(analysis.SpectralFeature(analysis.FeatureKind.MINIMA_SET, minima=tuple(mins)).as_dict())
            q = theta * 2 * m / math.pi
            if abs(q - round(q)) < 1e-9 and round(q) % 2 == 1 and n >= 2:
                bg = analysis.band_gap_width(m, (round(q) - 1) // 2, 1.0, n)
                feats.append(analysis.SpectralFeature(
                    analysis.FeatureKind.BAND_GAP, bg.center, bg.estimate).as_dict()
                    | {"asymptotic_width": bg.asymptotic, "large_m_width": bg.large_m})
    elif generator == "ssh":
        spec = _ssh_spec(params)
        j1, j2 = spec.couplings
        bands = ssh_bands(j1, j2, 0.0)
        entry = {"kind": "ssh", "J1": j1, "J2": j2, "band_width": bands.width, "band_gap": bands.gap}
        if spec.n_atoms % 2 == 0 and j1 < j2:
            edge = edge_state_model(spec)
            entry.update(mu=edge.mu, J=edge.J, Gamma_L=edge.Gamma_L, regime=edge.regime.value,
                         J_projected=edge.J_projected, Gamma_L_projected=edge.Gamma_L_projected)
        feats.append(entry)
    if array.regime is Regime.MARKOVIAN:
        try:
            modes = collective_modes(array)
        except DegenerateSpectrumError:
            modes = None
        if modes is not None:
            scale = array.rate_scale
            bright = [md for md in modes if md.decay > 1e-9 * scale]
            if not bright:
                feats.append(analysis.SpectralFeature(analysis.FeatureKind.DECOUPLED).as_dict()
                             | {"source": "modes"})
            elif len(bright) == 1:
                feats.append(analysis.SpectralFeature(
                    analysis.FeatureKind.SUPERRADIANT, bright[0].energy_detuning / unit,
                    bright[0].decay / unit).as_dict() | {"source": "modes"})
    if table is not None:
        from scipy.signal import find_peaks

        peaks, _ = find_peaks(table.R, prominence=1e-3)
        feats.append({"kind": "reflection_peaks", "detuning": table.detuning[peaks].tolist(),
                      "R": table.R[peaks].tolist()})
    return feats


def run_layout(generator: str, params: dict, config: ScenarioConfig, notices: list,
               scan: dict | None = None) -> VariantResult:
    array = build_layout(generator, params)
    unit = gamma_unit(generator, params)
    solver = config.solver
    if solver is not Solver.ALL:
        _check_pairing(array, solver)
    result = VariantResult(scan or {})
    grid = _offset_poles(config.sweep.values() * unit, _pole_candidates(array, solver), unit, notices)
    want_table = "spectrum" in config.outputs or "features" in config.outputs or "modes" in config.outputs
    modes = None
    if "modes" in config.outputs:
        try:
            modes = collective_modes(array.with_regime(Regime.MARKOVIAN))
        except DegenerateSpectrumError as exc:
            notices.append(f"no mode decomposition: {exc}")
        result.modes = modes
    if want_table:
        primary = Solver.GENERAL if solver is Solver.ALL else solver
        t, r, big_t, big_r = _sweep(array, grid, primary, notices)
        weights = None
        if modes is not None:
            weights = np.abs(mode_components(modes, grid)) ** 2
        result.table = SpectrumTable(grid / unit, t, r, big_t, big_r, weights)
        if solver is Solver.ALL:
            result.comparison = _compare_solvers(array, grid, t, r, notices)
    if "features" in config.outputs:
        result.features = _features(generator, params, array, grid, result.table)
    return result


def _compare_solvers(array, grid, t, r, notices) -> dict:
    out = {}
    if _is_separate(array) and array.regime is Regime.MARKOVIAN:
        tc, rc, _, _ = _sweep(array, grid, Solver.CASCADE, notices)
        out["cascade_vs_general"] = {
            "max_abs_dt": float(np.max(np.abs(tc - t))),
            "max_abs_dr": float(np.max(np.abs(rc - r))),
            "max_abs_dR": float(np.max(np.abs(np.abs(rc) ** 2 - np.abs(r) ** 2))),
        }
    else:
        notices.append("cascade solver skipped: layout is not separate and Markovian")
    if _is_periodic(array):
        _, _, big_t, big_r = _sweep(array, grid, Solver.CLOSED, notices)
        out["closed_vs_general"] = {
            "max_abs_dT": float(np.max(np.abs(big_t - np.abs(t) ** 2))),
            "max_abs_dR": float(np.max(np.abs(big_r - np.abs(r) ** 2))),
        }
    else:
        notices.append("closed-form solver skipped: layout is not periodic")
    return out


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Evaluate every variant of a scenario.

    Grid points that fall on an exact pole are moved by ``POLE_OFFSET`` gamma
    and a notice is recorded. Output does not depend on the worker count.
    """
    notices: list[str] = []
    variants = [
        run_layout(config.layout.generator, params, config, notices, scan)
        for scan, params in layout_variants(config.layout)
    ]
    return ScenarioResult(config, variants, notices)


def _entry(name, deviation, tol, **extra) -> dict:
    dev = float(deviation)
    return {"check": name, "passed": bool(dev < tol), "max_deviation": dev, "tolerance": tol, **extra}


def _random_separate(rng, periodic=False):
    n = int(rng.integers(1, 7))
    if periodic:
        return build_separate_array(n, int(rng.integers(1, 5)), float(rng.uniform(0.05, 2 * math.pi)),
                                    float(rng.uniform(0.5, 2.0)))
    from giantwqed.model import build_explicit_array

    atoms, pos = [], 0.0
    for _ in range(n):
        pts = []
        for _ in range(int(rng.integers(1, 5))):
            pos += float(rng.uniform(0.05, 3.0))
            pts.append([pos, float(rng.uniform(0.2, 2.0))])
        atoms.append({"points": pts, "detuning": float(rng.uniform(-1, 1))})
    return build_explicit_array(atoms)


def verify(config: ScenarioConfig | None = None, *, seed: int = 1234, n_random: int = 20,
           presets: bool = True) -> dict:
    """Run the oracle-equivalence checks and report pass/fail with deviations.

    Failures are report entries, never exceptions.
    """
    rng = np.random.default_rng(seed)
    checks = []
    grid = np.linspace(-6, 6, 97) + 1e-7

    dev = 0.0
    for _ in range(n_random):
        a = _random_separate(rng)
        _, r = scatter_sweep(a, grid)
        _, rc = transfer.cascade_sweep(a, grid)
        dev = max(dev, float(np.max(np.abs(np.abs(r) ** 2 - np.abs(rc) ** 2))))
    checks.append(_entry("cascade_vs_general_random_separate", dev, 1e-9))

    dev = 0.0
    for _ in range(n_random):
        a = _random_separate(rng, periodic=True)
        _, r = scatter_sweep(a, grid)
        _, big_r = transfer.closed_form_sweep(a, grid)
        dev = max(dev, float(np.max(np.abs(np.abs(r) ** 2 - big_r))))
    checks.append(_entry("closed_vs_general_periodic", dev, 1e-8))

    layouts = []
    if config is not None:
        layouts += [(f"{config.name}{_scan_label(s)}", config.layout.generator, p)
                    for s, p in layout_variants(config.layout)]
    if presets:
        from giantwqed.presets import PRESETS

        for pid, cfg in PRESETS.items():
            layouts += [(f"{pid}{_scan_label(s)}", cfg.layout.generator, p)
                        for s, p in layout_variants(cfg.layout)][:3]
    flux, recon, bio = 0.0, 0.0, 0.0
    worst = {}
    for label, gen, params in layouts:
        try:
            a = build_layout(gen, params)
        except (ConfigError, ValueError) as exc:
            checks.append({"check": f"build:{label}", "passed": False, "error": str(exc)})
            continue
        unit = gamma_unit(gen, params)
        g = grid * unit * 2
        try:
            t, r = scatter_sweep(a, g)
        except SingularSystemError as exc:
            checks.append({"check": f"sweep:{label}", "passed": False, "error": str(exc)})
            continue
        if a.regime is Regime.MARKOVIAN:
            d = float(np.max(np.abs(np.abs(t) ** 2 + np.abs(r) ** 2 - 1)))
            if d > flux:
                flux, worst["flux"] = d, label
            try:
                modes = collective_modes(a)
            except DegenerateSpectrumError:
                continue
            tm, rm = reconstruct_from_modes(modes, g)
            d = float(max(np.max(np.abs(tm - t)), np.max(np.abs(rm - r))))
            if d > recon:
                recon, worst["reconstruction"] = d, label
            lv = np.array([m.left_vec for m in modes]).T
            rv = np.array([m.right_vec for m in modes]).T
            d = float(np.max(np.abs(lv.conj().T @ rv - np.eye(len(modes)))))
            if d > bio:
                bio, worst["biorthonormality"] = d, label
    checks.append(_entry("flux_conservation", flux, 1e-10, worst=worst.get("flux")))
    checks.append(_entry("mode_reconstruction", recon, 1e-9, worst=worst.get("reconstruction")))
    checks.append(_entry("biorthonormality", bio, 1e-10, worst=worst.get("biorthonormality")))
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def _scan_label(scan: dict) -> str:
    return "".join(f"[{k}={v:.6g}]" for k, v in scan.items())
