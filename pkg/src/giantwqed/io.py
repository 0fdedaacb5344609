"""Scenario configuration files and spectrum tables.

A scenario is a YAML document::

    name: band-gap
    layout:
      generator: separate      # separate | braided | nested | explicit | ssh
      n_atoms: 10
      n_points: 2
      theta: pi/4              # phases accept floats or strings like "0.35pi"
    sweep: {min: -8, max: 8, count: 1601}   # detuning in units of gamma
    outputs: [spectrum, features]
    solver: general            # general | cascade | closed | all
    format: csv                # csv | json

One layout parameter may be given as a list, which turns the scenario into a
scan with one spectrum per value.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from giantwqed.model import (
    AtomArray,
    build_braided_array,
    build_explicit_array,
    build_nested_array,
    build_separate_array,
)
from giantwqed.ssh import SshSpec, build_ssh_probe_array

__all__ = [
    "ConfigError",
    "Solver",
    "OutputFormat",
    "Grid",
    "Layout",
    "ScenarioConfig",
    "SpectrumTable",
    "parse_phase",
    "parse_grid",
    "load_config",
    "parse_config",
    "dump_config",
    "build_layout",
    "layout_variants",
    "gamma_unit",
    "SPECTRUM_COLUMNS",
]

SPECTRUM_COLUMNS = ("delta", "t_re", "t_im", "r_re", "r_im", "T", "R")
OUTPUT_KINDS = ("spectrum", "modes", "features")
GENERATORS = ("separate", "braided", "nested", "explicit", "ssh")
_PHASE_KEYS = ("theta", "phi1", "phi2", "epsilon", "beta")
_PHASE_RE = re.compile(
    r"^\s*(?P<coef>[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)?\s*\*?\s*pi\s*(/\s*(?P<den>\d+(\.\d*)?))?\s*$"
)


class ConfigError(ValueError):
    pass


class Solver(str, enum.Enum):
    GENERAL = "general"
    CASCADE = "cascade"
    CLOSED = "closed"
    ALL = "all"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def parse_phase(value) -> float:
    """Float from a number or a string such as ``"0.35pi"``, ``"pi/4"``, ``"-2*pi"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        m = _PHASE_RE.match(text)
        if m:
            coef = m.group("coef")
            c = 1.0 if coef in (None, "+") else -1.0 if coef == "-" else float(coef)
            den = float(m.group("den")) if m.group("den") else 1.0
            return c * math.pi / den
        try:
            return float(text)
        except ValueError:
            pass
    raise ConfigError(f"cannot read {value!r} as a phase")


@dataclass(frozen=True)
class Grid:
    """Detuning grid in units of ``gamma``."""

    min: float
    max: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError("grid count must be an integer >= 2")
        if not self.min < self.max:
            raise ConfigError("grid min must be smaller than max")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.count))


def parse_grid(text: str) -> Grid:
    """``Grid`` from ``"min:max:count"``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like min:max:count, got {text!r}")
    try:
        return Grid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


@dataclass(frozen=True)
class Layout:
    generator: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}; expected one of {GENERATORS}")
        lists = [k for k, v in self.params.items() if isinstance(v, list) and k != "atoms"]
        if len(lists) > 1:
            raise ConfigError(f"at most one layout parameter may be scanned, got {lists}")

    @property
    def scan_key(self) -> str | None:
        for k, v in self.params.items():
            if isinstance(v, list) and k != "atoms":
                return k
        return None


@dataclass(frozen=True)
class ScenarioConfig:
    layout: Layout
    sweep: Grid
    outputs: tuple[str, ...] = ("spectrum",)
    solver: Solver = Solver.GENERAL
    format: OutputFormat = OutputFormat.CSV
    name: str = "scenario"

    def __post_init__(self):
        bad = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if bad or not self.outputs:
            raise ConfigError(f"outputs must be a non-empty subset of {OUTPUT_KINDS}, got {list(self.outputs)}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "layout": {"generator": self.layout.generator, **self.layout.params},
            "sweep": {"min": self.sweep.min, "max": self.sweep.max, "count": self.sweep.count},
            "outputs": list(self.outputs),
            "solver": self.solver.value,
            "format": self.format.value,
        }

    def replace(self, **changes) -> "ScenarioConfig":
        data = {f: getattr(self, f) for f in ("layout", "sweep", "outputs", "solver", "format", "name")}
        data.update({k: v for k, v in changes.items() if v is not None})
        return ScenarioConfig(**data)


def _normalize_params(generator: str, params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if key in _PHASE_KEYS:
            val = [parse_phase(v) for v in val] if isinstance(val, list) else parse_phase(val)
        elif key == "atoms":
            val = [
                {
                    "points": [[parse_phase(ph), float(g)] for ph, g in atom["points"]],
                    **({"detuning": float(atom["detuning"])} if "detuning" in atom else {}),
                }
                for atom in val
            ]
        elif isinstance(val, float) and val.is_integer() and key in ("n_atoms", "n_points"):
            val = int(val)
        out[key] = val
    return out


def parse_config(data: dict) -> ScenarioConfig:
    """``ScenarioConfig`` from an already-loaded mapping."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    try:
        lay = dict(data["layout"])
        sweep = data["sweep"]
    except KeyError as exc:
        raise ConfigError(f"missing config section {exc}") from None
    generator = lay.pop("generator", None)
    if generator is None:
        raise ConfigError("layout needs a generator")
    try:
        grid = Grid(float(sweep["min"]), float(sweep["max"]), int(sweep["count"]))
        solver = Solver(data.get("solver", "general"))
        fmt = OutputFormat(data.get("format", "csv"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from None
    outputs = data.get("outputs", ["spectrum"])
    if isinstance(outputs, str):
        outputs = [outputs]
    return ScenarioConfig(
        layout=Layout(generator, _normalize_params(generator, lay)),
        sweep=grid,
        outputs=tuple(outputs),
        solver=solver,
        format=fmt,
        name=str(data.get("name", "scenario")),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(yaml.safe_load(fh))


def dump_config(config: ScenarioConfig, path: str | Path | None = None) -> str:
    """YAML text of ``config``; also written to ``path`` when given."""
    text = yaml.safe_dump(config.to_dict(), sort_keys=False)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def layout_variants(layout: Layout) -> list[tuple[dict, dict]]:
    """``(scan_values, params)`` pairs, one per scanned value (or one if none)."""
    key = layout.scan_key
    if key is None:
        return [({}, dict(layout.params))]
    out = []
    for val in layout.params[key]:
        params = dict(layout.params)
        params[key] = val
        out.append(({key: val}, params))
    return out


def gamma_unit(generator: str, params: dict) -> float:
    if generator == "explicit":
        return max(float(g) for atom in params["atoms"] for _, g in atom["points"])
    return float(params.get("gamma", 1.0))


def _ssh_spec(params: dict) -> SshSpec:
    p = dict(params)
    if "beta" in p:
        beta = p.pop("beta")
        p.setdefault("phi1", 0.25 * math.pi - 0.5 * beta)
        p.setdefault("phi2", 0.25 * math.pi + 0.5 * beta)
    keys = ("n_atoms", "phi1", "phi2", "epsilon", "gamma", "omega_a")
    unknown = set(p) - set(keys) - {"regime", "group_velocity"}
    if unknown:
        raise ConfigError(f"unknown ssh parameters {sorted(unknown)}")
    return SshSpec(**{k: p[k] for k in keys if k in p})


def build_layout(generator: str, params: dict) -> AtomArray:
    """Atom array for one (non-scanned) set of layout parameters."""
    p = dict(params)
    extra = {k: p.pop(k) for k in ("regime", "group_velocity") if k in p}
    try:
        if generator == "separate":
            return build_separate_array(
                int(p.pop("n_atoms")), int(p.pop("n_points")), float(p.pop("theta")), **p, **extra
            )
        if generator == "braided":
            return build_braided_array(int(p.pop("n_atoms")), float(p.pop("theta")), **p, **extra)
        if generator == "nested":
            return build_nested_array(int(p.pop("n_atoms")), float(p.pop("theta")), **p, **extra)
        if generator == "explicit":
            return build_explicit_array(p.pop("atoms"), **p, **extra)
        if generator == "ssh":
            return build_ssh_probe_array(_ssh_spec(p), **extra)
    except KeyError as exc:
        raise ConfigError(f"layout {generator!r} is missing parameter {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"bad parameters for layout {generator!r}: {exc}") from None
    raise ConfigError(f"unknown generator {generator!r}")


@dataclass
class SpectrumTable:
    """Spectrum on a detuning grid; ``detuning`` is in units of ``gamma``.

    ``mode_weights`` holds ``|L_n|^2`` per grid point and collective mode,
    with shape ``(len(detuning), n_modes)``.
    """

    detuning: np.ndarray
    t: np.ndarray
    r: np.ndarray
    T: np.ndarray | None = None
    R: np.ndarray | None = None
    mode_weights: np.ndarray | None = None

    def __post_init__(self):
        self.detuning = np.asarray(self.detuning, dtype=float)
        self.t = np.asarray(self.t, dtype=complex)
        self.r = np.asarray(self.r, dtype=complex)
        if self.T is None:
            self.T = np.abs(self.t) ** 2
        if self.R is None:
            self.R = np.abs(self.r) ** 2
        self.T = np.asarray(self.T, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        if self.detuning.size > 1 and not np.all(np.diff(self.detuning) > 0):
            raise ValueError("detuning grid must be strictly increasing")

    @property
    def columns(self) -> list[str]:
        names = list(SPECTRUM_COLUMNS)
        if self.mode_weights is not None:
            names += [f"mode_{k + 1}" for k in range(self.mode_weights.shape[1])]
        return names

    def matrix(self) -> np.ndarray:
        cols = [self.detuning, self.t.real, self.t.imag, self.r.real, self.r.imag, self.T, self.R]
        out = np.column_stack(cols)
        if self.mode_weights is not None:
            out = np.column_stack([out, self.mode_weights])
        return out

    def to_csv(self, stream=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.matrix():
            writer.writerow(["%.12g" % v for v in row])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text

    def to_json_dict(self) -> dict:
        return {name: [float("%.12g" % v) for v in col] for name, col in zip(self.columns, self.matrix().T)}

    @classmethod
    def from_csv(cls, text: str) -> "SpectrumTable":
        rows = list(csv.reader(io.StringIO(text)))
        header = rows[0]
        if tuple(header[:7]) != SPECTRUM_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        data = np.array(rows[1:], dtype=float)
        modes = data[:, 7:] if data.shape[1] > 7 else None
        return cls(
            data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4],
            data[:, 5], data[:, 6], modes,
        )


def to_jsonable(obj: Any):
    """Recursively convert numpy scalars, arrays, enums and complex numbers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, SpectrumTable):
        return obj.to_json_dict()
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2)
