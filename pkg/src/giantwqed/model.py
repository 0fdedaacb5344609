"""Domain types for giant-atom arrays and their waveguide-mediated couplings.

Positions are lengths; the propagation phase of a coupling point at probe
frequency ``omega`` is ``omega * x / v_g``. The layout generators use
``v_g = omega_a = 1`` by default so that a stored position equals its phase
at the reference frequency.

Rates (bare decays, Lamb shifts, couplings) are expressed in whatever unit the
caller uses for ``gamma``; all generators take ``gamma`` as the rate unit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Regime",
    "Configuration",
    "CouplingPoint",
    "GiantAtom",
    "AtomArray",
    "Characteristics",
    "phase_delay",
    "characteristics",
    "single_atom_characteristics",
    "pair_characteristics",
    "build_separate_array",
    "build_braided_array",
    "build_nested_array",
    "build_explicit_array",
    "classify_configuration",
    "DECOUPLING_THRESHOLD",
]

TWO_PI = 2.0 * math.pi

#: Relative effective decay (in units of the largest bare decay) below which
#: an atom is labelled decoupled. Only used for discrete labels.
DECOUPLING_THRESHOLD = 1e-12


class Regime(str, enum.Enum):
    MARKOVIAN = "markovian"
    NON_MARKOVIAN = "non-markovian"


class Configuration(str, enum.Enum):
    SEPARATE = "separate"
    BRAIDED = "braided"
    NESTED = "nested"
    MIXED = "mixed"


@dataclass(frozen=True)
class CouplingPoint:
    """One waveguide contact of an atom.

    Parameters
    ----------
    position : float
        Location along the waveguide.
    bare_decay : float
        Decay rate into the guided modes through this point, ``2 V**2 / v_g``.
    """

    position: float
    bare_decay: float

    def __post_init__(self):
        if not math.isfinite(self.position):
            raise ValueError(f"position must be finite, got {self.position}")
        if not (self.bare_decay >= 0.0 and math.isfinite(self.bare_decay)):
            raise ValueError(f"bare_decay must be finite and >= 0, got {self.bare_decay}")


@dataclass(frozen=True)
class GiantAtom:
    frequency: float
    points: tuple[CouplingPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("a giant atom needs at least one coupling point")
        if not math.isfinite(self.frequency):
            raise ValueError(f"frequency must be finite, got {self.frequency}")
        xs = [p.position for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"coupling-point positions must be strictly increasing, got {xs}")

    @property
    def extent(self) -> tuple[float, float]:
        return self.points[0].position, self.points[-1].position


@dataclass(frozen=True)
class AtomArray:
    """A set of giant atoms sharing one waveguide.

    In the Markovian regime all phases are evaluated at
    ``reference_frequency``; otherwise at the probe frequency.
    """

    atoms: tuple[GiantAtom, ...]
    group_velocity: float = 1.0
    reference_frequency: float = 1.0
    regime: Regime = Regime.MARKOVIAN

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "regime", Regime(self.regime))
        if not atoms:
            raise ValueError("an atom array needs at least one atom")
        if not (self.group_velocity > 0.0 and math.isfinite(self.group_velocity)):
            raise ValueError(f"group_velocity must be positive, got {self.group_velocity}")
        if not math.isfinite(self.reference_frequency):
            raise ValueError("reference_frequency must be finite")
        xs = sorted(p.position for a in atoms for p in a.points)
        if any(b == a for a, b in zip(xs, xs[1:])):
            raise ValueError("coupling-point positions must be pairwise distinct")

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_points(self) -> int:
        return sum(len(a.points) for a in self.atoms)

    @property
    def rate_scale(self) -> float:
        """Largest bare decay; the natural tolerance unit for this array."""
        return max(p.bare_decay for a in self.atoms for p in a.points)

    def atom_detunings(self) -> np.ndarray:
        """``omega_i - omega_a`` for every atom."""
        return np.array([a.frequency - self.reference_frequency for a in self.atoms])

    def flat_points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Positions, bare decays and owning-atom index of every coupling point."""
        x = np.array([p.position for a in self.atoms for p in a.points], dtype=float)
        g = np.array([p.bare_decay for a in self.atoms for p in a.points], dtype=float)
        owner = np.array([i for i, a in enumerate(self.atoms) for _ in a.points], dtype=np.intp)
        return x, g, owner

    def phases(self, detuning: float = 0.0) -> np.ndarray:
        """Phases of all coupling points at ``omega_a + detuning``.

        The detuning is ignored in the Markovian regime.
        """
        x, _, _ = self.flat_points()
        omega = self.reference_frequency
        if self.regime is Regime.NON_MARKOVIAN:
            omega = omega + detuning
        return omega * x / self.group_velocity

    def with_regime(self, regime: Regime | str) -> "AtomArray":
        return AtomArray(self.atoms, self.group_velocity, self.reference_frequency, Regime(regime))


@dataclass(frozen=True)
class Characteristics:
    """Lamb shifts, effective decays, exchange couplings, collective decays.

    ``exchange`` and ``collective_decay`` are full ``N x N`` symmetric matrices
    whose diagonals hold the single-atom quantities ``2 * lamb_shift`` and
    ``effective_decay`` respectively.
    """

    lamb_shift: np.ndarray
    effective_decay: np.ndarray
    exchange: np.ndarray = field(repr=False)
    collective_decay: np.ndarray = field(repr=False)


def phase_delay(point: CouplingPoint, omega: float, group_velocity: float) -> float:
    """Unwrapped propagation phase ``omega * x / v_g`` of a coupling point."""
    if not group_velocity > 0.0:
        raise ValueError("group_velocity must be positive")
    return omega * point.position / group_velocity


def _interaction_sums(array: AtomArray, detuning: float = 0.0) -> np.ndarray:
    # S_ij = sum_mm' sqrt(g_im g_jm') exp(i |theta_im - theta_jm'|)
    theta = array.phases(detuning)
    _, gam, owner = array.flat_points()
    amp = np.sqrt(gam)
    kernel = np.outer(amp, amp) * np.exp(1j * np.abs(theta[:, None] - theta[None, :]))
    n = array.n_atoms
    proj = np.zeros((n, theta.size))
    proj[owner, np.arange(theta.size)] = 1.0
    return proj @ kernel @ proj.T


def characteristics(array: AtomArray) -> Characteristics:
    """All four characteristic quantities at the reference frequency."""
    s = _interaction_sums(array.with_regime(Regime.MARKOVIAN))
    exchange = 0.5 * s.imag
    collective = s.real
    return Characteristics(
        lamb_shift=np.diag(exchange).copy(),
        effective_decay=np.clip(np.diag(collective), 0.0, None),
        exchange=exchange,
        collective_decay=collective,
    )


def _atom_pair(array: AtomArray, i: int, j: int) -> tuple[float, float]:
    n = array.n_atoms
    for k in (i, j):
        if not -n <= k < n:
            raise IndexError(f"atom index {k} out of range for {n} atoms")
    a, b = array.atoms[i], array.atoms[j]
    w = array.reference_frequency / array.group_velocity
    ta = np.array([p.position for p in a.points]) * w
    tb = np.array([p.position for p in b.points]) * w
    ga = np.sqrt([p.bare_decay for p in a.points])
    gb = np.sqrt([p.bare_decay for p in b.points])
    amp = np.outer(ga, gb)
    diff = ta[:, None] - tb[None, :]
    half_sin = 0.5 * float(np.sum(amp * np.sin(np.abs(diff))))
    cos_sum = float(np.sum(amp * np.cos(diff)))
    return half_sin, cos_sum


def single_atom_characteristics(array: AtomArray, i: int) -> tuple[float, float]:
    """Return ``(lamb_shift, effective_decay)`` of atom ``i``."""
    lamb, decay = _atom_pair(array, i, i)
    return lamb, max(decay, 0.0)


def pair_characteristics(array: AtomArray, i: int, j: int) -> tuple[float, float]:
    """Return ``(exchange, collective_decay)`` between atoms ``i != j``."""
    n = array.n_atoms
    if i % n == j % n:
        raise ValueError("i == j: use single_atom_characteristics for one atom")
    return _atom_pair(array, i, j)


# ---------------------------------------------------------------------------
# layout generators


def _positive_spacing(theta: float) -> float:
    # Coincident points are not allowed; a non-positive spacing is replaced by
    # the Markov-equivalent spacing shifted by whole wavelengths.
    theta = float(theta)
    if theta > 1e-12:
        return theta
    return theta + TWO_PI * (math.floor(-theta / TWO_PI) + 1)


def _array_from_phases(
    phase_lists: Sequence[Sequence[float]],
    gamma: float,
    omega_a: float,
    group_velocity: float,
    regime: Regime | str,
    frequencies: Sequence[float] | None = None,
) -> AtomArray:
    scale = group_velocity / omega_a
    atoms = []
    for i, phases in enumerate(phase_lists):
        freq = omega_a if frequencies is None else frequencies[i]
        pts = tuple(CouplingPoint(ph * scale, gamma) for ph in phases)
        atoms.append(GiantAtom(freq, pts))
    return AtomArray(tuple(atoms), group_velocity, omega_a, Regime(regime))


def build_separate_array(
    n_atoms: int,
    n_points: int,
    theta: float,
    gamma: float = 1.0,
    omega_a: float = 1.0,
    *,
    group_velocity: float = 1.0,
    regime: Regime | str = Regime.MARKOVIAN,
) -> AtomArray:
    """Identical atoms, each with ``n_points`` contacts, all spaced by ``theta``.

    Atom ``i`` occupies consecutive points ``i*M .. i*M + M - 1`` so the lattice
    phase is ``M * theta``. The first point sits at phase zero.
    """
    if n_atoms < 1 or n_points < 1:
        raise ValueError("need n_atoms >= 1 and n_points >= 1")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    step = _positive_spacing(theta)
    phases = [[(i * n_points + m) * step for m in range(n_points)] for i in range(n_atoms)]
    return _array_from_phases(phases, gamma, omega_a, group_velocity, regime)


def build_braided_array(
    n_atoms: int,
    theta: float,
    gamma: float = 1.0,
    omega_a: float = 1.0,
    *,
    group_velocity: float = 1.0,
    regime: Regime | str = Regime.MARKOVIAN,
) -> AtomArray:
    """Chain of two-point atoms where every neighbouring pair is braided.

    Atom ``i`` (zero based) sits at phases ``2 i theta`` and ``(2 i + 3) theta``,
    so that the second point of atom ``i`` lies ``theta`` after the first point
    of atom ``i + 1`` and ``theta`` before the first point of atom ``i + 2``.
    """
    if n_atoms < 2:
        raise ValueError("a braided chain needs at least two atoms")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    step = _positive_spacing(theta)
    phases = [[2 * i * step, (2 * i + 3) * step] for i in range(n_atoms)]
    return _array_from_phases(phases, gamma, omega_a, group_velocity, regime)


def build_nested_array(
    n_atoms: int,
    theta: float,
    gamma: float = 1.0,
    omega_a: float = 1.0,
    *,
    group_velocity: float = 1.0,
    regime: Regime | str = Regime.MARKOVIAN,
) -> AtomArray:
    """Two-point atoms nested like brackets: ``1a 2a .. Na Nb .. 2b 1b``."""
    if n_atoms < 2:
        raise ValueError("a nested chain needs at least two atoms")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    step = _positive_spacing(theta)
    n = n_atoms
    phases = [[i * step, (2 * n - 1 - i) * step] for i in range(n)]
    return _array_from_phases(phases, gamma, omega_a, group_velocity, regime)


def build_explicit_array(
    atoms: Iterable[dict],
    omega_a: float = 1.0,
    *,
    group_velocity: float = 1.0,
    regime: Regime | str = Regime.MARKOVIAN,
) -> AtomArray:
    """Array from explicit ``(phase at omega_a, bare decay)`` point lists.

    Each entry of ``atoms`` is a mapping with ``points`` (a list of
    ``[phase, gamma]`` pairs) and an optional ``detuning`` giving
    ``omega_i - omega_a``.
    """
    atoms = list(atoms)
    scale = group_velocity / omega_a
    built = []
    for spec in atoms:
        pts = tuple(CouplingPoint(float(ph) * scale, float(g)) for ph, g in spec["points"])
        built.append(GiantAtom(omega_a + float(spec.get("detuning", 0.0)), pts))
    return AtomArray(tuple(built), group_velocity, omega_a, Regime(regime))


def classify_configuration(array: AtomArray) -> Configuration:
    """Label the topology of the atoms' extents on the waveguide."""
    spans = [a.extent for a in array.atoms]
    partial = contained = False
    for i in range(len(spans)):
        a0, a1 = spans[i]
        for j in range(i + 1, len(spans)):
            b0, b1 = spans[j]
            if a1 < b0 or b1 < a0:
                continue
            if (a0 < b0 and b1 < a1) or (b0 < a0 and a1 < b1):
                contained = True
            else:
                partial = True
    if partial and contained:
        return Configuration.MIXED
    if partial:
        return Configuration.BRAIDED
    if contained:
        return Configuration.NESTED
    return Configuration.SEPARATE
