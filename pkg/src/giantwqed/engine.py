"""General real-space solution for single-photon scattering off giant atoms.

The atomic amplitudes solve ``(omega - H) f = V`` with the complex-symmetric
effective Hamiltonian ``H``; transmission and reflection follow as
``t = 1 - i V^dagger f`` and ``r = -i V^T f``. Everything here works in the
rotating frame of ``omega_a``: matrices are built as ``H - omega_a`` and
probes are given as detunings ``Delta = omega - omega_a``, which keeps the
arithmetic well conditioned when ``omega_a`` is large compared to the rates.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from giantwqed import kernels
from giantwqed.model import AtomArray, Regime, _interaction_sums

__all__ = [
    "SingularSystemError",
    "DegenerateSpectrumError",
    "SystemMatrices",
    "ScatteringResult",
    "CollectiveMode",
    "build_system_matrices",
    "scatter",
    "scatter_sweep",
    "collective_modes",
    "reconstruct_from_modes",
    "mode_components",
    "DEGENERACY_RADIUS",
]

#: Eigenvalues closer than this (in units of the array's rate scale) form a cluster.
DEGENERACY_RADIUS = 1e-8
#: Biorthogonal overlaps below this flag an exceptional point. Eigenvalues of a
#: defective block split by about sqrt(machine eps), so they may escape the
#: cluster radius; their unit-vector overlap is then of the same tiny order.
EXCEPTIONAL_OVERLAP = 1e-6


class SingularSystemError(ArithmeticError):
    """``omega - H`` is singular: the probe sits on a real eigenvalue of ``H``."""

    def __init__(self, detuning, eigenvalue):
        self.detuning = detuning
        self.eigenvalue = eigenvalue
        super().__init__(
            f"linear system singular at detuning {detuning!r}; "
            f"offending eigenvalue (relative to omega_a) {eigenvalue!r}"
        )


class DegenerateSpectrumError(ArithmeticError):
    """The effective Hamiltonian is defective (exceptional point)."""

    def __init__(self, cluster):
        self.cluster = [complex(c) for c in cluster]
        super().__init__(f"degenerate spectrum: eigenvalue cluster {self.cluster} is not diagonalizable")


@dataclass(frozen=True)
class SystemMatrices:
    """Drive vector and effective Hamiltonian at one probe frequency.

    ``detuned_hamiltonian`` is ``H - omega_a I`` computed directly;
    ``hamiltonian`` adds the reference frequency back.
    """

    drive: np.ndarray
    detuned_hamiltonian: np.ndarray
    reference_frequency: float
    probe_frequency: float

    @property
    def hamiltonian(self) -> np.ndarray:
        n = self.drive.size
        return self.detuned_hamiltonian + self.reference_frequency * np.eye(n)


@dataclass(frozen=True)
class ScatteringResult:
    """Amplitudes at a single probe frequency; ``f`` is reported for ``v_g = 1``."""

    t: complex
    r: complex
    f: np.ndarray = field(repr=False)

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    @property
    def R(self) -> float:
        return abs(self.r) ** 2


@dataclass(frozen=True)
class CollectiveMode:
    """One eigenmode of the effective Hamiltonian at ``omega_a``.

    ``right_vec`` is scaled so that ``left_vec.conj() @ right_vec == 1``.
    """

    eigenvalue: complex
    energy_detuning: float
    decay: float
    right_vec: np.ndarray = field(repr=False)
    left_vec: np.ndarray = field(repr=False)
    weight_t: complex
    weight_r: complex

    @property
    def detuned_eigenvalue(self) -> complex:
        return complex(self.energy_detuning, -0.5 * self.decay)


def _matrices(array: AtomArray, detuning: float) -> tuple[np.ndarray, np.ndarray]:
    theta = array.phases(detuning)
    _, gam, owner = array.flat_points()
    v = np.zeros(array.n_atoms, dtype=complex)
    np.add.at(v, owner, np.sqrt(gam / 2.0) * np.exp(1j * theta))
    h = np.diag(array.atom_detunings()).astype(complex) - 0.5j * _interaction_sums(array, detuning)
    # exact reciprocity; the sums are symmetric up to round-off
    h = 0.5 * (h + h.T)
    return h, v


def build_system_matrices(array: AtomArray, detuning: float = 0.0) -> SystemMatrices:
    """``V`` and ``H`` for a probe at ``omega_a + detuning``."""
    h, v = _matrices(array, detuning)
    return SystemMatrices(v, h, array.reference_frequency, array.reference_frequency + detuning)


def _nearest_eigenvalue(h: np.ndarray, detuning: float) -> complex:
    w = np.linalg.eigvals(h)
    return complex(w[np.argmin(np.abs(w - detuning))])


def scatter(array: AtomArray, detuning: float) -> ScatteringResult:
    """Transmission, reflection and atomic amplitudes at one detuning."""
    h, v = _matrices(array, detuning)
    a = detuning * np.eye(v.size) - h
    try:
        f = np.linalg.solve(a, v)
    except np.linalg.LinAlgError:
        raise SingularSystemError(detuning, _nearest_eigenvalue(h, detuning)) from None
    t = 1.0 - 1j * np.vdot(v, f)
    r = -1j * (v @ f)
    return ScatteringResult(complex(t), complex(r), f)


def scatter_sweep(array: AtomArray, detunings, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """``(t, r)`` over a detuning grid using the sweep kernels.

    ``backend`` overrides the module chosen at import (see ``kernels``).
    """
    k = backend if backend is not None else kernels.backend
    deltas = np.ascontiguousarray(detunings, dtype=float)
    if array.regime is Regime.MARKOVIAN:
        h, v = _matrices(array, 0.0)
        t, r, ok = kernels.run_chunked(k.solve_sweep, (h, v), deltas)
    else:
        x, gam, owner = array.flat_points()
        slope = x / array.group_velocity
        args = (slope, np.sqrt(gam), owner, array.atom_detunings(), array.reference_frequency)
        t, r, ok = kernels.run_chunked(k.solve_sweep_retarded, args, deltas)
    if not np.all(ok):
        bad = float(deltas[np.argmin(ok)])
        h, _ = _matrices(array, bad)
        raise SingularSystemError(bad, _nearest_eigenvalue(h, bad))
    return t, r


def _clusters(values: np.ndarray, radius: float) -> list[list[int]]:
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def collective_modes(array: AtomArray) -> list[CollectiveMode]:
    """Biorthonormal eigenmodes of ``H(omega_a)`` with their Lorentzian weights.

    Degenerate but diagonalizable eigenvalue clusters are biorthonormalized
    blockwise. A defective cluster raises ``DegenerateSpectrumError``.
    Modes are returned sorted by energy, then by decay.
    """
    h, v = _matrices(array.with_regime(Regime.MARKOVIAN), 0.0)
    w, vl, vr = scipy.linalg.eig(h, left=True, right=True)
    vl = vl / np.linalg.norm(vl, axis=0)
    vr = vr / np.linalg.norm(vr, axis=0)
    radius = DEGENERACY_RADIUS * array.rate_scale
    for idx in _clusters(w, radius):
        gram = vl[:, idx].conj().T @ vr[:, idx]
        if np.linalg.svd(gram, compute_uv=False).min() < EXCEPTIONAL_OVERLAP:
            raise DegenerateSpectrumError(w[idx] + array.reference_frequency)
        vr[:, idx] = vr[:, idx] @ np.linalg.inv(gram)
    omega_a = array.reference_frequency
    modes = []
    for n in range(w.size):
        right, left = vr[:, n], vl[:, n]
        proj = np.vdot(left, v)
        modes.append(
            CollectiveMode(
                eigenvalue=complex(w[n] + omega_a),
                energy_detuning=float(w[n].real),
                decay=float(-2.0 * w[n].imag),
                right_vec=right,
                left_vec=left,
                weight_t=complex(-1j * np.vdot(v, right) * proj),
                weight_r=complex(-1j * (v @ right) * proj),
            )
        )
    modes.sort(key=lambda m: (m.energy_detuning, m.decay))
    return modes


def mode_components(modes, detunings) -> np.ndarray:
    """Per-mode reflection amplitudes ``eta~_n / (Delta - delta_n + i Gamma_n/2)``.

    Returns an array of shape ``(len(detunings), len(modes))``.
    """
    d = np.atleast_1d(np.asarray(detunings, dtype=float))[:, None]
    lam = np.array([m.detuned_eigenvalue for m in modes])[None, :]
    wr = np.array([m.weight_r for m in modes])[None, :]
    return wr / (d - lam)


def reconstruct_from_modes(modes, detuning):
    """``(t, r)`` rebuilt as a sum of Lorentzian channels.

    Accepts a scalar or an array of detunings.
    """
    d = np.asarray(detuning, dtype=float)
    flat = np.atleast_1d(d)[:, None]
    lam = np.array([m.detuned_eigenvalue for m in modes])[None, :]
    wt = np.array([m.weight_t for m in modes])[None, :]
    wr = np.array([m.weight_r for m in modes])[None, :]
    t = 1.0 + np.sum(wt / (flat - lam), axis=1)
    r = np.sum(wr / (flat - lam), axis=1)
    if d.ndim == 0:
        return complex(t[0]), complex(r[0])
    return t.reshape(d.shape), r.reshape(d.shape)
