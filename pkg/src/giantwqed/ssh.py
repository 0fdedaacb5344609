"""SSH chain of braided two-point giant atoms with a weak probe on the first atom.

Each atom couples at two points half a wavelength apart, so it has no
effective decay and no Lamb shift. Neighbouring atoms are braided and
exchange ``J = gamma sin(phi)`` without collective decay; alternating
``phi1, phi2`` gives the SSH couplings ``J1, J2``. Shifting the first point
of atom 1 by ``epsilon`` opens a small decay channel ``2 gamma (1 - cos eps)``
that lets a waveguide photon probe the left edge state.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from giantwqed.model import AtomArray, build_explicit_array

__all__ = [
    "TopologyError",
    "GapRegime",
    "SshSpec",
    "EdgeModel",
    "SshBands",
    "GapSpectrum",
    "build_ssh_probe_array",
    "ssh_hamiltonian",
    "ssh_bands",
    "edge_state_model",
    "edge_coupling",
    "gap_spectrum_approx",
]


class TopologyError(ValueError):
    pass


class GapRegime(str, enum.Enum):
    ATS = "ATS"
    EIT = "EIT"


@dataclass(frozen=True)
class SshSpec:
    """Layout of the probed SSH chain, phases in radians and rates in ``gamma``."""

    n_atoms: int
    phi1: float
    phi2: float
    epsilon: float = 0.0
    gamma: float = 1.0
    omega_a: float = 1.0

    def __post_init__(self):
        if self.n_atoms < 2:
            raise ValueError("an SSH chain needs at least two atoms")
        for name in ("phi1", "phi2"):
            val = getattr(self, name)
            if not 0.0 < val < math.pi:
                raise ValueError(f"{name} must lie in (0, pi), got {val}")
        if not 0.0 <= self.epsilon < math.pi - self.phi1:
            raise ValueError("epsilon must lie in [0, pi - phi1) to keep the braid order")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def beta(self) -> float:
        return self.phi2 - self.phi1

    @property
    def couplings(self) -> tuple[float, float]:
        return self.gamma * math.sin(self.phi1), self.gamma * math.sin(self.phi2)

    @property
    def probe_decay(self) -> float:
        return 2.0 * self.gamma * (1.0 - math.cos(self.epsilon))


@dataclass(frozen=True)
class EdgeModel:
    mu: float
    J: float
    Gamma_L: float
    psi_L: np.ndarray = field(repr=False)
    psi_R: np.ndarray = field(repr=False)
    J_projected: float = 0.0
    Gamma_L_projected: float = 0.0

    @property
    def regime(self) -> GapRegime:
        return GapRegime.ATS if 4.0 * abs(self.J) / self.Gamma_L > 1.0 else GapRegime.EIT


class SshBands(NamedTuple):
    upper: np.ndarray | float
    lower: np.ndarray | float
    width: float
    gap: float


class GapSpectrum(NamedTuple):
    t: np.ndarray | complex
    r: np.ndarray | complex
    regime: GapRegime
    z_plus: complex
    z_minus: complex
    eta_plus: complex
    eta_minus: complex
    eta_r_plus: complex
    eta_r_minus: complex


def _phase_lists(spec: SshSpec) -> list[list[float]]:
    first = [spec.epsilon, math.pi]
    out = [first]
    for i in range(1, spec.n_atoms):
        phi = spec.phi1 if i % 2 == 1 else spec.phi2
        start = out[-1][1] - phi
        out.append([start, start + math.pi])
    # shift so every phase is non-negative; a common shift leaves S unchanged
    lo = min(p[0] for p in out)
    if lo < 0:
        shift = 2.0 * math.pi * math.ceil(-lo / (2.0 * math.pi))
        out = [[a + shift, b + shift] for a, b in out]
    return out


def build_ssh_probe_array(spec: SshSpec, **kwargs) -> AtomArray:
    """Braided chain with the probe shift on atom 1.

    Atom 1 has intra-atom phase ``pi - epsilon`` and is detuned by
    ``-gamma sin(epsilon)`` to cancel its Lamb shift; all other atoms sit at
    ``omega_a`` with intra-atom phase ``pi``. For ``phi1 + phi2 >= pi``
    next-nearest neighbours braid as well and the chain is no longer a pure
    SSH model; a warning is issued.
    """
    if spec.phi1 + spec.phi2 >= math.pi and spec.n_atoms > 2:
        warnings.warn("phi1 + phi2 >= pi: next-nearest neighbours couple, chain is not pure SSH",
                      RuntimeWarning, stacklevel=2)
    atoms = []
    for i, (a, b) in enumerate(_phase_lists(spec)):
        det = -spec.gamma * math.sin(spec.epsilon) if i == 0 else 0.0
        atoms.append({"points": [[a, spec.gamma], [b, spec.gamma]], "detuning": det})
    return build_explicit_array(atoms, spec.omega_a, **kwargs)


def ssh_hamiltonian(spec: SshSpec) -> np.ndarray:
    """Real tridiagonal ``H_SSH - omega_a`` with hoppings ``J1, J2, J1, ...``."""
    j1, j2 = spec.couplings
    hop = np.array([j1 if i % 2 == 0 else j2 for i in range(spec.n_atoms - 1)])
    return np.diag(hop, 1) + np.diag(hop, -1)


def ssh_bands(J1: float, J2: float, K, omega_a: float = 0.0) -> SshBands:
    """Bulk bands ``omega_a +- |J1 + J2 e^{iK}|`` with total width and gap."""
    k = np.asarray(K, dtype=float)
    if np.any(np.abs(k) > math.pi + 1e-12):
        raise ValueError("K must lie in [-pi, pi]")
    e = np.sqrt(np.maximum(J1 * J1 + J2 * J2 + 2.0 * J1 * J2 * np.cos(k), 0.0))
    upper, lower = omega_a + e, omega_a - e
    if k.ndim == 0:
        upper, lower = float(upper), float(lower)
    return SshBands(upper, lower, 2.0 * (J1 + J2), 2.0 * abs(J1 - J2))


def edge_coupling(mu: float, J2: float, n_atoms: int) -> float:
    """Hybridization ``J2 (mu^2 - 1) (-mu)^(N/2)`` of the two edge states."""
    return J2 * (mu * mu - 1.0) * (-mu) ** (n_atoms // 2)


def edge_state_model(spec: SshSpec) -> EdgeModel:
    """Edge-state amplitudes, their hybridization and the probe-induced width.

    ``J`` and ``Gamma_L`` are the large-``N`` expressions. ``J_projected`` and
    ``Gamma_L_projected`` are the same quantities evaluated with the
    finite-chain normalization, i.e. ``<psi_L|H_SSH|psi_R>`` and
    ``Gamma_eff,1 |psi_L(1)|^2``.

    Raises ``TopologyError`` when ``J1 >= J2``. Warns when the gap is smaller
    than ``4 |J|``, where the edge states are not deep in the gap.
    """
    n = spec.n_atoms
    if n % 2:
        raise ValueError("edge-state analysis needs an even number of atoms")
    j1, j2 = spec.couplings
    mu = j1 / j2
    if mu >= 1.0:
        raise TopologyError(f"non-topological phase: J1/J2 = {mu:.6g} >= 1")
    half = np.arange(n // 2)
    amp = (-mu) ** half
    psi_l = np.zeros(n)
    psi_l[0::2] = amp
    psi_r = np.zeros(n)
    psi_r[1::2] = amp[::-1]
    psi_l /= np.linalg.norm(psi_l)
    psi_r /= np.linalg.norm(psi_r)
    coupling = edge_coupling(mu, j2, n)
    gamma_l = (1.0 - mu * mu) * spec.probe_decay
    if 2.0 * abs(j1 - j2) < 4.0 * abs(coupling):
        warnings.warn("band gap is narrower than 4|J|: edge states are not deep in the gap",
                      RuntimeWarning, stacklevel=2)
    projected = float(psi_l @ ssh_hamiltonian(spec) @ psi_r)
    return EdgeModel(mu, coupling, gamma_l, psi_l, psi_r, projected, spec.probe_decay * psi_l[0] ** 2)


def gap_spectrum_approx(J: float, Gamma_L: float, epsilon: float, detuning) -> GapSpectrum:
    """Three-level approximation of ``t`` and ``r`` inside the topological gap.

    The two poles ``Z_+-`` carry weights ``eta_+-`` in ``t`` and
    ``-exp(i eps) eta_+-`` in ``r``. At ``4|J| = Gamma_L`` the poles merge and
    the weights are returned as ``nan``.
    """
    if not Gamma_L > 0:
        raise ValueError("Gamma_L must be positive")
    d = np.asarray(detuning, dtype=float)
    root = np.sqrt(complex(16.0 * J * J - Gamma_L * Gamma_L))
    zp = 0.25 * (-1j * Gamma_L + root)
    zm = 0.25 * (-1j * Gamma_L - root)
    denom = d * (d + 0.5j * Gamma_L) - J * J
    t = (d * d - J * J) / denom
    phase = np.exp(1j * epsilon)
    r = 0.5j * Gamma_L * d * phase / denom
    if zp != zm:
        eta_p = (zp + zm) * zp / (zp - zm)
        eta_m = (zp + zm) * zm / (zm - zp)
    else:
        eta_p = eta_m = complex("nan")
    regime = GapRegime.ATS if 4.0 * abs(J) / Gamma_L > 1.0 else GapRegime.EIT
    if d.ndim == 0:
        t, r = complex(t), complex(r)
    return GapSpectrum(t, r, regime, complex(zp), complex(zm), complex(eta_p), complex(eta_m),
                       complex(-phase * eta_p), complex(-phase * eta_m))
