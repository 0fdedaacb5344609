"""Transfer-matrix cascade for giant atoms in a separate configuration.

Separate atoms scatter one after another, so each atom acts like a small atom
with a shifted resonance ``Delta_L,i``, an effective width ``Gamma_eff,i`` and
a reference phase ``alpha_i`` (the argument of its drive element). For
identical, periodically arranged atoms the N-fold product of the unit-cell
matrix reduces to Chebyshev polynomials of the second kind.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from giantwqed import kernels
from giantwqed.model import (
    AtomArray,
    Configuration,
    Regime,
    characteristics,
    classify_configuration,
    single_atom_characteristics,
)

__all__ = [
    "PoleError",
    "AtomBlock",
    "PeriodicCell",
    "atom_block",
    "atom_alpha",
    "cascade_scatter",
    "cascade_sweep",
    "chebyshev_u",
    "periodic_cell",
    "periodic_reflectance",
    "periodic_parameters",
    "closed_form_sweep",
    "closed_form_amplitudes",
    "max_symmetry_characteristics",
]


class PoleError(ZeroDivisionError):
    """The probe sits exactly on ``Delta_L,i`` where ``xi_i`` diverges."""

    def __init__(self, message, detuning=None):
        self.detuning = detuning
        super().__init__(message)


@dataclass(frozen=True)
class AtomBlock:
    xi: float
    alpha: float
    matrix: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PeriodicCell:
    xi: float
    phi: float
    y: float
    cell: np.ndarray = field(repr=False)


def _block_matrix(xi: float) -> np.ndarray:
    return np.array([[1 + 1j * xi, 1j * xi], [-1j * xi, 1 - 1j * xi]])


def _require_separate(array: AtomArray) -> None:
    kind = classify_configuration(array)
    if kind is not Configuration.SEPARATE:
        raise ValueError(f"transfer matrices need a separate configuration, got {kind.value}")


def atom_alpha(array: AtomArray, i: int) -> float | None:
    """Reference phase ``alpha_i`` in ``(-pi/2, pi/2]``, or ``None`` if undefined.

    ``alpha_i`` is half the two-argument arctangent of the sine and cosine sums
    over ``theta_im + theta_im'``; both vanish for a fully decoupled atom.
    """
    atom = array.atoms[i]
    w = array.reference_frequency / array.group_velocity
    th = np.array([p.position for p in atom.points]) * w
    amp = np.sqrt([p.bare_decay for p in atom.points])
    weights = np.outer(amp, amp)
    total = th[:, None] + th[None, :]
    s = float(np.sum(weights * np.sin(total)))
    c = float(np.sum(weights * np.cos(total)))
    scale = float(np.sum(weights))
    if math.hypot(s, c) <= 1e-12 * scale:
        return None
    alpha = 0.5 * math.atan2(s, c)
    # atan2 returns (-pi, pi]; halving gives (-pi/2, pi/2]
    return alpha


def atom_block(array: AtomArray, i: int, detuning: float, *, alpha: float | None = None) -> AtomBlock:
    """The 2x2 scattering block of atom ``i`` at ``Delta = omega - omega_a``."""
    _require_separate(array)
    lamb, gamma_eff = single_atom_characteristics(array, i)
    atom_det = array.atoms[i].frequency - array.reference_frequency
    denom = 2.0 * (detuning - atom_det - lamb)
    if denom == 0.0:
        raise PoleError(f"detuning {detuning!r} is exactly on the shifted resonance of atom {i}", detuning)
    xi = gamma_eff / denom
    if alpha is None:
        alpha = atom_alpha(array, i)
        if alpha is None:
            alpha = 0.0
    return AtomBlock(xi, alpha, _block_matrix(xi))


def _spatial_order(array: AtomArray) -> list[int]:
    return sorted(range(array.n_atoms), key=lambda k: array.atoms[k].points[0].position)


def _alphas(array: AtomArray, order: list[int]) -> np.ndarray:
    out = []
    prev = 0.0
    for k in order:
        a = atom_alpha(array, k)
        prev = prev if a is None else a
        out.append(prev)
    return np.array(out)


def _check_markovian(array: AtomArray) -> None:
    if array.regime is not Regime.MARKOVIAN:
        raise ValueError("the transfer-matrix cascade is derived for the Markovian regime")


def cascade_scatter(array: AtomArray, detuning: float) -> tuple[complex, complex]:
    """``(t, r)`` from the product ``M = [prod_i T_i T_phi_i] T_N``.

    The phase of ``r`` includes ``exp(2 i alpha_1)`` so that it equals the
    general solver's ``r`` for the actual coordinate origin.
    """
    _require_separate(array)
    _check_markovian(array)
    order = _spatial_order(array)
    alpha = _alphas(array, order)
    m = np.eye(2, dtype=complex)
    for pos, k in enumerate(order):
        block = atom_block(array, k, detuning, alpha=alpha[pos])
        m = m @ block.matrix
        if pos < len(order) - 1:
            phi = alpha[pos + 1] - alpha[pos]
            m = m @ np.diag([np.exp(-1j * phi), np.exp(1j * phi)])
    t = np.exp(1j * (alpha[0] - alpha[-1])) / m[0, 0]
    r = np.exp(2j * alpha[0]) * m[1, 0] / m[0, 0]
    return complex(t), complex(r)


def cascade_sweep(array: AtomArray, detunings, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized cascade over a detuning grid (compiled kernel when available)."""
    _require_separate(array)
    _check_markovian(array)
    k = backend if backend is not None else kernels.backend
    order = _spatial_order(array)
    ch = characteristics(array)
    det = array.atom_detunings()
    deltas = np.ascontiguousarray(detunings, dtype=float)
    poles = det[order] + ch.lamb_shift[order]
    if np.any(deltas[:, None] == poles[None, :]):
        hit = deltas[np.any(deltas[:, None] == poles[None, :], axis=1)][0]
        raise PoleError(f"detuning {hit!r} is exactly on a shifted atomic resonance", float(hit))
    args = (ch.effective_decay[order], ch.lamb_shift[order], det[order], _alphas(array, order))
    t, r, _ = kernels.run_chunked(k.cascade_sweep, args, deltas)
    return t, r


def chebyshev_u(n: int, y, backend=None):
    """Chebyshev polynomial of the second kind ``U_n(y)`` for any real ``y``.

    Uses the three-term recurrence for ``n <= 64`` and the trigonometric or
    hyperbolic closed form beyond that.
    """
    if n < 0:
        raise ValueError("chebyshev_u needs n >= 0")
    k = backend if backend is not None else kernels.backend
    out = k.chebyshev_u(int(n), np.asarray(y, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _u(n, y):
    # U_{-1} = 0 is needed for a single cell
    if n < 0:
        return np.zeros_like(np.asarray(y, dtype=float))
    return kernels.backend.chebyshev_u(int(n), np.asarray(y, dtype=float))


def periodic_cell(xi: float, phi: float) -> PeriodicCell:
    """Unit cell ``T_i T_phi`` of an identical periodic chain."""
    e = np.exp(1j * phi)
    cell = np.array(
        [[(1 + 1j * xi) / e, 1j * xi * e], [-1j * xi / e, (1 - 1j * xi) * e]]
    )
    return PeriodicCell(xi, phi, math.cos(phi) + xi * math.sin(phi), cell)


def periodic_reflectance(n_atoms: int, xi, y):
    """Closed-form ``(T, R)`` of ``n_atoms`` identical cells.

    Infinite ``xi`` (probe on the shifted resonance) is returned as total
    reflection.
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    xi = np.asarray(xi, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        q = (xi * _u(n_atoms - 1, y)) ** 2
        trans = 1.0 / (1.0 + q)
        refl = q / (1.0 + q)
    pole = np.isinf(xi) | np.isinf(q)
    trans = np.where(pole, 0.0, trans)
    refl = np.where(pole, 1.0, refl)
    if trans.ndim == 0:
        return float(trans), float(refl)
    return trans, refl


def max_symmetry_characteristics(n_points: int, theta: float, gamma: float = 1.0) -> tuple[float, float]:
    """``(lamb_shift, effective_decay)`` of an atom with equally spaced, equal-weight points.

    At ``theta`` a multiple of ``2 pi`` the ratio is taken in its limit
    ``(0, M^2 gamma)``.
    """
    m = n_points
    den = 1.0 - math.cos(theta)
    if abs(den) < 1e-14:
        return 0.0, m * m * gamma
    decay = gamma * (1.0 - math.cos(m * theta)) / den
    lamb = 0.5 * gamma * (m * math.sin(theta) - math.sin(m * theta)) / den
    return lamb, max(decay, 0.0)


def periodic_parameters(array: AtomArray, rtol: float = 1e-9) -> tuple[float, float, float, float]:
    """``(lamb_shift, effective_decay, lattice_phase, atom_detuning)`` of a periodic chain.

    Raises ``ValueError`` unless the array is separate, Markovian, and made of
    identical atoms on a uniform lattice.
    """
    _require_separate(array)
    _check_markovian(array)
    order = _spatial_order(array)
    atoms = [array.atoms[k] for k in order]
    w = array.reference_frequency / array.group_velocity
    ref = atoms[0]
    shape = np.array([p.position - ref.points[0].position for p in ref.points])
    decays = np.array([p.bare_decay for p in ref.points])
    scale = max(1.0, float(np.max(np.abs(shape)))) if shape.size else 1.0
    for a in atoms[1:]:
        if len(a.points) != len(ref.points):
            raise ValueError("atoms differ in number of coupling points")
        s = np.array([p.position - a.points[0].position for p in a.points])
        d = np.array([p.bare_decay for p in a.points])
        if not (np.allclose(s, shape, rtol=0, atol=rtol * scale) and np.allclose(d, decays, rtol=rtol)):
            raise ValueError("atoms are not identical")
        if abs(a.frequency - ref.frequency) > rtol * max(1.0, abs(ref.frequency)):
            raise ValueError("atoms have different transition frequencies")
    starts = np.array([a.points[0].position for a in atoms])
    if starts.size > 1:
        steps = np.diff(starts)
        if not np.allclose(steps, steps[0], rtol=rtol):
            raise ValueError("atoms are not on a uniform lattice")
        phi = float(steps[0] * w)
    else:
        phi = 0.0
    lamb, decay = single_atom_characteristics(array, order[0])
    return lamb, decay, phi, ref.frequency - array.reference_frequency


def closed_form_sweep(array: AtomArray, detunings) -> tuple[np.ndarray, np.ndarray]:
    """``(T, R)`` over a grid from the Chebyshev closed form (periodic chains only)."""
    lamb, decay, phi, det = periodic_parameters(array)
    d = np.asarray(detunings, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = decay / (2.0 * (d - det - lamb))
    on_pole = ~np.isfinite(xi)
    if decay == 0.0:
        xi = np.zeros_like(d)
        on_pole[:] = False
    y = math.cos(phi) + np.where(on_pole, 0.0, xi) * math.sin(phi)
    trans, refl = periodic_reflectance(array.n_atoms, np.where(on_pole, 0.0, xi), y)
    trans = np.where(on_pole, 0.0, trans)
    refl = np.where(on_pole, 1.0, refl)
    return np.asarray(trans), np.asarray(refl)


def closed_form_amplitudes(array: AtomArray, detunings) -> tuple[np.ndarray, np.ndarray]:
    """``(t, r)`` of a periodic chain from ``C^(N-1) = U_(N-2) C - U_(N-3) I``.

    ``C`` is the unimodular unit cell with half-trace ``y``; the result is
    then multiplied by the last atom's block as in the cascade.
    """
    lamb, decay, phi, det = periodic_parameters(array)
    order = _spatial_order(array)
    a1 = atom_alpha(array, order[0]) or 0.0
    n = array.n_atoms
    d = np.asarray(detunings, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = decay / (2.0 * (d - det - lamb)) if decay else np.zeros_like(d)
    if np.any(~np.isfinite(xi)):
        hit = float(d[~np.isfinite(xi)][0])
        raise PoleError(f"detuning {hit!r} is exactly on the shifted atomic resonance", hit)
    y = math.cos(phi) + xi * math.sin(phi)
    e = np.exp(1j * phi)
    c11, c12 = (1 + 1j * xi) / e, 1j * xi * e
    c21, c22 = -1j * xi / e, (1 - 1j * xi) * e
    if n == 1:
        p11, p12, p21, p22 = 1.0, 0.0, 0.0, 1.0
    else:
        u1 = _u(n - 2, y)
        u2 = _u(n - 3, y)
        p11, p12 = u1 * c11 - u2, u1 * c12
        p21, p22 = u1 * c21, u1 * c22 - u2
    m11 = p11 * (1 + 1j * xi) + p12 * (-1j * xi)
    m21 = p21 * (1 + 1j * xi) + p22 * (-1j * xi)
    a_n = a1 + (n - 1) * phi
    t = np.exp(1j * (a1 - a_n)) / m11
    r = np.exp(2j * a1) * m21 / m11
    return np.asarray(t), np.asarray(r)
