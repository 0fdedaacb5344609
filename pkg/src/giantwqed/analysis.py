"""Spectral features of maximum-symmetry separate arrays and fitting helpers.

A maximum-symmetry array has ``N`` identical atoms with ``M`` equal-weight
points each, every neighbouring pair of points separated by the same phase
``theta``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.optimize

from giantwqed.engine import collective_modes, scatter_sweep
from giantwqed.model import AtomArray
from giantwqed.transfer import max_symmetry_characteristics

__all__ = [
    "DomainError",
    "FitError",
    "FeatureKind",
    "SpectralFeature",
    "LorentzianFit",
    "BandGapWidth",
    "phase_index",
    "superradiance_params",
    "lorentzian_R",
    "reflection_minima",
    "band_gap_width",
    "fit_lorentzian",
    "locate_reflection_zeros",
    "subradiant_pair",
    "fit_power_law",
]


class DomainError(ValueError):
    pass


class FitError(RuntimeError):
    def __init__(self, message, trace=()):
        self.trace = list(trace)
        super().__init__(f"{message} (cost trace: {self.trace[-5:]})")


class FeatureKind(str, enum.Enum):
    DECOUPLED = "decoupled"
    SUPERRADIANT = "superradiant"
    MINIMA_SET = "minima"
    BAND_GAP = "band_gap"


@dataclass(frozen=True)
class SpectralFeature:
    kind: FeatureKind
    center: float | None = None
    width: float | None = None
    minima: tuple[float, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "center": self.center,
            "width": self.width,
            "minima": list(self.minima),
        }


class LorentzianFit(NamedTuple):
    center: float
    fwhm: float
    peak: float
    residual: float


class BandGapWidth(NamedTuple):
    estimate: float
    asymptotic: float
    large_m: float
    center: float


def phase_index(n_points: int, theta: float, tol: float = 1e-9) -> int | None:
    """``n`` with ``theta == n pi / M`` (within ``tol``), else ``None``."""
    q = theta * n_points / math.pi
    n = round(q)
    return int(n) if abs(q - n) <= tol else None


def superradiance_params(n_points: int, n: int, gamma: float = 1.0, n_atoms: int = 1) -> SpectralFeature:
    """Decoupling or superradiant line at ``theta = n pi / M``.

    The returned width is ``n_atoms * Gamma_eff^sup``; with the default
    ``n_atoms=1`` it is the single-atom effective decay.
    """
    m_pts = n_points
    if n < 0:
        raise DomainError("n must be a non-negative integer")
    if n % 2 == 0:
        if (n // 2) % m_pts != 0:
            return SpectralFeature(FeatureKind.DECOUPLED)
        return SpectralFeature(FeatureKind.SUPERRADIANT, 0.0, n_atoms * m_pts * m_pts * gamma)
    x = n * math.pi / (2 * m_pts)
    lamb = 0.5 * m_pts * gamma / math.tan(x)
    decay = gamma / math.sin(x) ** 2
    return SpectralFeature(FeatureKind.SUPERRADIANT, lamb, n_atoms * decay)


def lorentzian_R(detuning, center: float, full_width: float):
    """Unit-height Lorentzian with full width at half maximum ``full_width``."""
    if not full_width > 0:
        raise ValueError("full_width must be positive")
    hw2 = (0.5 * full_width) ** 2
    d = np.asarray(detuning, dtype=float)
    out = hw2 / ((d - center) ** 2 + hw2)
    return float(out) if out.ndim == 0 else out


def _minima_by_index(n_atoms, n_points, theta, gamma):
    if phase_index(n_points, theta) is not None:
        raise DomainError("theta = n pi / M has no reflection minima; use superradiance_params")
    lamb, decay = max_symmetry_characteristics(n_points, theta, gamma)
    s_mt, c_mt = math.sin(n_points * theta), math.cos(n_points * theta)
    out = {}
    for s in range(1, n_atoms):
        y_s = math.cos(s * math.pi / n_atoms)
        gap = y_s - c_mt
        if abs(gap) < 1e-12:
            continue
        out[s] = lamb + s_mt * decay / (2.0 * gap)
    return out, lamb, decay


def reflection_minima(n_atoms: int, n_points: int, theta: float, gamma: float = 1.0) -> list[float]:
    """Detunings of zero reflection, sorted ascending."""
    found, _, _ = _minima_by_index(n_atoms, n_points, theta, gamma)
    return sorted(found.values())


def band_gap_width(n_points: int, m: int, gamma: float = 1.0, n_atoms: int = 40) -> BandGapWidth:
    """Band-gap width at ``theta = (2m+1) pi / (2M)``.

    ``estimate`` is the distance between the outermost zeros ``s=1`` and
    ``s=N-1``; ``asymptotic`` its large-``N`` limit ``Gamma_eff``;
    ``large_m`` the large-``M`` form ``8 M^2 gamma / pi^2``.
    """
    theta = (2 * m + 1) * math.pi / (2 * n_points)
    found, lamb, decay = _minima_by_index(n_atoms, n_points, theta, gamma)
    if 1 not in found or (n_atoms - 1) not in found:
        raise DomainError("need n_atoms >= 2 for a band-gap estimate")
    estimate = abs(found[1] - found[n_atoms - 1])
    return BandGapWidth(estimate, decay, 8.0 * n_points**2 * gamma / math.pi**2, lamb)


def _half_width_guess(x, y, k):
    half = 0.5 * y[k]
    left = k
    while left > 0 and y[left] > half:
        left -= 1
    right = k
    while right < y.size - 1 and y[right] > half:
        right += 1
    return max(x[right] - x[left], x[1] - x[0])


def fit_lorentzian(spectrum, reflectance=None) -> LorentzianFit:
    """Least-squares fit of ``peak * L(Delta; center, fwhm)`` to a spectrum.

    ``spectrum`` is either an object with ``detuning`` and ``R`` attributes or
    a detuning array with ``reflectance`` passed separately.
    """
    if reflectance is None:
        x, y = np.asarray(spectrum.detuning, float), np.asarray(spectrum.R, float)
    else:
        x, y = np.asarray(spectrum, float), np.asarray(reflectance, float)
    trace: list[float] = []
    k = int(np.argmax(y))
    if not y[k] > 1e-14:
        raise FitError("spectrum has no peak to fit", trace)

    def resid(p):
        c, w, a = p
        hw2 = 0.25 * w * w
        res = a * hw2 / ((x - c) ** 2 + hw2) - y
        trace.append(float(0.5 * res @ res))
        return res

    p0 = [x[k], _half_width_guess(x, y, k), y[k]]
    try:
        sol = scipy.optimize.least_squares(
            resid, p0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000, method="lm"
        )
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise FitError(f"least squares failed: {exc}", trace) from exc
    c, w, a = sol.x
    if not sol.success or not np.all(np.isfinite(sol.x)) or w == 0:
        raise FitError(f"fit did not converge: {sol.message}", trace)
    return LorentzianFit(float(c), float(abs(w)), float(a), float(np.max(np.abs(sol.fun))))


def locate_reflection_zeros(array: AtomArray, lo: float, hi: float, count: int = 4001,
                            threshold: float = 1e-3) -> list[float]:
    """Numerically locate zeros of ``r`` on ``[lo, hi]``.

    Grid local minima of ``R`` below ``threshold`` are bracketed by the sign
    change of ``r`` projected on its local slope, then refined with Brent's
    method to ``1e-12`` of the array's rate scale.
    """
    grid = np.linspace(lo, hi, count)
    _, r = scatter_sweep(array, grid)
    refl = np.abs(r) ** 2
    xtol = 1e-12 * array.rate_scale
    zeros = []
    for k in range(1, count - 1):
        if not (refl[k] <= refl[k - 1] and refl[k] <= refl[k + 1] and refl[k] < threshold):
            continue
        slope = r[k + 1] - r[k - 1]

        def proj(d, slope=slope):
            return float(np.real(scatter_sweep(array, [d])[1][0] * np.conj(slope)))

        a, b = grid[k - 1], grid[k + 1]
        fa, fb = proj(a), proj(b)
        if fa == 0.0:
            zeros.append(float(a))
        elif fb == 0.0:
            zeros.append(float(b))
        elif fa * fb < 0:
            zeros.append(float(scipy.optimize.brentq(proj, a, b, xtol=xtol, rtol=1e-15)))
    return sorted(set(zeros))


def subradiant_pair(array: AtomArray) -> tuple[float, float]:
    """Width of the most subradiant modes and the spacing of the narrowest pair.

    Returns ``(Gamma_ms, W~)`` where ``W~`` is the distance between the
    centres of the two narrowest collective modes.
    """
    modes = sorted(collective_modes(array), key=lambda m: m.decay)
    a, b = modes[0], modes[1]
    return 0.5 * (a.decay + b.decay), abs(a.energy_detuning - b.energy_detuning)


def fit_power_law(xs, ys) -> tuple[float, float]:
    """Slope and prefactor of ``y = A x^p`` from a log-log linear fit."""
    p, log_a = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(p), float(math.exp(log_a))
