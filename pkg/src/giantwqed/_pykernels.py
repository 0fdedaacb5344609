"""Pure NumPy implementations of the sweep kernels.

These mirror ``_ckernels.pyx`` one-to-one and are used whenever the compiled
module is unavailable or ``GIANTWQED_PURE_PYTHON`` is set. Every function
returns ``(t, r, ok)`` arrays over the detuning grid, ``ok`` being ``False``
where the linear system was exactly singular.
"""
import numpy as np

NAME = "python"


def solve_sweep(h, v, deltas):
    """Scattering amplitudes for fixed ``H - omega_a`` and drive ``V``."""
    h = np.asarray(h, dtype=complex)
    v = np.asarray(v, dtype=complex)
    deltas = np.asarray(deltas, dtype=float)
    n = v.size
    k = deltas.size
    t = np.empty(k, dtype=complex)
    r = np.empty(k, dtype=complex)
    ok = np.ones(k, dtype=bool)
    a = deltas[:, None, None] * np.eye(n) - h[None, :, :]
    try:
        f = np.linalg.solve(a, np.broadcast_to(v, (k, n))[..., None])[..., 0]
    except np.linalg.LinAlgError:
        f = np.empty((k, n), dtype=complex)
        for i in range(k):
            try:
                f[i] = np.linalg.solve(a[i], v)
            except np.linalg.LinAlgError:
                f[i] = np.nan
                ok[i] = False
    t[:] = 1.0 - 1j * (f @ v.conj())
    r[:] = -1j * (f @ v)
    return t, r, ok


def retarded_matrices(slope, amp, owner, atom_det, omega_a, delta, n_atoms):
    """``H - omega_a`` and ``V`` with phases evaluated at ``omega_a + delta``."""
    theta = (omega_a + delta) * slope
    kernel = np.outer(amp, amp) * np.exp(1j * np.abs(theta[:, None] - theta[None, :]))
    proj = np.zeros((n_atoms, slope.size))
    proj[owner, np.arange(slope.size)] = 1.0
    h = np.diag(atom_det).astype(complex) - 0.5j * (proj @ kernel @ proj.T)
    v = proj @ (amp / np.sqrt(2.0) * np.exp(1j * theta))
    return h, v


def solve_sweep_retarded(slope, amp, owner, atom_det, omega_a, deltas):
    """Scattering amplitudes with frequency-dependent propagation phases."""
    slope = np.asarray(slope, dtype=float)
    amp = np.asarray(amp, dtype=float)
    owner = np.asarray(owner, dtype=np.intp)
    atom_det = np.asarray(atom_det, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    n = atom_det.size
    t = np.empty(deltas.size, dtype=complex)
    r = np.empty(deltas.size, dtype=complex)
    ok = np.ones(deltas.size, dtype=bool)
    for k, d in enumerate(deltas):
        h, v = retarded_matrices(slope, amp, owner, atom_det, omega_a, d, n)
        try:
            f = np.linalg.solve(d * np.eye(n) - h, v)
        except np.linalg.LinAlgError:
            t[k] = r[k] = np.nan
            ok[k] = False
            continue
        t[k] = 1.0 - 1j * (v.conj() @ f)
        r[k] = -1j * (v @ f)
    return t, r, ok


def cascade_sweep(gamma_eff, lamb, atom_det, alpha, deltas):
    """Transfer-matrix cascade over a grid for separate atoms in spatial order.

    Builds ``M = [prod_i T_i T_phi_i] T_N`` with ``phi_i = alpha_{i+1} - alpha_i``
    and returns ``t = exp(i(alpha_1 - alpha_N)) / M11``,
    ``r = exp(2 i alpha_1) M21 / M11``.
    """
    gamma_eff = np.asarray(gamma_eff, dtype=float)
    lamb = np.asarray(lamb, dtype=float)
    atom_det = np.asarray(atom_det, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    n = gamma_eff.size
    m11 = np.ones(deltas.size, dtype=complex)
    m12 = np.zeros(deltas.size, dtype=complex)
    m21 = np.zeros(deltas.size, dtype=complex)
    m22 = np.ones(deltas.size, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            xi = gamma_eff[i] / (2.0 * (deltas - atom_det[i] - lamb[i]))
            a11, a12, a21, a22 = 1 + 1j * xi, 1j * xi, -1j * xi, 1 - 1j * xi
            if i < n - 1:
                ph = np.exp(-1j * (alpha[i + 1] - alpha[i]))
                a11, a21 = a11 * ph, a21 * ph
                a12, a22 = a12 / ph, a22 / ph
            m11, m12, m21, m22 = (
                m11 * a11 + m12 * a21,
                m11 * a12 + m12 * a22,
                m21 * a11 + m22 * a21,
                m21 * a12 + m22 * a22,
            )
        t = np.exp(1j * (alpha[0] - alpha[-1])) / m11
        r = np.exp(2j * alpha[0]) * m21 / m11
    ok = np.isfinite(t) & np.isfinite(r)
    return t, r, ok


def chebyshev_u(n, y):
    """Chebyshev polynomial of the second kind ``U_n(y)`` for ``n >= -1``."""
    y = np.asarray(y, dtype=float)
    if n < 0:
        return np.zeros_like(y)
    if n <= 64:
        prev = np.zeros_like(y)
        cur = np.ones_like(y)
        for _ in range(n):
            prev, cur = cur, 2.0 * y * cur - prev
        return cur
    out = np.empty_like(y)
    ay = np.abs(y)
    inside = ay < 1.0
    edge = ay == 1.0
    outside = ay > 1.0
    lam = np.arccos(y[inside])
    out[inside] = np.sin((n + 1) * lam) / np.sin(lam)
    out[edge] = np.sign(y[edge]) ** n * (n + 1)
    lam = np.arccosh(ay[outside])
    out[outside] = np.sign(y[outside]) ** n * np.sinh((n + 1) * lam) / np.sinh(lam)
    return out
