import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.signal import find_peaks

from giantwqed.engine import build_system_matrices, collective_modes, scatter, scatter_sweep
from giantwqed.model import characteristics, pair_characteristics
from giantwqed.ssh import (
    GapRegime,
    SshSpec,
    TopologyError,
    build_ssh_probe_array,
    edge_coupling,
    edge_state_model,
    gap_spectrum_approx,
    ssh_bands,
    ssh_hamiltonian,
)

PI = math.pi
ATS = SshSpec(16, 0.2 * PI, 0.3 * PI, 0.1 * PI)
EIT = SshSpec(16, PI / 6, PI / 3, 0.1 * PI)


def test_unprobed_chain_is_decoherence_free():
    a = build_ssh_probe_array(SshSpec(16, 0.2 * PI, 0.3 * PI, 0.0))
    ch = characteristics(a)
    assert np.max(np.abs(ch.collective_decay)) < 1e-12
    w = np.linalg.eigvals(build_system_matrices(a).detuned_hamiltonian)
    assert np.max(np.abs(w.imag)) < 1e-12


def test_probe_atom_width_and_lamb_shift():
    a = build_ssh_probe_array(ATS)
    ch = characteristics(a)
    assert ch.effective_decay[0] == pytest.approx(2 * (1 - math.cos(0.1 * PI)), abs=1e-14)
    assert ch.effective_decay[0] == pytest.approx(0.0979, abs=1e-4)
    assert ch.lamb_shift[0] == pytest.approx(math.sin(0.1 * PI), abs=1e-14)
    assert np.all(np.abs(ch.effective_decay[1:]) < 1e-12)


def test_effective_hamiltonian_is_probed_ssh():
    a = build_ssh_probe_array(ATS)
    h = build_system_matrices(a).detuned_hamiltonian
    ref = ssh_hamiltonian(ATS).astype(complex)
    ref[0, 0] -= 0.5j * ATS.probe_decay
    assert np.max(np.abs(h - ref)) < 1e-12


def test_couplings_match_pair_characteristics():
    j1, j2 = ATS.couplings
    assert (j1, j2) == pytest.approx((0.5878, 0.8090), abs=1e-4)
    a = build_ssh_probe_array(ATS)
    assert pair_characteristics(a, 0, 1)[0] == pytest.approx(j1, abs=1e-13)
    assert pair_characteristics(a, 1, 2)[0] == pytest.approx(j2, abs=1e-13)
    assert pair_characteristics(a, 2, 3)[0] == pytest.approx(j1, abs=1e-13)


def test_band_examples():
    b = ssh_bands(0.7, 0.7, PI, omega_a=2.0)
    assert b.upper == pytest.approx(2.0) and b.lower == pytest.approx(2.0)
    beta = 0.3
    j1, j2 = math.sin(PI / 4 - beta / 2), math.sin(PI / 4 + beta / 2)
    b = ssh_bands(j1, j2, 0.0)
    assert b.width == pytest.approx(2 * math.sqrt(2) * math.cos(beta / 2), abs=1e-14)
    assert b.gap == pytest.approx(2 * math.sqrt(2) * abs(math.sin(beta / 2)), abs=1e-14)
    with pytest.raises(ValueError):
        ssh_bands(1, 1, 4.0)


def test_full_model_band_edges():
    spec = SshSpec(16, 0.2 * PI, 0.3 * PI, 0.0)
    w = np.sort(np.linalg.eigvals(build_system_matrices(build_ssh_probe_array(spec)).detuned_hamiltonian).real)
    j1, j2 = spec.couplings
    assert w[-1] <= j1 + j2 + 1e-12
    assert w[-1] == pytest.approx(j1 + j2, rel=0.05)
    mid = w[np.abs(w) < abs(j2 - j1)]
    assert mid.size == 2
    split = mid.max() - mid.min()
    assert split == pytest.approx(2 * abs(edge_state_model(spec).J), rel=0.2)


@pytest.mark.parametrize("spec,J,GL,ratio,regime", [
    (ATS, -0.0297, 0.0462, 2.57, GapRegime.ATS),
    (EIT, -0.0071, 0.0653, 0.44, GapRegime.EIT),
])
def test_edge_model_values(spec, J, GL, ratio, regime):
    em = edge_state_model(spec)
    assert em.J == pytest.approx(J, abs=1e-4)
    assert em.Gamma_L == pytest.approx(GL, abs=1e-4)
    assert 4 * abs(em.J) / em.Gamma_L == pytest.approx(ratio, abs=0.01)
    assert em.regime is regime
    assert np.linalg.norm(em.psi_L) == pytest.approx(1.0)
    assert np.all(em.psi_L[1::2] == 0) and np.all(em.psi_R[0::2] == 0)


@given(st.floats(0.05, 0.95), st.floats(0.1, 2), st.integers(1, 20))
def test_edge_coupling_geometric_ratio(mu, j2, half):
    n = 2 * half
    assert abs(edge_coupling(mu, j2, n + 2) / edge_coupling(mu, j2, n)) == pytest.approx(mu, rel=1e-12)


def test_trivial_phase_raises():
    with pytest.raises(TopologyError):
        edge_state_model(SshSpec(16, 0.3 * PI, 0.2 * PI, 0.1 * PI))
    with pytest.raises(ValueError):
        edge_state_model(SshSpec(15, 0.2 * PI, 0.3 * PI, 0.1 * PI))


def test_narrow_gap_warns():
    with pytest.warns(RuntimeWarning, match="narrower"):
        edge_state_model(SshSpec(4, 0.24 * PI, 0.26 * PI, 0.1 * PI))


def test_next_nearest_braid_warns():
    with pytest.warns(RuntimeWarning, match="next-nearest"):
        build_ssh_probe_array(SshSpec(6, 0.4 * PI, 0.7 * PI, 0.1 * PI))


def test_invalid_specs():
    for kwargs in ({"n_atoms": 1}, {"phi1": 0.0}, {"phi2": PI}, {"epsilon": 0.9 * PI}, {"gamma": 0.0}):
        base = {"n_atoms": 8, "phi1": 0.2 * PI, "phi2": 0.3 * PI, "epsilon": 0.1 * PI}
        base.update(kwargs)
        with pytest.raises(ValueError):
            SshSpec(**base)


def test_gap_approx_transparency_and_resonances():
    g = gap_spectrum_approx(-0.03, 0.05, 0.1 * PI, 0.0)
    assert g.r == 0 and g.t == pytest.approx(1.0)
    near = gap_spectrum_approx(0.03, 1e-9, 0.0, 0.03)
    assert abs(near.t) < 1e-6
    with pytest.raises(ValueError):
        gap_spectrum_approx(0.03, 0.0, 0.0, 0.0)
    merged = gap_spectrum_approx(0.25, 1.0, 0.0, 0.0)
    assert merged.regime is GapRegime.EIT and math.isnan(merged.eta_plus.real)


@given(st.floats(-0.1, 0.1), st.floats(0.005, 0.1), st.floats(-0.1, 0.1))
def test_gap_approx_is_pole_expansion(J, GL, d):
    with np.errstate(all="ignore"):
        g = gap_spectrum_approx(J, GL, 0.2, d)
    if abs(g.z_plus - g.z_minus) < 1e-6 or min(abs(d - g.z_plus), abs(d - g.z_minus)) < 1e-6:
        return
    t = 1 + g.eta_plus / (d - g.z_plus) + g.eta_minus / (d - g.z_minus)
    r = g.eta_r_plus / (d - g.z_plus) + g.eta_r_minus / (d - g.z_minus)
    scale = 1 + abs(g.t)
    assert abs(t - g.t) < 1e-9 * scale
    assert abs(r - g.r) < 1e-9 * scale


def test_gap_approx_matches_full_model_ats():
    em = edge_state_model(ATS)
    a = build_ssh_probe_array(ATS)
    d = np.linspace(-2 * abs(em.J), 2 * abs(em.J), 201) + 1e-9
    _, r = scatter_sweep(a, d)
    approx = gap_spectrum_approx(em.J_projected, em.Gamma_L_projected, ATS.epsilon, d)
    assert np.max(np.abs(approx.r - r)) / np.max(np.abs(r)) < 0.05


def test_full_model_eit_transparency():
    a = build_ssh_probe_array(EIT)
    assert scatter(a, 0.0).R < 1e-6


def test_right_edge_state_is_dark():
    for spec in (ATS, EIT):
        em = edge_state_model(spec)
        v = build_system_matrices(build_ssh_probe_array(spec)).drive
        assert abs(np.vdot(v, em.psi_R)) ** 2 < 1e-10


def test_bulk_peaks_inside_bands():
    for spec in (ATS, EIT):
        a = build_ssh_probe_array(spec)
        d = np.linspace(-1.6, 1.6, 6401) + 1e-9
        _, r = scatter_sweep(a, d)
        R = np.abs(r) ** 2
        j1, j2 = spec.couplings
        peaks, _ = find_peaks(R)
        bulk = d[peaks][np.abs(d[peaks]) > abs(j2 - j1)]
        assert bulk.size > 0
        slack = spec.probe_decay
        assert np.all(np.abs(bulk) <= j1 + j2 + slack)
        assert np.all(np.abs(bulk) >= abs(j2 - j1) - slack)


def test_edge_modes_in_collective_spectrum():
    modes = collective_modes(build_ssh_probe_array(ATS))
    j1, j2 = ATS.couplings
    in_gap = [m for m in modes if abs(m.energy_detuning) < abs(j2 - j1) / 2]
    assert len(in_gap) == 2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        em = edge_state_model(ATS)
    split = abs(in_gap[0].energy_detuning - in_gap[1].energy_detuning)
    assert split == pytest.approx(2 * abs(em.J), rel=0.2)
