import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from giantwqed.model import (
    AtomArray,
    Configuration,
    CouplingPoint,
    GiantAtom,
    Regime,
    build_braided_array,
    build_explicit_array,
    build_nested_array,
    build_separate_array,
    characteristics,
    classify_configuration,
    pair_characteristics,
    phase_delay,
    single_atom_characteristics,
)
from giantwqed.transfer import max_symmetry_characteristics
from strategies import arrays

PI = math.pi


def test_small_atom_has_bare_decay_and_no_shift():
    a = build_separate_array(1, 1, 0.3, gamma=0.7)
    assert single_atom_characteristics(a, 0) == pytest.approx((0.0, 0.7), abs=1e-15)


def test_two_point_atom_formulas():
    # two equal points at phase distance phi: Delta_L = gamma sin phi, Gamma = 2 gamma (1 + cos phi)
    phi = 0.9
    a = build_explicit_array([{"points": [[0.0, 1.0], [phi, 1.0]]}])
    lamb, decay = single_atom_characteristics(a, 0)
    assert lamb == pytest.approx(math.sin(phi), abs=1e-14)
    assert decay == pytest.approx(2 * (1 + math.cos(phi)), abs=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
@pytest.mark.parametrize("theta", [0.3, PI / 4, 1.7, 2.9, 4.4])
def test_max_symmetry_closed_form_matches_sums(m, theta):
    a = build_separate_array(2, m, theta)
    assert single_atom_characteristics(a, 0) == pytest.approx(max_symmetry_characteristics(m, theta), abs=1e-12)


def test_max_symmetry_limit_at_multiple_of_two_pi():
    assert max_symmetry_characteristics(3, 2 * PI) == (0.0, 9.0)
    assert max_symmetry_characteristics(3, 0.0) == (0.0, 9.0)


def test_braided_effective_decay():
    theta = 0.4
    a = build_braided_array(3, theta)
    for i in range(3):
        assert single_atom_characteristics(a, i)[1] == pytest.approx(2 * (1 + math.cos(3 * theta)), abs=1e-13)


def test_decoherence_free_braided_pair():
    # own-point distance pi kills Gamma_eff and Delta_L; exchange sin(phi) with no collective decay
    phi = 0.3 * PI
    a = build_explicit_array([{"points": [[0.0, 1.0], [PI, 1.0]]}, {"points": [[PI - phi, 1.0], [2 * PI - phi, 1.0]]}])
    assert single_atom_characteristics(a, 0) == pytest.approx((0.0, 0.0), abs=1e-14)
    g, gc = pair_characteristics(a, 0, 1)
    assert g == pytest.approx(math.sin(phi), abs=1e-14)
    assert gc == pytest.approx(0.0, abs=1e-14)


def test_characteristics_matrices_consistent():
    a = build_braided_array(4, 0.7)
    ch = characteristics(a)
    for i in range(4):
        lamb, decay = single_atom_characteristics(a, i)
        assert ch.lamb_shift[i] == pytest.approx(lamb, abs=1e-13)
        assert ch.effective_decay[i] == pytest.approx(decay, abs=1e-13)
        for j in range(4):
            if i != j:
                assert (ch.exchange[i, j], ch.collective_decay[i, j]) == pytest.approx(
                    pair_characteristics(a, i, j), abs=1e-13)
    assert np.allclose(ch.exchange, ch.exchange.T)


def test_pair_errors():
    a = build_separate_array(2, 2, 0.5)
    with pytest.raises(ValueError):
        pair_characteristics(a, 1, 1)
    with pytest.raises(IndexError):
        single_atom_characteristics(a, 5)


def test_configuration_classification():
    assert classify_configuration(build_separate_array(3, 2, 0.5)) is Configuration.SEPARATE
    assert classify_configuration(build_braided_array(3, 0.5)) is Configuration.BRAIDED
    assert classify_configuration(build_nested_array(3, 0.5)) is Configuration.NESTED


def test_invalid_layouts_rejected():
    with pytest.raises(ValueError):
        CouplingPoint(0.0, -1.0)
    with pytest.raises(ValueError):
        GiantAtom(1.0, ())
    p = CouplingPoint(1.0, 1.0)
    with pytest.raises(ValueError):
        AtomArray((GiantAtom(1.0, (p,)), GiantAtom(1.0, (p,))))
    with pytest.raises(ValueError):
        AtomArray((GiantAtom(1.0, (p,)),), group_velocity=0.0)


def test_nonpositive_spacing_is_markov_equivalent():
    a0 = build_separate_array(3, 2, 0.0)
    a2 = build_separate_array(3, 2, 2 * PI)
    assert np.allclose(characteristics(a0).collective_decay, characteristics(a2).collective_decay)
    neg = build_separate_array(2, 2, -0.5)
    pos = build_separate_array(2, 2, 2 * PI - 0.5)
    assert np.allclose(characteristics(neg).exchange, characteristics(pos).exchange)


def test_phase_delay_and_regime_phases():
    p = CouplingPoint(2.0, 1.0)
    assert phase_delay(p, 3.0, 1.5) == pytest.approx(4.0)
    a = build_separate_array(1, 2, 1.0, regime="non-markovian")
    assert np.allclose(a.phases(0.5), 1.5 * a.phases(0.0))
    assert np.allclose(a.with_regime(Regime.MARKOVIAN).phases(0.5), a.phases(0.0))


def test_group_velocity_does_not_change_markovian_phases():
    a = build_separate_array(2, 3, 0.8, group_velocity=1.0)
    b = build_separate_array(2, 3, 0.8, group_velocity=7.0)
    assert np.allclose(a.phases(), b.phases())


@given(arrays())
def test_collective_decay_is_positive_semidefinite(a):
    ch = characteristics(a)
    assert np.all(ch.effective_decay >= 0)
    assert np.linalg.eigvalsh(ch.collective_decay).min() > -1e-9 * a.rate_scale * a.n_points


@given(arrays(), st.floats(-50, 50))
def test_translation_invariance_of_characteristics(a, shift):
    moved = AtomArray(
        tuple(GiantAtom(at.frequency, tuple(CouplingPoint(p.position + shift + 100, p.bare_decay)
                                             for p in at.points)) for at in a.atoms))
    c1, c2 = characteristics(a), characteristics(moved)
    assert np.allclose(c1.exchange, c2.exchange, atol=1e-9)
    assert np.allclose(c1.collective_decay, c2.collective_decay, atol=1e-9)
