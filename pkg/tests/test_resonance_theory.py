"""Closed-form spectra: catalogue vs the fixed-point engine, enumeration, traces."""

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torspec.fixed_points import all_fixed_point_data
from torspec.map_algebra import orientation, parse_word, psi_word
from torspec.resonance_theory import (
    EigenvalueEntry,
    SpectrumModel,
    _count_quadrant,
    closed_form_multipliers_psi,
    closed_trace,
    counting_function,
    decay_classification,
    embedding_eta_formula,
    embedding_gaps,
    embedding_singular_values,
    enumerate_eigenvalues,
    fit_stretched_rate,
    leading_moduli,
    psi_cases,
    spectral_determinant,
    spectrum_model_from_word,
    spectrum_model_psi,
)

SIGMAS = ((-1, -1), (1, 1), (-1, 1), (1, -1))

# the four parity regimes of the twisted-shear family
PROBES = [
    ((2, 1), (0.4 + 0.2j, -0.3 + 0.2j), 0),
    ((1, 2, 1), (0.4 + 0.2j, -0.3 + 0.2j, 0.25j), 0),
    ((2, 1), (0.4 + 0.2j, -0.3 + 0.2j), 1),
    ((1, 2, 1), (0.4 + 0.2j, -0.3 + 0.2j, 0.25j), 1),
]


def _as_multiset(pair):
    return sorted(pair, key=lambda v: (round(v.real, 9), round(v.imag, 9)))


@pytest.mark.parametrize("ks,params,s", PROBES)
def test_catalogue_matches_fixed_point_engine(ks, params, s):
    word = psi_word(ks, params, s)
    data = all_fixed_point_data(word)
    predicted = closed_form_multipliers_psi(ks, params, s)
    fwd, bwd = psi_cases(len(ks), s)
    assert data.cases.forward.case == fwd
    assert data.cases.backward.case == bwd
    for sigma in SIGMAS:
        got = _as_multiset(data.record(sigma).multipliers)
        want = _as_multiset(predicted[sigma])
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-10


@pytest.mark.parametrize("ks,params,s", PROBES)
def test_model_from_word_agrees_with_closed_form(ks, params, s):
    closed = spectrum_model_psi(ks, params, s)
    numeric = spectrum_model_from_word(psi_word(ks, params, s))
    assert numeric.forward_case == closed.forward_case
    assert numeric.backward_case == closed.backward_case
    assert numeric.omega == closed.omega == (-1) ** len(ks)
    for a, b in zip(
        _as_multiset(numeric.same_sign_multipliers),
        _as_multiset(closed.same_sign_multipliers),
    ):
        assert abs(a - b) < 1e-10
    for a, b in zip(
        _as_multiset(numeric.mixed_multipliers),
        _as_multiset(closed.mixed_multipliers),
    ):
        assert abs(a - b) < 1e-10


def test_catalogue_validation():
    with pytest.raises(ValueError):
        closed_form_multipliers_psi((1,), (0.5,), 2)
    with pytest.raises(ValueError):
        closed_form_multipliers_psi((1, 1), (0.5,), 0)
    with pytest.raises(ValueError):
        SpectrumModel(1, "EP", "EP", (1.2, 0.3), (0.1, 0.1))
    with pytest.raises(ValueError):
        SpectrumModel(2, "EP", "EP", (0.2, 0.3), (0.1, 0.1))
    with pytest.raises(ValueError):
        SpectrumModel(1, "XX", "EP", (0.2, 0.3), (0.1, 0.1))


def test_enumeration_head_two_block():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 0)
    got = enumerate_eigenvalues(model, 0.2)
    assert got == (
        EigenvalueEntry(1.0 + 0j, 1),
        EigenvalueEntry(0.5 + 0j, 2),
        EigenvalueEntry(0.3 + 0j, 2),
        EigenvalueEntry(0.25 + 0j, 2),
    )


def test_enumeration_orientation_sign():
    model = SpectrumModel(-1, "EP", "EP", (0.5, 0.3), (0.5, 0.5))
    values = {e.value: e.multiplicity for e in enumerate_eigenvalues(model, 0.2)}
    # inverse-branch head value omega * mu1 * mu2 carries the sign
    assert values[-0.25 + 0j] == 2


def test_enumeration_reflecting_pairs():
    model = SpectrumModel(1, "ER", "ER", (0.25, 0.09), (0.0, 0.0))
    got = enumerate_eigenvalues(model, 0.4)
    assert got == (
        EigenvalueEntry(1.0 + 0j, 1),
        EigenvalueEntry(0.5 + 0j, 1),
        EigenvalueEntry(-0.5 + 0j, 1),
    )


def test_enumeration_monomial_word_is_trivial():
    cat = parse_word("F . F . R")
    model = spectrum_model_from_word(cat)
    assert enumerate_eigenvalues(model, 1e-10) == (EigenvalueEntry(1.0 + 0j, 1),)
    assert decay_classification(model) == (0, None)


@settings(max_examples=60, deadline=None)
@given(
    p=st.floats(0.05, 0.7),
    q=st.floats(0.05, 0.7),
    g1=st.floats(0.0, 0.7),
    g2=st.floats(0.05, 0.7),
    ph=st.floats(0.0, 6.28),
    fwd=st.sampled_from(["EP", "ER"]),
    bwd=st.sampled_from(["EP", "ER"]),
    omega=st.sampled_from([1, -1]),
    r=st.floats(0.02, 0.5),
)
def test_counting_matches_enumeration(p, q, g1, g2, ph, fwd, bwd, omega, r):
    lam = (p * cmath.exp(1j * ph), complex(q))
    model = SpectrumModel(omega, fwd, bwd, lam, (complex(g1), g2 * cmath.exp(2j * ph)))
    total = sum(e.multiplicity for e in enumerate_eigenvalues(model, r))
    assert total == counting_function(model, r)


def test_count_quadrant_pinned():
    assert _count_quadrant(0.5, 0.5, 2 ** -5) == 20
    # exact threshold ties stay inside
    assert _count_quadrant(0.5, 0.5, 0.5 ** 3) == 9
    assert _count_quadrant(0.5, 0.3, 1.5) == 0
    assert _count_quadrant(0.0, 0.5, 0.25) == 2
    assert _count_quadrant(0.0, 0.0, 0.5) == 0
    with pytest.raises(ValueError):
        _count_quadrant(1.0, 0.5, 0.1)


def test_counting_pinned_two_block():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 0)
    assert counting_function(model, 1e-12) == 1831
    entries = enumerate_eigenvalues(model, 1e-12)
    assert sum(e.multiplicity for e in entries) == 1831


@pytest.mark.parametrize("ks,params,s", PROBES)
def test_trace_formula_matches_enumeration(ks, params, s):
    model = spectrum_model_psi(ks, params, s)
    entries = enumerate_eigenvalues(model, 1e-10)
    for k in range(1, 6):
        brute = sum(e.multiplicity * e.value ** k for e in entries)
        assert abs(closed_trace(model, k) - brute) < 1e-7


def test_trace_monomial_word_is_one():
    model = spectrum_model_from_word(parse_word("F . F . R"))
    for k in range(1, 8):
        assert closed_trace(model, k) == 1.0


def test_reflecting_traces_odd_orders():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 1)
    assert closed_trace(model, 1) == 1.0
    assert closed_trace(model, 3) == 1.0
    assert abs(closed_trace(model, 2).imag) < 1e-15


def test_determinant_monomial_word_exact():
    model = spectrum_model_from_word(parse_word("F . F . R"))
    z = 0.7 - 0.4j
    value, err = spectral_determinant(model, z)
    assert value == 1.0 - z
    assert err == 0.0


def test_determinant_tail_estimate():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 0)
    z = 0.3 + 0.2j
    coarse, err_c = spectral_determinant(model, z, cutoff=1e-2)
    fine, err_f = spectral_determinant(model, z, cutoff=1e-10)
    assert abs(coarse - fine) <= err_c
    assert err_f < 1e-8


def test_decay_rate_two_block():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 0)
    d, eta = decay_classification(model)
    assert d == 2
    # all four families share moduli (1/2, 3/10): rate simplifies analytically
    assert abs(eta - math.sqrt(math.log(2.0) * math.log(10.0 / 3.0) / 2.0)) < 1e-13


def test_decay_single_axis():
    model = SpectrumModel(1, "EP", "EP", (0.5, 0.0), (0.0, 0.0))
    d, eta = decay_classification(model)
    assert d == 1
    assert abs(eta - math.log(2.0) / 2.0) < 1e-13


def test_decay_one_planar_family_pair():
    model = SpectrumModel(1, "EP", "EP", (0.5, 0.3), (0.2, 0.0))
    d, eta = decay_classification(model)
    assert d == 2
    assert abs(eta - math.sqrt(math.log(2.0) * math.log(10.0 / 3.0))) < 1e-13


def test_rank_fit_recovers_decay_rate():
    model = spectrum_model_psi((1, 1), (0.5, 0.3), 0)
    _, eta = decay_classification(model)
    fitted, _ = fit_stretched_rate(leading_moduli(model, 2000), 100, 2000)
    assert abs(fitted - eta) / eta < 0.03


def test_embedding_formula_and_ball():
    alpha, gamma = (0.1, 0.1), (0.3, 0.3)
    alpha_out, gamma_out = (0.3, 0.3), (0.1, 0.1)
    same, mixed = embedding_gaps(alpha, gamma, alpha_out, gamma_out)
    assert same == pytest.approx((0.2, 0.2)) and mixed == pytest.approx((0.2, 0.2))
    eta = embedding_eta_formula(alpha, gamma, alpha_out, gamma_out)
    assert abs(eta - 1.0 / math.sqrt(50.0)) < 1e-15
    sv = embedding_singular_values(alpha, gamma, alpha_out, gamma_out, 60)
    assert len(sv) == 2 * 60 * 60 + 2 * 60 + 1
    assert sv[0] == 1.0
    fitted, _ = fit_stretched_rate(sv, 100, 7000)
    assert abs(fitted - eta) / eta < 0.02


def test_embedding_gap_validation():
    with pytest.raises(ValueError):
        embedding_gaps((0.1, 0.1), (0.3, 0.3), (0.1, 0.3), (0.1, 0.1))
    with pytest.raises(ValueError):
        embedding_gaps((0.1, 0.1), (0.3, 0.3), (0.3, 0.3), (0.3, 0.1))


def test_orientation_matches_block_parity():
    for ks, params, s in PROBES:
        word = psi_word(ks, params, s)
        assert orientation(word) == (-1) ** len(ks)
