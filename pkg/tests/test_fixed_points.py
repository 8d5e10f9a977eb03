"""Sector fixed points, chart engine, multipliers, conjugate pairing."""

import cmath

import numpy as np
import pytest

from torspec.fixed_points import (
    FixedPointError,
    all_fixed_point_data,
    sector_fixed_point,
    verify_conjugate_pairs,
)
from torspec.map_algebra import (
    INF,
    complex_jacobian,
    parse_word,
    psi_word,
    xi_word,
)

CAT3 = parse_word("F . F . R")


def mults_set(record):
    return sorted(record.multipliers, key=lambda z: (abs(z), z.real, z.imag))


def test_cat_sector_points_are_corners():
    data = all_fixed_point_data(CAT3)
    by_sigma = {rec.sigma: rec for rec in data.records}
    assert by_sigma[(-1, -1)].point == (0j, 0j)
    assert by_sigma[(1, 1)].point[0] is INF and by_sigma[(1, 1)].point[1] is INF
    assert by_sigma[(-1, 1)].point[0] == 0 and by_sigma[(-1, 1)].point[1] is INF
    assert by_sigma[(1, -1)].point[0] is INF and by_sigma[(1, -1)].point[1] == 0
    for rec in data.records:
        # monomial words are superattracting at the corners
        assert rec.multipliers == (0j, 0j)
        assert rec.residual < 1e-12
    assert data.cases.forward.case == "EP"
    assert data.cases.backward.case == "ER"


def test_cat_conjugate_pairs_need_ep():
    data = all_fixed_point_data(CAT3)
    with pytest.raises(ValueError):
        verify_conjugate_pairs(data)  # backward direction is reflecting


def test_psi_multipliers_match_direct_jacobian():
    word = psi_word((1, 1), (0.5, 0.3))
    data = all_fixed_point_data(word)
    origin = data.record((-1, -1))
    assert origin.point == (0j, 0j)
    direct = sorted(
        np.linalg.eigvals(complex_jacobian(word, (0.0, 0.0))),
        key=lambda z: (abs(z), z.real, z.imag),
    )
    engine = mults_set(origin)
    assert np.allclose(engine, direct, atol=1e-12)
    assert engine == pytest.approx([0.3, 0.5], abs=1e-12)


def test_psi_all_sectors_share_moduli():
    data = all_fixed_point_data(psi_word((1, 1), (0.5, 0.3)))
    for rec in data.records:
        assert rec.residual < 1e-12
        assert mults_set(rec) == pytest.approx([0.3, 0.5], abs=1e-10)
    # the mixed fixed point of this family sits at (0, inf)
    mixed = data.record((-1, 1))
    assert mixed.point[0] == 0 and mixed.point[1] is INF


def test_psi_conjugate_pairs():
    data = all_fixed_point_data(psi_word((2, 1), (0.4 + 0.2j, -0.3)))
    deviation = verify_conjugate_pairs(data, tol=1e-10)
    assert deviation < 1e-10


def test_psi_complex_parameters_at_origin():
    a1, a2 = 0.4 + 0.2j, -0.3 + 0j
    word = psi_word((2, 1), (a1, a2))
    rec = sector_fixed_point(word, (-1, -1), all_fixed_point_data(word).cases)
    expected = sorted([a1 ** 2, a2], key=lambda z: (abs(z), z.real, z.imag))
    assert np.allclose(mults_set(rec), expected, atol=1e-12)


def test_psi_with_antipode_squares():
    # reflecting case: stored multipliers belong to the squared map
    data = all_fixed_point_data(psi_word((1, 1), (0.5, 0.3), s=1))
    assert data.cases.forward.case == "ER"
    assert data.cases.backward.case == "ER"
    for rec in data.records:
        assert mults_set(rec) == pytest.approx([0.09, 0.25], abs=1e-10)
    with pytest.raises(ValueError):
        verify_conjugate_pairs(data)


def test_xi_orbits_through_infinity():
    data = all_fixed_point_data(xi_word((2, 2), 0.5))
    for rec in data.records:
        assert rec.residual < 1e-12
    origin = data.record((-1, -1))
    assert origin.point == (0j, 0j)
    assert origin.multipliers == (0j, 0j)
    if data.cases.forward.case == "EP" and data.cases.backward.case == "EP":
        assert verify_conjugate_pairs(data, tol=1e-10) < 1e-10


def test_sector_validation():
    word = psi_word((1, 1), (0.5, 0.3))
    data = all_fixed_point_data(word)
    with pytest.raises(ValueError):
        sector_fixed_point(word, (0, 1), data.cases)
    with pytest.raises(KeyError):
        data.record((2, 2))
