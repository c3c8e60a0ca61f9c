import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from invlab.core.errors import InvalidInputError
from invlab.services.group_invariance import named_group, sign_group
from invlab.services.slow_decrease import ViolationSequence, constant_symbol
from invlab.services.witness_family import (
    WitnessFamily,
    anchor_family,
    boundedness_dichotomy,
    eval_H,
    eval_h,
    k_index,
    log_abs_h,
    verify_family_properties,
)


@pytest.mark.parametrize("j", [1, 2, 5])
def test_h_at_zero_and_at_lattice_zeros(j):
    assert eval_h(j, np.array([0.0]))[0] == pytest.approx(1.0)
    assert abs(eval_h(j, np.array([float(j)]))[0]) < 1e-20
    assert log_abs_h(j, np.array([2.0 * j]))[0] < -60


def test_h_is_small_beyond_j():
    x = np.linspace(3.0, 40.0, 500)
    assert np.all(eval_h(3, x) <= np.pi ** -6 * (1 + 1e-12))


def test_h_matches_closed_form_off_axis():
    z = np.array([0.3 + 0.4j, -1.2 + 0.1j])
    w = np.pi * z / 2
    assert_allclose(eval_h(2, z), (np.sin(w) / w) ** 4, rtol=1e-12)


def test_H_is_a_product():
    zeta = np.array([[0.5, -1.5]])
    assert_allclose(eval_H(2, zeta), eval_h(2, np.array([0.5])) * eval_h(2, np.array([-1.5])))


def test_h_rejects_bad_index():
    with pytest.raises(InvalidInputError):
        eval_h(0, np.array([1.0]))


def test_k_index():
    assert k_index(1, 0.0) == 1
    assert k_index(3, 100.0) == math.floor(6 * math.log(102.0))


def test_family_properties_on_the_line():
    report = verify_family_properties(range(1, 4), dimension=1)
    assert report.passed, report.failures
    assert {row["property"] for row in report.rows()} >= {"h_j(0) = 1", "F_j is W-invariant"}


def test_family_properties_with_sign_group():
    report = verify_family_properties([1, 2], W=sign_group(2))
    assert report.passed, report.failures


def test_anchor_family_is_invariant():
    W = named_group("G2", 2)
    family = anchor_family(W, 2)
    sample_pts = np.random.default_rng(1).uniform(-5, 5, (10, 2))
    base = family.eval_F(2, sample_pts)
    for sigma in W:
        assert_allclose(family.eval_F(2, sample_pts @ sigma.T), base, rtol=1e-10, atol=1e-12)


def test_family_from_super_decaying_symbol(super_decaying, line_group, search):
    family = WitnessFamily.from_symbol(super_decaying, line_group, 3, search=search)
    assert family.j_max == 3
    rows = family.rows()
    assert [row["j"] for row in rows] == [1, 2, 3]
    assert all(row["pass"] for row in rows)
    assert family.center_value(3) > family.center_value(1)


def test_family_needs_a_violation_sequence(line_group, search):
    with pytest.raises(InvalidInputError):
        WitnessFamily.from_symbol(constant_symbol(), line_group, 2, radius_schedule=[1, 10], search=search)


def test_family_index_range(line_group):
    family = anchor_family(line_group, 2)
    with pytest.raises(InvalidInputError):
        family.xi(3)


def test_boundedness_dichotomy(super_decaying, line_group, search):
    family = WitnessFamily.from_symbol(super_decaying, line_group, 3, search=search)
    grid = np.linspace(-400.0, 400.0, 8001)[:, None]
    report = boundedness_dichotomy(super_decaying, family, grid, search)
    assert report.bounded_image
    assert report.unbounded_preimage
    assert report.passed


def test_term_peaks_at_rotated_anchor():
    W = named_group("A2", 2)
    seq = ViolationSequence(points=[(3.0, 0.0)], certified_radius=[0.0], certified_bound=[0.0], sampled_max=[0.0])
    family = WitnessFamily(W, seq)
    assert family.k(1) == 3
    for sigma in W:
        value = family.eval_F_sigma(1, sigma, (sigma @ np.array([3.0, 0.0]))[None])[0]
        assert value.real == pytest.approx(math.exp(3))
        assert value.real >= 25 / math.e
