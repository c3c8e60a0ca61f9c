import numpy as np
import pytest
from numpy.testing import assert_allclose

from invlab.core.errors import GroupOrderExceededError, InvalidInputError, NonOrthogonalGeneratorError
from invlab.services.distributions import GriddedDensity, PointMassDistribution
from invlab.services.group_invariance import (
    generate,
    generic_point,
    is_invariant,
    named_group,
    orbit,
    rotation,
    sign_group,
    stabilizer,
    symmetrize,
    trivial_group,
)

ORDERS = {"signs": 4, "A2": 6, "B2": 8, "G2": 12}


def test_named_group_orders(rank_two_group):
    assert rank_two_group.order == ORDERS[rank_two_group.name]
    assert_allclose(rank_two_group.elements[0], np.eye(2))


def test_elements_are_orthogonal(rank_two_group):
    for sigma in rank_two_group:
        assert_allclose(sigma.T @ sigma, np.eye(2), atol=1e-12)


def test_orbit_stabilizer(rank_two_group):
    for x in ([0.3, 0.7], [1.0, 0.0], [0.0, 0.0]):
        size = len(orbit(rank_two_group, x))
        assert size * stabilizer(rank_two_group, x).order == rank_two_group.order


def test_generic_point_has_full_orbit(rank_two_group):
    x = generic_point(rank_two_group, scale=2.0)
    assert np.linalg.norm(x) == pytest.approx(2.0)
    assert len(orbit(rank_two_group, x)) == rank_two_group.order


def test_symmetrized_distribution_is_invariant(rank_two_group):
    S = PointMassDistribution.delta((0.7, 0.2), 1.5, (1, 0)) + PointMassDistribution.delta((0.0, 1.0))
    sym = symmetrize(S, rank_two_group)
    assert is_invariant(sym, rank_two_group, tol=1e-9)
    again = symmetrize(sym, rank_two_group)
    sample_pts = np.random.default_rng(3).uniform(-2, 2, (20, 2))
    assert_allclose(again.fourier_transform()(sample_pts), sym.fourier_transform()(sample_pts), atol=1e-9)


def test_symmetrize_averages_transform(rank_two_group):
    S = PointMassDistribution.delta((0.4, -0.1), deriv=(0, 1))
    F = S.fourier_transform()
    zeta = np.random.default_rng(5).standard_normal((8, 2)) + 0.2j
    expected = sum(F(zeta @ sigma.T) for sigma in rank_two_group) / rank_two_group.order
    assert_allclose(symmetrize(F, rank_two_group)(zeta), expected)
    assert_allclose(symmetrize(S, rank_two_group).fourier_transform()(zeta), expected, atol=1e-12)


def test_delta_at_origin_is_invariant(rank_two_group, delta0_2d):
    assert is_invariant(delta0_2d, rank_two_group)
    (atom,) = symmetrize(delta0_2d, rank_two_group).atoms
    assert atom.coeff == pytest.approx(1.0)


def test_laplacian_is_rotation_invariant():
    assert is_invariant(PointMassDistribution.laplacian_delta(2), named_group("G2", 2), tol=1e-12)


def test_shifted_delta_is_not_invariant():
    assert not is_invariant(PointMassDistribution.delta((1.0, 0.0)), sign_group(2))


def test_symmetrized_density_under_sign_flips():
    f = GriddedDensity.from_function(
        lambda x: np.exp(-((x[:, 0] - 1.0) ** 2 + x[:, 1] ** 2) / 0.3), (-4.0, -4.0), (4.0, 4.0), 32
    )
    sym = symmetrize(f, sign_group(2)).samples
    assert_allclose(sym, sym[::-1, :], atol=1e-10)
    assert_allclose(sym, sym[:, ::-1], atol=1e-10)


def test_symmetrized_callable_is_invariant():
    W = named_group("B2", 2)
    F = PointMassDistribution.delta((0.5, 0.25)).fourier_transform()
    sample_pts = np.random.default_rng(9).uniform(-3, 3, (12, 2))
    assert is_invariant(symmetrize(F, W), W, points=sample_pts)
    with pytest.raises(InvalidInputError):
        is_invariant(F, W)


def test_trivial_group_acts_as_identity():
    W = trivial_group(1)
    S = PointMassDistribution.delta((0.5,), deriv=(3,))
    assert symmetrize(S, W) == S
    assert_allclose(generic_point(W), generic_point(W))


def test_non_orthogonal_generator():
    with pytest.raises(NonOrthogonalGeneratorError):
        generate([np.array([[1.0, 1.0], [0.0, 1.0]])])


def test_order_cap():
    with pytest.raises(GroupOrderExceededError):
        generate([rotation(2 * np.pi / 7)], cap=5)


def test_unknown_group_name():
    with pytest.raises(InvalidInputError):
        named_group("E8", 2)
    with pytest.raises(InvalidInputError):
        named_group("G2", 3)


def test_nearly_orthogonal_reflection_is_rejected():
    oblique = np.array([[1.0, 2e-11], [0.0, -1.0]])
    assert_allclose(oblique @ oblique, np.eye(2), atol=0.0)
    with pytest.raises(NonOrthogonalGeneratorError):
        generate([oblique])


@pytest.mark.parametrize("name", ["signs", "A2", "B2", "G2", "dihedral:5"])
def test_named_groups_are_orthogonal_to_roundoff(name):
    W = named_group(name, 2)
    defects = np.linalg.norm(np.einsum("gji,gjk->gik", W.elements, W.elements) - np.eye(2), axis=(1, 2))
    assert defects.max() <= 1e-12
