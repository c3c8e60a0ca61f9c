import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from invlab.core.errors import GridTooSmallError, InvalidInputError
from invlab.services.distributions import (
    Atom,
    GaussianTest,
    GriddedDensity,
    PointMassDistribution,
    check_sobolev_lemma,
    convolve,
    convolve_density,
    finite_difference,
    hull_vertices,
    minkowski_sum_hull,
    reflect,
    same_vertex_set,
    sobolev_norm,
    support_hull,
)

coords = st.integers(min_value=-4, max_value=4).map(lambda k: k / 4)
coeffs = st.integers(min_value=1, max_value=5).map(float)
orders = st.integers(min_value=0, max_value=2)


@st.composite
def point_masses(draw, dimension=2):
    atoms = draw(st.lists(
        st.tuples(coeffs, st.tuples(*[orders] * dimension), st.tuples(*[coords] * dimension)),
        min_size=1, max_size=3,
    ))
    out = PointMassDistribution.delta(atoms[0][2], atoms[0][0], atoms[0][1])
    for c, alpha, p in atoms[1:]:
        out = out + PointMassDistribution.delta(p, c, alpha)
    return out


PROBE = np.random.default_rng(7).uniform(-2, 2, (16, 2)) + 0.3j


def _values(S):
    return S.fourier_transform()(PROBE)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(point_masses(), point_masses())
def test_convolution_commutes(S, T):
    assert_allclose(_values(convolve(S, T)), _values(convolve(T, S)), rtol=1e-12, atol=1e-12)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(point_masses(), point_masses(), point_masses())
def test_convolution_associates(S, T, U):
    left = _values(convolve(convolve(S, T), U))
    right = _values(convolve(S, convolve(T, U)))
    assert_allclose(left, right, rtol=1e-10, atol=1e-10)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(point_masses())
def test_reflect_is_an_involution(S):
    assert reflect(reflect(S)) == S


def test_convolution_multiplies_transforms(rng):
    S = PointMassDistribution.delta((0.5, 0.0), 2.0, (1, 0)) + PointMassDistribution.delta((0.0, -1.0))
    T = PointMassDistribution.laplacian_delta(2) + PointMassDistribution.delta((1.0, 1.0), 0.5)
    zeta = rng.standard_normal((10, 2)) + 1j * rng.standard_normal((10, 2))
    product = S.fourier_transform()(zeta) * T.fourier_transform()(zeta)
    assert_allclose(convolve(S, T).fourier_transform()(zeta), product, rtol=1e-12)


def test_delta_is_the_unit():
    S = PointMassDistribution.delta((0.25, -0.75), 3.0, (2, 1))
    assert convolve(S, PointMassDistribution.delta((0.0, 0.0))) == S


def test_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        convolve(PointMassDistribution.delta((0.0,)), PointMassDistribution.delta((0.0, 0.0)))


def test_reflect_negates_points_and_odd_orders():
    S = PointMassDistribution.delta((1.0,), 2.0, (1,))
    (atom,) = reflect(S).atoms
    assert atom.point == (-1.0,)
    assert atom.coeff == -2.0


def test_pairing_with_gaussian_derivative():
    phi = GaussianTest((0.0,), 1.0)
    S = PointMassDistribution.delta((0.0,), deriv=(2,))
    # phi''(0) = -1 for a unit Gaussian
    assert S.pair(phi) == pytest.approx(-1.0)


def test_support_of_unit_square():
    S = PointMassDistribution.delta((0.0, 0.0)) + PointMassDistribution.delta((1.0, 0.0))
    T = PointMassDistribution.delta((0.0, 0.0)) + PointMassDistribution.delta((0.0, 1.0))
    square = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    assert same_vertex_set(support_hull(convolve(S, T)), square)
    assert same_vertex_set(minkowski_sum_hull(support_hull(S), support_hull(T)), square)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(point_masses(), point_masses())
def test_support_of_convolution_is_minkowski_sum(S, T):
    # positive coefficients on pure deltas cannot cancel
    S = PointMassDistribution(2, tuple(Atom(a.coeff, (0, 0), a.point) for a in S.atoms))
    T = PointMassDistribution(2, tuple(Atom(a.coeff, (0, 0), a.point) for a in T.atoms))
    expected = minkowski_sum_hull(support_hull(S), support_hull(T))
    assert same_vertex_set(support_hull(convolve(S, T)), expected)


def test_hull_of_collinear_points_keeps_endpoints():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert same_vertex_set(hull_vertices(pts), np.array([[0.0, 0.0], [2.0, 2.0]]))


def test_support_of_zero_distribution():
    with pytest.raises(InvalidInputError):
        support_hull(PointMassDistribution(2))


def _bump(center=0.0, width=0.3):
    return GriddedDensity.from_function(
        lambda x: np.exp(-((x[:, 0] - center) ** 2) / (2 * width ** 2)), (-4.0,), (4.0,), 128
    )


def test_grid_rejects_sizes_that_are_not_powers_of_two():
    with pytest.raises(InvalidInputError):
        GriddedDensity((0.0,), (1.0,), np.zeros(100))


def test_grid_requires_compact_samples():
    with pytest.raises(GridTooSmallError):
        GriddedDensity.from_function(lambda x: np.ones(len(x)), (-1.0,), (1.0,), 16)


def test_integral_of_gaussian():
    assert _bump().integral() == pytest.approx(0.3 * np.sqrt(2 * np.pi), rel=1e-10)


def test_convolving_with_delta_shifts():
    f = _bump()
    shifted = convolve_density(f, PointMassDistribution.delta((1.0,)))
    assert_allclose(shifted.samples, _bump(center=1.0).samples, atol=1e-12)


def test_fractional_shift_matches_transform_phase():
    f = _bump()
    shifted = convolve_density(f, PointMassDistribution.delta((0.53,)))
    (xi,), base = f.fourier_transform()
    _, moved = shifted.fourier_transform()
    assert_allclose(moved, base * np.exp(-0.53j * xi), atol=1e-10)


def test_derivative_atom_gives_minus_derivative():
    f = _bump()
    x = f.axes()[0]
    exact = x / 0.09 * np.exp(-x ** 2 / 0.18)
    out = convolve_density(f, PointMassDistribution.delta((0.0,), deriv=(1,)))
    assert_allclose(out.samples.real, exact, atol=5e-3)


def test_density_convolution_against_transform_product():
    f = _bump()
    T = PointMassDistribution.delta((0.5,), 2.0) + PointMassDistribution.delta((-0.25,), deriv=(2,))
    (xi,), base = f.fourier_transform()
    _, out = convolve_density(f, T).fourier_transform()
    low = np.abs(xi) < 4
    expected = base * T.fourier_transform()(xi[:, None])
    assert_allclose(out[low], expected[low], atol=5e-3)


def test_shift_off_the_grid_reports_needed_box():
    with pytest.raises(GridTooSmallError) as info:
        convolve_density(_bump(), PointMassDistribution.delta((3.0,)))
    assert info.value.needed_upper[0] > 4.0


def test_finite_difference_of_quadratic_is_exact_inside():
    x = (np.arange(64) + 0.5) / 8
    d2 = finite_difference(x ** 2, (2,), (1 / 8,))
    assert_allclose(d2[4:-4].real, 2.0, atol=1e-9)


def test_sobolev_norm_zero_matches_parseval():
    f = _bump()
    expected = np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.spacing[0])
    assert sobolev_norm(f, 0).value == pytest.approx(expected, rel=1e-10)


def test_sobolev_norm_increases_with_index():
    f = _bump()
    assert sobolev_norm(f, 1).value > sobolev_norm(f, 0).value


def test_sobolev_lemma_holds_for_gaussian_2d():
    u = GriddedDensity.from_function(
        lambda x: np.exp(-np.sum(x ** 2, axis=1) / 0.5), (-4.0, -4.0), (4.0, 4.0), 64
    )
    checks = check_sobolev_lemma(u, 2)
    assert [c.k for c in checks] == [0, 1, 2]
    assert all(c.passed for c in checks)


def test_gaussian_test_transform():
    phi = GaussianTest((0.5,), 0.7)
    xi = np.array([[0.0], [1.3]])
    expected = 0.7 * np.sqrt(2 * np.pi) * np.exp(-0.5 * 0.49 * xi[:, 0] ** 2 - 0.5j * xi[:, 0])
    assert_allclose(phi.fourier_transform(xi), expected)


def test_translate_moves_atoms_and_keeps_derivatives():
    S = PointMassDistribution.delta((0.5,), 2.0, (1,))
    (atom,) = S.translate((1.0,)).atoms
    assert_allclose(atom.point, [1.5])
    assert atom.deriv == (1,)
    assert atom.coeff == pytest.approx(2.0)
