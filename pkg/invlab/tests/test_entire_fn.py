import numpy as np
import pytest
from numpy.testing import assert_allclose

from invlab.core.errors import InvalidInputError
from invlab.services.distributions import PointMassDistribution
from invlab.services.entire_fn import (
    ExponentialPolynomial,
    SampleSpec,
    fit_paley_wiener,
    monomial,
    poly_eval,
    poly_mul,
)


def test_transform_of_delta_at_origin_is_one():
    F = PointMassDistribution.delta((0.0, 0.0)).fourier_transform()
    zeta = np.array([[1.0 + 2j, -3.0], [0.0, 7j]])
    assert_allclose(F(zeta), [1.0, 1.0])


def test_transform_of_shifted_delta():
    F = PointMassDistribution.delta((1.0, 0.0)).fourier_transform()
    assert F.eval([np.pi, 0.0]) == pytest.approx(-1.0 + 0j, abs=1e-15)


def test_transform_of_laplacian_delta():
    F = PointMassDistribution.laplacian_delta(2).fourier_transform()
    assert F.eval([1.0, 1.0]) == pytest.approx(-2.0)
    xi = np.array([[0.3, -1.7], [2.0, 0.5]])
    assert_allclose(F(xi), -np.sum(xi ** 2, axis=1))


def test_poly_helpers():
    p = {(1, 0): 2.0 + 0j, (0, 0): 1.0 + 0j}
    q = monomial((0, 1), 3.0)
    prod = poly_mul(p, q)
    assert prod == {(1, 1): 6.0 + 0j, (0, 1): 3.0 + 0j}
    assert_allclose(poly_eval(prod, np.array([[2.0, 5.0]])), [6 * 10 + 15])


def test_dimension_mismatch_is_rejected():
    F = ExponentialPolynomial.constant(2)
    with pytest.raises(InvalidInputError):
        F(np.zeros((3, 1)))


def test_product_matches_pointwise_product(rng):
    f = (PointMassDistribution.delta((1.0,)) + PointMassDistribution.delta((-0.5,), deriv=(2,))).fourier_transform()
    g = PointMassDistribution.delta((0.25,), coeff=2 - 1j, deriv=(1,)).fourier_transform()
    zeta = rng.standard_normal((40, 1)) + 1j * rng.standard_normal((40, 1))
    assert_allclose((f * g)(zeta), f(zeta) * g(zeta), rtol=1e-12)


def test_reflect_evaluates_at_minus_zeta(rng):
    f = PointMassDistribution.delta((0.7, -0.2), coeff=1.5, deriv=(1, 2)).fourier_transform()
    zeta = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
    assert_allclose(f.reflect()(zeta), f(-zeta), rtol=1e-12)


def test_conjugate_symmetry_for_real_distributions(rng):
    S = PointMassDistribution.delta((0.4,), coeff=2.0, deriv=(3,)) + PointMassDistribution.delta((-1.0,))
    F = S.fourier_transform()
    xi = rng.uniform(-5, 5, (30, 1))
    assert_allclose(F(-xi), np.conj(F(xi)), rtol=1e-12)


def test_terms_are_in_canonical_order():
    a = PointMassDistribution.delta((1.0,)).fourier_transform()
    b = PointMassDistribution.delta((-1.0,)).fourier_transform()
    assert (a * b).terms == (b * a).terms
    anchors = [t.anchor for t in ExponentialPolynomial(1, a.terms + b.terms).terms]
    assert anchors == sorted(anchors)


def test_json_document_round_trip_preserves_values(rng):
    F = PointMassDistribution.delta((0.5, 1.0), coeff=1 + 2j, deriv=(1, 0)).fourier_transform()
    G = ExponentialPolynomial.from_json(F.to_json())
    zeta = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    assert_allclose(G(zeta), F(zeta))
    doc = F.to_document()
    assert set(doc[0]) == {"coeff", "poly", "anchor"}


def test_fit_of_delta():
    fit = fit_paley_wiener(PointMassDistribution.delta((0.0,)).fourier_transform(), SampleSpec())
    assert (fit.type_radius, fit.poly_degree) == (0.0, 0)
    assert fit.constant == pytest.approx(1.1)


def test_fit_reads_type_radius_from_anchor():
    fit = fit_paley_wiener(PointMassDistribution.delta((2.0, 0.0)).fourier_transform(), SampleSpec(real_points=9))
    assert fit.type_radius == pytest.approx(2.0)
    assert fit.poly_degree == 0


def test_fit_of_laplacian_bound_holds_on_samples():
    F = PointMassDistribution.laplacian_delta(2).fourier_transform()
    spec = SampleSpec(real_points=11)
    fit = fit_paley_wiener(F, spec)
    assert (fit.type_radius, fit.poly_degree) == (0.0, 2)
    assert fit.constant <= 1.1
    assert fit.holds(F, spec.points(2))


def test_fit_type_is_subadditive():
    f = (PointMassDistribution.delta((1.0,)) + PointMassDistribution.delta((-0.5,))).fourier_transform()
    g = PointMassDistribution.delta((2.0,), deriv=(1,)).fourier_transform()
    spec = SampleSpec(real_points=15)
    assert fit_paley_wiener(f * g, spec).type_radius <= (
        fit_paley_wiener(f, spec).type_radius + fit_paley_wiener(g, spec).type_radius + 1e-12
    )


def test_fit_needs_samples():
    with pytest.raises(InvalidInputError):
        fit_paley_wiener(ExponentialPolynomial.constant(1), SampleSpec(real_points=0, imag_points=0))


@pytest.mark.parametrize("spec", [SampleSpec(imag_points=1), SampleSpec(imag_extent=0.0)])
def test_fit_needs_an_imaginary_ray(spec):
    F = PointMassDistribution.delta((2.0,)).fourier_transform()
    with pytest.raises(InvalidInputError):
        fit_paley_wiener(F, spec)
