import math
import warnings

import numpy as np
import pytest

from moyal_spectral import (
    AccuracyWarning,
    MoyalElement,
    derivative,
    make_annihilation,
    make_number,
    matrix_basis,
    operator_norm,
    star_product,
    translate_element,
    unit_element,
    zero_element,
)
from moyal_spectral.elements import coefficients, from_coefficients, kappa_safety_bound
from moyal_spectral.errors import InvalidPairError, InvalidParameterError

import oracles


def element(mat, theta=1.0, unit=0.0):
    return MoyalElement.from_matrix(mat, theta, unit)


class TestStarProduct:
    @pytest.mark.parametrize("theta", [1.0, 0.25])
    def test_matrix_basis_rule(self, theta):
        dim = 5
        for m, n, p, q in [(0, 1, 1, 3), (2, 2, 2, 0), (1, 3, 2, 4), (4, 0, 0, 4)]:
            prod = star_product(matrix_basis(m, n, dim, theta), matrix_basis(p, q, dim, theta))
            expect = (n == p) / math.sqrt(2 * math.pi * theta) * matrix_basis(m, q, dim, theta).entries
            np.testing.assert_allclose(prod.entries, expect, atol=1e-15)

    def test_basis_range(self):
        with pytest.raises(InvalidParameterError):
            matrix_basis(0, 5, 5)

    def test_unit(self, rng):
        f = element(rng.standard_normal((6, 6)), unit=0.3 - 1j)
        one = unit_element(6)
        for g in (star_product(f, one), star_product(one, f)):
            np.testing.assert_allclose(g.entries, f.entries)
            assert g.unit_part == f.unit_part

    def test_unitized_rule(self, rng):
        f = element(rng.standard_normal((6, 6)), unit=2.0)
        g = element(rng.standard_normal((6, 6)), unit=-0.5j)
        h = star_product(f, g)
        np.testing.assert_allclose(h.full_matrix(), f.full_matrix() @ g.full_matrix(), atol=1e-13)

    def test_ladder_product_gives_number(self):
        a = make_annihilation(12, 0.8)
        n = star_product(MoyalElement(a.adjoint()), MoyalElement(a))
        np.testing.assert_allclose(n.entries, make_number(12, 0.8).entries, atol=1e-15)

    def test_coefficient_view(self, rng):
        c = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        f = from_coefficients(c, theta=0.5)
        np.testing.assert_allclose(coefficients(f), c, atol=1e-14)
        np.testing.assert_allclose(f.entries, c / math.sqrt(math.pi), atol=1e-15)

    def test_mismatch(self):
        with pytest.raises(InvalidPairError):
            star_product(zero_element(3), zero_element(4))
        with pytest.raises(InvalidPairError):
            star_product(zero_element(3, 1.0), zero_element(3, 2.0))

    def test_hermitian_flag(self):
        assert unit_element(3, lam=2.0).is_hermitian()
        assert not unit_element(3, lam=2.0j).is_hermitian()


class TestDerivative:
    def test_constants(self):
        for which in ("d", "dbar"):
            d = derivative(unit_element(8, lam=3.0), which)
            assert np.all(d.entries == 0) and d.unit_part == 0

    def test_coordinates(self):
        dim = 16
        a = make_annihilation(dim)
        z, zbar = MoyalElement(a), MoyalElement(a.adjoint())
        assert np.abs(derivative(z, "dbar").entries).max() == 0
        assert np.abs(derivative(zbar, "d").entries).max() == 0
        np.testing.assert_allclose(derivative(zbar, "dbar").entries[: dim - 1, : dim - 1], np.eye(dim - 1), atol=1e-14)
        # d z = -[a*, a]/theta = 1 away from the boundary
        np.testing.assert_allclose(derivative(z, "d").entries[: dim - 1, : dim - 1], np.eye(dim - 1), atol=1e-14)

    def test_theta_scaling(self, rng):
        m = oracles.local_matrix(10, rng, 6)
        d1 = derivative(element(m, 1.0), "d").entries
        d2 = derivative(element(m, 4.0), "d").entries
        np.testing.assert_allclose(d2, d1 * 2 / 4, atol=1e-13)

    def test_bad_which(self):
        with pytest.raises(InvalidParameterError):
            derivative(zero_element(3), "x")

    @pytest.mark.parametrize("which", ["d", "dbar"])
    def test_leibniz(self, rng, which):
        f = element(oracles.local_matrix(20, rng, 20))
        g = element(oracles.local_matrix(20, rng, 20))
        lhs = derivative(star_product(f, g), which)
        rhs = star_product(derivative(f, which), g) + star_product(f, derivative(g, which))
        scale = operator_norm(f.op) * operator_norm(g.op)
        assert oracles.spectral_norm(lhs.entries - rhs.entries) <= 1e-12 * scale

    @pytest.mark.parametrize("kappa", [0.5, 1j, 0.7 + 0.3j])
    @pytest.mark.parametrize("which", ["d", "dbar"])
    def test_commutes_with_translation(self, rng, kappa, which):
        dim = 64
        f = element(oracles.local_hermitian(dim, rng))
        lhs = derivative(translate_element(f, kappa), which).entries
        rhs = translate_element(derivative(f, which), kappa).entries
        h = dim // 2
        assert np.abs(lhs[:h, :h] - rhs[:h, :h]).max() <= 1e-9


class TestTranslation:
    def test_zero(self, rng):
        f = element(rng.standard_normal((5, 5)))
        assert translate_element(f, 0) is f

    @pytest.mark.parametrize("dim", [64, 128])
    @pytest.mark.parametrize("kappa", [1.0, -0.4, 0.6 + 0.8j, 1j])
    def test_shifts_z(self, dim, kappa):
        z = MoyalElement(make_annihilation(dim))
        moved = translate_element(z, kappa).entries
        expect = z.entries + kappa / math.sqrt(2) * np.eye(dim)
        h = dim // 2
        assert np.abs(moved[:h, :h] - expect[:h, :h]).max() <= 1e-8

    def test_matches_oracle_exponential(self, rng):
        f = element(oracles.local_hermitian(40, rng))
        u = oracles.displacement(0.3 - 0.2j, 40)
        np.testing.assert_allclose(translate_element(f, 0.3 - 0.2j).entries, u @ f.entries @ u.conj().T, atol=1e-12)

    @pytest.mark.parametrize("k1,k2", [(0.5, 0.25j), (1.0, -1.0), (0.3 + 0.4j, 0.2 - 0.6j)])
    def test_composition(self, rng, k1, k2):
        dim = 64
        f = element(oracles.local_hermitian(dim, rng), unit=0.5)
        two = translate_element(translate_element(f, k1), k2)
        one = translate_element(f, k1 + k2)
        h = dim // 2
        assert np.abs(two.entries[:h, :h] - one.entries[:h, :h]).max() <= 1e-8
        assert two.unit_part == 0.5

    def test_automorphism(self, rng):
        dim, kappa, h = 64, 0.8 - 0.3j, 32
        f = element(oracles.local_matrix(dim, rng))
        g = element(oracles.local_matrix(dim, rng))
        t = lambda x: translate_element(x, kappa)
        prod = t(star_product(f, g)).entries - star_product(t(f), t(g)).entries
        assert np.abs(prod[:h, :h]).max() <= 1e-9
        inv = t(f.adjoint()).entries - t(f).adjoint().entries
        assert np.abs(inv).max() <= 1e-12
        assert operator_norm(t(f).op) == pytest.approx(operator_norm(f.op), abs=1e-9)
        assert t(element(oracles.local_hermitian(dim, rng))).is_hermitian(1e-12)

    def test_safety_warning(self):
        bound = kappa_safety_bound(16)
        assert bound == pytest.approx(2.0)
        with pytest.warns(AccuracyWarning):
            translate_element(zero_element(16), 2.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            translate_element(zero_element(16), 1.9)
