"""Polynomial algebra, scalar fields and Lagrange interpolation tests."""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from anisotetra.errors import DerivativeUnavailable, InvalidDegree
from anisotetra.geom import TYPE1, TYPE2, Tetrahedron, reference_tetrahedron
from anisotetra.interp import (
    Interpolant,
    Polynomial3,
    ScalarField,
    interpolate,
    lagrange_basis,
    monomial_indices,
    residual,
)
from anisotetra.lattice import nodes_on

REPRO_TOL = 1e-9
T_HAT = reference_tetrahedron(TYPE1)
T_TILDE = reference_tetrahedron(TYPE2)

ANISO = Tetrahedron.from_points(
    [(0.2, 0.1, -0.3), (1.4, 0.2, -0.1), (0.3, 0.9, 0.05), (0.25, 0.3, 0.8)]
)


def random_poly(rng, degree):
    return Polynomial3({g: rng.uniform(-1, 1) for g in monomial_indices(degree)})


def simplex_monomial_integral(a, b, c):
    # over the unit reference tetrahedron
    return (
        math.factorial(a) * math.factorial(b) * math.factorial(c)
        / math.factorial(a + b + c + 3)
    )


class TestPolynomial3:
    def test_evaluate_matches_horner_free_form(self):
        p = Polynomial3({(0, 0, 0): 1.0, (1, 0, 0): -2.0, (1, 1, 1): 3.0})
        pts = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0], [-1.0, 0.5, 2.0]])
        want = 1.0 - 2.0 * pts[:, 0] + 3.0 * pts[:, 0] * pts[:, 1] * pts[:, 2]
        assert np.allclose(p.evaluate(pts), want, rtol=0, atol=1e-15)

    def test_partial_drops_degree_with_exact_coefficients(self):
        p = Polynomial3({(3, 1, 0): 2.0})
        d = p.partial((2, 1, 0))
        assert d.coeffs == {(1, 0, 0): 2.0 * 6.0}

    @pytest.mark.parametrize("abc", [(0, 0, 0), (1, 0, 0), (2, 1, 0), (3, 2, 1)])
    def test_integrate_monomials_on_reference(self, abc):
        a, b, c = abc
        p = Polynomial3({abc: 1.0})
        want = simplex_monomial_integral(a, b, c)
        assert abs(p.integrate(T_HAT) - want) < 1e-15 + 1e-12 * want

    def test_integrate_is_affine_invariant_in_total_mass(self):
        p = Polynomial3.constant(1.0)
        from anisotetra.geom import volume
        assert abs(p.integrate(ANISO) - volume(ANISO)) < 1e-14

    def test_compose_affine_shifts_argument(self):
        p = Polynomial3({(2, 0, 0): 1.0})
        q = p.compose_affine(np.eye(3), np.array([1.0, 0.0, 0.0]))  # x -> x + 1
        pts = np.array([[0.5, 0.0, 0.0], [2.0, 1.0, -1.0]])
        assert np.allclose(q.evaluate(pts), (pts[:, 0] + 1.0) ** 2)

    def test_ring_operations(self):
        x = Polynomial3.variable(0)
        y = Polynomial3.variable(1)
        p = (x + y) * (x - y)
        q = x * x - y * y
        pts = np.random.default_rng(0).uniform(-1, 1, (20, 3))
        assert np.allclose(p.evaluate(pts), q.evaluate(pts), atol=1e-15)


class TestScalarField:
    def test_finite_difference_fallback_matches_exact(self):
        a = np.array([0.9, -0.4, 0.2])
        fd = ScalarField(lambda pts: np.exp(pts @ a))
        assert not fd.exact_partials
        pts = np.array([[0.1, 0.2, 0.3], [0.0, -0.5, 0.4]])
        want = a[0] * a[1] * np.exp(pts @ a)
        got = fd.partial((1, 1, 0), pts)
        assert np.allclose(got, want, rtol=1e-5)

    def test_from_polynomial_partials_are_exact(self):
        p = Polynomial3({(2, 1, 0): 1.5})
        f = ScalarField.from_polynomial(p)
        assert f.exact_partials
        pts = np.array([[1.0, 2.0, 0.0]])
        assert np.allclose(f.partial((1, 1, 0), pts), 2.0 * 1.5 * pts[:, 0])

    def test_order_limit_enforced(self):
        f = ScalarField(lambda pts: pts[:, 0], order=1)
        f.partial((1, 0, 0), np.zeros((1, 3)))
        with pytest.raises(DerivativeUnavailable):
            f.partial((2, 0, 0), np.zeros((1, 3)))


class TestInterpolation:
    def test_degree_one_basis_is_barycentric(self):
        basis = lagrange_basis(T_HAT, 1)
        # On the unit reference element: 1-x-y-z, x, y, z in node order
        # starting from the vertex lattice points.
        pts = np.random.default_rng(1).uniform(0, 0.5, (10, 3))
        lam = [1 - pts.sum(axis=1), pts[:, 0], pts[:, 1], pts[:, 2]]
        gammas, nodes = nodes_on(T_HAT.coords(), 1)
        for phi, node in zip(basis, nodes):
            matches = [
                i for i, l in enumerate(lam)
                if np.allclose(phi.evaluate(pts), l, atol=1e-12)
            ]
            assert len(matches) == 1

    def test_x_squared_with_k1_on_reference_gives_x(self):
        ip = interpolate(Polynomial3({(2, 0, 0): 1.0}), T_HAT, 1)
        want = Polynomial3.variable(0)
        pts = np.random.default_rng(2).uniform(0, 1, (20, 3))
        assert np.allclose(ip.evaluate(pts), want.evaluate(pts), atol=1e-12)

    def test_nodal_exactness(self):
        rng = np.random.default_rng(3)
        f = ScalarField(lambda pts: np.sin(pts @ np.array([1.0, 2.0, 3.0])))
        for k in (1, 2, 3, 4):
            ip = interpolate(f, ANISO, k)
            gammas, nodes = nodes_on(ANISO.coords(), k)
            assert np.allclose(ip.evaluate(nodes), f(nodes), atol=1e-11)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_reproduces_p_k(self, k):
        rng = np.random.default_rng(10 + k)
        pts = rng.uniform(-0.5, 1.5, (30, 3))
        for _ in range(5):
            q = random_poly(rng, k)
            ip = interpolate(q, ANISO, k)
            qv = q.evaluate(pts)
            scale = max(1.0, float(np.max(np.abs(qv))))
            assert np.max(np.abs(ip.evaluate(pts) - qv)) < REPRO_TOL * scale

    def test_linearity(self):
        rng = np.random.default_rng(4)
        u = random_poly(rng, 3)
        v = random_poly(rng, 3)
        a, b = 2.5, -1.25
        ip_sum = interpolate(u * a + v * b, ANISO, 2)
        ip_u = interpolate(u, ANISO, 2)
        ip_v = interpolate(v, ANISO, 2)
        pts = rng.uniform(0, 1, (15, 3))
        assert np.allclose(
            ip_sum.evaluate(pts),
            a * ip_u.evaluate(pts) + b * ip_v.evaluate(pts),
            atol=1e-10,
        )

    def test_affine_covariance(self):
        # Interpolating the pulled-back field on the mapped element equals
        # mapping the interpolant: nodes correspond under the affine map.
        rng = np.random.default_rng(5)
        B = np.array([[1.2, 0.3, 0.0], [-0.1, 0.8, 0.2], [0.05, 0.0, 1.5]])
        b = np.array([0.4, -0.2, 0.7])
        mapped = Tetrahedron.from_points(np.asarray(ANISO.as_array()) @ B.T + b)
        v = random_poly(rng, 4)
        Binv = np.linalg.inv(B)
        v_pulled = v.compose_affine(Binv, -Binv @ b)  # v(F^{-1}(x)) on mapped
        ip = interpolate(v, ANISO, 2)
        ip_mapped = interpolate(v_pulled, mapped, 2)
        pts = rng.uniform(0, 1, (10, 3))
        mapped_pts = pts @ B.T + b
        assert np.allclose(
            ip_mapped.evaluate(mapped_pts), ip.evaluate(pts), atol=1e-9
        )

    def test_partition_of_unity(self):
        basis = lagrange_basis(ANISO, 3)
        total = Polynomial3.constant(0.0)
        for phi in basis:
            total = total + phi
        pts = np.random.default_rng(6).uniform(-1, 1, (20, 3))
        assert np.allclose(total.evaluate(pts), 1.0, atol=1e-10)

    def test_interpolant_partial_matches_polynomial(self):
        f = ScalarField(lambda pts: np.cos(pts @ np.array([0.5, 1.0, -0.7])))
        ip = interpolate(f, ANISO, 3)
        pts = np.random.default_rng(7).uniform(0.2, 0.6, (8, 3))
        for gamma in [(1, 0, 0), (0, 1, 1), (2, 0, 0)]:
            want = ip.poly.partial(gamma).evaluate(pts)
            assert np.allclose(ip.partial(gamma, pts), want, rtol=1e-9, atol=1e-12)

    def test_degree_bounds(self):
        with pytest.raises(InvalidDegree):
            interpolate(Polynomial3.constant(1.0), T_HAT, 0)
        with pytest.raises(InvalidDegree):
            interpolate(Polynomial3.constant(1.0), T_HAT, 9)

    def test_condition_estimate_reported(self):
        ip = interpolate(Polynomial3.constant(1.0), ANISO, 4)
        assert ip.condition_estimate >= 1.0

    @settings(max_examples=25, deadline=None)
    @seed(1)
    @given(
        k=st.integers(min_value=1, max_value=3),
        shift=st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_reproduction_is_translation_stable(self, k, shift):
        rng = np.random.default_rng(8)
        q = random_poly(rng, k)
        t = Tetrahedron.from_points(
            [(x + shift, y - shift, z + 0.5 * shift) for x, y, z in ANISO.coords()]
        )
        ip = interpolate(q, t, k)
        pts = np.asarray(t.as_array()).mean(axis=0, keepdims=True)
        assert np.allclose(ip.evaluate(pts), q.evaluate(pts), rtol=1e-9, atol=1e-9)


class TestResidual:
    def test_vanishes_at_nodes(self):
        f = ScalarField(lambda pts: np.exp(pts @ np.array([0.3, 0.9, -0.5])))
        for k in (1, 2, 3):
            u = residual(f, ANISO, k)
            _, nodes = nodes_on(ANISO.coords(), k)
            assert np.max(np.abs(u(nodes))) < 1e-12

    def test_known_value_for_x_squared_k1(self):
        # On the reference element, x^2 - I x^2 = x^2 - x, minimized at 1/2.
        u = residual(Polynomial3({(2, 0, 0): 1.0}), T_HAT, 1)
        assert abs(u(np.array([[0.5, 0.1, 0.1]]))[0] + 0.25) < 1e-12

    def test_partials_flow_through(self):
        p = Polynomial3({(2, 0, 0): 1.0})
        u = residual(p, T_HAT, 1)
        pts = np.array([[0.25, 0.2, 0.2]])
        # d/dx (x^2 - x) = 2x - 1
        assert np.allclose(u.partial((1, 0, 0), pts), 2 * 0.25 - 1.0, atol=1e-12)
        assert u.exact_partials
