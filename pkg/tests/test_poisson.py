import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lphj.lie import AlgebraVector, DualVector
from lphj.poisson import (
    INVARIANT_TOLERANCES, ScalarField, Sign, bracket_invariants, central_gradient, coordinate_field,
    hamiltonian_vector_field, heavy_top_bracket, lie_poisson_bracket, linear_field,
    orbit_symplectic_form, quadratic_field, random_quadratic, rigid_body_bracket,
)

I = np.array([1.0, 2.0, 3.0])
rigid_h = ScalarField(lambda x: 0.5 * float(x @ (x / I)), lambda x: x / I, label="h")
half_norm = ScalarField(lambda x: 0.5 * float(x @ x), lambda x: x.copy(), label="C")

vec = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


def test_coordinate_bracket_example():
    mu = DualVector.so3([0.3, -1.2, 2.5])
    got = lie_poisson_bracket(coordinate_field(0, 3), coordinate_field(1, 3), mu)
    assert got == pytest.approx(-2.5, abs=1e-15)
    assert rigid_body_bracket(coordinate_field(0, 3), coordinate_field(1, 3), mu) == pytest.approx(-2.5)


def test_plus_sign_flips():
    mu = DualVector.so3([0.3, -1.2, 2.5])
    f, g = coordinate_field(0, 3), coordinate_field(1, 3)
    assert lie_poisson_bracket(f, g, mu, Sign.PLUS) == -lie_poisson_bracket(f, g, mu, Sign.MINUS)


@given(vec)
def test_self_bracket_vanishes(x):
    f = quadratic_field(np.outer(x, x) + np.eye(3), x)
    scale = max(1.0, float(np.linalg.norm(x))) ** 5
    assert abs(lie_poisson_bracket(f, f, DualVector.so3(x))) <= 1e-14 * scale


def test_casimir_annihilates_basis(rng):
    for _ in range(50):
        mu = rng.standard_normal(3)
        for i in range(3):
            assert abs(lie_poisson_bracket(half_norm, coordinate_field(i, 3), mu)) <= 1e-12


def test_rigid_closed_form_matches_generic(rng):
    worst = 0.0
    for _ in range(100):
        f, g = random_quadratic(rng, 3), random_quadratic(rng, 3)
        mu = rng.standard_normal(3)
        worst = max(worst, abs(rigid_body_bracket(f, g, mu) - lie_poisson_bracket(f, g, mu)))
    assert worst <= 1e-9


def test_heavy_top_bracket_examples(rng):
    state = rng.standard_normal(6)
    pi1, gam1, gam2 = coordinate_field(0, 6), coordinate_field(3, 6), coordinate_field(4, 6)
    assert heavy_top_bracket(pi1, gam2, state) == pytest.approx(-state[5], abs=1e-15)
    assert heavy_top_bracket(gam1, gam2, state) == 0.0
    assert lie_poisson_bracket(pi1, gam2, state, algebra="se3") == pytest.approx(-state[5], abs=1e-15)


def test_heavy_top_casimirs_annihilate_basis(rng):
    pg = ScalarField(lambda x: float(x[:3] @ x[3:]), lambda x: np.concatenate([x[3:], x[:3]]))
    gg = ScalarField(lambda x: float(x[3:] @ x[3:]), lambda x: np.concatenate([np.zeros(3), 2 * x[3:]]))
    for _ in range(50):
        s = rng.standard_normal(6)
        for i in range(6):
            k = coordinate_field(i, 6)
            assert abs(heavy_top_bracket(pg, k, s)) <= 1e-12
            assert abs(lie_poisson_bracket(gg, k, s, algebra="se3")) <= 1e-12


def test_hamiltonian_vector_field_examples():
    assert np.array_equal(hamiltonian_vector_field(rigid_h, DualVector.so3([1, 0, 0])).components,
                          np.zeros(3))
    got = hamiltonian_vector_field(rigid_h, DualVector.so3([1, 1, 1])).components
    assert np.allclose(got, [-1 / 6, 2 / 3, -1 / 2], atol=1e-15)
    zero = hamiltonian_vector_field(half_norm, DualVector.so3([0.4, -2.0, 1.1])).components
    assert np.array_equal(zero, np.zeros(3))


def test_hamiltonian_vector_field_represents_bracket(rng):
    """{k, h}(nu) = <X_h(nu), dk(nu)> for every k, with the fixed sign convention."""
    for algebra, n in (("so3", 3), ("se3", 6)):
        h = random_quadratic(rng, n)
        for _ in range(20):
            nu = DualVector(algebra, rng.standard_normal(n))
            X = hamiltonian_vector_field(h, nu).components
            for _ in range(3):
                k = random_quadratic(rng, n)
                # fd cross-check of the sign: d/dt k(nu + t X) vs bracket
                fd = central_gradient(lambda t: k(nu.components + t[0] * X), np.zeros(1))[0]
                assert fd == pytest.approx(lie_poisson_bracket(k, h, nu), abs=1e-7)


def test_hamiltonian_vector_field_tangent_to_orbit(rng):
    for _ in range(50):
        nu = DualVector.so3(rng.standard_normal(3))
        X = hamiltonian_vector_field(random_quadratic(rng, 3), nu).components
        assert abs(X @ nu.components) <= 1e-12
        s = DualVector("se3", rng.standard_normal(6))
        Y = hamiltonian_vector_field(random_quadratic(rng, 6), s).components
        assert abs(Y[:3] @ s.gamma + Y[3:] @ s.pi) <= 1e-12
        assert abs(Y[3:] @ s.gamma) <= 1e-12


def test_orbit_form_examples(rng):
    nu = DualVector.so3([0, 0, 1])
    e1, e2 = AlgebraVector.so3([1, 0, 0]), AlgebraVector.so3([0, 1, 0])
    assert orbit_symplectic_form(nu, e1, e2) == -1.0
    assert orbit_symplectic_form(nu, e1, e1) == 0.0
    for _ in range(50):
        mu = DualVector.so3(rng.standard_normal(3))
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        lhs = orbit_symplectic_form(mu, AlgebraVector.so3(a), AlgebraVector.so3(b))
        assert abs(lhs - rigid_body_bracket(linear_field(a), linear_field(b), mu)) <= 1e-12


def test_analytic_gradients_match_fd(rng):
    for _ in range(20):
        f = random_quadratic(rng, 6)
        x = rng.standard_normal(6)
        assert np.allclose(f.gradient(x), f.numeric().gradient(x), rtol=1e-5, atol=1e-7)


def test_invariant_suite_passes():
    res = bracket_invariants(seed=7)
    for name, value in res.items():
        assert value <= INVARIANT_TOLERANCES[name], name
