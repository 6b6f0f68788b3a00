import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lphj.errors import DomainError, TagMismatchError
from lphj.lie import (
    SE3, SO3, AlgebraVector, DualVector, GroupElement, ad, adjoint_action, coad, coadjoint_action,
    exp_group, hat, log_group, orthogonality_defect, pairing, random_group_element, vee,
)

from conftest import rot_z

finite = st.floats(-10, 10, allow_nan=False)
vec3 = st.lists(finite, min_size=3, max_size=3).map(np.array)
small3 = st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3).map(np.array)


# ------------------------------------------------------------------ hat/vee

def test_hat_example():
    expected = np.array([[0, -3, 2], [3, 0, -1], [-2, 1, 0]], dtype=float)
    assert np.array_equal(hat([1, 2, 3]), expected)
    assert np.array_equal(hat([0, 0, 0]), np.zeros((3, 3)))
    assert np.array_equal(hat([1, 0, 0]) @ [0, 1, 0], [0, 0, 1])


@given(vec3, vec3)
def test_hat_is_cross_and_vee_inverts(v, w):
    assert np.allclose(hat(v) @ w, np.cross(v, w), atol=1e-12)
    assert np.array_equal(vee(hat(v)), v)


def test_vee_rejects_symmetric_part():
    with pytest.raises(DomainError):
        vee(np.eye(3))


# ------------------------------------------------------------------ exp/log

def test_exp_examples():
    assert np.array_equal(exp_group(AlgebraVector.so3([0, 0, 0])).R, np.eye(3))
    R = exp_group(AlgebraVector.so3([np.pi / 2, 0, 0])).R
    assert np.allclose(R @ [0, 1, 0], [0, 0, 1], atol=1e-15)


def test_log_roundtrip_example():
    xi = AlgebraVector.so3([0.1, -0.2, 0.3])
    assert np.allclose(log_group(exp_group(xi)).components, xi.components, atol=1e-10)


@given(small3, st.lists(finite, min_size=3, max_size=3))
def test_se3_log_roundtrip(w, u):
    xi = AlgebraVector.se3(w, u)
    assert np.allclose(log_group(exp_group(xi)).components, xi.components, atol=1e-9)


def test_log_rejects_near_pi():
    with pytest.raises(DomainError):
        log_group(exp_group(AlgebraVector.so3([np.pi, 0, 0])))


@given(vec3, vec3)
def test_group_invariants_preserved(a, b):
    g = exp_group(AlgebraVector.so3(a))
    h = exp_group(AlgebraVector.so3(b))
    for x in (g, h, g @ h, g.inverse()):
        assert orthogonality_defect(x.R) <= 1e-12
        assert abs(np.linalg.det(x.R) - 1) <= 1e-12


def test_group_element_projects_or_rejects():
    R = np.eye(3) + 1e-9 * np.ones((3, 3))
    assert orthogonality_defect(GroupElement(SO3, R).R) <= 1e-12
    with pytest.raises(DomainError):
        GroupElement(SO3, 2 * np.eye(3))


# ------------------------------------------------------------------ adjoint

def test_adjoint_examples():
    xi = AlgebraVector.so3([1, 0, 0])
    assert adjoint_action(GroupElement.identity(), xi) == xi
    out = adjoint_action(rot_z(np.pi / 2), xi).components
    assert np.allclose(out, [0, 1, 0], atol=1e-15)


@pytest.mark.parametrize("group", [SO3, SE3])
def test_adjoint_matches_conjugation_and_composes(group, rng):
    g, h = random_group_element(group, rng), random_group_element(group, rng)
    n = 3 if group == SO3 else 6
    xi = AlgebraVector(g.algebra, rng.standard_normal(n))
    two = adjoint_action(g, adjoint_action(h, xi)).components
    one = adjoint_action(g @ h, xi).components
    assert np.max(np.abs(two - one)) <= 1e-12
    if group == SO3:
        conj = vee(g.R @ hat(xi.components) @ g.R.T)
        assert np.allclose(adjoint_action(g, xi).components, conj, atol=1e-12)
    else:
        # Ad_g xi as matrix conjugation in the 4x4 representation
        X = np.zeros((4, 4))
        X[:3, :3] = hat(xi.omega)
        X[:3, 3] = xi.u
        Y = g.matrix() @ X @ np.linalg.inv(g.matrix())
        got = adjoint_action(g, xi)
        assert np.allclose(got.omega, vee(Y[:3, :3]), atol=1e-12)
        assert np.allclose(got.u, Y[:3, 3], atol=1e-12)


@pytest.mark.parametrize("group", [SO3, SE3])
def test_coadjoint_pairing_identity_on_basis(group, rng):
    g = random_group_element(group, rng)
    n = 3 if group == SO3 else 6
    mu = DualVector(g.algebra, rng.standard_normal(n))
    lhs_mu = coadjoint_action(g, mu)
    for e in np.eye(n):
        xi = AlgebraVector(g.algebra, e)
        assert abs(pairing(lhs_mu, xi) - pairing(mu, adjoint_action(g.inverse(), xi))) <= 1e-12


def test_coadjoint_examples(rng):
    mu = DualVector.so3([1.0, 2.0, 3.0])
    assert np.array_equal(coadjoint_action(GroupElement.identity(), mu).components, mu.components)
    for _ in range(20):
        g = random_group_element(SO3, rng)
        pi = DualVector.so3(rng.standard_normal(3))
        assert abs(np.linalg.norm(coadjoint_action(g, pi).components)
                   - np.linalg.norm(pi.components)) <= 1e-12


@pytest.mark.parametrize("group", [SO3, SE3])
def test_coadjoint_is_left_action(group, rng):
    g, h = random_group_element(group, rng), random_group_element(group, rng)
    mu = DualVector(g.algebra, rng.standard_normal(3 if group == SO3 else 6))
    a = coadjoint_action(g, coadjoint_action(h, mu)).components
    b = coadjoint_action(g @ h, mu).components
    assert np.max(np.abs(a - b)) <= 1e-12


# ------------------------------------------------------------------ ad/coad

def test_ad_examples():
    e1, e2 = AlgebraVector.so3([1, 0, 0]), AlgebraVector.so3([0, 1, 0])
    assert np.array_equal(ad(e1, e2).components, [0, 0, 1])
    xi = AlgebraVector.se3([1, 2, 3], [4, 5, 6])
    assert np.array_equal(ad(xi, xi).components, np.zeros(6))


def test_se3_bracket_convention():
    a = AlgebraVector.se3([1, 0, 0], [0, 1, 0])
    b = AlgebraVector.se3([0, 1, 0], [0, 0, 1])
    # (w1 x w2, w1 x u2 - w2 x u1)
    expect = np.concatenate([np.cross(a.omega, b.omega),
                             np.cross(a.omega, b.u) - np.cross(b.omega, a.u)])
    assert np.array_equal(ad(a, b).components, expect)


@pytest.mark.parametrize("algebra", ["so3", "se3"])
def test_coad_pairing_identity(algebra, rng):
    n = 3 if algebra == "so3" else 6
    for _ in range(20):
        xi = AlgebraVector(algebra, rng.standard_normal(n))
        mu = DualVector(algebra, rng.standard_normal(n))
        for e in np.eye(n):
            eta = AlgebraVector(algebra, e)
            assert abs(pairing(coad(xi, mu), eta) - pairing(mu, ad(xi, eta))) <= 1e-12


def test_coad_so3_is_mu_cross_xi(rng):
    xi, mu = rng.standard_normal(3), rng.standard_normal(3)
    got = coad(AlgebraVector.so3(xi), DualVector.so3(mu)).components
    assert np.allclose(got, np.cross(mu, xi), atol=1e-15)


@pytest.mark.parametrize("algebra", ["so3", "se3"])
def test_jacobi_identity_for_ad(algebra, rng):
    n = 3 if algebra == "so3" else 6
    worst = 0.0
    for _ in range(100):
        x, y, z = (AlgebraVector(algebra, rng.standard_normal(n)) for _ in range(3))
        cyc = ad(x, ad(y, z)) + ad(y, ad(z, x)) + ad(z, ad(x, y))
        worst = max(worst, float(np.max(np.abs(cyc.components))))
    assert worst <= 1e-12


def test_tag_mismatch():
    with pytest.raises(TagMismatchError):
        ad(AlgebraVector.so3([1, 0, 0]), AlgebraVector.se3([1, 0, 0], [0, 0, 0]))
    with pytest.raises(TagMismatchError):
        coadjoint_action(GroupElement.identity(SE3), DualVector.so3([1, 0, 0]))
