"""SO(3) and SE(3), their Lie algebras, duals and (co)adjoint actions.

Conventions
-----------
* so(3) is identified with R^3 through the hat map; the bracket is the
  cross product.
* se(3) elements are pairs (omega, u) stored as a 6-vector, with bracket
  ``[(w1, u1), (w2, u2)] = (w1 x w2, w1 x u2 - w2 x u1)``; this is the
  matrix commutator of the 4x4 representation ``[[hat(w), u], [0, 0]]``.
* Duals are identified with the same component spaces through the
  Euclidean dot product.  Every coadjoint formula below is obtained as a
  transpose of the corresponding adjoint matrix, never written by hand.
* ``coadjoint_action(g, mu)`` is Ad*_{g^-1} mu, defined by
  ``<Ad*_{g^-1} mu, xi> = <mu, Ad_{g^-1} xi>``.  It is a left action; on
  SO(3) it reduces to ``A @ mu``.
* ``coad(xi, mu)`` is ad*_xi mu, defined by
  ``<ad*_xi mu, eta> = <mu, [xi, eta]>``; on so(3) it is ``mu x xi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonFiniteError, TagMismatchError

SO3 = "SO3"
SE3 = "SE3"
ALGEBRA_DIM = {"so3": 3, "se3": 6}
GROUP_OF = {"so3": SO3, "se3": SE3}
ALGEBRA_OF = {SO3: "so3", SE3: "se3"}

ORTHO_TOL = 1e-12
# defects above this are treated as a corrupt rotation rather than roundoff
ORTHO_REJECT = 1e-6
VEE_SYM_TOL = 1e-9
LOG_ANGLE_MARGIN = 1e-6


def _frozen(x, dim=None):
    arr = np.array(x, dtype=float).reshape(-1)
    if dim is not None and arr.shape != (dim,):
        raise ValueError(f"expected {dim} components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite components: {arr}")
    arr.flags.writeable = False
    return arr


def _check_algebra(algebra):
    if algebra not in ALGEBRA_DIM:
        raise ValueError(f"unknown algebra {algebra!r}; expected 'so3' or 'se3'")


@dataclass(frozen=True, eq=False)
class AlgebraVector:
    """Element of so(3) (3 components) or se(3) (omega then u, 6 components)."""

    algebra: str
    components: np.ndarray

    def __post_init__(self):
        _check_algebra(self.algebra)
        object.__setattr__(self, "components",
                           _frozen(self.components, ALGEBRA_DIM[self.algebra]))

    @classmethod
    def so3(cls, omega):
        return cls("so3", omega)

    @classmethod
    def se3(cls, omega, u):
        return cls("se3", np.concatenate([np.ravel(omega), np.ravel(u)]))

    @property
    def omega(self):
        return self.components[:3]

    @property
    def u(self):
        if self.algebra != "se3":
            raise AttributeError("only se(3) vectors have a translational part")
        return self.components[3:]

    def __add__(self, other):
        _match(self.algebra, other.algebra)
        return AlgebraVector(self.algebra, self.components + other.components)

    def __sub__(self, other):
        _match(self.algebra, other.algebra)
        return AlgebraVector(self.algebra, self.components - other.components)

    def __mul__(self, s):
        return AlgebraVector(self.algebra, float(s) * self.components)

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraVector(self.algebra, -self.components)

    def __eq__(self, other):
        return (type(other) is type(self) and self.algebra == other.algebra
                and np.array_equal(self.components, other.components))

    def __hash__(self):
        return hash((self.algebra, self.components.tobytes()))


@dataclass(frozen=True, eq=False)
class DualVector:
    """Element of so*(3) (Pi) or se*(3) (Pi then Gamma)."""

    algebra: str
    components: np.ndarray

    def __post_init__(self):
        _check_algebra(self.algebra)
        object.__setattr__(self, "components",
                           _frozen(self.components, ALGEBRA_DIM[self.algebra]))

    @classmethod
    def so3(cls, pi):
        return cls("so3", pi)

    @classmethod
    def se3(cls, pi, gamma):
        return cls("se3", np.concatenate([np.ravel(pi), np.ravel(gamma)]))

    @property
    def pi(self):
        return self.components[:3]

    @property
    def gamma(self):
        if self.algebra != "se3":
            raise AttributeError("only se*(3) covectors carry Gamma")
        return self.components[3:]

    def __add__(self, other):
        _match(self.algebra, other.algebra)
        return DualVector(self.algebra, self.components + other.components)

    def __sub__(self, other):
        _match(self.algebra, other.algebra)
        return DualVector(self.algebra, self.components - other.components)

    def __mul__(self, s):
        return DualVector(self.algebra, float(s) * self.components)

    __rmul__ = __mul__

    def __neg__(self):
        return DualVector(self.algebra, -self.components)

    def __eq__(self, other):
        return (type(other) is type(self) and self.algebra == other.algebra
                and np.array_equal(self.components, other.components))

    def __hash__(self):
        return hash((self.algebra, self.components.tobytes()))


def orthogonality_defect(R):
    R = np.asarray(R, dtype=float)
    return float(max(np.max(np.abs(R.T @ R - np.eye(3))),
                     abs(np.linalg.det(R) - 1.0)))


def project_rotation(R):
    """Nearest rotation matrix in the Frobenius norm (polar factor)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        U[:, -1] *= -1
        Q = U @ Vt
    return Q


@dataclass(frozen=True)
class GroupElement:
    """Element of SO(3) (``R``) or SE(3) (``R``, ``v``).

    Rotations whose orthogonality defect is above 1e-12 but still small
    are polar-projected on construction; anything worse than 1e-6 is
    rejected.
    """

    group: str
    R: np.ndarray
    v: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.group not in (SO3, SE3):
            raise ValueError(f"unknown group {self.group!r}")
        R = np.array(self.R, dtype=float)
        if R.shape != (3, 3) or not np.all(np.isfinite(R)):
            raise DomainError("rotation must be a finite 3x3 matrix")
        defect = orthogonality_defect(R)
        if defect > ORTHO_REJECT:
            raise DomainError(f"not a rotation (defect {defect:.3g})")
        if defect > ORTHO_TOL:
            R = project_rotation(R)
        R.flags.writeable = False
        object.__setattr__(self, "R", R)
        if self.group == SE3:
            v = np.zeros(3) if self.v is None else self.v
            object.__setattr__(self, "v", _frozen(v, 3))
        elif self.v is not None:
            raise ValueError("SO(3) elements carry no translation")

    @classmethod
    def identity(cls, group=SO3):
        return cls(group, np.eye(3), np.zeros(3) if group == SE3 else None)

    @property
    def algebra(self):
        return ALGEBRA_OF[self.group]

    def compose(self, other):
        """Group product ``self * other``."""
        if self.group != other.group:
            raise TagMismatchError(f"{self.group} * {other.group}")
        if self.group == SO3:
            return GroupElement(SO3, self.R @ other.R)
        return GroupElement(SE3, self.R @ other.R, self.R @ other.v + self.v)

    __matmul__ = compose

    def inverse(self):
        if self.group == SO3:
            return GroupElement(SO3, self.R.T)
        return GroupElement(SE3, self.R.T, -self.R.T @ self.v)

    def matrix(self):
        """3x3 rotation for SO(3); 4x4 homogeneous matrix for SE(3)."""
        if self.group == SO3:
            return np.array(self.R)
        M = np.eye(4)
        M[:3, :3] = self.R
        M[:3, 3] = self.v
        return M


def _match(a, b):
    if a != b:
        raise TagMismatchError(f"tag mismatch: {a} vs {b}")


# ---------------------------------------------------------------- hat / vee

def hat(v):
    """Skew matrix with ``hat(v) @ w == cross(v, w)``."""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(M):
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise ValueError("vee expects a 3x3 matrix")
    sym = 0.5 * (M + M.T)
    if np.max(np.abs(sym)) > VEE_SYM_TOL:
        raise DomainError("matrix is not skew-symmetric")
    return np.array([M[2, 1] - M[1, 2], M[0, 2] - M[2, 0], M[1, 0] - M[0, 1]]) / 2.0


def cross(a, b):
    # np.cross carries a lot of per-call overhead for 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


# ----------------------------------------------------------- exp / log maps

def _rodrigues_coeffs(theta):
    """sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3 with series near zero."""
    if theta < 1e-4:
        t2 = theta * theta
        return 1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0
    s, c = math.sin(theta), math.cos(theta)
    return s / theta, (1.0 - c) / theta**2, (theta - s) / theta**3


def so3_exp(w):
    w = np.asarray(w, dtype=float)
    a, b, _ = _rodrigues_coeffs(math.sqrt(float(w @ w)))
    W = hat(w)
    return np.eye(3) + a * W + b * (W @ W)


def so3_log(R):
    R = np.asarray(R, dtype=float)
    axis2 = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = 0.5 * float(np.linalg.norm(axis2))
    c = 0.5 * (float(np.trace(R)) - 1.0)
    theta = math.atan2(s, c)
    if theta > math.pi - LOG_ANGLE_MARGIN:
        raise DomainError(f"rotation angle {theta:.8f} too close to pi for log")
    if theta < 1e-4:
        factor = 0.5 + theta * theta / 12.0
    else:
        factor = theta / (2.0 * math.sin(theta))
    return factor * axis2


def se3_V(w):
    """Left Jacobian of SO(3) at w; translational block of the se(3) exponential."""
    _, b, c = _rodrigues_coeffs(math.sqrt(float(w @ w)))
    W = hat(w)
    return np.eye(3) + b * W + c * (W @ W)


def exp_group(xi):
    """Group exponential of an so(3) or se(3) element."""
    if xi.algebra == "so3":
        return GroupElement(SO3, so3_exp(xi.components))
    w, u = xi.components[:3], xi.components[3:]
    return GroupElement(SE3, so3_exp(w), se3_V(w) @ u)


def log_group(g):
    """Local inverse of :func:`exp_group`, valid for rotation angles below pi - 1e-6."""
    w = so3_log(g.R)
    if g.group == SO3:
        return AlgebraVector("so3", w)
    u = np.linalg.solve(se3_V(w), g.v)
    return AlgebraVector("se3", np.concatenate([w, u]))


# ------------------------------------------------- adjoint representations

def adjoint_matrix(g):
    """Matrix of Ad_g acting on algebra components."""
    if g.group == SO3:
        return np.array(g.R)
    A = g.R
    M = np.zeros((6, 6))
    M[:3, :3] = A
    M[3:, 3:] = A
    M[3:, :3] = hat(g.v) @ A
    return M


def ad_matrix(xi_components, algebra):
    """Matrix of ad_xi: eta -> [xi, eta] acting on algebra components."""
    w = xi_components[:3]
    W = hat(w)
    if algebra == "so3":
        return W
    M = np.zeros((6, 6))
    M[:3, :3] = W
    M[3:, 3:] = W
    M[3:, :3] = hat(xi_components[3:])
    return M


def _coad_basis(algebra):
    n = ALGEBRA_DIM[algebra]
    eye = np.eye(n)
    # B[k][:, i] = ad*_{e_i} e_k, read off the transposed ad matrices
    return np.array([[ad_matrix(eye[i], algebra).T @ eye[k] for i in range(n)]
                     for k in range(n)]).transpose(0, 2, 1)


_COAD_BASIS = {a: _coad_basis(a) for a in ALGEBRA_DIM}


def coad_matrix(mu_components, algebra):
    """Matrix L(mu) with ``coad(xi, mu) = L(mu) @ xi`` (linear in mu)."""
    return np.tensordot(mu_components, _COAD_BASIS[algebra], axes=1)


def pairing(mu, xi):
    _match(mu.algebra, xi.algebra)
    return float(mu.components @ xi.components)


def adjoint_action(g, xi):
    _match(g.algebra, xi.algebra)
    return AlgebraVector(xi.algebra, adjoint_matrix(g) @ xi.components)


def coadjoint_action(g, mu):
    """Ad*_{g^-1} mu: the left coadjoint action."""
    _match(g.algebra, mu.algebra)
    return DualVector(mu.algebra, adjoint_matrix(g.inverse()).T @ mu.components)


def ad(xi, eta):
    _match(xi.algebra, eta.algebra)
    return AlgebraVector(xi.algebra, ad_matrix(xi.components, xi.algebra) @ eta.components)


def coad(xi, mu):
    """ad*_xi mu, the transpose of ad_xi under the pairing."""
    _match(xi.algebra, mu.algebra)
    return DualVector(mu.algebra, ad_matrix(xi.components, xi.algebra).T @ mu.components)


def coad_array(algebra, xi, mu):
    """Array-level :func:`coad` for integrator inner loops."""
    if algebra == "so3":
        return cross(mu, xi)
    return ad_matrix(xi, algebra).T @ mu


# ------------------------------------------------------------------ sampling

def random_rotation(rng):
    """Haar-uniform rotation from a normalised Gaussian quaternion."""
    q = rng.standard_normal(4)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_group_element(group, rng, translation_scale=1.0):
    R = random_rotation(rng)
    if group == SO3:
        return GroupElement(SO3, R)
    return GroupElement(SE3, R, translation_scale * rng.standard_normal(3))
