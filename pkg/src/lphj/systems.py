"""Mechanical systems: free rigid body, heavy top and canonical systems on T*R^n."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NonFiniteError, TagMismatchError
from .lie import DualVector, ad_matrix, coad_array, coad_matrix, coadjoint_action
from .poisson import ScalarField, Sign


def _positive_inertia(I):
    I = np.array(I, dtype=float).reshape(-1)
    if I.shape != (3,) or not np.all(np.isfinite(I)) or np.any(I <= 0):
        raise DomainError(f"principal moments of inertia must be three positive numbers, got {I}")
    I.flags.writeable = False
    return I


@dataclass(frozen=True)
class RigidBodyParams:
    I: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "I", _positive_inertia(self.I))


@dataclass(frozen=True)
class HeavyTopParams:
    """Heavy top parameters.

    Only the product ``mgh`` enters the dynamics.  ``m``, ``g`` and ``h``
    are kept for documentation; when all three are given their product
    must match ``mgh``.  ``mgh = 0`` is allowed and reduces the top to a
    rigid body carrying a passive vector Gamma.
    """

    I: np.ndarray
    mgh: float
    chi: np.ndarray
    m: Optional[float] = None
    g: Optional[float] = None
    h: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "I", _positive_inertia(self.I))
        chi = np.array(self.chi, dtype=float).reshape(-1)
        if chi.shape != (3,) or abs(np.linalg.norm(chi) - 1.0) > 1e-12:
            raise DomainError(f"chi must be a unit 3-vector, got {chi}")
        chi.flags.writeable = False
        object.__setattr__(self, "chi", chi)
        parts = (self.m, self.g, self.h)
        if any(p is not None for p in parts):
            if any(p is None or not p > 0 for p in parts):
                raise DomainError("m, g, h must all be given and positive")
            if not np.isclose(self.m * self.g * self.h, self.mgh, rtol=1e-12, atol=0):
                raise DomainError("mgh does not equal m*g*h")
        if not (np.isfinite(self.mgh) and self.mgh >= 0):
            raise DomainError(f"mgh must be finite and non-negative, got {self.mgh}")

    @classmethod
    def physical(cls, I, m, g, h, chi):
        return cls(I, m * g * h, chi, m, g, h)


@dataclass(frozen=True)
class SystemSpec:
    """A Lie-Poisson system on so*(3)/se*(3) or a canonical system on T*R^n.

    For canonical systems ``hamiltonian`` acts on z = (q, p) of length 2n.
    """

    label: str
    algebra: str
    hamiltonian: ScalarField
    casimirs: tuple = ()
    casimir_labels: tuple = ()
    params: object = None
    dim: int = 0
    sign: Sign = Sign.MINUS

    @property
    def is_canonical(self):
        return self.algebra == "canonical"

    def energy(self, x):
        return self.hamiltonian(x)

    def vector_field(self, x):
        """Right-hand side on raw components."""
        if self.is_canonical:
            n = self.dim
            dH = self.hamiltonian.gradient(x)
            return np.concatenate([dH[n:], -dH[:n]])
        dh = self.hamiltonian.gradient(x)
        return -int(self.sign) * coad_array(self.algebra, dh, x)

    def jacobian(self, x):
        """Jacobian of :meth:`vector_field`; analytic when the Hamiltonian has a Hessian."""
        x = np.asarray(x, dtype=float)
        if self.is_canonical or self.hamiltonian.hess is None:
            n = x.size
            J = np.empty((n, n))
            h = 1e-6 * max(1.0, float(np.linalg.norm(x)))
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                J[:, i] = (self.vector_field(x + e) - self.vector_field(x - e)) / (2 * h)
            return J
        dh = self.hamiltonian.gradient(x)
        H = self.hamiltonian.hess(x)
        # d/dx [L(x) dh(x)] with L(x) dh = ad*_dh x, bilinear in (dh, x)
        return -int(self.sign) * (ad_matrix(dh, self.algebra).T + coad_matrix(x, self.algebra) @ H)


def rigid_body_system(p):
    """Free rigid body, h(Pi) = sum Pi_i^2 / (2 I_i), Casimir |Pi|^2 / 2."""
    if not isinstance(p, RigidBodyParams):
        p = RigidBodyParams(p)
    inv = 1.0 / p.I
    Hmat = np.diag(inv)
    ham = ScalarField(lambda x: 0.5 * float(x @ (inv * x)), lambda x: inv * x,
                      lambda x: Hmat, label="rigid_body_energy")
    cas = ScalarField(lambda x: 0.5 * float(x @ x), lambda x: np.array(x, dtype=float),
                      lambda x: np.eye(3), label="half_norm_sq")
    return SystemSpec("rigid-body", "so3", ham, (cas,), ("|Pi|^2/2",), p, 3)


def heavy_top_system(p):
    """Heavy top on se*(3): h = sum Pi_i^2/(2 I_i) + mgh Gamma.chi; Casimirs Pi.Gamma, |Gamma|^2/2."""
    inv = 1.0 / p.I
    pot = p.mgh * p.chi
    Hmat = np.zeros((6, 6))
    Hmat[:3, :3] = np.diag(inv)

    def energy(x):
        return 0.5 * float(x[:3] @ (inv * x[:3])) + float(pot @ x[3:])

    def grad(x):
        return np.concatenate([inv * x[:3], pot])

    swap = np.zeros((6, 6))
    swap[:3, 3:] = np.eye(3)
    swap[3:, :3] = np.eye(3)
    cas1 = ScalarField(lambda x: float(x[:3] @ x[3:]),
                       lambda x: np.concatenate([x[3:], x[:3]]), lambda x: swap, "Pi.Gamma")
    g2 = np.zeros((6, 6))
    g2[3:, 3:] = np.eye(3)
    cas2 = ScalarField(lambda x: 0.5 * float(x[3:] @ x[3:]),
                       lambda x: np.concatenate([np.zeros(3), x[3:]]), lambda x: g2, "|Gamma|^2/2")
    ham = ScalarField(energy, grad, lambda x: Hmat, label="heavy_top_energy")
    return SystemSpec("heavy-top", "se3", ham, (cas1, cas2), ("Pi.Gamma", "|Gamma|^2/2"), p, 6)


def legendre(I, Omega):
    """Legendre transform of L = Omega.I.Omega/2.

    ``I`` is either the three principal moments or a symmetric positive
    definite 3x3 inertia matrix.  Returns ``(Pi, H)`` with H = Pi.Omega - L.
    """
    I = np.asarray(I, dtype=float)
    if I.ndim == 2:
        if I.shape != (3, 3) or not np.allclose(I, I.T):
            raise DomainError("inertia matrix must be symmetric 3x3")
        if np.any(np.linalg.eigvalsh(I) <= 0):
            raise DomainError("inertia matrix must be positive definite")
        M = I
    else:
        M = np.diag(_positive_inertia(I))
    w = Omega.components if hasattr(Omega, "components") else np.asarray(Omega, dtype=float)
    Pi = M @ w
    L = 0.5 * float(w @ M @ w)
    return DualVector("so3", Pi), float(Pi @ w) - L


def momentum_map(g, mu_body):
    """Momentum map of the cotangent-lifted left action, in left trivialisation.

    Equals the coadjoint transport Ad*_{g^-1} of the body momentum: A @ Pi on
    SO(3); on SE(3) it is (A Pi + v x A Gamma, A Gamma).
    """
    if g.algebra != mu_body.algebra:
        raise TagMismatchError(f"{g.group} with {mu_body.algebra}*")
    return coadjoint_action(g, mu_body)


def canonical_system(n, H, grad=None, label="canonical"):
    """Canonical system on T*R^n with Hamiltonian H(q, p).

    ``H`` takes ``(q, p)`` arrays; ``grad`` (optional) returns
    ``(dH/dq, dH/dp)``.
    """
    if int(n) < 1:
        raise DomainError("dimension must be at least 1")
    n = int(n)

    def fun(z):
        val = float(H(z[:n], z[n:]))
        if not np.isfinite(val):
            raise NonFiniteError(f"non-finite Hamiltonian at {z}")
        return val

    def joint_grad(z):
        dq, dp = grad(z[:n], z[n:])
        return np.concatenate([np.ravel(dq), np.ravel(dp)])

    field = ScalarField(fun, joint_grad if grad is not None else None, label=label)
    return SystemSpec(label, "canonical", field, dim=n)


def canonical_vector_field(sys, q, p):
    """(dH/dp, -dH/dq) at (q, p)."""
    z = np.concatenate([np.ravel(q), np.ravel(p)]).astype(float)
    return sys.vector_field(z)


def harmonic_oscillator(n=1):
    return canonical_system(n, lambda q, p: 0.5 * (p @ p + q @ q), lambda q, p: (q, p),
                            label="harmonic-oscillator")


def free_particle(n=1):
    return canonical_system(n, lambda q, p: 0.5 * (p @ p), lambda q, p: (np.zeros_like(q), p),
                            label="free-particle")
