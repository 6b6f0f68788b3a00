"""Lie-Poisson brackets on so*(3) and se*(3).

Functions on a dual space are :class:`ScalarField` objects.  They are
evaluated on component arrays; :class:`~lphj.lie.DualVector` arguments are
unwrapped automatically.  A field may ship an analytic gradient; without
one the gradient comes from central differences.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonFiniteError, TagMismatchError
from .lie import ALGEBRA_DIM, AlgebraVector, DualVector, ad_matrix, coad_array, cross

FD_REL_STEP = 1e-6
FD_MIN_STEP = 1e-6


class Sign(enum.IntEnum):
    """Sign of the Lie-Poisson bracket.  Reduced left-invariant systems use MINUS."""

    PLUS = 1
    MINUS = -1


def fd_step(x):
    return max(FD_MIN_STEP, FD_REL_STEP * float(np.linalg.norm(x)))


def central_gradient(fun, x, h=None):
    """Central-difference gradient of a scalar function of an array."""
    x = np.asarray(x, dtype=float)
    h = fd_step(x) if h is None else h
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def _components(mu):
    if isinstance(mu, DualVector):
        return mu.components
    return np.asarray(mu, dtype=float)


@dataclass(frozen=True)
class ScalarField:
    """Smooth function on a dual space, ``fun(components) -> float``.

    ``grad`` returns the functional derivative (an algebra element, as
    components); ``hess`` is optional and only used to speed up Newton
    solves in the integrators.
    """

    fun: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""
    fd_h: Optional[float] = None

    def __call__(self, mu):
        return float(self.fun(_components(mu)))

    def gradient(self, mu):
        x = _components(mu)
        if self.grad is not None:
            g = np.asarray(self.grad(x), dtype=float)
        else:
            g = central_gradient(self.fun, x, self.fd_h)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient of {self.label or 'field'} at {x}")
        return g

    def numeric(self):
        """Same field with the analytic gradient dropped."""
        return ScalarField(self.fun, label=self.label, fd_h=self.fd_h)

    def __mul__(self, other):
        f, g = self.fun, other.fun
        return ScalarField(lambda x: f(x) * g(x), label=f"({self.label})*({other.label})")

    def __add__(self, other):
        f, g = self.fun, other.fun
        grad = None
        if self.grad is not None and other.grad is not None:
            gf, gg = self.grad, other.grad
            grad = lambda x: gf(x) + gg(x)  # noqa: E731
        return ScalarField(lambda x: f(x) + g(x), grad, label=f"{self.label}+{other.label}")


def linear_field(b, c=0.0, label=None):
    """f(mu) = c + <mu, b>."""
    b = np.array(b, dtype=float)
    n = b.size
    return ScalarField(lambda x: c + float(b @ x), lambda x: b.copy(),
                       lambda x: np.zeros((n, n)), label or f"linear{tuple(np.round(b, 3))}")


def quadratic_field(Q, b=None, c=0.0, label="quadratic"):
    """f(mu) = c + <b, mu> + mu.Q.mu / 2 with Q symmetrised."""
    Q = np.array(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    b = np.zeros(Q.shape[0]) if b is None else np.array(b, dtype=float)
    return ScalarField(lambda x: c + float(b @ x) + 0.5 * float(x @ Q @ x),
                       lambda x: b + Q @ x, lambda x: Q, label)


def coordinate_field(i, n, label=None):
    e = np.zeros(n)
    e[i] = 1.0
    return linear_field(e, label=label or f"x{i + 1}")


def _tag(mu, algebra):
    if isinstance(mu, DualVector):
        if algebra is not None and algebra != mu.algebra:
            raise TagMismatchError(f"{algebra} vs {mu.algebra}")
        return mu.algebra, mu.components
    x = np.asarray(mu, dtype=float)
    if algebra is None:
        algebra = {3: "so3", 6: "se3"}[x.size]
    if x.size != ALGEBRA_DIM[algebra]:
        raise TagMismatchError(f"{x.size} components for {algebra}")
    return algebra, x


def _grad_on(f, x, algebra):
    g = f.gradient(x)
    if g.size != ALGEBRA_DIM[algebra]:
        raise TagMismatchError(f"gradient of {f.label} has {g.size} components, "
                               f"expected {ALGEBRA_DIM[algebra]} for {algebra}")
    return g


def lie_poisson_bracket(f, g, mu, sign=Sign.MINUS, algebra=None):
    """{f, g}_sign(mu) = sign * <mu, [df/dmu, dg/dmu]>."""
    algebra, x = _tag(mu, algebra)
    df = _grad_on(f, x, algebra)
    dg = _grad_on(g, x, algebra)
    return float(int(sign) * (x @ (ad_matrix(df, algebra) @ dg)))


def rigid_body_bracket(f, g, Pi, sign=Sign.MINUS):
    """Closed form on so*(3): sign * Pi . (grad f x grad g)."""
    Pi = _components(Pi)
    return float(int(sign) * (Pi @ cross(f.gradient(Pi), g.gradient(Pi))))


def heavy_top_bracket(f, g, state, sign=Sign.MINUS):
    """Closed form on se*(3) for state (Pi, Gamma).

    With the MINUS sign this is
    ``-Pi.(dPi f x dPi g) - Gamma.(dPi f x dGamma g - dPi g x dGamma f)``.
    """
    x = _components(state)
    Pi, Gamma = x[:3], x[3:]
    df, dg = f.gradient(x), g.gradient(x)
    value = Pi @ cross(df[:3], dg[:3]) + Gamma @ (cross(df[:3], dg[3:]) - cross(dg[:3], df[3:]))
    return float(int(sign) * value)


def hamiltonian_vector_field(h, nu, sign=Sign.MINUS):
    """X_h(nu) = -sign * ad*_{dh/dnu} nu.

    With this sign ``lie_poisson_bracket(k, h, nu, sign) == <X_h(nu), dk>``
    for every field ``k``.
    """
    algebra, x = _tag(nu, None)
    dh = _grad_on(h, x, algebra)
    return DualVector(algebra, -int(sign) * coad_array(algebra, dh, x))


def orbit_symplectic_form(nu, xi, eta, sign=Sign.MINUS):
    """Orbit form evaluated on the tangent vectors ad*_xi nu, ad*_eta nu."""
    if not (nu.algebra == xi.algebra == eta.algebra):
        raise TagMismatchError("orbit form arguments on different algebras")
    bracket = ad_matrix(xi.components, xi.algebra) @ eta.components
    return float(int(sign) * (nu.components @ bracket))


def bracket_field(f, g, sign=Sign.MINUS, algebra=None):
    """The function mu -> {f, g}(mu) as a ScalarField (numeric gradient)."""
    return ScalarField(lambda x: lie_poisson_bracket(f, g, x, sign, algebra),
                       label=f"{{{f.label},{g.label}}}")


# ----------------------------------------------------------- invariant suite

def random_quadratic(rng, n, scale=1.0):
    Q = rng.standard_normal((n, n)) * scale
    return quadratic_field(Q, rng.standard_normal(n) * scale, float(rng.standard_normal()),
                           label="rq")


def bracket_invariants(seed=0, count=100):
    """Antisymmetry, Leibniz, Jacobi and closed-form agreement on random instances.

    Returns ``{name: max_defect}`` over both algebras.  Evaluation points
    are drawn on the unit sphere so that the finite-difference roundoff in
    the Leibniz check stays well below its 1e-8 budget.
    """
    rng = np.random.default_rng(seed)
    out = {"antisymmetry": 0.0, "leibniz": 0.0, "jacobi": 0.0,
           "closed_form_so3": 0.0, "closed_form_se3": 0.0}
    for algebra in ("so3", "se3"):
        n = ALGEBRA_DIM[algebra]
        for _ in range(count):
            f, g, k = (random_quadratic(rng, n) for _ in range(3))
            mu = rng.standard_normal(n)
            mu /= np.linalg.norm(mu)
            fg = lie_poisson_bracket(f, g, mu, algebra=algebra)
            gf = lie_poisson_bracket(g, f, mu, algebra=algebra)
            out["antisymmetry"] = max(out["antisymmetry"], abs(fg + gf))

            lhs = lie_poisson_bracket(f * g, k, mu, algebra=algebra)
            rhs = (f(mu) * lie_poisson_bracket(g, k, mu, algebra=algebra)
                   + g(mu) * lie_poisson_bracket(f, k, mu, algebra=algebra))
            out["leibniz"] = max(out["leibniz"], abs(lhs - rhs))

            cyc = (lie_poisson_bracket(f, bracket_field(g, k, algebra=algebra), mu, algebra=algebra)
                   + lie_poisson_bracket(g, bracket_field(k, f, algebra=algebra), mu, algebra=algebra)
                   + lie_poisson_bracket(k, bracket_field(f, g, algebra=algebra), mu, algebra=algebra))
            out["jacobi"] = max(out["jacobi"], abs(cyc))

            closed = rigid_body_bracket(f, g, mu) if algebra == "so3" else heavy_top_bracket(f, g, mu)
            key = f"closed_form_{algebra}"
            out[key] = max(out[key], abs(closed - fg))
    return out


INVARIANT_TOLERANCES = {
    "antisymmetry": 1e-12,
    "leibniz": 1e-8,
    "jacobi": 1e-6,
    "closed_form_so3": 1e-9,
    "closed_form_se3": 1e-9,
}


def algebra_vector_of(field, mu):
    """Gradient of ``field`` at ``mu`` wrapped as an AlgebraVector."""
    return AlgebraVector(mu.algebra, field.gradient(mu))
