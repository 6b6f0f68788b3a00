"""Hamilton-Jacobi residuals for candidate one-form sections.

A section on a group is stored in left trivialisation: ``g -> gamma_body(g)``
in the dual of the Lie algebra.  Derivatives along the group are central
differences along left-translated curves ``g exp(t xi)``.

Nothing here solves a Hamilton-Jacobi equation; the functions only measure
how far a given section is from solving one, and whether the two sides of
the reduced equivalence statement agree.
"""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NonFiniteError, TagMismatchError
from .lie import (
    ALGEBRA_DIM, GROUP_OF, AlgebraVector, DualVector, GroupElement, ad_matrix, coad_matrix,
    coadjoint_action, exp_group, random_group_element,
)
from .poisson import ScalarField, coordinate_field, hamiltonian_vector_field, lie_poisson_bracket
from .systems import HeavyTopParams, momentum_map

T_STEP = 1e-5
Q_STEP = 1e-5


# ------------------------------------------------------------------ sections

@dataclass(frozen=True)
class BodySection:
    """One-form on SO(3) or SE(3) in left trivialisation.

    ``point`` optionally supplies the reduced-space point at which the
    Hamilton-Jacobi residual is evaluated when Pi (and Gamma) are taken
    independently of the section value; without it the section value is
    used.
    """

    fun: Callable[[GroupElement], DualVector]
    algebra: str
    label: str = "section"
    point: Optional[Callable[[GroupElement], DualVector]] = None

    def __call__(self, g):
        if g.algebra != self.algebra:
            raise TagMismatchError(f"{self.label} lives on {self.algebra}, got {g.group}")
        val = self.fun(g)
        if not isinstance(val, DualVector):
            val = DualVector(self.algebra, val)
        return val

    def evaluation_point(self, g):
        if self.point is None:
            return self(g)
        return self.point(g)


@dataclass(frozen=True)
class CanonicalSection:
    """One-form q -> p on R^n."""

    fun: Callable[[np.ndarray], np.ndarray]
    n: int
    label: str = "section"

    def __call__(self, q):
        p = np.atleast_1d(np.asarray(self.fun(np.atleast_1d(np.asarray(q, dtype=float))),
                                     dtype=float))
        if not np.all(np.isfinite(p)):
            raise DomainError(f"{self.label} is not defined at q={q}")
        return p

    @classmethod
    def from_potential(cls, W, n, h=1e-4, label="dW"):
        """gamma = dW by central differences of the scalar W."""
        def fun(q):
            g = np.empty(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                g[i] = (W(q + e) - W(q - e)) / (2 * h)
            return g
        return cls(fun, n, label)


def section_from_momentum(mu, label=None):
    """The section with constant momentum mu: gamma_body(g) = Ad*_g mu.

    This is the left-trivialised form of the right-invariant one-form
    with value mu at the identity; its image lies in the level set J^-1(mu).
    """
    def fun(g):
        return coadjoint_action(g.inverse(), mu)

    return BodySection(fun, mu.algebra, label or f"constant-momentum{_fmt(mu)}")


def body_constant_section(mu0, label=None):
    """gamma_body(g) = mu0 for all g (a left-invariant one-form)."""
    return BodySection(lambda g: mu0, mu0.algebra, label or f"body-constant{_fmt(mu0)}")


def scaled_inertia_section(mu, k, inertia, label=None):
    """Section solving the rigid-body reduced HJ equation by construction.

    The section itself is the constant-momentum section of ``mu``; the
    evaluation point is Pi(g) = gamma_bar(g) / (k I), so that
    gamma_bar = k (I1 Pi1, I2 Pi2, I3 Pi3) at every sample.  On se*(3) the
    Gamma slot of the evaluation point is the section's own Gamma.
    """
    if k == 0 or not np.isfinite(k):
        raise DomainError("scale k must be finite and non-zero")
    I = np.asarray(inertia, dtype=float)
    base = section_from_momentum(mu)

    def point(g):
        val = base(g).components
        pi = val[:3] / (k * I)
        if mu.algebra == "so3":
            return DualVector("so3", pi)
        return DualVector("se3", np.concatenate([pi, val[3:]]))

    return BodySection(base.fun, mu.algebra, label or f"scaled-inertia-family(k={k:g})", point)


def perturbed_section(base, amplitude, seed, label=None):
    """base + amplitude * sin(<W_i, g> + phase_i) componentwise, W and phases seeded."""
    n = ALGEBRA_DIM[base.algebra]
    rng = np.random.default_rng(seed)
    coords = 12 if base.algebra == "se3" else 9
    W = rng.uniform(1.0, 3.0, size=(n, coords)) * rng.choice([-1.0, 1.0], size=(n, coords))
    phase = rng.uniform(0, 2 * np.pi, size=n)

    def fun(g):
        flat = g.R.ravel() if g.v is None else np.concatenate([g.R.ravel(), g.v])
        return DualVector(base.algebra, base(g).components + amplitude * np.sin(W @ flat + phase))

    return BodySection(fun, base.algebra,
                       label or f"perturbed({base.label}, amp={amplitude:g}, seed={seed})",
                       base.point)


def _fmt(mu):
    return "(" + ",".join(f"{v:g}" for v in mu.components) + ")"


# ---------------------------------------------------------- HJ residuals

def _cross3(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _check_inertia(I):
    if len(I) != 3 or any(not Ii > 0 for Ii in I):
        raise DomainError(f"principal moments must be positive, got {I}")


def hj_residual_rigid(Pi, gbar, I):
    """Pi x (gbar_1/I_1, gbar_2/I_2, gbar_3/I_3): the reduced field of h o gbar.

    Works on floats or exact rationals (``fractions.Fraction``).
    """
    _check_inertia(I)
    return np.array(_cross3(Pi, [gbar[j] / I[j] for j in range(3)]))


def hj_numerators_rigid(Pi, gbar, I):
    """Left-hand sides of the rigid-body reduced HJ system, one per component."""
    _check_inertia(I)
    return np.array([
        I[1] * Pi[1] * gbar[2] - I[2] * Pi[2] * gbar[1],
        I[2] * Pi[2] * gbar[0] - I[0] * Pi[0] * gbar[2],
        I[0] * Pi[0] * gbar[1] - I[1] * Pi[1] * gbar[0],
    ])


def _params_of(p):
    if isinstance(p, HeavyTopParams):
        return p.I, p.mgh, p.chi
    return p  # (I, mgh, chi) tuple, used with exact rationals


def hj_residual_top(Pi, Gamma, gbar, p):
    """Heavy-top reduced HJ residual ``(Pi-slot, Gamma-slot)``.

    Pi-slot: Pi x (gbar/I) + mgh Gamma x chi; Gamma-slot: Gamma x (gbar/I).
    ``p`` is a HeavyTopParams or an ``(I, mgh, chi)`` tuple.
    """
    I, mgh, chi = _params_of(p)
    _check_inertia(I)
    w = [gbar[j] / I[j] for j in range(3)]
    grav = _cross3(Gamma, chi)
    s1 = np.array([a + mgh * b for a, b in zip(_cross3(Pi, w), grav)])
    s2 = np.array(_cross3(Gamma, w))
    return s1, s2


def hj_numerators_top(Pi, Gamma, gbar, p):
    """The six left-hand sides of the heavy-top reduced HJ system."""
    I, mgh, chi = _params_of(p)
    _check_inertia(I)
    rigid = hj_numerators_rigid(Pi, gbar, I)
    grav = _cross3(Gamma, chi)
    pairs = ((1, 2), (2, 0), (0, 1))
    s1 = np.array([rigid[j] + mgh * I[a] * I[b] * grav[j] for j, (a, b) in enumerate(pairs)])
    s2 = hj_numerators_rigid(Gamma, gbar, I)
    return s1, s2


def hj_residual_from_bracket(state, gbar, inertia, mgh=0.0, chi=(0.0, 0.0, 1.0)):
    """Same residual built from the generic bracket {x_i, h o gbar}_-.

    The gradient of h o gbar is taken as (gbar/I) in the Pi slot (gbar held
    fixed) and mgh chi in the Gamma slot.
    """
    x = state.components
    n = x.size
    w = np.asarray(gbar, dtype=float) / np.asarray(inertia, dtype=float)
    grad = w if n == 3 else np.concatenate([w, mgh * np.asarray(chi, dtype=float)])
    composed = ScalarField(lambda z: float(grad @ z), lambda z: grad, label="h.gbar")
    return np.array([lie_poisson_bracket(coordinate_field(i, n), composed, x, algebra=state.algebra)
                     for i in range(n)])


def hj_residual_canonical(sys, section, q, h=Q_STEP):
    """Gradient of q -> H(q, gamma(q)) by central differences.

    The composed function's Hamiltonian vector field is (0, -this), so the
    section solves H(q, dW) = const near q exactly when this vanishes.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n = sys.dim

    def K(x):
        return sys.hamiltonian(np.concatenate([x, section(x)]))

    grad = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        grad[i] = (K(q + e) - K(q - e)) / (2 * h)
    return grad


def section_jacobian(section, q, h=Q_STEP):
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n = q.size
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (section(q + e) - section(q - e)) / (2 * h)
    return J


def curl_defect(section, q, h=Q_STEP):
    """max |d gamma_i/dq_j - d gamma_j/dq_i|; zero for closed (locally exact) sections."""
    J = section_jacobian(section, q, h)
    return float(np.max(np.abs(J - J.T))) if J.size else 0.0


def canonical_relatedness_residual(sys, section, q, h=Q_STEP):
    """|| D gamma . dH/dp + dH/dq || at (q, gamma(q)).

    The base field is X^gamma(q) = dH/dp(q, gamma(q)); its push-forward by
    gamma is compared against X_H(q, gamma(q)).  Only the momentum rows
    can differ.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    n = sys.dim
    z = np.concatenate([q, section(q)])
    dH = sys.hamiltonian.gradient(z)
    lhs = section_jacobian(section, q, h) @ dH[n:]
    return float(np.max(np.abs(lhs + dH[:n])))


# ---------------------------------------------- group derivatives and checks

def directional_derivative(F, g, xi, t=T_STEP):
    """d/dt F(g exp(t xi)) at t = 0 by central differences (array-valued F)."""
    fwd = g.compose(exp_group(t * xi))
    bwd = g.compose(exp_group(-t * xi))
    return (np.asarray(F(fwd), dtype=float) - np.asarray(F(bwd), dtype=float)) / (2 * t)


def relatedness_residual(sys, section, g, t=T_STEP):
    """|| d/dt gamma(g exp(t xi)) - X_h(gamma(g)) ||_inf with xi = dh/dmu at gamma(g).

    ``xi`` is the base velocity of X_H^gamma in body coordinates; the left
    term is its push-forward by the reduced section.
    """
    val = section(g)
    xi = AlgebraVector(section.algebra, sys.hamiltonian.gradient(val))
    lhs = directional_derivative(lambda h: section(h).components, g, xi, t)
    rhs = hamiltonian_vector_field(sys.hamiltonian, val, sys.sign).components
    out = float(np.max(np.abs(lhs - rhs)))
    if not np.isfinite(out):
        raise NonFiniteError("relatedness residual is not finite")
    return out


def closedness_defect(section, g, xi, eta, t=T_STEP):
    """d gamma(xi_L, eta_L)(g) on left-invariant fields.

    = D_xi <gamma, eta> - D_eta <gamma, xi> - <gamma(g), [xi, eta]>.
    """
    if not (section.algebra == xi.algebra == eta.algebra):
        raise TagMismatchError("section and frame vectors on different algebras")
    d1 = directional_derivative(lambda h: section(h).components @ eta.components, g, xi, t)
    d2 = directional_derivative(lambda h: section(h).components @ xi.components, g, eta, t)
    br = ad_matrix(xi.components, xi.algebra) @ eta.components
    return float(d1 - d2 - section(g).components @ br)


def closedness_on_basis(section, g, t=T_STEP):
    n = ALGEBRA_DIM[section.algebra]
    eye = np.eye(n)
    worst = 0.0
    for i, j in itertools.combinations(range(n), 2):
        d = closedness_defect(section, g, AlgebraVector(section.algebra, eye[i]),
                              AlgebraVector(section.algebra, eye[j]), t)
        worst = max(worst, abs(d))
    return worst


def sample_group(algebra, seed, index):
    """Deterministic group sample for (seed, index)."""
    rng = np.random.default_rng([int(seed), int(index)])
    return random_group_element(GROUP_OF[algebra], rng)


def isotropy_basis(mu, rtol=1e-10):
    """Orthonormal basis of {xi : ad*_xi mu = 0}."""
    L = coad_matrix(mu.components, mu.algebra)
    _, s, Vt = np.linalg.svd(L)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > rtol * scale))
    return Vt[rank:]


@dataclass
class MomentumLevel:
    defect: float
    invariance_defect: float


def momentum_level_check(section, mu, samples, seed=0):
    """Distance of the section from the level set J^-1(mu), and its G_mu-invariance defect.

    The invariance defect compares gamma_body(s g) with gamma_body(g) for
    sampled isotropy elements s of mu: left translation leaves body momenta
    unchanged, so an invariant section gives identical values.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    basis = isotropy_basis(mu)
    defect = 0.0
    inv_defect = 0.0
    for i in range(samples):
        g = sample_group(mu.algebra, seed, i)
        val = section(g)
        defect = max(defect, float(np.max(np.abs(momentum_map(g, val).components - mu.components))))
        if len(basis):
            rng = np.random.default_rng([int(seed), int(i), 1])
            xi = AlgebraVector(mu.algebra, rng.uniform(-2, 2, len(basis)) @ basis)
            s = exp_group(xi)
            inv_defect = max(inv_defect, float(np.max(np.abs(section(s.compose(g)).components
                                                             - val.components))))
    return MomentumLevel(defect, inv_defect)


# ------------------------------------------------------------ equivalence

MODES = ("independent", "section")


@dataclass
class ResidualReport:
    system: str
    section: str
    samples: int
    tol: float
    hj_max: float
    relatedness_max: float
    closedness_max: float
    momentum_defect: float
    verdict: str
    seed: int = 0
    mode: str = "independent"
    invariance_defect: float = 0.0
    symplectic_hypothesis: str = "assumed"
    per_sample: list = field(default_factory=list)

    def as_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def _hj_sample(sys, section, g, mode):
    gbar = section(g).components[:3]
    point = section(g) if mode == "section" else section.evaluation_point(g)
    if sys.algebra == "so3":
        I = sys.params.I
        res = hj_residual_rigid(point.components, gbar, I)
        num = hj_numerators_rigid(point.components, gbar, I)
    else:
        x = point.components
        s1, s2 = hj_residual_top(x[:3], x[3:], gbar, sys.params)
        n1, n2 = hj_numerators_top(x[:3], x[3:], gbar, sys.params)
        res, num = np.concatenate([s1, s2]), np.concatenate([n1, n2])
    return res, num


def verify_equivalence(sys, section, mu, samples=100, tol=1e-5, seed=0, mode="independent",
                       workers=1, t=T_STEP):
    """Compare the reduced HJ residual with the relatedness residual at sampled group points.

    The verdict is CONSISTENT when, at every sample, both residuals are at
    most ``tol`` or both exceed it.  Closedness and momentum-level defects
    are reported alongside but do not enter the verdict; the symplectic
    hypothesis on gamma* is recorded as assumed.
    """
    if samples < 1 or not tol > 0:
        raise DomainError("samples must be >= 1 and tol > 0")
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    if sys.algebra != section.algebra or mu.algebra != sys.algebra:
        raise TagMismatchError("system, section and momentum must share an algebra")

    def one(i):
        g = sample_group(sys.algebra, seed, i)
        res, num = _hj_sample(sys, section, g, mode)
        hj = float(np.max(np.abs(res)))
        rel = relatedness_residual(sys, section, g, t)
        clo = closedness_on_basis(section, g, t)
        return {
            "index": i,
            "hj": hj,
            "hj_numerators": [float(v) for v in num],
            "relatedness": rel,
            "closedness": clo,
            "consistent": (hj <= tol) == (rel <= tol),
        }

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(samples)))
    else:
        rows = [one(i) for i in range(samples)]

    level = momentum_level_check(section, mu, samples, seed)
    return ResidualReport(
        system=sys.label,
        section=section.label,
        samples=samples,
        tol=tol,
        hj_max=max(r["hj"] for r in rows),
        relatedness_max=max(r["relatedness"] for r in rows),
        closedness_max=max(r["closedness"] for r in rows),
        momentum_defect=level.defect,
        verdict="CONSISTENT" if all(r["consistent"] for r in rows) else "INCONSISTENT",
        seed=int(seed),
        mode=mode,
        invariance_defect=level.invariance_defect,
        per_sample=rows,
    )


def verify_canonical(sys, section, grid, tol=1e-6):
    """Canonical counterpart: HJ residual, gamma-relatedness and curl defect on a q-grid."""
    rows = []
    for i, q in enumerate(np.atleast_2d(np.asarray(grid, dtype=float).reshape(len(grid), -1))):
        hj = float(np.max(np.abs(hj_residual_canonical(sys, section, q))))
        rel = canonical_relatedness_residual(sys, section, q)
        clo = curl_defect(section, q)
        rows.append({"index": i, "q": [float(v) for v in q], "hj": hj, "relatedness": rel,
                     "closedness": clo, "consistent": (hj <= tol) == (rel <= tol)})
    return ResidualReport(
        system=sys.label, section=section.label, samples=len(rows), tol=tol,
        hj_max=max(r["hj"] for r in rows),
        relatedness_max=max(r["relatedness"] for r in rows),
        closedness_max=max(r["closedness"] for r in rows),
        momentum_defect=0.0,
        verdict="CONSISTENT" if all(r["consistent"] for r in rows) else "INCONSISTENT",
        mode="canonical", per_sample=rows,
    )
