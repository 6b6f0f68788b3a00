"""Lie-Poisson mechanics on so*(3) and se*(3) with reduced Hamilton-Jacobi checks."""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, NonFiniteError, TagMismatchError
from .lie import (
    SE3, SO3, AlgebraVector, DualVector, GroupElement, ad, adjoint_action, coad, coadjoint_action,
    exp_group, hat, log_group, pairing, vee,
)
from .poisson import (
    ScalarField, Sign, bracket_invariants, hamiltonian_vector_field, heavy_top_bracket,
    lie_poisson_bracket, orbit_symplectic_form, rigid_body_bracket,
)
from .systems import (
    HeavyTopParams, RigidBodyParams, SystemSpec, canonical_system, harmonic_oscillator,
    heavy_top_system, legendre, momentum_map, rigid_body_system,
)
from .dynamics import IntegratorChoice, Trajectory, diagnostics, integrate, step
from .hamilton_jacobi import (
    BodySection, CanonicalSection, ResidualReport, hj_residual_canonical, hj_residual_rigid,
    hj_residual_top, perturbed_section, relatedness_residual, scaled_inertia_section,
    section_from_momentum, verify_canonical, verify_equivalence,
)
