"""Decision procedures for consistent subspaces of a system-bath algebra.

A subspace is consistent with a joint unitary when operators with equal bath
partial traces keep equal partial traces after conjugation, which is exactly
the condition that the reduced evolution is well defined.  All residuals are
Hilbert-Schmidt norms normalized by the input norm; verdicts are deterministic
regardless of the order family members are checked in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .operators import (
    Operator,
    SpaceLayout,
    adjoint_action,
    identity,
    matrix_unit,
    partial_trace,
    schatten_distance,
    swap_unitary,
    tensor,
    unvec,
    vec,
)
from .subspaces import (
    OperatorSubspace,
    kernel_of_partial_trace,
    span_from_generators,
    subspace_intersection,
    subspace_sum,
)

__all__ = [
    "UnitaryFamily",
    "ConsistencyVerdict",
    "is_unitary_consistent",
    "is_family_consistent",
    "consistent_kernel",
    "transformation_space",
    "extension_is_consistent",
    "witness_extension_consistent",
    "witness_factorization_gap",
    "WitnessFactorizationReport",
    "lie_generator_check",
]


@dataclass(frozen=True)
class UnitaryFamily:
    """A finite family of joint unitaries sharing one layout."""

    members: tuple[Operator, ...]
    description: str = ""

    def __post_init__(self) -> None:
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if members:
            dims = members[0].layout.dims
            for u in members[1:]:
                if u.layout.dims != dims:
                    raise ValueError("family members must share one layout")


@dataclass(frozen=True)
class ConsistencyVerdict:
    """Outcome of a consistency check.

    ``violating_pair`` is the (kernel element, unitary) pair realizing the
    worst residual, present only when a kernel element was actually tested.
    """

    consistent: bool
    worst_residual: float
    violating_pair: tuple[Operator, Operator] | None = None


def _keep_indices(layout: SpaceLayout, bath_factor: int) -> tuple[int, ...]:
    return tuple(i for i in range(layout.n_factors) if i != bath_factor)


def is_unitary_consistent(
    v: OperatorSubspace, u: Operator, bath_factor: int = 1
) -> ConsistencyVerdict:
    """Check that the reduced evolution of v under u is well defined.

    Every orthonormal kernel element X with vanishing bath trace must keep a
    vanishing bath trace after conjugation by u; the verdict records the worst
    Hilbert-Schmidt residual over the kernel basis.
    """
    if u.layout.dims != v.layout.dims:
        raise ValueError("unitary layout does not match the subspace layout")
    residual_u = u.unitarity_residual()
    if residual_u > v.tol.residual_tol:
        raise ValueError(f"operator is not unitary; ||U^dag U - 1|| = {residual_u:.3e}")
    kernel = kernel_of_partial_trace(v, bath_factor)
    keep = _keep_indices(v.layout, bath_factor)
    worst = 0.0
    pair: tuple[Operator, Operator] | None = None
    for x in kernel.basis:
        evolved = adjoint_action(u, x, tol=v.tol.residual_tol)
        residual = partial_trace(evolved, keep).hs_norm() / max(x.hs_norm(), 1e-300)
        if residual >= worst:
            worst = residual
            pair = (x, u)
    return ConsistencyVerdict(worst <= v.tol.residual_tol, worst, pair)


def is_family_consistent(
    v: OperatorSubspace, family: UnitaryFamily, bath_factor: int = 1
) -> ConsistencyVerdict:
    """Conjunction of per-unitary checks, reporting the worst violating pair."""
    worst = 0.0
    pair: tuple[Operator, Operator] | None = None
    for u in family.members:
        verdict = is_unitary_consistent(v, u, bath_factor)
        if verdict.worst_residual >= worst:
            worst = verdict.worst_residual
            if verdict.violating_pair is not None:
                pair = verdict.violating_pair
    return ConsistencyVerdict(worst <= v.tol.residual_tol, worst, pair)


def _ambient_trace_kernel(
    layout: SpaceLayout, tol: ToleranceConfig, bath_factor: int
) -> OperatorSubspace:
    """ker Tr_bath inside the full operator algebra of the layout."""
    n = layout.total_dim
    keep = _keep_indices(layout, bath_factor)
    cols = []
    for e in range(n * n):
        unit_vec = np.zeros(n * n, dtype=complex)
        unit_vec[e] = 1.0
        unit = Operator(layout, unvec(unit_vec, n))
        cols.append(vec(partial_trace(unit, keep).entries))
    t = np.column_stack(cols)
    _, s, vh = np.linalg.svd(t, full_matrices=True)
    scale = max(float(s[0]), 1.0) if s.size else 1.0
    rank = int(np.sum(s > tol.rank_cut * scale))
    basis = tuple(
        Operator(layout, unvec(vh.conj().T[:, i], n)) for i in range(rank, n * n)
    )
    return OperatorSubspace(layout, basis, basis, tol)


def consistent_kernel(
    family: UnitaryFamily,
    layout: SpaceLayout,
    tol: ToleranceConfig = DEFAULT_TOL,
    bath_factor: int = 1,
) -> OperatorSubspace:
    """Intersection of the conjugated trace kernels over {1} union the family.

    These are the operators whose reduced evolution vanishes under every
    family member (and under no evolution at all), computed by iterated
    subspace intersection.  Adding members can only shrink the result.
    """
    if not family.members:
        raise ValueError("consistent_kernel requires a nonempty family")
    ambient = _ambient_trace_kernel(layout, tol, bath_factor)
    current = ambient
    for u in family.members:
        if current.dim == 0:
            break
        conjugated = span_from_generators(
            [adjoint_action(u.dagger(), b, tol=tol.residual_tol) for b in ambient.basis],
            tol,
        )
        current = subspace_intersection(current, conjugated)
    return current


def transformation_space(
    v: OperatorSubspace, family: UnitaryFamily, bath_factor: int = 1
) -> OperatorSubspace:
    """The operators evolving exactly like their representatives in v.

    Returns v + (consistent kernel of the family); every basis element of the
    result is verified to evolve, under each family member, to the same
    reduced operator as its representative in v.
    """
    verdict = is_family_consistent(v, family, bath_factor)
    if not verdict.consistent:
        raise ValueError(
            f"subspace is not consistent for the family (worst residual {verdict.worst_residual:.3e})"
        )
    vhat = consistent_kernel(family, v.layout, v.tol, bath_factor)
    vprime = subspace_sum(v, vhat)
    from .maps import derive_map  # local import: maps depends on this module

    keep = _keep_indices(v.layout, bath_factor)
    for u in family.members:
        psi = derive_map(v, u, bath_factor=bath_factor)
        for a in vprime.basis:
            lhs = partial_trace(adjoint_action(u, a, tol=v.tol.residual_tol), keep)
            rhs = psi.apply(partial_trace(a, keep))
            residual = (lhs - rhs).hs_norm() / max(1.0, a.hs_norm())
            if residual > v.tol.residual_tol:
                raise RuntimeError(
                    f"transformation-space self-check failed with residual {residual:.3e}"
                )
    return vprime


def extension_is_consistent(
    v: OperatorSubspace, rho: Operator, family: UnitaryFamily, bath_factor: int = 1
) -> bool:
    """Would adjoining the state rho to v keep the family consistent?

    This is a per-state probe; it does not certify that v is maximal.
    """
    state_tol = max(v.tol.residual_tol, v.tol.psd_slack)
    if not rho.is_density(state_tol):
        raise ValueError("extension probe requires a density matrix")
    extended = span_from_generators(v.basis + (rho,), v.tol)
    return is_family_consistent(extended, family, bath_factor).consistent


def witness_extension_consistent(
    v: OperatorSubspace, family: UnitaryFamily, d_w: int, bath_factor: int = 1
) -> ConsistencyVerdict:
    """Consistency of v tensored with a full witness algebra.

    Builds v (x) B(H_W) on the extended layout and checks the family
    {U (x) 1_W}; for d_w = 1 this reduces to the plain family check.
    """
    if d_w < 1:
        raise ValueError(f"witness dimension must be >= 1, got {d_w}")
    if d_w == 1:
        return is_family_consistent(v, family, bath_factor)
    w_units = [matrix_unit(i, j, (d_w,)) for i in range(d_w) for j in range(d_w)]
    gens = [tensor(b, wu) for b in v.basis for wu in w_units]
    extended = span_from_generators(gens, v.tol)
    ident_w = identity((d_w,))
    lifted = UnitaryFamily(
        tuple(tensor(u, ident_w) for u in family.members),
        description=f"{family.description} (x) identity witness" if family.description else "",
    )
    return is_family_consistent(extended, lifted, bath_factor)


@dataclass(frozen=True)
class WitnessFactorizationReport:
    """Two evolutions of a system-witness state that need not agree."""

    evolved_true: Operator
    evolved_factored: Operator
    mismatch: float


def witness_factorization_gap(
    rho_s: Operator, rho_bw: Operator, tol: ToleranceConfig = DEFAULT_TOL
) -> WitnessFactorizationReport:
    """Compare joint evolution against the factored map on a witness.

    The joint state rho_s (x) rho_bw evolves under SWAP (x) 1 between system
    and bath; tracing out the bath gives the true system-witness state.  The
    factored route applies (reduced map) (x) identity to the reduced
    system-witness state.  For correlated rho_bw the two can differ; the
    mismatch is their trace distance.
    """
    state_tol = max(tol.residual_tol, tol.psd_slack)
    if not rho_s.is_density(state_tol):
        raise ValueError("rho_s must be a density matrix")
    if not rho_bw.is_density(state_tol):
        raise ValueError("rho_bw must be a density matrix")
    if rho_bw.layout.n_factors != 2:
        raise ValueError("rho_bw must live on a bath (x) witness layout")
    if rho_s.layout.n_factors != 1:
        raise ValueError("rho_s must live on a single-factor system layout")
    d_s = rho_s.dim
    d_b, d_w = rho_bw.layout.dims
    if d_s != d_b:
        raise ValueError("system and bath dimensions must match for the SWAP evolution")
    joint = tensor(rho_s, rho_bw)  # layout (S, B, W)
    u = tensor(swap_unitary(d_s), identity((d_w,)))
    evolved_true = partial_trace(adjoint_action(u, joint, tol=tol.residual_tol), keep=(0, 2))
    rho_b = partial_trace(rho_bw, keep=(0,))
    rho_w = partial_trace(rho_bw, keep=(1,))
    evolved_factored = tensor(rho_b, rho_w)
    mismatch = schatten_distance(evolved_true, evolved_factored, 1)
    return WitnessFactorizationReport(evolved_true, evolved_factored, mismatch)


def lie_generator_check(
    v: OperatorSubspace, k: Operator, order: int = 2, bath_factor: int = 1
) -> float:
    """Generator-level consistency probe for a one-parameter unitary family.

    For each kernel element X, nested commutators [K, X], [K, [K, X]], ... up
    to the given order must keep a vanishing bath trace.  Returns the worst
    normalized residual; 0 means the probe found no leakage.
    """
    if not k.is_hermitian(v.tol.residual_tol):
        raise ValueError("the family generator must be Hermitian")
    kernel = kernel_of_partial_trace(v, bath_factor)
    keep = _keep_indices(v.layout, bath_factor)
    worst = 0.0
    for x in kernel.basis:
        current = x
        for _ in range(order):
            current = Operator(
                v.layout, k.entries @ current.entries - current.entries @ k.entries
            )
            norm = current.hs_norm()
            if norm < 1e-300:
                break
            residual = partial_trace(current, keep).hs_norm() / norm
            worst = max(worst, residual)
    return worst
