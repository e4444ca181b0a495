"""Synthesis and analysis of linear maps on operator domains.

A subsystem map is stored as a coordinate matrix over an orthonormal basis of
its domain subspace, not in Kraus form, because maps that are not completely
positive have no Kraus form with positive weights.  Positivity testing is
sampling based and its verdicts are explicit about not being proofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .consistency import ConsistencyVerdict, is_unitary_consistent
from .operators import (
    Operator,
    adjoint_action,
    identity,
    matrix_unit,
    partial_trace,
    unvec,
    vec,
)
from .sampling import axis_grid_states, random_pure_state
from .subspaces import (
    OperatorSubspace,
    check_state_spanned,
    full_operator_space,
    span_from_generators,
    subspaces_equal,
)

__all__ = [
    "SubsystemMap",
    "MapDomainError",
    "InconsistentPairError",
    "CpVerdict",
    "PositivityScanResult",
    "PositiveDomainSample",
    "derive_map",
    "map_from_kraus",
    "map_from_action",
    "identity_map",
    "map_residual",
    "compose",
    "choi_matrix",
    "is_cp",
    "positivity_scan",
    "positive_domain_membership",
    "sample_positive_domain",
]


class MapDomainError(ValueError):
    """An operator fed to a map lies outside the map's domain subspace."""


class InconsistentPairError(ValueError):
    """A (subspace, unitary) pair does not define a reduced map."""

    def __init__(self, message: str, verdict: ConsistencyVerdict):
        super().__init__(message)
        self.verdict = verdict


@dataclass(frozen=True, eq=False)
class SubsystemMap:
    """A linear map on a domain subspace, as coordinates-to-vector matrix.

    ``coord_matrix`` has shape (N^2, d): column i is the vectorized image of
    the i-th domain basis operator.
    """

    domain: OperatorSubspace
    coord_matrix: np.ndarray
    provenance: str = ""

    def __post_init__(self) -> None:
        mat = np.array(self.coord_matrix, dtype=complex)
        n = self.domain.layout.total_dim
        if mat.shape != (n * n, self.domain.dim):
            raise ValueError(
                f"coord_matrix shape {mat.shape} does not match domain "
                f"(expected {(n * n, self.domain.dim)})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "coord_matrix", mat)

    @property
    def dim(self) -> int:
        return self.domain.layout.total_dim

    @property
    def tol(self) -> ToleranceConfig:
        return self.domain.tol

    def apply(self, a: Operator) -> Operator:
        coeffs, residual = self.domain.coordinates(a)
        if residual > self.tol.residual_tol * max(1.0, a.hs_norm()):
            raise MapDomainError(
                f"operator lies outside the map's domain (residual {residual:.3e})"
            )
        return Operator(self.domain.layout, unvec(self.coord_matrix @ coeffs, self.dim))

    def linear_operator(self) -> np.ndarray:
        """The map as an (N^2, N^2) matrix on vectorized operators.

        Acts as the zero map on the orthogonal complement of the domain, which
        makes two maps comparable independently of their stored bases.
        """
        return self.coord_matrix @ self.domain.basis_matrix().conj().T

    def is_trace_preserving(self, tol: float | None = None) -> bool:
        tol = self.tol.residual_tol if tol is None else tol
        for b in self.domain.basis:
            if abs(self.apply(b).trace() - b.trace()) > tol:
                return False
        return True

    def is_hermiticity_preserving(self, tol: float | None = None) -> bool:
        tol = self.tol.residual_tol if tol is None else tol
        for b in self.domain.basis:
            dag = b.dagger()
            if not self.domain.contains(dag):
                return False
            if (self.apply(dag) - self.apply(b).dagger()).hs_norm() > tol:
                return False
        return True

    # Linear combinations are used for analysis (for example Choi linearity);
    # they require the identical stored basis so coordinates line up.
    def _check_combinable(self, other: "SubsystemMap") -> None:
        if self.domain.dim != other.domain.dim or not np.allclose(
            self.domain.basis_matrix(), other.domain.basis_matrix()
        ):
            raise ValueError("maps must share the same stored domain basis")

    def __add__(self, other: "SubsystemMap") -> "SubsystemMap":
        self._check_combinable(other)
        return SubsystemMap(self.domain, self.coord_matrix + other.coord_matrix, "sum")

    def __sub__(self, other: "SubsystemMap") -> "SubsystemMap":
        self._check_combinable(other)
        return SubsystemMap(self.domain, self.coord_matrix - other.coord_matrix, "difference")

    def __mul__(self, scalar: complex) -> "SubsystemMap":
        return SubsystemMap(self.domain, self.coord_matrix * complex(scalar), "scaled")

    __rmul__ = __mul__


def derive_map(
    v: OperatorSubspace, u: Operator, bath_factor: int = 1
) -> SubsystemMap:
    """The unique reduced map induced by a consistent (subspace, unitary) pair.

    The domain is the span of the bath partial traces of v; the map sends the
    partial trace of each element of v to the partial trace of its conjugation
    by u, extended linearly.  Consistency of the pair is exactly
    well-definedness and is checked first; the construction then verifies the
    defining relation on every generator of v.
    """
    if v.dim == 0:
        raise ValueError("cannot derive a map from a zero-dimensional subspace")
    verdict = is_unitary_consistent(v, u, bath_factor)
    if not verdict.consistent:
        raise InconsistentPairError(
            "the subspace is not consistent with the unitary "
            f"(worst kernel residual {verdict.worst_residual:.3e}); "
            "the reduced map is not well defined",
            verdict,
        )
    spanned = check_state_spanned(v)
    keep = tuple(i for i in range(v.layout.n_factors) if i != bath_factor)
    projected = [partial_trace(b, keep) for b in v.basis]
    domain = span_from_generators(projected, v.tol)
    p = np.column_stack([domain.coordinates(x)[0] for x in projected])
    q = np.column_stack(
        [
            vec(partial_trace(adjoint_action(u, b, tol=v.tol.residual_tol), keep).entries)
            for b in v.basis
        ]
    )
    coord = q @ np.linalg.pinv(p, rcond=v.tol.rank_cut)
    phi = SubsystemMap(
        domain,
        coord,
        provenance=(
            f"derived from a consistent pair (subspace dim {v.dim}; "
            f"state-spanned check: {'verified' if spanned else 'not verified'})"
        ),
    )
    for g in v.generators + v.basis:
        reduced = partial_trace(g, keep)
        evolved = partial_trace(adjoint_action(u, g, tol=v.tol.residual_tol), keep)
        residual = (phi.apply(reduced) - evolved).hs_norm() / max(1.0, g.hs_norm())
        if residual > v.tol.residual_tol:
            raise RuntimeError(
                f"derived map fails its defining relation with residual {residual:.3e}"
            )
    return phi


def map_from_kraus(
    kraus: Sequence[Operator], tol: ToleranceConfig = DEFAULT_TOL
) -> SubsystemMap:
    """Full-domain map A -> sum_i M_i A M_i^dag from a trace-preserving Kraus list."""
    kraus = list(kraus)
    if not kraus:
        raise ValueError("at least one Kraus operator is required")
    layout = kraus[0].layout
    n = layout.total_dim
    acc = np.zeros((n, n), dtype=complex)
    for m in kraus:
        if m.layout.dims != layout.dims:
            raise ValueError("Kraus operators must share one layout")
        acc += m.entries.conj().T @ m.entries
    completeness = float(np.linalg.norm(acc - np.eye(n)))
    if completeness > tol.residual_tol:
        raise ValueError(
            f"Kraus list is not trace preserving; ||sum M^dag M - 1|| = {completeness:.3e}"
        )
    domain = full_operator_space(layout, tol)
    cols = []
    for b in domain.basis:
        out = np.zeros((n, n), dtype=complex)
        for m in kraus:
            out += m.entries @ b.entries @ m.entries.conj().T
        cols.append(vec(out))
    return SubsystemMap(domain, np.column_stack(cols), provenance=f"kraus({len(kraus)})")


def map_from_action(
    action: Callable[[np.ndarray], np.ndarray],
    domain: OperatorSubspace,
    provenance: str = "action",
) -> SubsystemMap:
    """Build a map by applying a matrix-level action to each domain basis element."""
    n = domain.layout.total_dim
    cols = [vec(np.asarray(action(b.entries), dtype=complex)) for b in domain.basis]
    mat = np.column_stack(cols) if cols else np.zeros((n * n, 0), dtype=complex)
    return SubsystemMap(domain, mat, provenance)


def identity_map(dims, tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    domain = full_operator_space(dims, tol)
    return SubsystemMap(domain, domain.basis_matrix(), provenance="identity")


def map_residual(phi1: SubsystemMap, phi2: SubsystemMap) -> float:
    """Relative Frobenius distance between two maps on the same domain."""
    if not subspaces_equal(phi1.domain, phi2.domain):
        raise ValueError("map_residual requires maps with equal domains")
    l1 = phi1.linear_operator()
    l2 = phi2.linear_operator()
    return float(np.linalg.norm(l1 - l2) / max(1.0, np.linalg.norm(l1)))


def compose(outer: SubsystemMap, inner: SubsystemMap) -> SubsystemMap:
    """Composition outer(inner(.)) for full-domain maps only.

    Experimental helper: composing maps on proper subspaces is deliberately
    unsupported because the intermediate operator can leave the outer domain
    and the chained physical interpretation needs extra care.
    """
    n = inner.dim
    if inner.domain.dim != n * n or outer.domain.dim != n * n:
        raise ValueError("compose is only defined for maps on the full operator algebra")
    l = outer.linear_operator() @ inner.linear_operator()
    return SubsystemMap(
        inner.domain, l @ inner.domain.basis_matrix(), provenance="composition"
    )


def choi_matrix(phi: SubsystemMap) -> Operator:
    """Unnormalized Choi operator sum_ij |i><j| (x) phi(|i><j|).

    Only defined when the domain is the full operator algebra; this package
    refuses to pick a CP convention for maps on proper subspaces.
    """
    n = phi.dim
    if phi.domain.dim != n * n:
        raise MapDomainError(
            "the Choi matrix is undefined for a map whose domain is a proper "
            "subspace of the operator algebra"
        )
    c = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            block = phi.apply(matrix_unit(i, j, phi.domain.layout)).entries
            c[i * n : (i + 1) * n, j * n : (j + 1) * n] = block
    return Operator(phi.domain.layout.concat(phi.domain.layout), c)


@dataclass(frozen=True)
class CpVerdict:
    """Complete-positivity verdict with the witnessing Choi eigenvalue."""

    cp: bool
    min_choi_eigenvalue: float
    choi_hermitian: bool


def is_cp(phi: SubsystemMap) -> CpVerdict:
    """CP iff the (unnormalized) Choi operator is positive within psd_slack."""
    c = choi_matrix(phi)
    hermitian = c.is_hermitian(phi.tol.residual_tol)
    min_eig = c.min_eigenvalue()
    return CpVerdict(hermitian and min_eig >= -phi.tol.psd_slack, min_eig, hermitian)


@dataclass(frozen=True)
class PositivityScanResult:
    """Outcome of a sampling scan for positivity violations.

    ``violation_found`` False only means no counterexample was found among the
    ``n_tested`` states; it is not a positivity proof.
    """

    violation_found: bool
    counterexample: Operator | None
    min_eigenvalue: float | None
    n_tested: int

    def summary(self) -> str:
        if self.violation_found:
            return (
                f"counterexample found: output eigenvalue {self.min_eigenvalue:.6g}"
            )
        return (
            f"no violation found among {self.n_tested} sampled states "
            "(not a positivity certificate)"
        )


def _domain_state_candidates(phi: SubsystemMap, n_samples: int, rng: np.random.Generator):
    """Yield domain states: a deterministic axis grid, then random states.

    Random pure states are projected into proper domains and kept only when
    the projection is again a state.  At most ``n_samples`` candidates are
    produced beyond the grid.
    """
    n = phi.dim
    full = phi.domain.dim == n * n
    state_tol = max(phi.tol.residual_tol, phi.tol.psd_slack)
    for rho in axis_grid_states(phi.domain.layout):
        if full or phi.domain.contains(rho):
            yield rho
    produced = 0
    attempts = 0
    budget = 50 * n_samples + 200
    while produced < n_samples and attempts < budget:
        attempts += 1
        rho = random_pure_state(phi.domain.layout, rng)
        if not full:
            projected = phi.domain.project(rho)
            hermitized = (projected + projected.dagger()) * 0.5
            tr = hermitized.trace().real
            if abs(tr) < 0.1:
                continue
            rho = hermitized / tr
            if not (phi.domain.contains(rho) and rho.is_density(state_tol)):
                continue
        produced += 1
        yield rho


def positivity_scan(
    phi: SubsystemMap, n_samples: int, seed: int
) -> PositivityScanResult:
    """Search for a domain state mapped to a non-positive operator.

    Evaluates the map on a deterministic axis grid plus uniformly sampled pure
    states (projected into proper domains), reporting the first state whose
    image has an eigenvalue below -psd_slack.
    """
    if n_samples <= 0:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    worst: float | None = None
    tested = 0
    for rho in _domain_state_candidates(phi, n_samples, rng):
        tested += 1
        min_eig = phi.apply(rho).min_eigenvalue()
        if worst is None or min_eig < worst:
            worst = min_eig
        if min_eig < -phi.tol.psd_slack:
            return PositivityScanResult(True, rho, min_eig, tested)
    return PositivityScanResult(False, None, worst, tested)


def positive_domain_membership(phi: SubsystemMap, rho: Operator) -> bool:
    """True iff rho is a domain state whose image is a state within slack."""
    if rho.layout.dims != phi.domain.layout.dims:
        return False
    if not phi.domain.contains(rho):
        return False
    if not rho.is_hermitian(phi.tol.residual_tol):
        return False
    if abs(rho.trace() - 1.0) > phi.tol.residual_tol:
        return False
    if rho.min_eigenvalue() < -phi.tol.psd_slack:
        return False
    return phi.apply(rho).min_eigenvalue() >= -phi.tol.psd_slack


@dataclass(frozen=True)
class PositiveDomainSample:
    """Accepted positive-domain states and the dimension they span."""

    members: tuple[Operator, ...]
    span_dim: int


def sample_positive_domain(
    phi: SubsystemMap, n: int, seed: int
) -> PositiveDomainSample:
    """Rejection-sample the positive domain and report its sampled span.

    Candidates are domain states; rejected candidates are retried as mixtures
    pulled toward the maximally mixed point whenever that point itself belongs
    to the positive domain.  An empty sample after the budget is reported as
    such (members empty, span 0) rather than raised.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    nn = phi.dim
    center = identity(phi.domain.layout) / nn
    center_ok = phi.domain.contains(center) and positive_domain_membership(phi, center)
    members: list[Operator] = []
    budget = 60 * n + 300
    for rho in _domain_state_candidates(phi, budget, rng):
        if len(members) >= n:
            break
        if positive_domain_membership(phi, rho):
            members.append(rho)
            continue
        if center_ok:
            for t in (0.5, 0.75, 0.9, 0.99, 0.999, 1.0):
                mixed = (1.0 - t) * rho + t * center
                if positive_domain_membership(phi, mixed):
                    members.append(mixed)
                    break
    if not members:
        return PositiveDomainSample((), 0)
    m = np.column_stack([vec(r.entries) for r in members])
    s = np.linalg.svd(m, compute_uv=False)
    span = int(np.sum(s > phi.tol.rank_cut * s[0])) if s.size else 0
    return PositiveDomainSample(tuple(members), span)
