"""Dense complex operator algebra on small multipartite Hilbert spaces.

Operators are square complex matrices tagged with an ordered tensor-factor
layout.  The convention throughout the package: factor 0 is the system, factor
1 the bath, factor 2 (when present) a witness.  Vectorization is column
stacking (Fortran order) and the inner product is Hilbert-Schmidt,
``<A, B> = Tr(A^dag B)``; coordinates produced anywhere in the package are
interchangeable because both conventions are fixed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "SpaceLayout",
    "Operator",
    "operator",
    "identity",
    "zero",
    "matrix_unit",
    "ket_projector",
    "bell_projector",
    "swap_unitary",
    "PAULI_I",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "vec",
    "unvec",
    "tensor",
    "partial_trace",
    "trace_out",
    "adjoint_action",
    "gibbs_state",
    "schatten_distance",
    "relative_entropy",
]


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor-factor dimensions of a multipartite operator space."""

    dims: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be positive integers, got {dims}")
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(dims):
                raise ValueError("labels must match the number of factors")
            object.__setattr__(self, "labels", labels)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def concat(self, other: "SpaceLayout") -> "SpaceLayout":
        labels = None
        if self.labels is not None and other.labels is not None:
            labels = self.labels + other.labels
        return SpaceLayout(self.dims + other.dims, labels)

    def subset(self, keep: Sequence[int]) -> "SpaceLayout":
        labels = tuple(self.labels[i] for i in keep) if self.labels is not None else None
        return SpaceLayout(tuple(self.dims[i] for i in keep), labels)


def _as_layout(layout: SpaceLayout | Sequence[int] | int) -> SpaceLayout:
    if isinstance(layout, SpaceLayout):
        return layout
    if isinstance(layout, int):
        return SpaceLayout((layout,))
    return SpaceLayout(tuple(layout))


@dataclass(frozen=True, eq=False)
class Operator:
    """A square complex matrix together with its tensor-factor layout.

    Values are immutable: the entry array is copied on construction and marked
    read-only, so operators can be shared freely across threads.
    """

    layout: SpaceLayout
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        n = self.layout.total_dim
        if entries.shape != (n, n):
            raise ValueError(
                f"entries shape {entries.shape} does not match layout dimension {n}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    # -- basic queries ------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hs_norm(self) -> float:
        """Hilbert-Schmidt (Frobenius) norm."""
        return float(np.linalg.norm(self.entries))

    def hs_inner(self, other: "Operator") -> complex:
        """Hilbert-Schmidt inner product Tr(self^dag other)."""
        _check_same_layout(self, other)
        return complex(np.vdot(self.entries, other.entries))

    def dagger(self) -> "Operator":
        return Operator(self.layout, self.entries.conj().T)

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        h = (self.entries + self.entries.conj().T) / 2
        return float(np.linalg.eigvalsh(h)[0])

    # -- tolerance-parameterized predicates ---------------------------------

    def is_hermitian(self, tol: float = DEFAULT_TOL.residual_tol) -> bool:
        return float(np.linalg.norm(self.entries - self.entries.conj().T)) <= tol

    def is_unitary(self, tol: float = DEFAULT_TOL.residual_tol) -> bool:
        gram = self.entries.conj().T @ self.entries
        return float(np.linalg.norm(gram - np.eye(self.dim))) <= tol

    def is_density(self, tol: float = DEFAULT_TOL.residual_tol) -> bool:
        if not self.is_hermitian(tol):
            return False
        if abs(self.trace() - 1.0) > tol:
            return False
        return self.min_eigenvalue() >= -tol

    def unitarity_residual(self) -> float:
        gram = self.entries.conj().T @ self.entries
        return float(np.linalg.norm(gram - np.eye(self.dim)))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_layout(self, other)
        return Operator(self.layout, self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_layout(self, other)
        return Operator(self.layout, self.entries - other.entries)

    def __neg__(self) -> "Operator":
        return Operator(self.layout, -self.entries)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.entries * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.entries / complex(scalar))

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_layout(self, other)
        return Operator(self.layout, self.entries @ other.entries)


def _check_same_layout(a: Operator, b: Operator) -> None:
    if a.layout.dims != b.layout.dims:
        raise ValueError(f"layout mismatch: {a.layout.dims} vs {b.layout.dims}")


# -- constructors ------------------------------------------------------------


def operator(entries: np.ndarray, dims: Sequence[int] | int, labels=None) -> Operator:
    layout = _as_layout(dims)
    if labels is not None:
        layout = SpaceLayout(layout.dims, tuple(labels))
    return Operator(layout, np.asarray(entries, dtype=complex))


def identity(dims: Sequence[int] | int) -> Operator:
    layout = _as_layout(dims)
    return Operator(layout, np.eye(layout.total_dim, dtype=complex))


def zero(dims: Sequence[int] | int) -> Operator:
    layout = _as_layout(dims)
    n = layout.total_dim
    return Operator(layout, np.zeros((n, n), dtype=complex))


def matrix_unit(i: int, j: int, dims: Sequence[int] | int) -> Operator:
    """|i><j| in the computational basis of the given layout."""
    layout = _as_layout(dims)
    n = layout.total_dim
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return Operator(layout, m)


def ket_projector(amplitudes: Sequence[complex], dims: Sequence[int] | int) -> Operator:
    """Normalized pure-state projector |psi><psi| from raw amplitudes."""
    v = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot build a projector from the zero vector")
    v = v / norm
    return operator(np.outer(v, v.conj()), dims)


def bell_projector() -> Operator:
    """Projector onto (|00> + |11>)/sqrt(2) on a qubit pair."""
    return ket_projector([1, 0, 0, 1], (2, 2))


def swap_unitary(d: int) -> Operator:
    """The SWAP unitary exchanging two factors of equal dimension d."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            s[b * d + a, a * d + b] = 1.0
    return Operator(SpaceLayout((d, d)), s)


PAULI_I = identity(2)
PAULI_X = operator([[0, 1], [1, 0]], 2)
PAULI_Y = operator([[0, -1j], [1j, 0]], 2)
PAULI_Z = operator([[1, 0], [0, -1]], 2)


# -- vectorization -----------------------------------------------------------


def vec(entries: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, fixed project-wide."""
    return np.asarray(entries, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape((n, n), order="F")


# -- operations ---------------------------------------------------------------


def tensor(a: Operator, b: Operator) -> Operator:
    """Kronecker product with concatenated layouts."""
    return Operator(a.layout.concat(b.layout), np.kron(a.entries, b.entries))


def partial_trace(a: Operator, keep: Sequence[int] | int) -> Operator:
    """Trace out every factor not listed in ``keep``.

    The kept factors retain their original order; the trace of the result
    equals the trace of the input.
    """
    dims = a.layout.dims
    n = len(dims)
    if isinstance(keep, int):
        keep = (keep,)
    keep = tuple(sorted({int(k) for k in keep}))
    if not keep:
        raise ValueError("keep must name at least one factor")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"factor index out of range for {n} factors: {keep}")
    t = a.entries.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = "".join(letters[i] for i in range(n))
    col = "".join(letters[n + j] if j in keep else letters[j] for j in range(n))
    out = "".join(letters[i] for i in keep) + "".join(letters[n + j] for j in keep)
    reduced = np.einsum(f"{row}{col}->{out}", t)
    m = math.prod(dims[k] for k in keep)
    return Operator(a.layout.subset(keep), reduced.reshape(m, m))


def trace_out(a: Operator, drop: Sequence[int] | int) -> Operator:
    """Complement form of :func:`partial_trace`: trace out the listed factors."""
    if isinstance(drop, int):
        drop = (drop,)
    dropped = {int(d) for d in drop}
    keep = tuple(i for i in range(a.layout.n_factors) if i not in dropped)
    return partial_trace(a, keep)


def adjoint_action(u: Operator, a: Operator, tol: float = DEFAULT_TOL.residual_tol) -> Operator:
    """Unitary conjugation U A U^dag; refuses non-unitary U."""
    _check_same_layout(u, a)
    residual = u.unitarity_residual()
    if residual > tol:
        raise ValueError(
            f"adjoint_action requires a unitary operator; ||U^dag U - 1|| = {residual:.3e}"
        )
    return Operator(a.layout, u.entries @ a.entries @ u.entries.conj().T)


def gibbs_state(h: Operator, beta: float, tol: float = DEFAULT_TOL.residual_tol) -> Operator:
    """Thermal state exp(-beta H) / Tr exp(-beta H) of a Hermitian Hamiltonian.

    Computed by Hermitian eigendecomposition with the spectrum shifted so the
    exponentials never overflow; exact for Hermitian input.
    """
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    herm_residual = float(np.linalg.norm(h.entries - h.entries.conj().T))
    if herm_residual > tol:
        raise ValueError(
            f"gibbs_state requires a Hermitian Hamiltonian; ||H - H^dag|| = {herm_residual:.3e}"
        )
    w, v = np.linalg.eigh((h.entries + h.entries.conj().T) / 2)
    x = -beta * (w - (w.min() if beta >= 0 else w.max()))
    p = np.exp(x)
    p /= p.sum()
    return Operator(h.layout, (v * p) @ v.conj().T)


def schatten_distance(t1: Operator, t2: Operator, p: float) -> float:
    """Normalized Schatten distance 2^(-1/p) ||t1 - t2||_p via singular values.

    p = inf uses the largest singular value with normalization factor 1.
    """
    _check_same_layout(t1, t2)
    if not (p == math.inf or p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p!r}")
    s = np.linalg.svd(t1.entries - t2.entries, compute_uv=False)
    if s.size == 0:
        return 0.0
    if p == math.inf or np.isinf(p):
        return float(s[0])
    return float(2.0 ** (-1.0 / p) * (np.sum(s**p)) ** (1.0 / p))


def relative_entropy(
    t1: Operator, t2: Operator, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Relative entropy S(t1 || t2) = Tr t1 (log t1 - log t2), natural log.

    Evaluated in the eigenbases of both states with eigenvalues below
    ``entropy_support_tol`` treated as zero.  Returns ``math.inf`` when the
    support of t1 is not contained in the support of t2.
    """
    state_tol = max(tol.residual_tol, tol.psd_slack)
    for name, t in (("t1", t1), ("t2", t2)):
        if not t.is_density(state_tol):
            raise ValueError(f"relative_entropy requires density matrices; {name} is not one")
    _check_same_layout(t1, t2)
    cut = tol.entropy_support_tol
    p, u = np.linalg.eigh((t1.entries + t1.entries.conj().T) / 2)
    q, v = np.linalg.eigh((t2.entries + t2.entries.conj().T) / 2)
    p = np.clip(p, 0.0, None)
    q = np.clip(q, 0.0, None)
    overlap = np.abs(u.conj().T @ v) ** 2  # overlap[i, j] = |<u_i | v_j>|^2
    mass_outside = float(p @ overlap[:, q <= cut].sum(axis=1)) if np.any(q <= cut) else 0.0
    if mass_outside > tol.residual_tol:
        return math.inf
    p_supp = p > cut
    q_supp = q > cut
    s1 = float(np.sum(p[p_supp] * np.log(p[p_supp])))
    cross = float(p[p_supp] @ overlap[np.ix_(p_supp, q_supp)] @ np.log(q[q_supp]))
    return s1 - cross
