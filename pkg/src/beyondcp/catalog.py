"""Built-in model systems, named maps, and inequality stress checks.

Contents: the thermal qubit-pair family with its closed-form states and
controlled-phase evolution, the transpose and repolarizing maps together with
their 10-dimensional swap-consistent subspaces, the depolarizing Kraus list,
and the contractivity / relative-entropy comparisons that the repolarizer
breaks.  Pauli matrices follow the standard convention fixed in
``operators``; every printed coefficient below depends on that choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .consistency import UnitaryFamily
from .maps import (
    SubsystemMap,
    map_from_action,
    positive_domain_membership,
)
from .operators import (
    Operator,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    gibbs_state,
    identity,
    relative_entropy,
    schatten_distance,
    tensor,
)
from .subspaces import OperatorSubspace, full_operator_space, span_from_generators

__all__ = [
    "GibbsParams",
    "RepolarizerParams",
    "gibbs_hamiltonian",
    "gibbs_state_closed_form",
    "gibbs_subspace",
    "controlled_phase_generator",
    "controlled_phase_unitary",
    "controlled_phase_family",
    "controlled_phase_map",
    "controlled_phase_kraus",
    "transpose_map",
    "transpose_subspace",
    "repolarizer",
    "depolarizer",
    "repolarizer_subspace",
    "depolarizer_kraus",
    "axis_states",
    "interior_ball_pair",
    "ball_pair",
    "contractivity_ratio",
    "uhlmann_check",
    "UhlmannReport",
]


# -- thermal qubit-pair family -------------------------------------------------


@dataclass(frozen=True)
class GibbsParams:
    """Parameters of the thermal family: coupling angle and inverse temperature."""

    theta: float
    beta: float

    @property
    def lam(self) -> float:
        """sqrt(2 theta^2 + 2 theta + 1), always >= 1/sqrt(2)."""
        return math.sqrt(2 * self.theta**2 + 2 * self.theta + 1)

    @property
    def gam(self) -> float:
        """sqrt(2 theta^2 - 2 theta + 1), always >= 1/sqrt(2)."""
        return math.sqrt(2 * self.theta**2 - 2 * self.theta + 1)


def gibbs_hamiltonian(theta: float) -> Operator:
    """H(theta) = theta (X + Z) (x) 1 + X (x) X on a qubit pair."""
    return theta * (tensor(PAULI_X, PAULI_I) + tensor(PAULI_Z, PAULI_I)) + tensor(
        PAULI_X, PAULI_X
    )


def gibbs_state_closed_form(p: GibbsParams) -> Operator:
    """Closed-form thermal state of gibbs_hamiltonian, six coefficient terms."""
    lam, gam = p.lam, p.gam
    beta = p.beta
    denom = math.cosh(beta * lam) + math.cosh(beta * gam)
    sl = math.sinh(beta * lam) / lam
    sg = math.sinh(beta * gam) / gam
    c_bath_x = (math.cosh(beta * lam) - math.cosh(beta * gam)) / denom
    c_z1 = -p.theta * (sl + sg) / denom
    c_x1 = -((p.theta + 1) * sl + (p.theta - 1) * sg) / denom
    c_xx = -((p.theta + 1) * sl - (p.theta - 1) * sg) / denom
    c_zx = -p.theta * (sl - sg) / denom
    state = (
        tensor(PAULI_I, PAULI_I)
        + c_bath_x * tensor(PAULI_I, PAULI_X)
        + c_z1 * tensor(PAULI_Z, PAULI_I)
        + c_x1 * tensor(PAULI_X, PAULI_I)
        + c_xx * tensor(PAULI_X, PAULI_X)
        + c_zx * tensor(PAULI_Z, PAULI_X)
    )
    return state / 4.0


_DEFAULT_THETAS = tuple(np.linspace(-2.0, 2.0, 5))
_DEFAULT_BETAS = tuple(np.linspace(0.1, 2.0, 5))


def gibbs_subspace(
    tol: ToleranceConfig = DEFAULT_TOL,
    thetas=_DEFAULT_THETAS,
    betas=_DEFAULT_BETAS,
) -> OperatorSubspace:
    """Span of the thermal family over a (theta, beta) grid; dimension 6."""
    gens = [
        gibbs_state(gibbs_hamiltonian(th), b, tol=tol.residual_tol)
        for th in thetas
        for b in betas
    ]
    return span_from_generators(gens, tol)


def controlled_phase_generator() -> Operator:
    """K = (1 + Z(x)1 + 1(x)Z - Z(x)Z) / 2, the controlled-phase generator."""
    return (
        tensor(PAULI_I, PAULI_I)
        + tensor(PAULI_Z, PAULI_I)
        + tensor(PAULI_I, PAULI_Z)
        - tensor(PAULI_Z, PAULI_Z)
    ) * 0.5


def controlled_phase_unitary(t: float) -> Operator:
    """U(t) = exp(-i t K); K squares to the identity so U = cos t - i sin t K."""
    k = controlled_phase_generator()
    ident = identity(k.layout)
    return math.cos(t) * ident + (-1j * math.sin(t)) * k


def controlled_phase_family(n: int = 16, t_max: float = 2 * math.pi) -> UnitaryFamily:
    """Finite sample grid of the one-parameter controlled-phase group.

    Continuous families are represented by grids; the generator-level probe in
    ``consistency.lie_generator_check`` complements this sampling.
    """
    ts = [(i + 1) * t_max / (n + 1) for i in range(n)]
    return UnitaryFamily(
        tuple(controlled_phase_unitary(t) for t in ts),
        description=f"controlled-phase one-parameter family sampled at {n} points",
    )


def _span_1_x_z(tol: ToleranceConfig) -> OperatorSubspace:
    return span_from_generators([PAULI_I, PAULI_X, PAULI_Z], tol)


def controlled_phase_map(t: float, tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    """Reduced map of the thermal family under U(t), on span{1, X, Z}.

    Closed form: A -> cos^2(t) A + sin^2(t)(A + Z A Z)/2 + (i/2) sin t cos t [A, Z].
    """
    z = PAULI_Z.entries
    c, s = math.cos(t), math.sin(t)

    def action(a: np.ndarray) -> np.ndarray:
        return c * c * a + 0.5 * s * s * (a + z @ a @ z) + 0.5j * s * c * (a @ z - z @ a)

    return map_from_action(action, _span_1_x_z(tol), provenance=f"controlled-phase(t={t})")


def controlled_phase_kraus(t: float) -> tuple[Operator, Operator]:
    """Kraus pair extending the controlled-phase reduced map to all of B(C^2).

    E1 = sqrt((1+cos t)/2) (cos(t/2) 1 - i sin(t/2) Z)
    E2 = sqrt((1-cos t)/2) (sin(t/2) 1 + i cos(t/2) Z)
    Completeness E1^dag E1 + E2^dag E2 = 1 holds identically.
    """
    half = t / 2.0
    w1 = math.sqrt(max(0.0, (1 + math.cos(t)) / 2))
    w2 = math.sqrt(max(0.0, (1 - math.cos(t)) / 2))
    e1 = w1 * (math.cos(half) * PAULI_I + (-1j * math.sin(half)) * PAULI_Z)
    e2 = w2 * (math.sin(half) * PAULI_I + (1j * math.cos(half)) * PAULI_Z)
    return e1, e2


# -- transpose and repolarizer constructions -----------------------------------


def transpose_map(tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    """The qubit transpose map A -> A^T; positive but not completely positive."""
    return map_from_action(
        lambda a: a.T.copy(), full_operator_space((2,), tol), provenance="transpose"
    )


def transpose_subspace(tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    """The 10-dimensional swap-consistent subspace inducing the transpose map."""
    i2, x, y, z = PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
    gens = [
        tensor(i2, i2),
        tensor(x, i2) + tensor(i2, x),
        tensor(y, i2) - tensor(i2, y),
        tensor(z, i2) + tensor(i2, z),
        tensor(x, x),
        tensor(y, y),
        tensor(z, z),
        tensor(x, y) - tensor(y, x),
        tensor(y, z) - tensor(z, y),
        tensor(z, x) + tensor(x, z),
    ]
    return span_from_generators(gens, tol)


@dataclass(frozen=True)
class RepolarizerParams:
    """Strength of the (de/re)polarizing pair; the positive domain is the epsilon ball."""

    epsilon: float

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")


def repolarizer(epsilon: float, tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    """A -> (1/e) A - ((1-e)/(2e)) Tr(A) 1: linear, TP, HP, not positive."""
    p = RepolarizerParams(epsilon)
    eye = np.eye(2, dtype=complex)

    def action(a: np.ndarray) -> np.ndarray:
        return a / p.epsilon - ((1 - p.epsilon) / (2 * p.epsilon)) * np.trace(a) * eye

    return map_from_action(
        action, full_operator_space((2,), tol), provenance=f"repolarizer({epsilon})"
    )


def depolarizer(epsilon: float, tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    """A -> e A + (1-e) Tr(A) 1/2, the inverse of the repolarizer."""
    p = RepolarizerParams(epsilon)
    eye = np.eye(2, dtype=complex)

    def action(a: np.ndarray) -> np.ndarray:
        return p.epsilon * a + (1 - p.epsilon) * np.trace(a) * eye / 2

    return map_from_action(
        action, full_operator_space((2,), tol), provenance=f"depolarizer({epsilon})"
    )


def repolarizer_subspace(
    epsilon: float, tol: ToleranceConfig = DEFAULT_TOL
) -> OperatorSubspace:
    """The 10-dimensional swap-consistent subspace inducing the repolarizer.

    Single-sided Pauli terms carry relative weight 1/epsilon on the bath side.
    """
    p = RepolarizerParams(epsilon)
    w = 1.0 / p.epsilon
    i2, x, y, z = PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
    gens = [
        tensor(i2, i2),
        tensor(x, i2) + w * tensor(i2, x),
        tensor(y, i2) + w * tensor(i2, y),
        tensor(z, i2) + w * tensor(i2, z),
        tensor(x, x),
        tensor(y, y),
        tensor(z, z),
        tensor(x, y) + tensor(y, x),
        tensor(y, z) + tensor(z, y),
        tensor(z, x) + tensor(x, z),
    ]
    return span_from_generators(gens, tol)


def depolarizer_kraus(epsilon: float) -> list[Operator]:
    """Kraus list of the depolarizer: sqrt((1+3e)/4) 1 and sqrt((1-e)/4) sigma_i."""
    p = RepolarizerParams(epsilon)
    w0 = math.sqrt(1 + 3 * p.epsilon) / 2
    wi = math.sqrt(1 - p.epsilon) / 2
    return [w0 * PAULI_I, wi * PAULI_X, wi * PAULI_Y, wi * PAULI_Z]


def axis_states(radius: float = 1.0) -> list[Operator]:
    """The six Bloch-axis states (1 +/- r sigma)/2 at the given radius."""
    states = []
    for sigma in (PAULI_X, PAULI_Y, PAULI_Z):
        for sign in (1.0, -1.0):
            states.append((PAULI_I + sign * radius * sigma) * 0.5)
    return states


def interior_ball_pair(
    epsilon: float, rng: np.random.Generator, radius_fraction: float = 0.5
) -> tuple[Operator, Operator]:
    """Two random full-rank states strictly inside the epsilon ball."""
    out = []
    for _ in range(2):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        r = epsilon * radius_fraction * rng.uniform(0.3, 1.0)
        bloch = (
            direction[0] * PAULI_X + direction[1] * PAULI_Y + direction[2] * PAULI_Z
        )
        out.append((PAULI_I + r * bloch) * 0.5)
    return out[0], out[1]


def ball_pair(epsilon: float, rng: np.random.Generator) -> tuple[Operator, Operator]:
    """Two distinct random states drawn from the closed epsilon ball."""
    out = []
    for _ in range(2):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        r = epsilon * rng.uniform(0.0, 1.0) ** (1.0 / 3.0)
        bloch = (
            direction[0] * PAULI_X + direction[1] * PAULI_Y + direction[2] * PAULI_Z
        )
        out.append((PAULI_I + r * bloch) * 0.5)
    return out[0], out[1]


# -- inequality checks ----------------------------------------------------------


def contractivity_ratio(
    phi: SubsystemMap, r1: Operator, r2: Operator, p: float
) -> float | None:
    """delta_p(phi r1, phi r2) / delta_p(r1, r2); None when the inputs coincide."""
    din = schatten_distance(r1, r2, p)
    dout = schatten_distance(phi.apply(r1), phi.apply(r2), p)
    if din == 0.0:
        return None
    return dout / din


@dataclass(frozen=True)
class UhlmannReport:
    """Relative entropies before and after a map, and their ratio."""

    entropy_in: float
    entropy_out: float
    ratio: float | None


def uhlmann_check(phi: SubsystemMap, r1: Operator, r2: Operator) -> UhlmannReport:
    """Compare S(r1 || r2) with S(phi r1 || phi r2).

    For trace-preserving CP maps the output entropy never exceeds the input
    entropy; the repolarizer instead amplifies it by at least 1/epsilon.
    Inputs must be full-rank states in the map's positive domain.
    """
    tol = phi.tol
    for name, r in (("r1", r1), ("r2", r2)):
        if not positive_domain_membership(phi, r):
            raise ValueError(f"{name} is not in the map's positive domain")
        if r.min_eigenvalue() <= tol.entropy_support_tol:
            raise ValueError(f"{name} must be full rank for the relative-entropy check")
    s_in = relative_entropy(r1, r2, tol)
    s_out = relative_entropy(phi.apply(r1), phi.apply(r2), tol)
    # A ratio against an input entropy at floating-point noise level is
    # meaningless; report it as undefined.
    if math.isinf(s_in) or abs(s_in) <= 10 * tol.entropy_support_tol:
        return UhlmannReport(s_in, s_out, None)
    return UhlmannReport(s_in, s_out, s_out / s_in)
