import numpy as np
import pytest

from beyondcp import (
    PAULI_I,
    PAULI_X,
    UnitaryFamily,
    bell_projector,
    consistent_kernel,
    extension_is_consistent,
    full_operator_space,
    identity,
    is_family_consistent,
    is_unitary_consistent,
    kernel_of_partial_trace,
    lie_generator_check,
    operator,
    partial_trace,
    span_from_generators,
    subspace_leq,
    subspace_sum,
    subspaces_equal,
    swap_unitary,
    tensor,
    transformation_space,
    witness_extension_consistent,
    witness_factorization_gap,
)
from beyondcp.catalog import (
    controlled_phase_family,
    controlled_phase_generator,
    gibbs_subspace,
)
from beyondcp.consistency import _ambient_trace_kernel
from beyondcp.config import DEFAULT_TOL
from beyondcp.operators import SpaceLayout, adjoint_action
from beyondcp.sampling import haar_unitary, random_density


def kraus_subspace(rho_b):
    """Product-form subspace B(H_S) (x) rho_b."""
    return span_from_generators([tensor(b, rho_b) for b in full_operator_space(2).basis])


@pytest.fixture
def gibbs_v():
    return gibbs_subspace()


@pytest.fixture
def phase_family():
    return controlled_phase_family()


# ---------------------------------------------------------------------------
# single-unitary consistency
# ---------------------------------------------------------------------------


def test_kraus_subspace_consistent_for_many_random_unitaries(rng):
    v = kraus_subspace(random_density(2, rng))
    for _ in range(50):
        verdict = is_unitary_consistent(v, haar_unitary((2, 2), rng))
        assert verdict.consistent
        assert verdict.worst_residual == 0.0  # kernel is empty


def test_gibbs_consistent_with_controlled_phase_grid(gibbs_v, phase_family):
    for u in phase_family.members:
        assert is_unitary_consistent(gibbs_v, u).consistent


def test_gibbs_inconsistent_with_swap(gibbs_v):
    # direct evaluation oracle: the kernel element 1 (x) X maps under SWAP to
    # X (x) 1 whose bath trace is 2X, clearly nonzero
    evolved = adjoint_action(swap_unitary(2), tensor(PAULI_I, PAULI_X))
    assert np.allclose(partial_trace(evolved, keep=0).entries, 2 * PAULI_X.entries)
    verdict = is_unitary_consistent(gibbs_v, swap_unitary(2))
    assert not verdict.consistent
    assert verdict.worst_residual > 0.5
    kernel_elem, unitary = verdict.violating_pair
    assert kernel_of_partial_trace(gibbs_v).contains(kernel_elem)
    assert np.allclose(unitary.entries, swap_unitary(2).entries)


def test_consistency_rejects_non_unitary(gibbs_v):
    with pytest.raises(ValueError, match="unitary"):
        is_unitary_consistent(gibbs_v, operator(np.diag([1.0, 2.0, 1.0, 1.0]), (2, 2)))


# ---------------------------------------------------------------------------
# family consistency
# ---------------------------------------------------------------------------


def test_family_consistency_kraus(rng):
    v = kraus_subspace(random_density(2, rng))
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(20)))
    assert is_family_consistent(v, family).consistent


def test_family_consistency_gibbs(gibbs_v, phase_family):
    assert is_family_consistent(gibbs_v, phase_family).consistent


def test_family_with_swap_breaks_gibbs(gibbs_v, phase_family):
    extended = UnitaryFamily(phase_family.members + (swap_unitary(2),))
    verdict = is_family_consistent(gibbs_v, extended)
    assert not verdict.consistent
    assert verdict.worst_residual > 0.5


def test_consistency_monotone_under_subfamilies(gibbs_v, phase_family):
    # consistency for the family implies consistency for each subfamily
    assert is_family_consistent(gibbs_v, phase_family).consistent
    for i in range(0, len(phase_family.members), 3):
        sub = UnitaryFamily(phase_family.members[: i + 1])
        assert is_family_consistent(gibbs_v, sub).consistent


# ---------------------------------------------------------------------------
# consistent kernel of the trace map
# ---------------------------------------------------------------------------


def test_consistent_kernel_identity_family():
    layout = SpaceLayout((2, 2))
    kernel = consistent_kernel(UnitaryFamily((identity((2, 2)),)), layout)
    assert kernel.dim == 4 * (4 - 1)  # d_S^2 (d_B^2 - 1)
    assert subspaces_equal(kernel, _ambient_trace_kernel(layout, DEFAULT_TOL, 1))


def test_consistent_kernel_many_random_unitaries_is_trivial(rng):
    layout = SpaceLayout((2, 2))
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(20)))
    assert consistent_kernel(family, layout).dim == 0


def test_consistent_kernel_swap_is_doubly_traceless():
    layout = SpaceLayout((2, 2))
    kernel = consistent_kernel(UnitaryFamily((swap_unitary(2),)), layout)
    # rank oracle: traceless on both margins leaves 16 - 4 - 4 + 1 = 9
    assert kernel.dim == 9
    for x in kernel.basis:
        assert partial_trace(x, keep=0).hs_norm() <= 1e-9
        assert partial_trace(x, keep=1).hs_norm() <= 1e-9


def test_consistent_kernel_shrinks_with_more_members(rng):
    layout = SpaceLayout((2, 2))
    members = tuple(haar_unitary((2, 2), rng) for _ in range(4))
    dims = []
    for i in range(1, 5):
        dims.append(consistent_kernel(UnitaryFamily(members[:i]), layout).dim)
    assert all(dims[i + 1] <= dims[i] for i in range(len(dims) - 1))
    for i in range(1, 5):
        smaller = consistent_kernel(UnitaryFamily(members[:i]), layout)
        bigger = consistent_kernel(UnitaryFamily(members[:1]), layout)
        assert subspace_leq(smaller, bigger)


def test_consistent_kernel_requires_members():
    with pytest.raises(ValueError):
        consistent_kernel(UnitaryFamily(()), SpaceLayout((2, 2)))


# ---------------------------------------------------------------------------
# transformation space
# ---------------------------------------------------------------------------


def test_transformation_space_kraus_unchanged(rng):
    v = kraus_subspace(random_density(2, rng))
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(8)))
    assert consistent_kernel(family, v.layout).dim == 0
    vprime = transformation_space(v, family)
    assert subspaces_equal(vprime, v)


def test_transformation_space_gibbs_extends(gibbs_v, phase_family):
    vprime = transformation_space(gibbs_v, phase_family)
    assert subspace_leq(gibbs_v, vprime)
    assert vprime.dim >= gibbs_v.dim


def test_transformation_space_identity_family(gibbs_v):
    family = UnitaryFamily((identity((2, 2)),))
    vprime = transformation_space(gibbs_v, family)
    expected = subspace_sum(gibbs_v, _ambient_trace_kernel(gibbs_v.layout, DEFAULT_TOL, 1))
    assert subspaces_equal(vprime, expected)


def test_transformation_space_rejects_inconsistent(gibbs_v):
    with pytest.raises(ValueError, match="not consistent"):
        transformation_space(gibbs_v, UnitaryFamily((swap_unitary(2),)))


# ---------------------------------------------------------------------------
# extension probes
# ---------------------------------------------------------------------------


def test_extension_trivial_for_states_already_inside(rng):
    v = kraus_subspace(identity(2) / 2)
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(5)))
    rho = tensor(random_density(2, rng), identity(2) / 2)
    assert extension_is_consistent(v, rho, family)


def test_extension_with_different_bath_state_fails(rng):
    rho_b = random_density(2, rng)
    v = kraus_subspace(rho_b)
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(20)))
    other_bath = random_density(2, rng)
    rho = tensor(random_density(2, rng), other_bath)
    assert not extension_is_consistent(v, rho, family)


def test_extension_gibbs_with_bell_state_regression(gibbs_v, phase_family):
    # Regression fixture computed by the direct kernel-plus-residual route:
    # the Bell state's bath trace is 1/2, covered in the subspace by 1/4, and
    # both evolve to 1/2 under every diagonal-phase unitary, so the extension
    # stays consistent.
    assert extension_is_consistent(gibbs_v, bell_projector(), phase_family) is True


def test_extension_rejects_non_state(gibbs_v, phase_family):
    with pytest.raises(ValueError):
        extension_is_consistent(gibbs_v, tensor(PAULI_X, PAULI_X), phase_family)


# ---------------------------------------------------------------------------
# witness extension
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("d_w", [1, 2, 3])
def test_witness_extension_kraus(rng, d_w):
    v = kraus_subspace(random_density(2, rng))
    family = UnitaryFamily(tuple(haar_unitary((2, 2), rng) for _ in range(6)))
    assert witness_extension_consistent(v, family, d_w).consistent


@pytest.mark.parametrize("d_w", [1, 2, 3])
def test_witness_extension_gibbs(gibbs_v, phase_family, d_w):
    assert witness_extension_consistent(gibbs_v, phase_family, d_w).consistent


def test_witness_dimension_one_reduces_to_plain_check(gibbs_v, phase_family):
    plain = is_family_consistent(gibbs_v, phase_family)
    lifted = witness_extension_consistent(gibbs_v, phase_family, 1)
    assert plain.consistent == lifted.consistent
    assert np.isclose(plain.worst_residual, lifted.worst_residual)


def test_witness_extension_rejects_bad_dimension(gibbs_v, phase_family):
    with pytest.raises(ValueError):
        witness_extension_consistent(gibbs_v, phase_family, 0)


# ---------------------------------------------------------------------------
# witness factorization gap
# ---------------------------------------------------------------------------


def test_witness_gap_product_state(rng):
    rho_bw = tensor(random_density(2, rng), random_density(2, rng))
    report = witness_factorization_gap(random_density(2, rng), rho_bw)
    assert report.mismatch <= 1e-12


def test_witness_gap_bell_state(rng):
    bell = bell_projector()
    report = witness_factorization_gap(random_density(2, rng), bell)
    # eigenvalue oracle: Bell - 1/4 has eigenvalues {3/4, -1/4, -1/4, -1/4},
    # so the normalized trace distance is (3/4 + 3/4) / 2 = 3/4
    eigs = np.linalg.eigvalsh(bell.entries - np.eye(4) / 4)
    assert np.isclose(np.abs(eigs).sum() / 2, 0.75)
    assert np.isclose(report.mismatch, 0.75, atol=1e-12)
    assert np.allclose(report.evolved_true.entries, bell.entries, atol=1e-12)
    assert np.allclose(report.evolved_factored.entries, np.eye(4) / 4, atol=1e-12)


def test_witness_gap_classically_correlated():
    rho_bw = operator(np.diag([0.5, 0.0, 0.0, 0.5]), (2, 2))
    report = witness_factorization_gap(identity(2) / 2, rho_bw)
    eigs = np.linalg.eigvalsh(rho_bw.entries - np.eye(4) / 4)
    assert np.isclose(np.abs(eigs).sum() / 2, 0.5)
    assert np.isclose(report.mismatch, 0.5, atol=1e-12)


def test_witness_gap_validates_inputs():
    with pytest.raises(ValueError):
        witness_factorization_gap(PAULI_X, bell_projector())
    with pytest.raises(ValueError):
        witness_factorization_gap(identity(2) / 2, identity(2) / 2)


# ---------------------------------------------------------------------------
# generator-level probe
# ---------------------------------------------------------------------------


def test_lie_generator_check_controlled_phase(gibbs_v):
    assert lie_generator_check(gibbs_v, controlled_phase_generator()) <= 1e-12


def test_lie_generator_check_detects_bad_generator(gibbs_v):
    # Y on the system fails to commute with the kernel's system parts while
    # X on the bath overlaps its bath factor, so the first commutator already
    # leaves the trace kernel.
    from beyondcp.operators import PAULI_Y

    bad = tensor(PAULI_Y, PAULI_X)
    assert lie_generator_check(gibbs_v, bad) > 0.1
