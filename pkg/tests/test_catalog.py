import math

import numpy as np
import pytest
import scipy.linalg

from beyondcp import (
    PAULI_I,
    PAULI_X,
    PAULI_Z,
    check_state_spanned,
    identity,
    is_cp,
    map_from_kraus,
    map_residual,
    positive_domain_membership,
    tensor,
)
from beyondcp.catalog import (
    GibbsParams,
    RepolarizerParams,
    ball_pair,
    contractivity_ratio,
    controlled_phase_generator,
    controlled_phase_kraus,
    controlled_phase_map,
    controlled_phase_unitary,
    depolarizer,
    depolarizer_kraus,
    gibbs_hamiltonian,
    gibbs_state_closed_form,
    gibbs_subspace,
    interior_ball_pair,
    repolarizer,
    repolarizer_subspace,
    transpose_subspace,
    uhlmann_check,
)
from beyondcp.sampling import random_density


# ---------------------------------------------------------------------------
# thermal family
# ---------------------------------------------------------------------------


def test_gibbs_params_derived_values():
    p = GibbsParams(theta=1.0, beta=0.5)
    assert np.isclose(p.lam, math.sqrt(5))
    assert np.isclose(p.gam, 1.0)
    for theta in np.linspace(-3, 3, 13):
        q = GibbsParams(theta, 1.0)
        assert q.lam >= 1 / math.sqrt(2) - 1e-12
        assert q.gam >= 1 / math.sqrt(2) - 1e-12


def test_gibbs_hamiltonian_at_zero_coupling():
    assert np.allclose(gibbs_hamiltonian(0.0).entries, tensor(PAULI_X, PAULI_X).entries)


def test_gibbs_hamiltonian_square_identity():
    for theta in (-1.5, 0.3, 2.0):
        h = gibbs_hamiltonian(theta)
        expected = (2 * theta**2 + 1) * identity((2, 2)) + 2 * theta * tensor(
            PAULI_I, PAULI_X
        )
        assert np.allclose((h @ h).entries, expected.entries, atol=1e-12)


def test_gibbs_hamiltonian_spectrum_at_theta_one():
    eigs = np.linalg.eigvalsh(gibbs_hamiltonian(1.0).entries)
    assert np.allclose(sorted(eigs), sorted([-math.sqrt(5), -1, 1, math.sqrt(5)]))


def test_closed_form_matches_expm_oracle_on_grid():
    worst = 0.0
    for theta in np.linspace(-2, 2, 7):
        for beta in np.linspace(0.1, 2.0, 7):
            closed = gibbs_state_closed_form(GibbsParams(theta, beta))
            dense = scipy.linalg.expm(-beta * gibbs_hamiltonian(theta).entries)
            dense /= np.trace(dense)
            worst = max(worst, float(np.linalg.norm(closed.entries - dense)))
    assert worst <= 1e-10


def test_closed_form_zero_coupling_is_tanh_form():
    for beta in (0.4, 1.1):
        closed = gibbs_state_closed_form(GibbsParams(0.0, beta))
        expected = (identity((2, 2)) - math.tanh(beta) * tensor(PAULI_X, PAULI_X)) / 4
        assert np.allclose(closed.entries, expected.entries, atol=1e-12)


def test_closed_form_infinite_temperature():
    closed = gibbs_state_closed_form(GibbsParams(1.7, 0.0))
    assert np.allclose(closed.entries, np.eye(4) / 4)


def test_gibbs_subspace_state_spanned_with_closed_form_witness():
    witness = gibbs_state_closed_form(GibbsParams(1.0, 0.5))
    assert check_state_spanned(gibbs_subspace(), witness)


# ---------------------------------------------------------------------------
# controlled-phase evolution
# ---------------------------------------------------------------------------


def test_controlled_phase_generator_is_projector_like():
    k = controlled_phase_generator()
    assert np.allclose(k.entries, np.diag([1.0, 1.0, 1.0, -1.0]))
    assert np.allclose((k @ k).entries, np.eye(4))


def test_controlled_phase_unitary_matches_expm():
    for t in (0.3, 1.2, math.pi / 2):
        u = controlled_phase_unitary(t)
        dense = scipy.linalg.expm(-1j * t * controlled_phase_generator().entries)
        assert np.allclose(u.entries, dense, atol=1e-12)
        assert u.is_unitary(1e-12)


def test_controlled_phase_map_at_zero_is_identity():
    phi = controlled_phase_map(0.0)
    for b in phi.domain.basis:
        assert (phi.apply(b) - b).hs_norm() <= 1e-12


def test_controlled_phase_kraus_extension_is_cp_for_all_t():
    for t in np.linspace(0, 2 * math.pi, 9):
        e1, e2 = controlled_phase_kraus(t)
        completeness = (e1.dagger() @ e1 + e2.dagger() @ e2 - identity(2)).hs_norm()
        assert completeness <= 1e-12
        verdict = is_cp(map_from_kraus([e1, e2]))
        assert verdict.cp
        closed = controlled_phase_map(t)
        kraus_map = map_from_kraus([e1, e2])
        for b in closed.domain.basis:
            assert (kraus_map.apply(b) - closed.apply(b)).hs_norm() <= 1e-12


# ---------------------------------------------------------------------------
# printed subspaces
# ---------------------------------------------------------------------------


def test_transpose_subspace_dimension_and_sample_span(rng):
    from beyondcp import operator, span_from_generators, subspaces_equal

    printed = transpose_subspace()
    assert printed.dim == 10
    gens = []
    for _ in range(20):
        rho = random_density(2, rng)
        gens.append(tensor(rho, operator(rho.entries.T, 2)))
    assert subspaces_equal(printed, span_from_generators(gens))


def test_repolarizer_subspace_contains_weighted_element():
    v = repolarizer_subspace(0.1)
    assert v.dim == 10
    assert v.contains(tensor(PAULI_X, PAULI_I) + 10.0 * tensor(PAULI_I, PAULI_X))
    assert not v.contains(tensor(PAULI_X, PAULI_I) + 5.0 * tensor(PAULI_I, PAULI_X))


def test_printed_subspaces_are_dagger_closed_and_state_spanned():
    for v in (transpose_subspace(), repolarizer_subspace(0.3)):
        assert check_state_spanned(v)  # identity is one of the printed elements


def test_repolarizer_params_validation():
    with pytest.raises(ValueError):
        RepolarizerParams(0.0)
    with pytest.raises(ValueError):
        repolarizer(1.5)


# ---------------------------------------------------------------------------
# repolarizer / depolarizer pair
# ---------------------------------------------------------------------------


def test_depolarizer_kraus_matches_closed_form(rng):
    eps = 0.35
    kraus_map = map_from_kraus(depolarizer_kraus(eps))
    assert map_residual(kraus_map, depolarizer(eps)) <= 1e-12


def test_repolarizer_positive_domain_is_epsilon_ball():
    eps = 0.2
    phi = repolarizer(eps)
    for radius in np.linspace(0.0, 1.0, 21):
        rho = (PAULI_I + radius * PAULI_Z) * 0.5
        inside = positive_domain_membership(phi, rho)
        assert inside == (radius <= eps + 1e-9)


# ---------------------------------------------------------------------------
# contractivity
# ---------------------------------------------------------------------------


def test_contractivity_ratio_repolarizer_is_inverse_epsilon(rng):
    eps = 0.1
    phi = repolarizer(eps)
    for _ in range(10):
        r1, r2 = ball_pair(eps, np.random.default_rng(rng.integers(2**32)))
        ratio = contractivity_ratio(phi, r1, r2, p=1)
        assert ratio is not None
        assert abs(ratio - 1 / eps) <= 1e-6


def test_contractivity_ratio_identical_inputs_is_undefined():
    phi = repolarizer(0.1)
    rho = identity(2) / 2
    assert contractivity_ratio(phi, rho, rho, p=1) is None


def test_contractivity_ratio_identity_map(rng):
    from beyondcp import identity_map

    r1, r2 = random_density(2, rng), random_density(2, rng)
    assert np.isclose(contractivity_ratio(identity_map(2), r1, r2, 1), 1.0)


def test_cp_maps_are_trace_norm_contractive(rng):
    from beyondcp.sampling import random_kraus_channel

    for _ in range(10):
        channel = map_from_kraus(random_kraus_channel(2, 3, rng))
        r1, r2 = random_density(2, rng), random_density(2, rng)
        ratio = contractivity_ratio(channel, r1, r2, p=1)
        assert ratio is not None and ratio <= 1 + 1e-9


def test_contractivity_holds_for_every_p_on_repolarizer(rng):
    eps = 0.25
    phi = repolarizer(eps)
    r1, r2 = ball_pair(eps, rng)
    for p in (1, 2, math.inf):
        ratio = contractivity_ratio(phi, r1, r2, p)
        assert abs(ratio - 1 / eps) <= 1e-6


# ---------------------------------------------------------------------------
# relative-entropy comparison
# ---------------------------------------------------------------------------


def test_uhlmann_repolarizer_amplifies_relative_entropy(rng):
    eps = 0.1
    phi = repolarizer(eps)
    for _ in range(10):
        r1, r2 = interior_ball_pair(eps, rng)
        report = uhlmann_check(phi, r1, r2)
        assert report.ratio is not None
        assert report.ratio >= 1 / eps - 1e-6


def test_uhlmann_identical_inputs():
    phi = repolarizer(0.1)
    rho = (PAULI_I + 0.05 * PAULI_Z) * 0.5
    report = uhlmann_check(phi, rho, rho)
    assert abs(report.entropy_in) <= 1e-12
    assert abs(report.entropy_out) <= 1e-12
    assert report.ratio is None


def test_uhlmann_depolarizer_is_monotone(rng):
    phi = depolarizer(0.1)
    for _ in range(10):
        r1, r2 = random_density(2, rng), random_density(2, rng)
        report = uhlmann_check(phi, r1, r2)
        assert report.entropy_out <= report.entropy_in + 1e-9


def test_uhlmann_matches_eigenbasis_oracle_for_commuting_pair():
    eps = 0.5
    phi = repolarizer(eps)
    r1 = (PAULI_I + 0.2 * PAULI_Z) * 0.5
    r2 = (PAULI_I - 0.1 * PAULI_Z) * 0.5

    def scalar_entropy(p, q):
        return sum(
            pi * (math.log(pi) - math.log(qi)) for pi, qi in zip(p, q)
        )

    s_in_oracle = scalar_entropy([0.6, 0.4], [0.45, 0.55])
    report = uhlmann_check(phi, r1, r2)
    assert np.isclose(report.entropy_in, s_in_oracle, atol=1e-12)
    s_out_oracle = scalar_entropy([0.7, 0.3], [0.4, 0.6])  # Bloch radii scaled by 1/eps
    assert np.isclose(report.entropy_out, s_out_oracle, atol=1e-12)


def test_uhlmann_rejects_states_outside_positive_domain(rng):
    phi = repolarizer(0.1)
    with pytest.raises(ValueError, match="positive domain"):
        uhlmann_check(phi, random_density(2, rng), random_density(2, rng))
