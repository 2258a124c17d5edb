"""Correlation quantifiers: MI, CC, QD, concurrence, EoF, X-state closed forms."""
import numpy as np
import pytest

from ecsim import (AlphaState, MeasurementBasis, NumericsError, SystemParams,
                   XStructureError, ZeroProbabilityOutcomeError, alpha_ket,
                   analytic_evolution, bell_ket, build_bell_diagonal,
                   classical_correlations, concurrence, conditional_entropy,
                   correlation_record, correlation_records, density_from_ket,
                   entanglement_of_formation, entropy_bound_check,
                   eof_from_concurrence, ground_state,
                   minimize_conditional_entropy, mutual_information,
                   partial_trace, post_measurement_state, quantum_discord,
                   von_neumann_entropy, xstate_concurrence,
                   xstate_conditional_entropy_branches)
from helpers import (oracle_min_conditional_entropy, random_density_matrix,
                     random_pure_ket)

# frozen oracle values for the Bell-diagonal counterexample states
I_RHO_M = 1.078071905112638
CC_RHO_M = 0.531004406410719
D_RHO_M = 0.547067498701919
I_INCOH = 0.278071905112638

BELL = density_from_ket(bell_ket("psi+"))
RHO_M = build_bell_diagonal(0.8, 0.8, -0.6)
RHO_INCOH = build_bell_diagonal(0.0, 0.0, 0.6)


def random_product_state(rng):
    return np.kron(random_density_matrix(rng, 2), random_density_matrix(rng, 2))


# ---------------------------------------------------------------- MI

def test_mutual_information_bell():
    assert mutual_information(BELL) == pytest.approx(2.0, abs=1e-9)


def test_mutual_information_product_state(rng):
    for _ in range(5):
        assert mutual_information(random_product_state(rng)) < 1e-9


def test_mutual_information_bell_diagonal():
    assert mutual_information(RHO_M) == pytest.approx(I_RHO_M, abs=1e-9)
    assert mutual_information(RHO_M) == pytest.approx(1.078, abs=2e-3)


# ------------------------------------------------- measurement bases

def test_measurement_basis_orthonormal(rng):
    for _ in range(20):
        basis = MeasurementBasis(rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi))
        ket_a, ket_b = basis.vectors()
        assert abs(ket_a.conj() @ ket_b) < 1e-12
        proj_a, proj_b = basis.projectors()
        assert np.abs(proj_a + proj_b - np.eye(2)).max() < 1e-12


def test_post_measurement_bell_computational():
    cond, prob = post_measurement_state(BELL, MeasurementBasis(0.0, 0.0), "a")
    assert prob == pytest.approx(0.5, abs=1e-12)
    assert np.abs(cond - np.diag([0.0, 1.0])).max() < 1e-12


def test_post_measurement_product_state(rng):
    rho_a = random_density_matrix(rng, 2)
    rho = np.kron(rho_a, random_density_matrix(rng, 2))
    basis = MeasurementBasis(0.7, 1.9)
    for outcome in ("a", "b"):
        cond, _ = post_measurement_state(rho, basis, outcome)
        assert np.abs(cond - rho_a).max() < 1e-12


def test_post_measurement_probabilities_sum_to_one(rng):
    rho = random_density_matrix(rng)
    basis = MeasurementBasis(1.1, 4.2)
    _, pa = post_measurement_state(rho, basis, "a")
    _, pb = post_measurement_state(rho, basis, "b")
    assert pa + pb == pytest.approx(1.0, abs=1e-12)


def test_post_measurement_zero_probability_branch():
    # B is definitely |0>, so outcome 'a' of the theta = pi/2 basis (|1>) is empty
    with pytest.raises(ZeroProbabilityOutcomeError):
        post_measurement_state(ground_state(), MeasurementBasis(np.pi / 2, 0.0), "a")


# ------------------------------------------------ conditional entropy

def test_conditional_entropy_pure_product(rng):
    rho = np.kron(density_from_ket(random_pure_ket(rng, 2)),
                  density_from_ket(random_pure_ket(rng, 2)))
    for _ in range(5):
        basis = MeasurementBasis(rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi))
        assert conditional_entropy(rho, basis) < 1e-10


def test_conditional_entropy_bell_any_basis(rng):
    # conditional states of a Bell pair are pure for every projective basis
    for _ in range(10):
        basis = MeasurementBasis(rng.uniform(0, np.pi / 2), rng.uniform(0, 2 * np.pi))
        assert conditional_entropy(BELL, basis) < 1e-10


def test_conditional_entropy_incoherent_mixture():
    value = conditional_entropy(RHO_INCOH, MeasurementBasis(0.0, 0.0))
    assert value == pytest.approx(1.0 - I_INCOH, abs=1e-12)


def test_conditional_entropy_matches_definition(rng):
    # spot-check the optimizer kernel against the op-level route
    rho = random_density_matrix(rng)
    for theta, phi in [(0.3, 0.5), (1.2, 3.3), (0.0, 0.0), (np.pi / 2, 5.1)]:
        basis = MeasurementBasis(theta, phi)
        total = 0.0
        for outcome in ("a", "b"):
            cond, prob = post_measurement_state(rho, basis, outcome)
            total += prob * von_neumann_entropy(cond)
        assert conditional_entropy(rho, basis) == pytest.approx(total, abs=1e-12)


# ------------------------------------------- classical correlations / QD

def test_classical_correlations_bell():
    cc, _ = classical_correlations(BELL)
    assert cc == pytest.approx(1.0, abs=1e-7)


def test_classical_correlations_bell_diagonal_states():
    cc_incoh, _ = classical_correlations(RHO_INCOH)
    assert cc_incoh == pytest.approx(I_INCOH, abs=1e-6)
    cc_m, _ = classical_correlations(RHO_M)
    assert cc_m == pytest.approx(CC_RHO_M, abs=1e-6)
    assert cc_m == pytest.approx(0.531, abs=2e-3)


def test_quantum_discord_reference_states():
    assert quantum_discord(BELL) == pytest.approx(1.0, abs=1e-7)
    assert quantum_discord(RHO_M) == pytest.approx(D_RHO_M, abs=1e-6)
    assert quantum_discord(RHO_M) == pytest.approx(0.547, abs=2e-3)
    assert quantum_discord(RHO_INCOH) == pytest.approx(0.0, abs=1e-7)


def test_quantum_discord_pure_states(rng):
    # for pure states the discord equals the measured subsystem's entropy
    for _ in range(10):
        rho = density_from_ket(random_pure_ket(rng))
        s_b = von_neumann_entropy(partial_trace(rho, "B"))
        assert quantum_discord(rho) == pytest.approx(s_b, abs=1e-6)


def test_quantum_discord_zero_for_classical_on_b(rng):
    for _ in range(5):
        q = rng.uniform(0.1, 0.9)
        rho = (q * np.kron(random_density_matrix(rng, 2), np.diag([1.0, 0.0]))
               + (1 - q) * np.kron(random_density_matrix(rng, 2), np.diag([0.0, 1.0])))
        assert quantum_discord(rho) <= 1e-6


def test_discord_bounds_and_additivity(rng):
    states = np.stack([random_density_matrix(rng) for _ in range(1000)])
    records = correlation_records(np.zeros(len(states)), states)
    for rho, rec in zip(states, records):
        assert rec.mi >= 0.0
        assert rec.cc >= 0.0
        assert rec.qd >= -1e-7
        assert rec.qd <= von_neumann_entropy(partial_trace(rho, "B")) + 1e-7
        assert abs(rec.mi - (rec.qd + rec.cc)) <= 1e-6
        assert rec.eof == eof_from_concurrence(rec.concurrence)


def test_optimizer_against_independent_oracle(rng):
    for _ in range(10):
        rho = random_density_matrix(rng)
        fast, _ = minimize_conditional_entropy(rho)
        assert fast == pytest.approx(oracle_min_conditional_entropy(rho), abs=1e-5)


def test_minimize_returns_achieving_basis(rng):
    rho = random_density_matrix(rng)
    value, basis = minimize_conditional_entropy(rho)
    assert conditional_entropy(rho, basis) == pytest.approx(value, abs=1e-9)


# ------------------------------------------------------- concurrence / EoF

def test_concurrence_bell():
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-9)


def test_concurrence_product_pure(rng):
    for _ in range(5):
        rho = np.kron(density_from_ket(random_pure_ket(rng, 2)),
                      density_from_ket(random_pure_ket(rng, 2)))
        assert concurrence(rho) <= 1e-8


def test_concurrence_alpha_state():
    rho = density_from_ket(alpha_ket(0.25))
    # 2 sqrt(alpha(1-alpha)) = sqrt(3)/2
    assert concurrence(rho) == pytest.approx(0.8660254037844386, abs=1e-9)


def test_concurrence_pure_state_entropy_route(rng):
    # cross-check: C(psi) = sqrt(2 (1 - tr rho_A^2)) for pure two-qubit states
    for _ in range(10):
        rho = density_from_ket(random_pure_ket(rng))
        red = partial_trace(rho, "A")
        expected = np.sqrt(max(2.0 * (1.0 - np.real(np.trace(red @ red))), 0.0))
        assert concurrence(rho) == pytest.approx(expected, abs=1e-9)


def test_concurrence_rejects_garbage():
    junk = np.triu(np.full((4, 4), 1.0 + 0.5j))
    with pytest.raises(NumericsError):
        concurrence(junk)


def test_eof_endpoints_and_reference():
    assert eof_from_concurrence(1.0) == pytest.approx(1.0, abs=1e-12)
    assert eof_from_concurrence(0.0) == 0.0
    assert eof_from_concurrence(0.1) == pytest.approx(0.025266127727120, abs=1e-12)
    with pytest.raises(ValueError):
        eof_from_concurrence(1.5)


def test_eof_strictly_monotone_in_concurrence():
    grid = np.linspace(0.0, 1.0, 10_000)
    values = np.array([eof_from_concurrence(c) for c in grid])
    assert np.all(np.diff(values) > 0.0)


def test_entanglement_of_formation_bell():
    assert entanglement_of_formation(BELL) == pytest.approx(1.0, abs=1e-9)
    assert entanglement_of_formation(ground_state()) == 0.0


# ------------------------------------------------------ X-state closed forms

def test_xstate_branches_bell_initial():
    s1, s2 = xstate_conditional_entropy_branches(density_from_ket(bell_ket("psi+")))
    assert s1 == pytest.approx(0.0, abs=1e-12)
    assert s2 == pytest.approx(0.0, abs=1e-12)


def test_xstate_branches_symmetric_family_ordering():
    params = SystemParams(V=2.03, gamma=0.91)
    state = AlphaState(0.5, 0.0)
    for t in np.linspace(0.0, 8.0, 60):
        s1, s2 = xstate_conditional_entropy_branches(
            analytic_evolution(state, params, float(t)))
        assert s2 <= s1 + 1e-12


def test_xstate_branch_equals_equatorial_measurement():
    rho = analytic_evolution(AlphaState(0.3, 0.0), SystemParams(V=2.0, gamma=0.5), 0.8)
    _, s2 = xstate_conditional_entropy_branches(rho)
    # real coherence: the second branch is the theta = pi/4, phi = 0 measurement
    assert conditional_entropy(rho, MeasurementBasis(np.pi / 4, 0.0)) == \
        pytest.approx(s2, abs=1e-12)


def test_xstate_branches_match_general_optimizer(rng):
    params = SystemParams(V=2.03, gamma=0.91)
    for _ in range(12):
        state = AlphaState(rng.uniform(), rng.uniform(0, 2 * np.pi))
        rho = analytic_evolution(state, params, rng.uniform(0, 6))
        s1, s2 = xstate_conditional_entropy_branches(rho)
        general, _ = minimize_conditional_entropy(rho)
        assert min(s1, s2) == pytest.approx(general, abs=1e-6)


def test_xstate_branches_reject_non_x_states(rng):
    with pytest.raises(XStructureError):
        xstate_conditional_entropy_branches(RHO_M)  # doubly excited population
    with pytest.raises(XStructureError):
        xstate_concurrence(random_density_matrix(rng))


def test_xstate_concurrence_reference_cases():
    assert xstate_concurrence(density_from_ket(bell_ket("psi+"))) == \
        pytest.approx(1.0, abs=1e-12)
    assert xstate_concurrence(density_from_ket(alpha_ket(1.0))) == 0.0

    rho = analytic_evolution(AlphaState(0.0, 0.0), SystemParams(V=2.0, gamma=0.0), 1.0)
    assert xstate_concurrence(rho) == pytest.approx(concurrence(rho), abs=1e-9)


def test_xstate_concurrence_matches_general(rng):
    params = SystemParams(V=1.5, gamma=0.7)
    for _ in range(10):
        state = AlphaState(rng.uniform(), rng.uniform(0, 2 * np.pi))
        rho = analytic_evolution(state, params, rng.uniform(0, 5))
        assert xstate_concurrence(rho) == pytest.approx(concurrence(rho), abs=1e-9)


# ------------------------------------------------------- entropy bound

def test_entropy_bound_product_state(rng):
    assert abs(entropy_bound_check(random_product_state(rng))) <= 1e-7


def test_entropy_bound_bell_diagonal():
    assert entropy_bound_check(RHO_M) == pytest.approx(D_RHO_M - CC_RHO_M, abs=1e-6)
    assert entropy_bound_check(RHO_M) == pytest.approx(0.016, abs=1e-3)


def test_entropy_bound_nonnegative_on_symmetric_trajectory():
    params = SystemParams(V=2.03, gamma=0.91)
    state = AlphaState(0.5, 0.0)
    for t in np.linspace(0.0, 6.0, 25):
        rho = analytic_evolution(state, params, float(t))
        assert entropy_bound_check(rho) >= -1e-7


def test_hierarchy_on_alpha_family_demonstrated_region():
    # CC <= EoF <= QD along no-laser trajectories, with and without gamma, on
    # the region where discord dominance actually holds: real relative phases
    # and alpha away from the near-separable corner (verified to machine
    # precision on a 2000-point time grid during development)
    for v, gamma in ((2.0, 0.0), (2.03, 0.91)):
        params = SystemParams(V=v, gamma=gamma)
        for alpha in (0.0, 0.25, 0.5):
            for phi in (0.0, np.pi):
                times = np.linspace(0.0, 10.0, 30)
                rhos = analytic_evolution(AlphaState(alpha, phi), params, times)
                for rec in correlation_records(times, rhos):
                    assert rec.cc <= rec.qd + 1e-6
                    if rec.eof > 0.01:
                        assert rec.cc <= rec.eof + 1e-6


def test_hierarchy_fails_outside_demonstrated_region():
    # discord dominance does NOT extend to the whole alpha family: classical
    # correlations exceed the discord at early times for near-separable
    # preparations (even with real phase) and for complex relative phases
    rho = analytic_evolution(AlphaState(0.95, 0.0),
                             SystemParams(V=2.0, gamma=0.0), 0.10050251256281408)
    assert entropy_bound_check(rho) < -0.05
    cc, _ = classical_correlations(rho)
    assert cc > quantum_discord(rho) + 0.05

    rho = analytic_evolution(AlphaState(0.55, np.pi / 2),
                             SystemParams(V=2.03, gamma=0.91), 0.2512562814070352)
    assert entropy_bound_check(rho) < -0.03


# ------------------------------------------------------ record bundling

def test_correlation_record_bell():
    rec = correlation_record(BELL, t=0.0)
    assert rec.mi == pytest.approx(2.0, abs=1e-7)
    assert rec.cc == pytest.approx(1.0, abs=1e-7)
    assert rec.qd == pytest.approx(1.0, abs=1e-7)
    assert rec.concurrence == pytest.approx(1.0, abs=1e-9)
    assert rec.eof == pytest.approx(1.0, abs=1e-9)


def test_correlation_record_ground_state():
    rec = correlation_record(ground_state())
    for value in (rec.mi, rec.cc, rec.qd, rec.concurrence, rec.eof):
        assert abs(value) <= 1e-9


def test_correlation_record_bell_diagonal():
    rec = correlation_record(RHO_M)
    assert rec.mi == pytest.approx(I_RHO_M, abs=1e-6)
    assert rec.cc == pytest.approx(CC_RHO_M, abs=1e-6)
    assert rec.qd == pytest.approx(D_RHO_M, abs=1e-6)
    # Bell-diagonal concurrence is 2 max(lambda) - 1 = 0.6 here
    assert rec.concurrence == pytest.approx(0.6, abs=1e-9)
    assert rec.eof == pytest.approx(eof_from_concurrence(0.6), abs=1e-12)
    assert abs(rec.mi - (rec.qd + rec.cc)) <= 1e-6


def test_correlation_records_match_single_state_path(rng):
    states = np.stack([random_density_matrix(rng) for _ in range(6)])
    times = np.arange(6.0)
    records = correlation_records(times, states)
    for rho, rec in zip(states, records):
        single = correlation_record(rho, rec.t)
        assert rec.mi == pytest.approx(single.mi, abs=1e-12)
        assert rec.cc == pytest.approx(single.cc, abs=1e-12)
        assert rec.qd == pytest.approx(single.qd, abs=1e-12)
        assert rec.concurrence == pytest.approx(single.concurrence, abs=1e-12)
