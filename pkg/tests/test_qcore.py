import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from qhebb.qcore import (DimensionError, QuantumChannel, channel_compose, channel_distance, channel_from_unitary,
                         check_density, check_state, embed_operator, identity_channel, is_unitary,
                         matrix_exp_hermitian, num_qubits_of, partial_trace, phase_invariant_distance,
                         random_density, random_state, superop_distance, swap_operator, trace_norm)

seeds = st.integers(0, 2 ** 32 - 1)


def haar_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_num_qubits_rejects_non_powers():
    assert num_qubits_of(8) == 3
    for d in (0, 3, 6, 12):
        with pytest.raises(DimensionError):
            num_qubits_of(d)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_swap_operator_matches_loop_oracle(n):
    np.testing.assert_array_equal(swap_operator(n), oracles.swap_registers(n))


def test_swap_operator_rejects_empty_registers():
    with pytest.raises(ValueError):
        swap_operator(0)


def test_swap_exponential_closed_form():
    # S^2 = I gives exp(-i t S) = cos t I - i sin t S
    for n in (1, 2):
        np.testing.assert_allclose(matrix_exp_hermitian(swap_operator(n), 0.37), oracles.partial_swap(n, 0.37),
                                   atol=1e-13)


def test_matrix_exp_rejects_non_hermitian():
    with pytest.raises(ValueError):
        matrix_exp_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


@given(seeds, st.floats(-5, 5))
def test_matrix_exp_matches_expm(seed, t):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    from scipy.linalg import expm
    np.testing.assert_allclose(matrix_exp_hermitian(h, t), expm(-1j * t * h), atol=1e-9)


@given(seeds, st.permutations([0, 1, 2]).map(lambda p: p[:2]))
def test_embed_operator_matches_oracle(seed, targets):
    rng = np.random.default_rng(seed)
    op = haar_unitary(4, rng)
    np.testing.assert_allclose(embed_operator(op, targets, 3), oracles.embed(op, targets, 3), atol=1e-13)


@given(seeds)
def test_partial_trace_of_product(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(1, rng), random_density(2, rng)
    rho = np.kron(a, b)
    np.testing.assert_allclose(partial_trace(rho, [0], 3), a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, [1, 2], 3), b, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, [0], 3), oracles.trace_out_last(rho, 2, 4), atol=1e-12)


def test_partial_trace_keeps_qubit_order():
    rng = np.random.default_rng(1)
    a, b, c = (random_density(1, rng) for _ in range(3))
    rho = np.kron(np.kron(a, b), c)
    np.testing.assert_allclose(partial_trace(rho, [0, 2], 3), np.kron(a, c), atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, [1], 3), b, atol=1e-12)


def test_check_state_and_density():
    with pytest.raises(ValueError):
        check_state(np.array([1.0, 1.0]))
    with pytest.raises(DimensionError):
        check_state(np.ones(3) / np.sqrt(3))
    with pytest.raises(ValueError):
        check_density(np.diag([1.5, -0.5]))
    check_density(np.eye(2) / 2)


@given(seeds)
def test_phase_invariant_distance_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    d = 2 if seed % 2 else 4
    u = haar_unitary(d, rng)
    # mix in near-identical pairs so the small-distance regime is exercised too
    v = u @ haar_unitary(d, rng) if seed % 3 else u @ matrix_exp_hermitian(np.diag(rng.normal(size=d)), 1e-3)
    got = phase_invariant_distance(u, v)
    want = oracles.phase_distance_bruteforce(u, v)
    assert abs(got - want) < 1e-7


@given(seeds, st.floats(0, 2 * np.pi))
def test_phase_invariant_distance_ignores_global_phase(seed, phi):
    rng = np.random.default_rng(seed)
    u = haar_unitary(4, rng)
    assert phase_invariant_distance(u, np.exp(1j * phi) * u) < 1e-7


def test_phase_invariant_distance_on_isometries():
    rng = np.random.default_rng(3)
    u = haar_unitary(4, rng)[:, :2]
    v = np.exp(0.4j) * u
    assert phase_invariant_distance(u, v) < 1e-9
    w = haar_unitary(4, rng)[:, :2]
    assert abs(phase_invariant_distance(u, w) - oracles.phase_distance_bruteforce(u, w)) < 1e-7


@given(seeds)
def test_choi_of_unitary_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    u = haar_unitary(4, rng)
    ch = channel_from_unitary(u)
    np.testing.assert_allclose(ch.choi, oracles.choi_of_unitary(u), atol=1e-12)
    assert ch.is_cptp()


@given(seeds)
def test_apply_matches_conjugation(seed):
    rng = np.random.default_rng(seed)
    u = haar_unitary(4, rng)
    rho = random_density(2, rng)
    np.testing.assert_allclose(channel_from_unitary(u).apply(rho), u @ rho @ u.conj().T, atol=1e-12)


@given(seeds)
def test_composition_order(seed):
    rng = np.random.default_rng(seed)
    a, b = haar_unitary(2, rng), haar_unitary(2, rng)
    rho = random_density(1, rng)
    ab = channel_compose(channel_from_unitary(a), channel_from_unitary(b))
    np.testing.assert_allclose(ab.apply(rho), a @ b @ rho @ b.conj().T @ a.conj().T, atol=1e-12)


def test_kraus_channel_and_power():
    p = 0.3
    k0 = np.sqrt(1 - p) * np.eye(2)
    k1 = np.sqrt(p) * oracles.Z
    ch = QuantumChannel.from_kraus([k0, k1], 1)
    assert ch.is_cptp()
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_allclose(ch.power(3).apply(rho)[0, 1], 0.5 * (1 - 2 * p) ** 3)
    assert ch.power(0).choi.shape == (4, 4)
    assert channel_distance(ch.power(0), identity_channel(1)) < 1e-12


def test_non_trace_preserving_map_is_flagged(channel_ledger):
    with channel_ledger.exempted():
        ch = QuantumChannel.from_kraus([0.5 * np.eye(2)], 1)
    assert not ch.is_cptp()
    assert abs(ch.tp_deviation() - 0.75) < 1e-12


def test_distances_between_unitary_channels():
    # the Choi distance of two unitary channels is sqrt(1 - |<U,V>|^2/d^2)
    u = np.eye(2)
    v = np.diag([1, np.exp(0.3j)])
    a, b = channel_from_unitary(u), channel_from_unitary(v)
    ov = abs(np.trace(u.conj().T @ v)) / 2
    assert abs(channel_distance(a, b) - np.sqrt(1 - ov ** 2)) < 1e-12
    assert superop_distance(a, a) == 0
    assert superop_distance(a, b) > 0
    with pytest.raises(DimensionError):
        channel_distance(a, identity_channel(2))


@given(seeds)
def test_channel_distance_is_a_metric_sample(seed):
    rng = np.random.default_rng(seed)
    chans = [channel_from_unitary(haar_unitary(2, rng)) for _ in range(3)]
    d = channel_distance
    assert d(chans[0], chans[1]) == pytest.approx(d(chans[1], chans[0]), abs=1e-12)
    assert d(chans[0], chans[2]) <= d(chans[0], chans[1]) + d(chans[1], chans[2]) + 1e-12
    assert 0 <= d(chans[0], chans[1]) <= 1 + 1e-12


def test_trace_norm_of_nonhermitian():
    m = np.array([[0, 2], [0, 0]])
    assert trace_norm(m) == pytest.approx(2.0)


@given(seeds)
def test_random_helpers_are_valid(seed):
    rng = np.random.default_rng(seed)
    check_state(random_state(2, rng), tol=1e-12)
    check_density(random_density(2, rng, rank=1), tol=1e-12)
    assert is_unitary(haar_unitary(4, rng), tol=1e-12)
