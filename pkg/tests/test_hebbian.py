import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qhebb.circuit import compile_unitary
from qhebb.hebbian import (PatternSet, amplitude_encode, build_weight_matrix, corrected_bcqse, encode_batch,
                           identity_phase_correction, phase_correction_unitary, quantum_hebbian_identity_check,
                           weight_target_channel)
from qhebb.protocol import ProtocolParams, ensemble_state, run_bcqse, target_channel
from qhebb.qcore import channel_distance, channel_from_unitary, op_norm, phase_invariant_distance


@st.composite
def pattern_sets(draw, dims=(2, 4, 8), max_m=6):
    d = draw(st.sampled_from(dims))
    m = draw(st.integers(1, max_m))
    rows = draw(st.lists(st.lists(st.sampled_from([-1, 1]), min_size=d, max_size=d), min_size=m, max_size=m))
    return PatternSet(np.array(rows))


@given(pattern_sets())
def test_weight_matrix_matches_loops(p):
    w = build_weight_matrix(p).w
    np.testing.assert_allclose(w, oracles.hebbian_loops(p.patterns.tolist()), atol=1e-15)
    np.testing.assert_array_equal(w, w.T)
    assert np.all(np.diag(w) == 0)


@given(pattern_sets())
def test_quantum_identity(p):
    assert quantum_hebbian_identity_check(p) <= 1e-12


@given(pattern_sets())
def test_negating_a_pattern_changes_nothing(p):
    flipped = PatternSet(p.patterns * np.where(np.arange(p.M) % 2, -1, 1)[:, None])
    np.testing.assert_allclose(build_weight_matrix(flipped).w, build_weight_matrix(p).w, atol=1e-15)


def test_amplitude_encode():
    np.testing.assert_allclose(amplitude_encode([1, -1, 1, 1]), np.array([1, -1, 1, 1]) / 2)
    with pytest.raises(ValueError):
        amplitude_encode([1, 0.5])
    with pytest.raises(ValueError):
        amplitude_encode([1, 1, 1])


def test_pattern_validation():
    with pytest.raises(ValueError, match="empty batch"):
        PatternSet(np.zeros((0, 4)))
    with pytest.raises(ValueError):
        PatternSet(np.array([[1, 2]]))
    with pytest.raises(ValueError):
        PatternSet(np.array([[1, 1, 1]]))


def test_lenient_patterns_report_residual():
    p = PatternSet.lenient([[0.3, -1.2, 0.5, 2.0], [1, 1, 1, 1]])
    np.testing.assert_allclose(np.linalg.norm(p.patterns, axis=1), 2.0)
    # the diagonal of rho is no longer flat, so the identity only holds approximately
    rho = ensemble_state(encode_batch(p))
    resid = quantum_hebbian_identity_check(p)
    assert resid == pytest.approx(np.abs(np.diag(rho) - 0.25).max())
    assert resid > 1e-3


def test_phase_correction_circuit():
    for dt, d in ((0.2, 4), (0.5, 2), (1.0, 8)):
        c = identity_phase_correction(dt, d, eta=1e-3)
        u = compile_unitary(c)
        assert phase_invariant_distance(u, np.diag([1, np.exp(1j * dt / d)])) <= 1e-3
        # eigenphase gap is dt/d
        ev = np.linalg.eigvals(u)
        gap = np.angle(ev[1] / ev[0]) if abs(u[0, 1]) < 0.1 else None
        assert gap is not None and abs(abs(gap) - dt / d) < 3e-3


def test_phase_correction_is_generator_shift():
    # exp(-i t |1><1| (x) rho) followed by the phase equals exp(-i t |1><1| (x) (rho - I/d))
    rng = np.random.default_rng(0)
    p = PatternSet(rng.choice([-1, 1], size=(3, 4)))
    b = encode_batch(p)
    t, d = 0.9, 4
    lhs = np.kron(phase_correction_unitary(t, d), np.eye(d)) @ oracles.controlled_exp(ensemble_state(b), t)
    rhs = oracles.controlled_exp(build_weight_matrix(p).w, t)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_skipping_the_correction_costs_one_over_d():
    for d in (2, 4, 8):
        delta_t = 0.1
        shift = delta_t * np.eye(d) / d
        assert op_norm(shift) / delta_t == pytest.approx(1 / d)


@settings(max_examples=5)
@given(pattern_sets(dims=(2, 4), max_m=3))
def test_corrected_bcqse_converges_to_weight_target(p):
    b = encode_batch(p)
    t = 0.8
    corr = [channel_distance(corrected_bcqse(b, ProtocolParams(t, n)), weight_target_channel(p, t)) for n in (4, 16)]
    plain = [channel_distance(run_bcqse(b, ProtocolParams(t, n)), target_channel(b, t)) for n in (4, 16)]
    # the correction commutes with everything, so the error is exactly that of the uncorrected protocol
    np.testing.assert_allclose(corr, plain, atol=1e-10)
    assert corr[1] <= corr[0] + 1e-12


def test_weight_target_equals_corrected_rho_target():
    p = PatternSet(np.array([[1, -1, 1, 1], [1, 1, -1, 1]]))
    b = encode_batch(p)
    shifted = channel_from_unitary(np.kron(phase_correction_unitary(1.3, 4), np.eye(4)))
    from qhebb.qcore import channel_compose
    lhs = channel_compose(shifted, target_channel(b, 1.3))
    assert channel_distance(lhs, weight_target_channel(p, 1.3)) < 1e-10
