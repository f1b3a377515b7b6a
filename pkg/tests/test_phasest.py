import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhebb.phasest import _kitaev_combine, _power_channels, ipea_shot, kitaev_phase_estimate, pe_resource_report
from qhebb.protocol import ProtocolParams, TrainingBatch, ensemble_state
from qhebb.qcore import random_state

K0, K1 = np.array([1.0, 0]), np.array([0, 1.0])
SKEW = TrainingBatch.of(K0, K0, K0, K1)  # spectrum {3/4, 1/4}


@pytest.mark.parametrize("batch,psi,want", [
    (TrainingBatch.of(K0), K0, 1.0),
    (TrainingBatch.of(K0, K1), K0, 0.5),
    (SKEW, K0, 0.75),
    (SKEW, K1, 0.25),
])
def test_exact_channel_estimates(batch, psi, want):
    for bits in (3, 4, 5):
        r = kitaev_phase_estimate(batch, psi, bits, exact_channel=True)
        assert abs(r.estimated_eigenvalue - want) <= 2 ** -bits
        assert 0 <= r.estimated_eigenvalue <= 1
        assert r.input_overlap == pytest.approx(1.0)


def test_bcqse_channel_estimates():
    params = ProtocolParams(math.pi, n=16)
    for psi, want in ((K0, 0.75), (K1, 0.25)):
        r = kitaev_phase_estimate(SKEW, psi, 5, params)
        assert abs(r.estimated_eigenvalue - want) <= 2 ** -5
        assert len(r.channel_errors) == 6
        # n_k = n 4^k keeps the error per power flat
        assert max(r.channel_errors) / min(r.channel_errors) < 1.1


@settings(max_examples=10)
@given(st.integers(0, 2 ** 32 - 1))
def test_spectrum_recovered_from_eigenvector_inputs(seed):
    rng = np.random.default_rng(seed)
    b = TrainingBatch(tuple(random_state(1, rng) for _ in range(3)))
    evals, evecs = np.linalg.eigh(ensemble_state(b))
    bits = 6
    est = [kitaev_phase_estimate(b, evecs[:, i], bits, exact_channel=True).estimated_eigenvalue for i in range(2)]
    np.testing.assert_allclose(sorted(est), evals, atol=2 ** -bits)


@given(st.floats(0, 0.999), st.integers(2, 8))
def test_kitaev_combine_inverts_doubling(x, m):
    fracs = [(2 ** k * x) % 1.0 for k in range(m)]
    assert abs(_kitaev_combine(fracs) - x) < 1e-9


@given(st.lists(st.floats(-0.04, 0.04), min_size=5, max_size=5), st.floats(0, 0.999))
def test_kitaev_combine_tolerates_small_errors(noise, x):
    # errors below 1/4 per bit never pick the wrong branch, so only the top bit's error
    # survives, halved at every step down
    fracs = [((2 ** k) * x + e) % 1.0 for k, e in zip(range(5), noise)]
    got = _kitaev_combine(fracs)
    assert min(abs(got - x), 1 - abs(got - x)) <= abs(noise[-1]) / 2 ** 4 + 1e-9


def test_superposition_statistics():
    c = np.array([0.6, 0.8])
    r = kitaev_phase_estimate(SKEW, c, 5, exact_channel=True, shots=1000, seed=7)
    hits = sum(abs(s - 0.75) < 1e-9 for s in r.samples)
    p = 0.36
    assert abs(hits - 1000 * p) <= 3 * math.sqrt(1000 * p * (1 - p))
    assert all(min(abs(s - 0.75), abs(s - 0.25)) < 1e-9 for s in r.samples)


def test_seeded_shots_are_deterministic():
    a = kitaev_phase_estimate(SKEW, np.array([0.6, 0.8]), 3, exact_channel=True, shots=50, seed=3)
    b = kitaev_phase_estimate(SKEW, np.array([0.6, 0.8]), 3, exact_channel=True, shots=50, seed=3)
    assert a.samples == b.samples


def test_post_measurement_state():
    params = ProtocolParams(math.pi, n=16)
    chans = _power_channels(SKEW, 5, params, exact_channel=False)
    rng = np.random.default_rng(11)
    from qhebb.qcore import channel_distance
    from qhebb.protocol import target_channel
    err = max(channel_distance(c, target_channel(SKEW, (2 ** k) * math.pi)) for k, c in enumerate(chans))
    for _ in range(20):
        lam, rho = ipea_shot(chans, np.array([0.6, 0.8]), rng)
        v = K0 if abs(lam - 0.75) < abs(lam - 0.25) else K1
        fid = float(np.real(v @ rho @ v))
        assert fid >= 1 - 10 * err


def test_warnings_for_noisy_channels():
    r = kitaev_phase_estimate(SKEW, K0, 4, ProtocolParams(math.pi, n=1))
    assert r.warnings


def test_mixed_input_warns_in_expectation_mode():
    r = kitaev_phase_estimate(SKEW, np.array([0.6, 0.8]), 3, exact_channel=True)
    assert any("overlap" in w for w in r.warnings)


def test_validation():
    with pytest.raises(ValueError):
        kitaev_phase_estimate(SKEW, K0, 0)
    with pytest.raises(ValueError):
        kitaev_phase_estimate(SKEW, np.array([1, 0, 0, 0]), 3)
    with pytest.raises(ValueError):
        kitaev_phase_estimate(SKEW, K0, 3, shots=0, exact_channel=True)


def test_resource_ratios():
    a, b = pe_resource_report(0.1, 2, 1), pe_resource_report(0.05, 2, 1)
    assert b["unitary_applications"] / a["unitary_applications"] == pytest.approx(2)
    assert b["n_per_application"] / a["n_per_application"] == pytest.approx(4)
    assert b["total_batches"] / a["total_batches"] == pytest.approx(8)
    assert a["learning_qubits"]["iterative"] == 1
    with pytest.raises(ValueError):
        pe_resource_report(1.5, 2, 1)


@given(st.floats(1e-3, 0.2))
def test_resource_ratio_within_rounding(eps):
    # ceil() moves each factor by less than one, which brackets the ratio
    a, b = pe_resource_report(eps, 3, 2), pe_resource_report(eps / 2, 3, 2)
    r = b["total_batches"] / a["total_batches"]
    u, v = 1 / eps, 1 / eps ** 2
    assert (2 * u) * (4 * v) / ((u + 1) * (v + 1)) <= r <= (2 * u + 1) * (4 * v + 1) / (u * v)
    assert b["qubit_estimate"] > a["qubit_estimate"]
