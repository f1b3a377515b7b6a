import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qhebb.circuit import compile_unitary, gate_count
from qhebb.cpswap import (CPSwapSpec, build_cpswap_circuit, count_report, cpswap_count_formula, exact_cpswap,
                          structural_counts, verify_cpswap)
from qhebb.gateset import GateCountVector


@pytest.mark.parametrize("n", [1, 2])
def test_exact_oracle(n):
    spec = CPSwapSpec(n, 0.3)
    np.testing.assert_allclose(exact_cpswap(spec), oracles.controlled(oracles.partial_swap(n, 0.3)), atol=1e-13)


def test_spec_validation():
    with pytest.raises(ValueError):
        CPSwapSpec(0, 0.1)
    with pytest.raises(ValueError):
        CPSwapSpec(1, 0.1, synthesis_eta=0)
    assert CPSwapSpec(3, 0.1).total_qubits == 8


def test_formula_values():
    assert cpswap_count_formula(1, 0, 10).as_tuple() == (12, 10, 20, 20, 18)
    assert cpswap_count_formula(2, 5, 10).as_tuple() == (54, 40, 20, 38, 66)
    with pytest.raises(ValueError):
        cpswap_count_formula(0, 1, 1)


@given(st.integers(1, 40), st.integers(0, 100), st.integers(0, 30))
def test_formula_is_affine(n, g, gc):
    # each extra qubit pair adds (12, 10, 0, 18, 18); each unit of g_eta adds (6, 4, 0, 0, 6)
    base = cpswap_count_formula(n, g, gc)
    assert cpswap_count_formula(n + 1, g, gc) - base == (12, 10, 0, 18, 18)
    assert cpswap_count_formula(n, g + 1, gc) - base == (6, 4, 0, 0, 6)


@pytest.mark.parametrize("theta", [0.0, math.pi / 4])
@pytest.mark.parametrize("n", [1, 2])
def test_exact_angles_compile_exactly(n, theta):
    cc = build_cpswap_circuit(CPSwapSpec(n, theta))
    v = verify_cpswap(cc)
    assert v["distance"] < 1e-9
    assert v["ancilla_leakage"] < 1e-9


@pytest.mark.parametrize("theta", [0.1, 0.37, -0.8])
def test_generic_angles_within_bound(theta):
    cc = build_cpswap_circuit(CPSwapSpec(1, theta, 1e-3))
    v = verify_cpswap(cc)
    assert v["distance"] <= cc.error_bound + 1e-9
    assert v["distance"] <= 2e-3 + 1e-9
    # the learning-|0> block is untouched: the second rotation is the exact inverse word
    assert v["control0_deviation"] < 1e-12
    assert v["is_unitary_deviation"] < 1e-12


def test_compiled_circuit_against_loop_oracle():
    # full-width comparison through the slow reference simulator, N = 1
    cc = build_cpswap_circuit(CPSwapSpec(1, 0.37, 1e-2))
    u = compile_unitary(cc.circuit)
    np.testing.assert_allclose(u, oracles.circuit_unitary(4, cc.circuit.gates), atol=1e-11)


def test_swap_parity_action_on_basis_inputs():
    # with ancilla |0> and learning |1>, symmetric pair states pick up e^{-i theta}, singlets e^{+i theta}
    theta = math.pi / 4
    cc = build_cpswap_circuit(CPSwapSpec(1, theta))
    u = compile_unitary(cc.circuit)
    singlet = (np.kron(np.kron([0, 1], [0, 1]), np.kron([1, 0], [1, 0])) -
               np.kron(np.kron([0, 1], [1, 0]), np.kron([0, 1], [1, 0]))) / np.sqrt(2)
    triplet = np.kron(np.kron([0, 1], [1, 0]), np.kron([1, 0], [1, 0]))
    ref = u @ triplet
    phase = np.vdot(triplet, ref)
    assert abs(abs(phase) - 1) < 1e-12
    out = u @ singlet
    rel = np.vdot(singlet, out) / phase
    assert abs(rel - np.exp(2j * theta)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_structural_counts_equal_built_counts(n):
    cc = build_cpswap_circuit(CPSwapSpec(n, 0.37, 1e-2))
    rot = [r.counts for r in cc.rotations]
    assert gate_count(cc.circuit) == structural_counts(n, rot)


def test_count_report_fields():
    cc = build_cpswap_circuit(CPSwapSpec(1, 0.37, 1e-2))
    rep = count_report(cc)
    assert rep["rotation_discrepancy"] == (0, 0, 0, 0, 0)
    assert rep["actual_counts"] == rep["structural_counts"]
    assert len(rep["formula_counts"]) == 5


def test_formula_matches_when_rotations_have_model_shape():
    g = 7
    shaped = GateCountVector(3 * g, 2 * g, 10, 0, 3 * g)
    for n in (1, 2, 3):
        assert structural_counts(n, [shaped, shaped]) == cpswap_count_formula(n, g, 10)


def test_compile_bound():
    with pytest.raises(ValueError):
        build_cpswap_circuit(CPSwapSpec(6, 0.1))


@settings(max_examples=8)
@given(st.floats(-1.5, 1.5))
def test_random_angles_respect_two_eta(theta):
    cc = build_cpswap_circuit(CPSwapSpec(1, theta, 1e-2))
    v = verify_cpswap(cc)
    assert v["distance"] <= 2e-2 + 1e-9
    assert v["control0_deviation"] < 1e-12
