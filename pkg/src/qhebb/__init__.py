"""Batched controlled state exponentiation: Clifford+T compilation, channel simulation,
Hebbian learning and phase estimation at desk scale."""

from .circuit import Circuit, compile_unitary, gate_count
from .cpswap import CPSwapSpec, build_cpswap_circuit, exact_cpswap, verify_cpswap
from .gateset import Gate, GateCountVector, GateErrorVector
from .hebbian import PatternSet, build_weight_matrix, encode_batch, quantum_hebbian_identity_check
from .phasest import kitaev_phase_estimate, pe_resource_report
from .protocol import (ErrorModelParams, ProtocolParams, ResourceConfig, SwapMode, TrainingBatch, error_model,
                       optimal_n, resource_report, run_bcqse, single_swap_channel, target_channel)
from .qcore import QuantumChannel, channel_distance
from .rzsynth import PrecisionUnreachable, synthesize_rz

__version__ = "0.1.0"
