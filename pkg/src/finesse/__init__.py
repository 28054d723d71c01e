"""Frequency allocation and fidelity-aware transpilation for coupler fabrics."""

from .ir import CircuitDag, Gate, Layout, circuit_depth, extended_set, front_layer
from .qasm import parse_qasm, serialize_qasm
from .hardware import (
    CouplingMap,
    DistanceSet,
    ModuleSpec,
    blended_distances,
    build_distance_set,
    build_snail_fabric,
    fabric_suite,
    fidelity_distances,
    hop_distances,
    load_calibration,
    load_topology,
    log_weights,
)
from .weyl import BasisGate, basis_gate_count, gate_unitary, mirror, weyl_coordinates
from .router import RouterConfig, RoutingResult, lf_cost, run_trials, select_trial, transpile
from .verifier import clifford_equivalent, statevector_equivalent, unitary_equivalent

__version__ = "0.1.0"
