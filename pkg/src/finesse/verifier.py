"""Routed-circuit equivalence up to a recorded output permutation.

Three methods, by circuit width: direct unitary comparison (n <= 8),
Haar-random statevector evolution (n <= 15), and exact Clifford tableau
comparison (any width).  A routed circuit may be wider than its reference;
the extra wires are ancillas that only explicit swaps may touch, and the
statevector path simulates on the reference-sized subspace by tracking
which physical wire carries which reference wire.
"""
from __future__ import annotations

import numpy as np

from . import gates
from .ir import CircuitDag, Gate
from .stabilizer import NonCliffordError, tableau_of

UNITARY_WIDTH_LIMIT = 8
STATEVECTOR_WIDTH_LIMIT = 15
DEFAULT_NUM_STATES = 8
DEFAULT_TOL = 1e-8


class WidthError(ValueError):
    pass


class VerifierError(ValueError):
    pass


def _normalize_perm(perm, n: int) -> list[int]:
    p = list(perm)
    if sorted(p) != list(range(n)):
        raise VerifierError("output permutation must be a bijection on the wires")
    return p


def _normalize_input_map(input_map, n_ref: int, n_routed: int) -> list[int]:
    if input_map is None:
        return list(range(n_ref))
    m = list(input_map)[:n_ref]
    if len(m) != n_ref or len(set(m)) != n_ref or not all(0 <= w < n_routed for w in m):
        raise VerifierError("input map must embed the reference wires injectively")
    return m


class _TrackedState:
    """Batched statevector over tracked slots; swaps relabel, never copy."""

    def __init__(self, num_batch: int, limit: int):
        self.state = np.ones((num_batch,), dtype=complex)  # zero-slot tensor
        self.slots = 0
        self.wire_slot: dict[int, int] = {}
        self.limit = limit

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray, wires: list[int], limit: int):
        """amplitudes: (2**k, batch) over big-endian wire order `wires`."""
        k = len(wires)
        ts = cls(amplitudes.shape[-1], limit)
        ts.state = np.asarray(amplitudes, dtype=complex).reshape((2,) * k + (-1,))
        ts.slots = k
        ts.wire_slot = {w: i for i, w in enumerate(wires)}
        return ts

    def _slot_for(self, wire: int) -> int:
        if wire in self.wire_slot:
            return self.wire_slot[wire]
        if self.slots >= self.limit:
            raise WidthError(f"tracked subspace exceeds {self.limit} qubits")
        self.state = np.stack([self.state, np.zeros_like(self.state)], axis=self.slots)
        self.wire_slot[wire] = self.slots
        self.slots += 1
        return self.wire_slot[wire]

    def apply_1q(self, mat: np.ndarray, wire: int):
        s = self._slot_for(wire)
        out = np.tensordot(mat, self.state, axes=(1, s))
        self.state = np.moveaxis(out, 0, s)

    def apply_2q(self, mat4: np.ndarray, w0: int, w1: int):
        s0, s1 = self._slot_for(w0), self._slot_for(w1)
        m = mat4.reshape(2, 2, 2, 2)
        out = np.tensordot(m, self.state, axes=([2, 3], [s0, s1]))
        self.state = np.moveaxis(out, [0, 1], [s0, s1])

    def relabel_swap(self, w0: int, w1: int):
        s0, s1 = self.wire_slot.get(w0), self.wire_slot.get(w1)
        if s0 is None and s1 is None:
            return
        if s0 is None:
            self.wire_slot[w0] = s1
            del self.wire_slot[w1]
        elif s1 is None:
            self.wire_slot[w1] = s0
            del self.wire_slot[w0]
        else:
            self.wire_slot[w0], self.wire_slot[w1] = s1, s0

    def apply_gate(self, g: Gate):
        if g.kind == "barrier":
            return
        if g.num_wires == 1:
            self.apply_1q(gates.one_qubit_matrix(g), g.wires[0])
            return
        if g.kind == "swap" and not g.mirrored:
            self.relabel_swap(g.wires[0], g.wires[1])
            return
        base = gates.two_qubit_matrix(
            Gate(id=g.id, kind=g.kind, wires=g.wires, params=g.params, n=g.n, matrix=g.matrix)
        )
        self.apply_2q(base, g.wires[0], g.wires[1])
        if g.mirrored:
            self.relabel_swap(g.wires[0], g.wires[1])


def _run(dag: CircuitDag, amplitudes: np.ndarray, wires: list[int], limit: int) -> _TrackedState:
    ts = _TrackedState.from_amplitudes(amplitudes, wires, limit)
    for g in dag.gates:
        ts.apply_gate(g)
    return ts


def _haar_states(n: int, num_states: int, seed) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0x44A2,)))
    z = rng.standard_normal((2**n, num_states)) + 1j * rng.standard_normal((2**n, num_states))
    return z / np.linalg.norm(z, axis=0, keepdims=True)


def statevector_equivalent(
    ref: CircuitDag,
    routed: CircuitDag,
    perm,
    num_states: int = DEFAULT_NUM_STATES,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    input_map=None,
) -> bool:
    """Evolve Haar-random inputs through both circuits and compare overlaps.

    Equivalence holds when |<psi_ref| P |psi_routed>| = 1 within tol for
    every sampled state, which is insensitive to global phase.
    """
    n_ref, n_routed = ref.num_qubits, routed.num_qubits
    if n_ref > STATEVECTOR_WIDTH_LIMIT:
        raise WidthError(f"reference width {n_ref} exceeds {STATEVECTOR_WIDTH_LIMIT}")
    if n_routed < n_ref:
        raise VerifierError("routed circuit narrower than the reference")
    p = _normalize_perm(perm, n_routed)
    in_map = _normalize_input_map(input_map, n_ref, n_routed)

    psi = _haar_states(n_ref, num_states, seed)
    ref_out = _run(ref, psi, list(range(n_ref)), STATEVECTOR_WIDTH_LIMIT)
    routed_out = _run(routed, psi, in_map, STATEVECTOR_WIDTH_LIMIT)

    # Align the reference tensor to wire order (its own swaps only relabel).
    ref_state = np.moveaxis(
        ref_out.state, [ref_out.wire_slot[w] for w in range(n_ref)], range(n_ref)
    )

    # Where did each reference wire's state end up, and does the claimed
    # permutation send it back home?
    end_wire = {s: w for w, s in routed_out.wire_slot.items()}
    axis_dest = [None] * routed_out.slots
    for s in range(routed_out.slots):
        claimed = p[end_wire[s]]
        if s < n_ref:
            if claimed >= n_ref:
                return False  # data parked on a claimed-ancilla wire
            axis_dest[s] = claimed
        else:
            if claimed < n_ref:
                return False  # ancilla content claimed as data
            axis_dest[s] = s
    if sorted(axis_dest[:n_ref]) != list(range(n_ref)):
        return False

    permuted = np.moveaxis(routed_out.state, list(range(routed_out.slots)),
                           axis_dest)
    # Grown ancilla slots must be back in |0>.
    for s in range(routed_out.slots - 1, n_ref - 1, -1):
        permuted = np.take(permuted, 0, axis=s)
    a = ref_state.reshape(-1, num_states)
    b = permuted.reshape(-1, num_states)
    overlaps = np.abs(np.sum(a.conj() * b, axis=0))
    return bool(np.all(np.abs(overlaps - 1.0) <= tol))


def _full_unitary(dag: CircuitDag) -> np.ndarray:
    n = dag.num_qubits
    basis = np.eye(2**n, dtype=complex)
    out = _run(dag, basis, list(range(n)), n)
    # Undo any residual swap relabeling so rows are wire-ordered.
    order = [out.wire_slot[w] for w in range(n)]
    tensor = np.moveaxis(out.state, order, range(n))
    return tensor.reshape(2**n, 2**n)


def unitary_equivalent(
    ref: CircuitDag,
    routed: CircuitDag,
    perm,
    tol: float = DEFAULT_TOL,
    input_map=None,
) -> bool:
    """Entrywise P . U_routed = e^{i phi} U_ref on the embedded block."""
    n_ref, n_routed = ref.num_qubits, routed.num_qubits
    if max(n_ref, n_routed) > UNITARY_WIDTH_LIMIT:
        raise WidthError(f"width exceeds {UNITARY_WIDTH_LIMIT} for direct unitary comparison")
    if n_routed < n_ref:
        raise VerifierError("routed circuit narrower than the reference")
    p = _normalize_perm(perm, n_routed)
    in_map = _normalize_input_map(input_map, n_ref, n_routed)

    u_ref = _full_unitary(ref)
    u_routed = _full_unitary(routed)

    t = u_routed.reshape((2,) * n_routed + (2,) * n_routed)
    t = np.moveaxis(t, list(range(n_routed)), p)  # apply P to the outputs
    # Embed reference inputs: data wires in reference order, ancillas at 0.
    in_order = in_map + [w for w in range(n_routed) if w not in in_map]
    t = np.moveaxis(t, [n_routed + w for w in in_order], [n_routed + i for i in range(n_routed)])
    for _ in range(n_routed - n_ref):
        t = np.take(t, 0, axis=t.ndim - 1)  # ancilla inputs at |0>
    block = t
    residual = 0.0
    for _ in range(n_routed - n_ref):  # claimed-ancilla outputs must stay |0>
        residual = max(residual, float(np.max(np.abs(np.take(block, 1, axis=n_ref)))))
        block = np.take(block, 0, axis=n_ref)
    a = block.reshape(2**n_ref, 2**n_ref)

    idx = np.unravel_index(int(np.argmax(np.abs(u_ref))), u_ref.shape)
    phase = a[idx] / u_ref[idx]
    if abs(abs(phase) - 1.0) > 10 * tol:
        return False
    return residual <= tol and bool(np.max(np.abs(a - phase * u_ref)) <= tol)


def clifford_equivalent(ref: CircuitDag, routed: CircuitDag, perm, input_map=None) -> bool:
    """Exact tableau comparison, any width; raises on non-Clifford gates."""
    n_ref, n_routed = ref.num_qubits, routed.num_qubits
    if n_routed < n_ref:
        raise VerifierError("routed circuit narrower than the reference")
    p = _normalize_perm(perm, n_routed)
    if input_map is not None and len(list(input_map)) == n_routed:
        in_map = _normalize_perm(input_map, n_routed)
    else:
        data = _normalize_input_map(input_map, n_ref, n_routed)
        spare = [w for w in range(n_routed) if w not in data]
        in_map = data + spare  # ancilla virtuals start on the unused wires

    t_ref = tableau_of(ref)
    t_routed = tableau_of(routed)
    out_wire = [0] * n_routed  # virtual -> output wire
    for wire, virt in enumerate(p):
        out_wire[virt] = wire

    def expected_row(is_z: bool, virt: int):
        x = np.zeros(n_routed, dtype=bool)
        z = np.zeros(n_routed, dtype=bool)
        if virt < n_ref:
            row = (n_ref if is_z else 0) + virt
            for j in range(n_ref):
                x[out_wire[j]] = t_ref.x[row, j]
                z[out_wire[j]] = t_ref.z[row, j]
            return x, z, bool(t_ref.sign[row])
        (z if is_z else x)[out_wire[virt]] = True
        return x, z, False

    for virt in range(n_routed):
        inw = in_map[virt]
        for is_z in (False, True):
            row = (n_routed if is_z else 0) + inw
            ex, ez, es = expected_row(is_z, virt)
            if not (
                np.array_equal(t_routed.x[row], ex)
                and np.array_equal(t_routed.z[row], ez)
                and bool(t_routed.sign[row]) == es
            ):
                return False
    return True
