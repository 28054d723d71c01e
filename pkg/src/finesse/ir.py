"""Circuit intermediate representation: gates, dependency DAG, layouts.

The DAG links each gate to its nearest successor per wire, which keeps
front-layer maintenance O(degree) during routing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ONE_QUBIT_KINDS = frozenset(
    {"h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u"}
)
TWO_QUBIT_KINDS = frozenset({"cx", "cz", "swap", "iswap", "ecr", "root_iswap", "unitary"})
PARAM_COUNTS = {"rx": 1, "ry": 1, "rz": 1, "u": 3}
CLIFFORD_KINDS = frozenset({"h", "s", "sdg", "x", "y", "z", "cx", "cz", "swap", "iswap"})

_UNITARY_TOL = 1e-10


class CircuitError(ValueError):
    """Malformed gate or circuit construction."""


@dataclass(frozen=True, eq=False)
class Gate:
    """One operation on 1 or 2 wires.

    ``kind`` is one of the named 1q/2q gates, ``root_iswap`` (with subdivision
    order ``n``), ``barrier``, or ``unitary`` (opaque 4x4 matrix).  A gate with
    ``mirrored=True`` executes SWAP times its base unitary on its wires and
    implicitly permutes the two outputs.
    """

    id: int
    kind: str
    wires: tuple[int, ...]
    params: tuple[float, ...] = ()
    n: int = 1
    matrix: np.ndarray | None = None
    mirrored: bool = False

    def __post_init__(self):
        if self.kind != "barrier" and self.kind not in ONE_QUBIT_KINDS | TWO_QUBIT_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        expected = 1 if self.kind in ONE_QUBIT_KINDS else 2
        if self.kind == "barrier":
            if len(self.wires) not in (1, 2):
                raise CircuitError("barrier nodes carry 1 or 2 wires")
        elif len(self.wires) != expected:
            raise CircuitError(f"{self.kind} expects {expected} wires, got {len(self.wires)}")
        if len(set(self.wires)) != len(self.wires):
            raise CircuitError(f"gate {self.kind} wires must be distinct: {self.wires}")
        if self.kind == "root_iswap" and (not isinstance(self.n, int) or self.n < 1):
            raise CircuitError(f"root_iswap order must be a positive integer, got {self.n}")
        if self.kind in PARAM_COUNTS and len(self.params) != PARAM_COUNTS[self.kind]:
            raise CircuitError(f"{self.kind} expects {PARAM_COUNTS[self.kind]} parameter(s)")
        if self.kind == "unitary":
            m = self.matrix
            if m is None or m.shape != (4, 4):
                raise CircuitError("unitary gates carry a 4x4 matrix")
            if np.max(np.abs(m @ m.conj().T - np.eye(4))) > _UNITARY_TOL:
                raise CircuitError("unitary gate matrix is not unitary to 1e-10")
        if self.mirrored and self.num_wires != 2:
            raise CircuitError("only 2-wire gates can be mirrored")

    @property
    def num_wires(self) -> int:
        return len(self.wires)

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def on_wires(self, wires: tuple[int, ...], new_id: int | None = None) -> "Gate":
        return Gate(
            id=self.id if new_id is None else new_id,
            kind=self.kind,
            wires=wires,
            params=self.params,
            n=self.n,
            matrix=self.matrix,
            mirrored=self.mirrored,
        )

    def __repr__(self):
        tag = f"{self.kind}"
        if self.kind == "root_iswap":
            tag += f"(n={self.n})"
        elif self.params:
            tag += "(" + ",".join(f"{p:.6g}" for p in self.params) + ")"
        if self.mirrored:
            tag = "mirror:" + tag
        return f"Gate#{self.id}[{tag} @ {list(self.wires)}]"


class CircuitDag:
    """Immutable gate list plus nearest-successor-per-wire dependency arcs."""

    def __init__(self, num_qubits: int, gates: Sequence[Gate]):
        if num_qubits < 0:
            raise CircuitError("num_qubits must be nonnegative")
        self.num_qubits = num_qubits
        self.gates = tuple(gates)
        ids = [g.id for g in self.gates]
        if len(set(ids)) != len(ids):
            raise CircuitError("gate ids must be unique")
        for g in self.gates:
            for w in g.wires:
                if not 0 <= w < num_qubits:
                    raise CircuitError(f"wire {w} out of range for {num_qubits} qubits")
        self._by_id = {g.id: g for g in self.gates}
        # Per-wire chain arcs; a successor sharing both wires appears twice.
        succ: dict[int, list[int]] = {g.id: [] for g in self.gates}
        pred_count: dict[int, int] = {g.id: 0 for g in self.gates}
        last_on_wire: dict[int, int] = {}
        for g in self.gates:
            for w in g.wires:
                if w in last_on_wire:
                    succ[last_on_wire[w]].append(g.id)
                    pred_count[g.id] += 1
                last_on_wire[w] = g.id
        self._succ = {k: tuple(v) for k, v in succ.items()}
        self._pred_count = pred_count

    def gate(self, gate_id: int) -> Gate:
        return self._by_id[gate_id]

    def successors(self, gate_id: int) -> tuple[int, ...]:
        return self._succ[gate_id]

    def predecessor_counts(self) -> dict[int, int]:
        return dict(self._pred_count)

    @property
    def edges(self) -> set[tuple[int, int]]:
        """Dependency arcs as (gate id, successor id) pairs, deduplicated."""
        return {(src, dst) for src, dsts in self._succ.items() for dst in dsts}

    def two_qubit_gates(self):
        return [g for g in self.gates if g.is_two_qubit]

    def reversed(self) -> "CircuitDag":
        """Gate order reversed; used for the layout-refining reverse pass."""
        return CircuitDag(self.num_qubits, list(reversed(self.gates)))

    def relabeled(self, wire_map: Sequence[int], num_qubits: int | None = None) -> "CircuitDag":
        """Reindex every wire w to wire_map[w], optionally widening the register."""
        n = self.num_qubits if num_qubits is None else num_qubits
        gates = [g.on_wires(tuple(wire_map[w] for w in g.wires)) for g in self.gates]
        return CircuitDag(n, gates)

    def isomorphic(self, other: "CircuitDag") -> bool:
        """Same width, gate sequence (kind/wires/params/n), and arc structure."""
        if self.num_qubits != other.num_qubits or len(self.gates) != len(other.gates):
            return False
        remap = {}
        for a, b in zip(self.gates, other.gates):
            if (a.kind, a.wires, a.params, a.n, a.mirrored) != (b.kind, b.wires, b.params, b.n, b.mirrored):
                return False
            remap[a.id] = b.id
        return {(remap[s], remap[d]) for s, d in self.edges} == other.edges

    def __len__(self):
        return len(self.gates)


def build_dag(num_qubits: int, ops: Iterable[tuple]) -> CircuitDag:
    """Convenience constructor from (kind, wires, params?, n?) tuples."""
    gates = []
    for i, op in enumerate(ops):
        kind, wires = op[0], tuple(op[1])
        params = tuple(op[2]) if len(op) > 2 else ()
        n = op[3] if len(op) > 3 else 1
        gates.append(Gate(id=i, kind=kind, wires=wires, params=params, n=n))
    return CircuitDag(num_qubits, gates)


def front_layer(dag: CircuitDag, executed: set[int]) -> list[Gate]:
    """Unexecuted gates whose predecessors are all executed, in gate order.

    ``executed`` must be downward-closed in the DAG order.
    """
    counts = dag.predecessor_counts()
    for gid in executed:
        for s in dag.successors(gid):
            if s not in executed:
                counts[s] -= 1
    return [g for g in dag.gates if g.id not in executed and counts[g.id] == 0]


def _descendant_closure(dag: CircuitDag, roots: Iterable[int]) -> set[int]:
    seen = set(roots)
    stack = list(seen)
    while stack:
        for s in dag.successors(stack.pop()):
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def extended_set_core(
    dag: CircuitDag,
    front: Sequence[Gate],
    size: int,
    remaining_preds: dict[int, int],
) -> list[Gate]:
    """Leveled lookahead BFS; gates join a level once all arcs into them are seen."""
    if size <= 0:
        return []
    counts = dict(remaining_preds)
    collected: list[tuple[int, int]] = []  # (bfs level, gate id)
    frontier = [g.id for g in front]
    level = 0
    while frontier and len(collected) < size:
        level += 1
        nxt = []
        for gid in frontier:
            for s in dag.successors(gid):
                counts[s] -= 1
                if counts[s] == 0:
                    nxt.append(s)
                    g = dag.gate(s)
                    if g.is_two_qubit:
                        collected.append((level, s))
        frontier = nxt
    collected.sort()
    return [dag.gate(gid) for _, gid in collected[:size]]


def extended_set(dag: CircuitDag, front: Sequence[Gate], size: int) -> list[Gate]:
    """Breadth-first 2q successors of the front layer, ordered (level, id)."""
    if size < 0:
        raise CircuitError("extended set size must be nonnegative")
    live = _descendant_closure(dag, [g.id for g in front])
    counts = {g.id: 0 for g in dag.gates}
    for gid in live:
        for s in dag.successors(gid):
            counts[s] += 1
    return extended_set_core(dag, front, size, counts)


def circuit_depth(dag: CircuitDag) -> int:
    """Longest path in gate count; barriers synchronize but do not count."""
    level: dict[int, int] = {}
    depth = 0
    for g in dag.gates:
        t = max((level.get(w, 0) for w in g.wires), default=0)
        if g.kind != "barrier":
            t += 1
        for w in g.wires:
            level[w] = t
        depth = max(depth, t)
    return depth


class Layout:
    """Bijection between virtual (logical plus ancilla) and physical wires."""

    __slots__ = ("_v2p", "_p2v")

    def __init__(self, virtual_to_physical: Sequence[int]):
        v2p = list(virtual_to_physical)
        n = len(v2p)
        if sorted(v2p) != list(range(n)):
            raise CircuitError("layout must be a bijection on 0..n-1")
        self._v2p = v2p
        self._p2v = [0] * n
        for v, p in enumerate(v2p):
            self._p2v[p] = v

    @classmethod
    def identity(cls, n: int) -> "Layout":
        return cls(range(n))

    def __len__(self):
        return len(self._v2p)

    def physical(self, virtual: int) -> int:
        return self._v2p[virtual]

    def virtual(self, physical: int) -> int:
        return self._p2v[physical]

    def swap_physical(self, p0: int, p1: int) -> None:
        v0, v1 = self._p2v[p0], self._p2v[p1]
        self._p2v[p0], self._p2v[p1] = v1, v0
        self._v2p[v0], self._v2p[v1] = p1, p0

    def copy(self) -> "Layout":
        return Layout(self._v2p)

    def to_list(self) -> list[int]:
        return list(self._v2p)

    def __eq__(self, other):
        return isinstance(other, Layout) and self._v2p == other._v2p

    def __repr__(self):
        return f"Layout({self._v2p})"
