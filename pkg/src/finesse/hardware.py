"""Fidelity-weighted coupling graphs and routing distance matrices."""
from __future__ import annotations

import heapq
import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from math import log
from pathlib import Path

import numpy as np

FIDELITY_FLOOR = 1e-10
FORMAT_VERSION = 1


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingMap:
    """Undirected physical-qubit graph with per-edge gate fidelity C_ij."""

    num_physical: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for i, j, c in self.edges:
            if i == j:
                raise TopologyError(f"self-loop on qubit {i}")
            if not (0 <= i < self.num_physical and 0 <= j < self.num_physical):
                raise TopologyError(f"edge ({i},{j}) out of range")
            if not 0.0 < c <= 1.0:
                raise TopologyError(f"fidelity {c} on ({i},{j}) outside (0, 1]")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise TopologyError(f"duplicate edge {key}")
            seen.add(key)
        if not self._connected(seen):
            raise TopologyError("coupling graph is disconnected")

    def _connected(self, keys) -> bool:
        if self.num_physical <= 1:
            return True
        adj = {i: [] for i in range(self.num_physical)}
        for i, j in keys:
            adj[i].append(j)
            adj[j].append(i)
        seen, stack = {0}, [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.num_physical

    @classmethod
    def from_pairs(cls, num_physical: int, pairs, fidelities=None) -> "CouplingMap":
        if fidelities is None:
            fidelities = [1.0] * len(list(pairs))
        edges = tuple(
            (min(i, j), max(i, j), float(c)) for (i, j), c in zip(pairs, fidelities)
        )
        return cls(num_physical, edges)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.num_physical)]
        for i, j, _ in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def fidelity(self) -> dict[tuple[int, int], float]:
        out = {}
        for i, j, c in self.edges:
            out[(i, j)] = c
            out[(j, i)] = c
        return out

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.fidelity

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted((min(i, j), max(i, j)) for i, j, _ in self.edges)


class EdgeWeights:
    """Natural-log infidelity weight per edge: L = -ln(max(C, 1e-10))."""

    def __init__(self, weights: dict[tuple[int, int], float]):
        self._w = dict(weights)
        for (i, j), v in list(weights.items()):
            self._w[(j, i)] = v

    def of(self, i: int, j: int) -> float:
        return self._w[(i, j)]

    def items(self):
        return sorted((k, v) for k, v in self._w.items() if k[0] < k[1])


def log_weights(cmap: CouplingMap) -> EdgeWeights:
    return EdgeWeights(
        {(min(i, j), max(i, j)): -log(max(c, FIDELITY_FLOOR)) for i, j, c in cmap.edges}
    )


def hop_distances(cmap: CouplingMap) -> np.ndarray:
    """All-pairs unweighted shortest paths via BFS from each node."""
    n = cmap.num_physical
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        dist[src, src] = 0
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for node in frontier:
                for nb in cmap.neighbors[node]:
                    if dist[src, nb] < 0:
                        dist[src, nb] = d
                        nxt.append(nb)
            frontier = nxt
    if np.any(dist < 0):
        raise TopologyError("coupling graph is disconnected")
    return dist


def fidelity_distances(cmap: CouplingMap, weights: EdgeWeights, k_swap: int) -> np.ndarray:
    """All-pairs Dijkstra with edge weight k_swap * L_ij.

    Ties break toward fewer hops, then the lexicographically smaller node
    sequence, so the matrix is reproducible across platforms.
    """
    if k_swap < 1:
        raise TopologyError("k_swap must be a positive integer")
    n = cmap.num_physical
    dist = np.zeros((n, n), dtype=float)
    for src in range(n):
        best: dict[int, tuple[float, int, tuple[int, ...]]] = {}
        heap = [(0.0, 0, (src,), src)]
        while heap:
            cost, hops, path, node = heapq.heappop(heap)
            if node in best:
                continue
            best[node] = (cost, hops, path)
            for nb in cmap.neighbors[node]:
                if nb not in best:
                    w = k_swap * weights.of(node, nb)
                    heapq.heappush(heap, (cost + w, hops + 1, path + (nb,), nb))
        if len(best) != n:
            raise TopologyError("coupling graph is disconnected")
        for j, (cost, _, _) in best.items():
            dist[src, j] = cost
    return dist


def blended_distances(d_hop: np.ndarray, d_fid: np.ndarray, beta: float) -> np.ndarray:
    """D' = D_hop + beta * D_fid, elementwise."""
    if d_hop.shape != d_fid.shape:
        raise TopologyError(f"shape mismatch {d_hop.shape} vs {d_fid.shape}")
    if beta < 0:
        raise TopologyError("beta must be nonnegative")
    return d_hop.astype(float) + beta * d_fid


@dataclass(frozen=True)
class DistanceSet:
    """Precomputed routing distances shared read-only across seeds."""

    d_hop: np.ndarray
    d_fid: np.ndarray
    d_blend: np.ndarray
    beta: float
    k_swap: int


def build_distance_set(cmap: CouplingMap, k_swap: int, beta: float = 1.0) -> DistanceSet:
    w = log_weights(cmap)
    d_hop = hop_distances(cmap)
    d_fid = fidelity_distances(cmap, w, k_swap)
    return DistanceSet(d_hop, d_fid, blended_distances(d_hop, d_fid, beta), beta, k_swap)


@dataclass(frozen=True)
class ModuleSpec:
    """One module's intra-module edges and their fidelity multiset.

    Fidelities are assigned deterministically: edges sorted lexicographically
    by endpoint pair receive fidelities in descending order.
    """

    qubits_per_module: int
    edges_per_module: tuple[tuple[int, int], ...]
    edge_fidelities: tuple[float, ...]
    name: str = "module"

    def __post_init__(self):
        if len(self.edge_fidelities) != len(self.edges_per_module):
            raise TopologyError("need one fidelity per edge")
        for i, j in self.edges_per_module:
            if not (0 <= i < self.qubits_per_module and 0 <= j < self.qubits_per_module) or i == j:
                raise TopologyError(f"bad module edge ({i},{j})")

    def assigned_edges(self) -> list[tuple[int, int, float]]:
        ordered = sorted((min(i, j), max(i, j)) for i, j in self.edges_per_module)
        fids = sorted(self.edge_fidelities, reverse=True)
        return [(i, j, c) for (i, j), c in zip(ordered, fids)]

    @property
    def worst_fidelity(self) -> float:
        return min(self.edge_fidelities)


def _ring_plus_chords(n: int, extra: int) -> tuple[tuple[int, int], ...]:
    edges = [(i, (i + 1) % n) for i in range(n)]
    chords = [
        (i, j)
        for i in range(n)
        for j in range(i + 2, n)
        if (i, j) not in edges and (j, i) not in edges and not (i == 0 and j == n - 1)
    ]
    return tuple(edges + chords[:extra])


# Per-edge 2q gate fidelities for the four evaluated module topologies,
# sorted highest to lowest.
TABLE3_MODULES = {
    "4q4e": ModuleSpec(4, _ring_plus_chords(4, 0), (0.996, 0.995, 0.995, 0.994), "4q4e"),
    "4q5e": ModuleSpec(4, _ring_plus_chords(4, 1), (0.994, 0.993, 0.987, 0.986, 0.985), "4q5e"),
    "4q6e": ModuleSpec(4, _ring_plus_chords(4, 2), (0.994, 0.993, 0.991, 0.988, 0.977, 0.975), "4q6e"),
    "5q7e": ModuleSpec(
        5, _ring_plus_chords(5, 2), (0.989, 0.980, 0.973, 0.968, 0.968, 0.962, 0.960), "5q7e"
    ),
}


def build_snail_fabric(spec: ModuleSpec, num_modules: int) -> CouplingMap:
    """Chain `num_modules` copies; adjacent modules share one boundary edge.

    The boundary link joins the last qubit of one module to the first of the
    next and carries the worse of the two modules' worst intra-module
    fidelities (fixture convention; the source fabrics are only pictorial).
    """
    if num_modules < 1:
        raise TopologyError("num_modules must be >= 1")
    n = spec.qubits_per_module
    edges: list[tuple[int, int, float]] = []
    for m in range(num_modules):
        base = m * n
        edges.extend((base + i, base + j, c) for i, j, c in spec.assigned_edges())
        if m + 1 < num_modules:
            edges.append((base + n - 1, base + n, spec.worst_fidelity))
    return CouplingMap(num_modules * n, tuple(edges))


def fabric_suite(num_qubits: int = 15) -> dict[str, CouplingMap]:
    """The four evaluated fabrics, sized to hold `num_qubits` qubits."""
    out = {}
    for name, spec in TABLE3_MODULES.items():
        modules = -(-num_qubits // spec.qubits_per_module)
        out[name] = build_snail_fabric(spec, modules)
    return out


def load_calibration(source) -> CouplingMap:
    """Backend calibration snapshot -> coupling map via C = 1 - error."""
    data = _load_json(source)
    _check_version(data)
    edges = []
    num = 0
    for rec in data.get("edges", []):
        i, j = int(rec["i"]), int(rec["j"])
        num = max(num, i + 1, j + 1)
        if "error" not in rec or rec["error"] is None:
            warnings.warn(f"edge ({i},{j}) has no calibration; dropped", stacklevel=2)
            continue
        e = float(rec["error"])
        if not 0.0 <= e < 1.0:
            raise TopologyError(f"error rate {e} on ({i},{j}) outside [0, 1)")
        edges.append((min(i, j), max(i, j), 1.0 - e))
    if "num_physical" in data:
        num = int(data["num_physical"])
    return CouplingMap(num, tuple(edges))


def load_topology(source) -> CouplingMap:
    """Topology fixture: a named Table-3 module spec or explicit edges."""
    if isinstance(source, str) and source in TABLE3_MODULES:
        return fabric_suite()[source]
    data = _load_json(source)
    _check_version(data)
    mod = data["module"]
    if isinstance(mod, str):
        spec = TABLE3_MODULES[mod]
    else:
        spec = ModuleSpec(
            int(mod["qubits"]),
            tuple((int(i), int(j)) for i, j in mod["edges"]),
            tuple(float(f) for f in mod["fidelities"]),
            mod.get("name", "module"),
        )
    return build_snail_fabric(spec, int(data["num_modules"]))


def _load_json(source) -> dict:
    if isinstance(source, dict):
        return source
    path = Path(source)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise TopologyError(f"malformed JSON in {path}: {exc}") from exc


def _check_version(data: dict):
    if int(data.get("format_version", FORMAT_VERSION)) != FORMAT_VERSION:
        raise TopologyError(f"unsupported format_version {data.get('format_version')}")
