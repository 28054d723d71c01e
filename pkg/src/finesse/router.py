"""SABRE-family routing: SABRE, FASST, MIRAGE, and FINESSE.

One bidirectional-pass engine drives all four algorithms.  SABRE and MIRAGE
score candidate swaps against hop-count distances, FASST and FINESSE against
the blended hop-plus-log-infidelity distances.  MIRAGE and FINESSE may fuse a
routable gate with an implicit swap (a mirror) when the substitution does not
hurt decomposition cost or, for FINESSE, the fidelity-weighted lookahead.
Relative scoring and a release valve follow the LightSABRE variant; the front
sum is unnormalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .hardware import CouplingMap, DistanceSet, EdgeWeights, build_distance_set, log_weights
from .ir import CircuitDag, Gate, Layout, circuit_depth, extended_set_core
from .weyl import BasisGate, gate_count, swap_count

ALGORITHMS = ("sabre", "fasst", "mirage", "finesse")
FIDELITY_AWARE = ("fasst", "finesse")
MIRRORING = ("mirage", "finesse")


class RoutingError(ValueError):
    pass


@dataclass(frozen=True)
class RouterConfig:
    algorithm: str = "sabre"
    w: float = 0.5                      # lookahead weight
    extended_size: int = 20
    beta: float = 1.0                   # fidelity-distance blend
    aggression: int = 2                 # mirror policy level, 0..3
    decay_enabled: bool = False
    decay_rate: float = 0.001
    decay_reset_interval: int = 5
    release_valve_threshold: int = 10
    num_seeds: int = 24
    post_selection: str = "native"      # native | fidelity
    basis: BasisGate = field(default_factory=lambda: BasisGate.root_iswap(2))

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise RoutingError(f"unknown algorithm {self.algorithm!r}")
        if self.post_selection not in ("native", "fidelity"):
            raise RoutingError(f"unknown post-selection {self.post_selection!r}")
        if not 0 <= self.aggression <= 3:
            raise RoutingError("aggression must be in 0..3")
        if self.num_seeds < 1 or self.extended_size < 0 or self.release_valve_threshold < 1:
            raise RoutingError("bad router configuration")

    @property
    def uses_blend(self) -> bool:
        return self.algorithm in FIDELITY_AWARE


def trial_rng(seed: int, trial: int, pass_index: int) -> np.random.Generator:
    """PCG64 stream for (trial, pass), split off the top-level seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(trial, pass_index))
    )


def heuristic_score(
    front: list[Gate],
    extended: list[Gate],
    layout: Layout,
    matrix: np.ndarray,
    w: float,
) -> float:
    """Unnormalized front sum plus W-weighted extended-set average."""
    total = 0.0
    for g in front:
        total += matrix[layout.physical(g.wires[0]), layout.physical(g.wires[1])]
    if extended:
        ext = 0.0
        for g in extended:
            ext += matrix[layout.physical(g.wires[0]), layout.physical(g.wires[1])]
        total += w * ext / len(extended)
    return float(total)


@dataclass
class PassResult:
    final_layout: Layout
    gates: list[Gate] | None
    swap_trace: list[tuple[int, int]]
    swaps: int
    mirrors: int
    valve_fires: int = 0


class _Pass:
    """One routing sweep over the DAG under a fixed scoring matrix."""

    def __init__(
        self,
        dag: CircuitDag,
        cmap: CouplingMap,
        dists: DistanceSet,
        weights: EdgeWeights,
        config: RouterConfig,
        rng: np.random.Generator,
        layout: Layout,
        emit: bool,
        allow_mirror: bool,
    ):
        self.dag = dag
        self.cmap = cmap
        self.dists = dists
        self.weights = weights
        self.config = config
        self.rng = rng
        self.layout = layout.copy()
        self.emit = emit
        self.allow_mirror = allow_mirror and config.algorithm in MIRRORING and config.aggression > 0
        self.matrix = dists.d_blend if config.uses_blend else dists.d_hop.astype(float)
        self.hop_float = dists.d_hop.astype(float)
        self.preds = dag.predecessor_counts()
        self.front: list[Gate] = []
        self.gates: list[Gate] | None = [] if emit else None
        self.next_id = 0
        self.swap_trace: list[tuple[int, int]] = []
        self.mirrors = 0
        self.stall = 0
        self.valve_fires = 0
        self.extended_cache: list[Gate] | None = None
        self.decay = np.ones(cmap.num_physical)
        self.steps_since_decay_reset = 0

    # bookkeeping ----------------------------------------------------
    def _emit_gate(self, g: Gate, wires: tuple[int, ...], mirrored: bool = False):
        if self.gates is None:
            return
        self.gates.append(
            Gate(
                id=self.next_id,
                kind=g.kind,
                wires=wires,
                params=g.params,
                n=g.n,
                matrix=g.matrix,
                mirrored=mirrored or g.mirrored,
            )
        )
        self.next_id += 1

    def _emit_swap(self, p0: int, p1: int):
        if self.gates is not None:
            self.gates.append(Gate(id=self.next_id, kind="swap", wires=(p0, p1)))
            self.next_id += 1

    def _physical(self, g: Gate) -> tuple[int, ...]:
        return tuple(self.layout.physical(w) for w in g.wires)

    def _release(self, gate_id: int):
        """Propagate completion; 1q gates and barriers are consumed eagerly."""
        queue = [gate_id]
        while queue:
            for succ in self.dag.successors(queue.pop()):
                self.preds[succ] -= 1
                if self.preds[succ] == 0:
                    g = self.dag.gate(succ)
                    if g.is_two_qubit:
                        self.front.append(g)
                    else:
                        self._emit_gate(g, self._physical(g))
                        queue.append(succ)
        self.extended_cache = None

    def _extended(self) -> list[Gate]:
        if self.extended_cache is None:
            self.extended_cache = extended_set_core(
                self.dag, self.front, self.config.extended_size, self.preds
            )
        return self.extended_cache

    # mirror policy --------------------------------------------------
    def _mirror_decision(self, g: Gate, p0: int, p1: int) -> bool:
        if not self.allow_mirror:
            return False
        if self.config.aggression == 3:
            return True
        k_orig = gate_count(g, self.config.basis)
        k_mirr = gate_count(replace(g, mirrored=not g.mirrored), self.config.basis)
        # Score the layouts the gate's successors will actually see: treat g
        # as executed (consuming any 1q gates it unblocks) before comparing.
        preds = dict(self.preds)
        rest = [f for f in self.front if f.id != g.id]
        queue = [g.id]
        while queue:
            for s in self.dag.successors(queue.pop()):
                preds[s] -= 1
                if preds[s] == 0:
                    nxt = self.dag.gate(s)
                    if nxt.is_two_qubit:
                        rest.append(nxt)
                    else:
                        queue.append(s)
        rest.sort(key=lambda f: f.id)
        extended = extended_set_core(self.dag, rest, self.config.extended_size, preds)
        score_now = heuristic_score(rest, extended, self.layout, self.matrix, self.config.w)
        self.layout.swap_physical(p0, p1)
        score_mirr = heuristic_score(rest, extended, self.layout, self.matrix, self.config.w)
        self.layout.swap_physical(p0, p1)
        if self.config.algorithm == "finesse":
            l_edge = self.weights.of(p0, p1)
            return score_mirr + k_mirr * l_edge <= score_now + k_orig * l_edge
        # mirage: never worsen the decomposition count; break count ties on
        # the scheduled-depth proxy (the hop heuristic downstream)
        if k_mirr > k_orig:
            return False
        if k_mirr < k_orig:
            return True
        if self.config.aggression == 1:
            return score_mirr < score_now
        return score_mirr <= score_now

    # swap machinery -------------------------------------------------
    def _front_physicals(self) -> set[int]:
        out = set()
        for g in self.front:
            out.add(self.layout.physical(g.wires[0]))
            out.add(self.layout.physical(g.wires[1]))
        return out

    def _score_delta(self, p0: int, p1: int, extended: list[Gate]) -> float:
        """Relative scoring: only terms touching the swapped qubits move."""
        touched = (p0, p1)
        delta = 0.0
        for g in self.front:
            a, b = self._physical(g)
            if a in touched or b in touched:
                before = self.matrix[a, b]
                a2 = p1 if a == p0 else p0 if a == p1 else a
                b2 = p1 if b == p0 else p0 if b == p1 else b
                delta += self.matrix[a2, b2] - before
        if extended:
            ext = 0.0
            for g in extended:
                a, b = self._physical(g)
                if a in touched or b in touched:
                    before = self.matrix[a, b]
                    a2 = p1 if a == p0 else p0 if a == p1 else a
                    b2 = p1 if b == p0 else p0 if b == p1 else b
                    ext += self.matrix[a2, b2] - before
            delta += self.config.w * ext / len(extended)
        if self.config.decay_enabled:
            delta *= max(self.decay[p0], self.decay[p1])
        return delta

    def _select_swap(self) -> tuple[int, int]:
        front_phys = self._front_physicals()
        candidates = [
            (i, j) for i, j in self.cmap.edge_list() if i in front_phys or j in front_phys
        ]
        extended = self._extended()
        scores = [self._score_delta(i, j, extended) for i, j in candidates]
        best = min(scores)
        ties = [c for c, s in zip(candidates, scores) if s == best]
        if len(ties) == 1:
            return ties[0]
        return ties[int(self.rng.integers(len(ties)))]

    def _apply_swap(self, p0: int, p1: int):
        self._emit_swap(p0, p1)
        self.layout.swap_physical(p0, p1)
        self.swap_trace.append((p0, p1))
        if self.config.decay_enabled:
            self.steps_since_decay_reset += 1
            if self.steps_since_decay_reset % self.config.decay_reset_interval == 0:
                self.decay[:] = 1.0
            else:
                self.decay[p0] += self.config.decay_rate
                self.decay[p1] += self.config.decay_rate

    def _release_valve(self):
        """Force the full shortest-path chain for the closest front gate."""
        target = min(
            self.front,
            key=lambda g: (self.dists.d_hop[self._physical(g)], g.id),
        )
        p0, p1 = self._physical(target)
        while self.dists.d_hop[p0, p1] > 1:
            step = min(
                (nb for nb in self.cmap.neighbors[p0] if self.dists.d_hop[nb, p1] < self.dists.d_hop[p0, p1]),
            )
            self._apply_swap(p0, step)
            p0 = step
        self.stall = 0
        self.valve_fires += 1

    # main loop ------------------------------------------------------
    def run(self) -> PassResult:
        roots = [g for g in self.dag.gates if self.preds[g.id] == 0]
        for g in roots:
            if g.is_two_qubit:
                self.front.append(g)
            else:
                self._emit_gate(g, self._physical(g))
                self._release(g.id)
        self.front.sort(key=lambda g: g.id)

        while self.front:
            executed_any = True
            while executed_any:
                executed_any = False
                for g in sorted(self.front, key=lambda f: f.id):
                    p0, p1 = self._physical(g)
                    if self.cmap.has_edge(p0, p1):
                        mirrored = self._mirror_decision(g, p0, p1)
                        self._emit_gate(g, (p0, p1), mirrored=mirrored)
                        if mirrored:
                            self.layout.swap_physical(p0, p1)
                            self.mirrors += 1
                        self.front.remove(g)
                        self._release(g.id)
                        self.front.sort(key=lambda f: f.id)
                        self.stall = 0
                        if self.config.decay_enabled:
                            self.decay[:] = 1.0
                        executed_any = True
                        break
            if not self.front:
                break
            if self.stall >= self.config.release_valve_threshold:
                self._release_valve()
            else:
                p0, p1 = self._select_swap()
                self._apply_swap(p0, p1)
                self.stall += 1

        return PassResult(
            final_layout=self.layout,
            gates=self.gates,
            swap_trace=self.swap_trace,
            swaps=len(self.swap_trace),
            mirrors=self.mirrors,
            valve_fires=self.valve_fires,
        )


def route_pass(
    dag: CircuitDag,
    cmap: CouplingMap,
    dists: DistanceSet,
    config: RouterConfig,
    rng: np.random.Generator,
    initial_layout: Layout,
    emit: bool = True,
    allow_mirror: bool = True,
    weights: EdgeWeights | None = None,
) -> PassResult:
    if weights is None:
        weights = log_weights(cmap)
    return _Pass(dag, cmap, dists, weights, config, rng, initial_layout, emit, allow_mirror).run()


@dataclass(frozen=True)
class TrialMetrics:
    lf_cost: float
    depth: int
    swap_count: int
    mirror_count: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "lf_cost": self.lf_cost,
            "depth": self.depth,
            "swaps": self.swap_count,
            "mirrors": self.mirror_count,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RoutingResult:
    circuit: CircuitDag
    initial_layout: tuple[int, ...]   # virtual -> physical at circuit start
    final_layout: tuple[int, ...]     # virtual -> physical at circuit end
    metrics: TrialMetrics
    swap_trace: tuple[tuple[int, int], ...] = ()

    @property
    def output_permutation(self) -> tuple[int, ...]:
        """Physical output wire -> virtual wire."""
        inverse = [0] * len(self.final_layout)
        for v, p in enumerate(self.final_layout):
            inverse[p] = v
        return tuple(inverse)

    @property
    def verification_permutation(self) -> tuple[int, ...]:
        """Physical output wire -> wire of the layout-embedded reference.

        Wire p holds virtual v = final^-1(p), whose input entered at
        physical initial[v]; against the reference embedded at the initial
        layout this is the permutation P with P @ U_routed = U_ref.
        """
        return tuple(self.initial_layout[v] for v in self.output_permutation)


def lf_cost(circuit: CircuitDag, cmap: CouplingMap, basis: BasisGate) -> float:
    """Sum over 2q gates of edge log-weight times decomposition count."""
    weights = log_weights(cmap)
    total = 0.0
    for g in circuit.gates:
        if not g.is_two_qubit:
            continue
        if not cmap.has_edge(g.wires[0], g.wires[1]):
            raise RoutingError(f"gate {g} does not sit on a coupling-map edge")
        total += weights.of(g.wires[0], g.wires[1]) * gate_count(g, basis)
    return total


def run_trials(
    dag: CircuitDag,
    cmap: CouplingMap,
    config: RouterConfig,
    seed: int = 0,
    dists: DistanceSet | None = None,
) -> list[RoutingResult]:
    """Route num_seeds independent trials: random layout, then forward,
    reverse, forward passes; the last pass emits the circuit."""
    n_log, n_phys = dag.num_qubits, cmap.num_physical
    if n_log > n_phys:
        raise RoutingError(f"{n_log} circuit qubits exceed {n_phys} physical qubits")
    if dists is None:
        dists = build_distance_set(cmap, swap_count(config.basis), config.beta)
    weights = log_weights(cmap)
    reversed_dag = dag.reversed()
    trials = []
    for t in range(config.num_seeds):
        perm = trial_rng(seed, t, 0).permutation(n_phys)
        layout = Layout(perm)
        fwd = route_pass(dag, cmap, dists, config, trial_rng(seed, t, 1), layout,
                         emit=False, weights=weights)
        rev = route_pass(reversed_dag, cmap, dists, config, trial_rng(seed, t, 2),
                         fwd.final_layout, emit=False, allow_mirror=False, weights=weights)
        final = route_pass(dag, cmap, dists, config, trial_rng(seed, t, 3),
                           rev.final_layout, emit=True, weights=weights)
        circuit = CircuitDag(n_phys, final.gates)
        metrics = TrialMetrics(
            lf_cost=lf_cost(circuit, cmap, config.basis),
            depth=circuit_depth(circuit),
            swap_count=final.swaps,
            mirror_count=final.mirrors,
            seed=t,
        )
        trials.append(
            RoutingResult(
                circuit=circuit,
                initial_layout=tuple(rev.final_layout.to_list()),
                final_layout=tuple(final.final_layout.to_list()),
                metrics=metrics,
                swap_trace=tuple(final.swap_trace),
            )
        )
    return trials


def selection_key(algorithm: str, post_selection: str):
    """Each algorithm's native objective, or log-fidelity cost for all."""
    if post_selection == "fidelity":
        return lambda m: m.lf_cost
    if algorithm == "sabre":
        return lambda m: m.swap_count
    if algorithm == "mirage":
        return lambda m: m.depth
    return lambda m: m.lf_cost


def select_trial(trials: list[RoutingResult], config: RouterConfig) -> RoutingResult:
    key = selection_key(config.algorithm, config.post_selection)
    best = trials[0]
    for trial in trials[1:]:
        if key(trial.metrics) < key(best.metrics):
            best = trial
    return best


def transpile(
    dag: CircuitDag,
    cmap: CouplingMap,
    config: RouterConfig,
    seed: int = 0,
    dists: DistanceSet | None = None,
) -> RoutingResult:
    return select_trial(run_trials(dag, cmap, config, seed, dists), config)
