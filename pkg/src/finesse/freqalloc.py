"""Spectator-aware frequency allocation for tunable-coupler modules.

Per-gate infidelity combines a coherent part (sum over catalog spectator
terms of an empirical 2*x0/(x1+delta)^2 law, detuning measured between the
gate's pump and each spectator's pump-frame resonance) and an incoherent
part (x0/(x1+delta) law in the qubit's offset from half the coupler
frequency).  Both laws are calibrated against first-principles oracles:
a truncated two-mode-pair matrix exponential for the coherent channel, a
max-pump/lifetime model anchored at 250 ns of gate time at 1 GHz detuning
for the incoherent one.  Assignments are then optimized with Nelder-Mead
under box bounds and a minimum qubit-spacing penalty.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import pi
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

TWO_PI = 2.0 * pi

DEFAULT_QUBIT_BAND = (3.3e9, 5.7e9)
DEFAULT_SNAIL_BAND = (4.2e9, 4.7e9)
DEFAULT_DELTA_Q = 200e6
PENALTY_WEIGHT = 1e3
FIT_RESIDUAL_LIMIT = 0.08


class CalibrationError(RuntimeError):
    pass


class PumpPoleError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    """Device scales; rates are angular (rad/s), frequencies plain Hz."""

    g3: float = TWO_PI * 50e6        # third-order coupler nonlinearity
    lam: float = 0.06                # coupler-qubit hybridization
    alpha: float = TWO_PI * 200e6    # transmon anharmonicity magnitude
    eps_drive: float = 1.08          # reference pump strength |eta|
    t1: float = 160e-6               # relaxation time, seconds
    anchor_gate_time: float = 250e-9
    anchor_detuning: float = 1e9

    def __post_init__(self):
        for name in ("g3", "lam", "alpha", "eps_drive", "t1", "anchor_gate_time", "anchor_detuning"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lam >= 0.5:
            raise ValueError("hybridization lam must stay well below 1 (lam < 0.5)")

    @property
    def drive_rate(self) -> float:
        """Target conversion rate g1 = 6 |eta| g3 lam^2 (rad/s)."""
        return 6.0 * self.eps_drive * self.g3 * self.lam**2

    @property
    def anchor_eta(self) -> float:
        """Pump strength that yields the anchor gate time for a full iswap."""
        return pi / (12.0 * self.g3 * self.lam**2 * self.anchor_gate_time)


@dataclass(frozen=True)
class SpectatorTerm:
    """One catalog row: operator form, normalized prefactor, resonance rule."""

    category: str        # driven | intra_module | inter_module
    operator_form: str
    normalized_prefactor: float
    rule: str

    def frequencies(self, omega_q: Sequence[float], omega_s: float):
        """Pump-frame resonance frequencies with an identifying key each."""
        n = len(omega_q)
        if self.rule == "pair_conversion":
            return [
                (abs(omega_q[a] - omega_q[b]), ("pair", a, b))
                for a in range(n)
                for b in range(a + 1, n)
            ]
        if self.rule == "snail_sub2":
            return [(omega_s / 2.0, ("snail_sub2",))]
        if self.rule == "snail_sub3":
            return [(omega_s / 3.0, ("snail_sub3",))]
        if self.rule == "snail_qubit":
            return [(abs(omega_s - w), ("sq", a)) for a, w in enumerate(omega_q)]
        if self.rule == "snail_qubit_half":
            return [(abs(omega_s - w) / 2.0, ("sqh", a)) for a, w in enumerate(omega_q)]
        if self.rule == "qubit_sub2":
            return [(w / 2.0, ("q2", a)) for a, w in enumerate(omega_q)]
        if self.rule == "qubit_sub3":
            return [(w / 3.0, ("q3", a)) for a, w in enumerate(omega_q)]
        raise ValueError(f"inter-module rule {self.rule!r} needs neighbor frequencies")


# Order-of-magnitude catalog for driven, intra-module, and inter-module
# spectator terms, sorted by normalized prefactor within each block.
SPECTATOR_CATALOG = (
    SpectatorTerm("driven", "qa^ qb + qa qb^", 1.0, "pair_conversion"),
    SpectatorTerm("intra_module", "s^ + s", 100.0, "snail_sub2"),
    SpectatorTerm("intra_module", "s^ qa + s qa^", 10.0, "snail_qubit"),
    SpectatorTerm("intra_module", "qa^ + qa", 10.0, "qubit_sub2"),
    SpectatorTerm("intra_module", "s^ qa + s qa^", 0.067, "snail_qubit_half"),
    SpectatorTerm("intra_module", "qa^ + qa", 0.044, "qubit_sub3"),
    SpectatorTerm("intra_module", "s^ + s", 0.018, "snail_sub3"),
    SpectatorTerm("inter_module", "sn^ + sn", 1.0, "neighbor_snail_sub2"),
    SpectatorTerm("inter_module", "s^ qc + s qc^", 0.1, "neighbor_snail_qubit"),
    SpectatorTerm("inter_module", "qc^ + qc", 0.1, "neighbor_qubit_sub2"),
    SpectatorTerm("inter_module", "qa^ qc + qa qc^", 0.01, "cross_module_conversion"),
    SpectatorTerm("inter_module", "sn^ qa + sn qa^", 0.001, "neighbor_snail_conversion"),
    SpectatorTerm("inter_module", "qc^ qd + qc qd^", 0.0001, "neighbor_pair_conversion"),
)

INTRA_CATALOG = tuple(t for t in SPECTATOR_CATALOG if t.category in ("driven", "intra_module"))

# Spectator families summed coherently by the allocation loss: qubit-qubit
# conversions, coupler-qubit conversions, and qubit subharmonics.  The
# coupler subharmonic rows are the pump-breakdown channel and enter through
# the incoherent term instead.
LOSS_RULES = frozenset(
    {"pair_conversion", "snail_qubit", "snail_qubit_half", "qubit_sub2", "qubit_sub3"}
)
LOSS_CATALOG = tuple(t for t in INTRA_CATALOG if t.rule in LOSS_RULES)


@dataclass(frozen=True)
class FrequencyAssignment:
    """Qubit and coupler frequencies for one module (Hz)."""

    omega_q: tuple[float, ...]
    omega_s: float

    def conversion(self, a: int, b: int) -> float:
        return abs(self.omega_q[a] - self.omega_q[b])

    @property
    def snail_differences(self) -> tuple[float, ...]:
        return tuple(abs(self.omega_s - w) for w in self.omega_q)

    @property
    def subharmonics(self) -> dict[str, tuple[float, ...]]:
        return {
            "qubit_half": tuple(w / 2.0 for w in self.omega_q),
            "qubit_third": tuple(w / 3.0 for w in self.omega_q),
            "snail": (self.omega_s / 2.0, self.omega_s / 3.0),
        }

    @property
    def min_qubit_separation(self) -> float:
        n = len(self.omega_q)
        if n < 2:
            return float("inf")
        return min(
            abs(self.omega_q[a] - self.omega_q[b])
            for a in range(n)
            for b in range(a + 1, n)
        )


@dataclass(frozen=True)
class FreqModule:
    """Gate pairs sharing one coupler; default is every qubit pair."""

    num_qubits: int
    gates: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.num_qubits < 2:
            raise ValueError("a module needs at least two qubits")
        if not self.gates:
            object.__setattr__(
                self,
                "gates",
                tuple(
                    (a, b)
                    for a in range(self.num_qubits)
                    for b in range(a + 1, self.num_qubits)
                ),
            )
        for a, b in self.gates:
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits) or a == b:
                raise ValueError(f"bad gate pair ({a},{b})")


def golomb_frequencies(p: int, c: float, f_min: float) -> list[float]:
    """Erdos-Turan ruler: f_k = f_min + c*(2*p*k + k^2 mod p), k = 0..p-1.

    Pairwise differences are all distinct when p is prime.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    if c <= 0:
        raise ValueError("scale c must be positive")
    if any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        warnings.warn(f"p={p} is composite; pairwise-difference distinctness not guaranteed", stacklevel=2)
    return [f_min + c * (2 * p * k + (k * k) % p) for k in range(p)]


def spectator_frequencies(
    assign: FrequencyAssignment,
    driven_pair: tuple[int, int],
    catalog: Sequence[SpectatorTerm] = INTRA_CATALOG,
) -> list[tuple[float, float]]:
    """(frequency, prefactor) per applicable catalog term, driven term excluded."""
    a, b = driven_pair
    own = ("pair", min(a, b), max(a, b))
    out = []
    for term in catalog:
        for freq, key in term.frequencies(assign.omega_q, assign.omega_s):
            if key == own:
                continue
            out.append((freq, term.normalized_prefactor))
    return out


def coherent_infidelity(delta: float, x0: float, x1: float) -> float:
    """Empirical spectator law 2*x0/(x1+delta)^2, clamped to [0, 1]."""
    val = 2.0 * x0 / (x1 + delta) ** 2
    return min(max(val, 0.0), 1.0)


def incoherent_infidelity(delta: float, x0: float, x1: float) -> float:
    """Lifetime law x0/(x1+delta), clamped to [0, 1]."""
    val = x0 / (x1 + delta)
    return min(max(val, 0.0), 1.0)


def compose_infidelity(eps_coh: float, eps_inc: float) -> float:
    """Independent-channel combination 1 - (1-inc)(1-coh)."""
    return 1.0 - (1.0 - eps_inc) * (1.0 - eps_coh)


def pump_strength(omega_p: float, omega_s: float, eps_drive: float) -> float:
    """|eta| = eps * omega_s / (omega_p^2 - omega_s^2), away from the pole."""
    if abs(omega_p - omega_s) <= 1e-9 * max(abs(omega_s), 1.0):
        raise PumpPoleError("pump frequency sits on the coupler resonance")
    return abs(eps_drive * omega_s / (omega_p**2 - omega_s**2))


def iswap_gate_time(n: int, eta: float, g3: float, lam: float) -> float:
    """Pulse duration t_f = pi / (12 n |eta| g3 lam^2) for the n-th root."""
    if n < 1 or eta <= 0 or g3 <= 0 or lam <= 0:
        raise ValueError("n, eta, g3, lam must all be positive")
    return pi / (12.0 * n * abs(eta) * g3 * lam**2)


def max_pump_eta(delta: float, constants: PhysicalConstants) -> float:
    """Usable pump strength vs detuning from the coupler subharmonic.

    Linear in delta and pinned to the anchor operating point: the breakdown
    data behind it is summarized by that single calibrated point.
    """
    if delta <= 0:
        raise ValueError("detuning must be positive")
    return constants.anchor_eta * (delta / constants.anchor_detuning)


# --- calibration oracles -------------------------------------------------

_DIM = 16  # two mode pairs, two levels per mode


def _hopping(mode_a: int, mode_b: int) -> np.ndarray:
    """q_a^dag q_b + h.c. on the 4-mode, 2-level-per-mode space."""
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    ident = np.eye(2, dtype=complex)
    ops_a = [ident] * 4
    ops_a[mode_a] = lower.T.conj()
    ops_a[mode_b] = lower
    term = ops_a[0]
    for op in ops_a[1:]:
        term = np.kron(term, op)
    return term + term.conj().T


_TARGET_OP = _hopping(0, 1)
_SPECTATOR_OP = _hopping(2, 3)


def average_gate_infidelity(u: np.ndarray, v: np.ndarray) -> float:
    """1 - (d + |Tr[U V^dag]|^2) / (d(d+1)) for unitary U, V."""
    d = u.shape[0]
    tr = np.trace(u @ v.conj().T)
    return float(1.0 - (d + abs(tr) ** 2) / (d * (d + 1)))


def bounded_spectator_infidelity(
    delta: float, prefactor_ratio: float, constants: PhysicalConstants
) -> float:
    """Infidelity of exp(-i(g1 t (q1+q2) + 2 g2 (q3+q4)/delta + h.c.)) vs target.

    g1 t is pi/2 (one full iswap); the spectator amplitude carries the
    conservative 2/delta bound so the propagator is time independent.
    """
    g2 = prefactor_ratio * constants.drive_rate
    amp = 2.0 * g2 / (TWO_PI * delta)
    target = scipy.linalg.expm(-1j * (pi / 2.0) * _TARGET_OP)
    full = scipy.linalg.expm(-1j * ((pi / 2.0) * _TARGET_OP + amp * _SPECTATOR_OP))
    return average_gate_infidelity(target, full)


def _default_coherent_grid(prefactor_ratio: float, constants: PhysicalConstants) -> np.ndarray:
    g2 = max(prefactor_ratio, 1e-6) * constants.drive_rate
    delta_min = 2.0 * g2 / (TWO_PI * 0.4)  # spectator amplitude 0.4 rad
    return np.geomspace(delta_min, 100.0 * delta_min, 25)


def calibrate_coherent_model(
    prefactor_ratio: float,
    delta_grid: Sequence[float] | None = None,
    constants: PhysicalConstants = PhysicalConstants(),
) -> tuple[float, float]:
    """Least-squares fit of the coherent law to the matrix-exponential oracle.

    The law linearizes as 1/sqrt(eps) = (x1 + delta)/sqrt(2 x0), so the fit
    is a degree-1 polynomial in delta.
    """
    if delta_grid is None:
        delta_grid = _default_coherent_grid(prefactor_ratio, constants)
    grid = np.asarray(sorted(delta_grid), dtype=float)
    if len(grid) < 3 or grid[-1] < 100.0 * grid[0] * (1 - 1e-9):
        raise CalibrationError("delta grid must span at least two decades")
    eps = np.array([bounded_spectator_infidelity(d, prefactor_ratio, constants) for d in grid])
    if np.max(eps) < 1e-14:
        return 0.0, 1.0  # no spectator: degenerate fit, x0 -> 0
    y = 1.0 / np.sqrt(eps)
    slope, intercept = np.polyfit(grid, y, 1)
    x0 = 1.0 / (2.0 * slope**2)
    x1 = intercept / slope
    model = np.array([coherent_infidelity(d, x0, x1) for d in grid])
    residual = float(np.sqrt(np.mean((model / eps - 1.0) ** 2)))
    if residual > FIT_RESIDUAL_LIMIT:
        raise CalibrationError(
            f"coherent fit residual {residual:.3g} exceeds {FIT_RESIDUAL_LIMIT}"
            f" (ratio {prefactor_ratio}, grid {grid[0]:.3g}..{grid[-1]:.3g} Hz)"
        )
    return float(x0), float(x1)


def calibrate_incoherent_model(
    constants: PhysicalConstants = PhysicalConstants(),
    delta_grid: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Fit the lifetime law to the max-pump gate-duration curve.

    t_f(delta) scales inversely with the usable pump strength; decoherence
    loss is 1 - exp(-t_f/T1).  1/eps is close to linear in delta.
    """
    if delta_grid is None:
        delta_grid = np.geomspace(5e7, 5e9, 25)
    grid = np.asarray(sorted(delta_grid), dtype=float)
    t_f = np.array(
        [
            iswap_gate_time(1, max_pump_eta(d, constants), constants.g3, constants.lam)
            for d in grid
        ]
    )
    eps = 1.0 - np.exp(-t_f / constants.t1)
    slope, intercept = np.polyfit(grid, 1.0 / eps, 1)
    x0 = 1.0 / slope
    x1 = intercept / slope
    model = np.array([incoherent_infidelity(d, x0, x1) for d in grid])
    residual = float(np.sqrt(np.mean((model / eps - 1.0) ** 2)))
    if residual > FIT_RESIDUAL_LIMIT:
        raise CalibrationError(f"incoherent fit residual {residual:.3g} exceeds {FIT_RESIDUAL_LIMIT}")
    return float(x0), float(x1)


@dataclass(frozen=True)
class CostModelParams:
    """Base fit parameters; each catalog category scales them by its prefactor.

    The bounded-spectator oracle obeys eps_R(delta) = eps_1(delta/R) exactly,
    so a category with normalized prefactor R carries the pair (x0 R^2, x1 R)
    and its F = 0.99 crossing grows linearly in R.
    """

    coh_x0: float
    coh_x1: float
    inc_x0: float
    inc_x1: float

    def __post_init__(self):
        if min(self.coh_x0, self.coh_x1, self.inc_x0, self.inc_x1) < 0:
            raise ValueError("fit parameters must be nonnegative")

    def coherent_for(self, prefactor: float) -> tuple[float, float]:
        return self.coh_x0 * prefactor**2, self.coh_x1 * prefactor

    def coherent_crossing(self, prefactor: float, target_eps: float = 0.01) -> float:
        """Detuning where the category curve drops to target_eps (Hz)."""
        x0, x1 = self.coherent_for(prefactor)
        return (2.0 * x0 / target_eps) ** 0.5 - x1


def calibrate_cost_model(constants: PhysicalConstants = PhysicalConstants()) -> CostModelParams:
    coh_x0, coh_x1 = calibrate_coherent_model(1.0, None, constants)
    inc_x0, inc_x1 = calibrate_incoherent_model(constants)
    return CostModelParams(coh_x0, coh_x1, inc_x0, inc_x1)


# --- allocation cost and optimizer ---------------------------------------


class _CostEvaluator:
    """Vectorized Algorithm-1 loss for one module and parameter set."""

    def __init__(self, module: FreqModule, params: CostModelParams, k: int, delta_q: float):
        if k >= len(module.gates):
            raise ValueError("worst-gate exclusion k must leave at least one gate")
        self.module = module
        self.params = params
        self.k = k
        self.delta_q = delta_q
        n = module.num_qubits
        self.pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        self.gate_pair_idx = np.array(
            [self.pair_index[(min(a, b), max(a, b))] for a, b in module.gates]
        )

    def _spectator_table(self, omega_q: np.ndarray, omega_s: float):
        """Frequencies plus effective (x0, x1) arrays for the loss catalog."""
        freqs, x0s, x1s, pair_ids = [], [], [], []
        for term in LOSS_CATALOG:
            x0, x1 = self.params.coherent_for(term.normalized_prefactor)
            for freq, key in term.frequencies(omega_q, omega_s):
                freqs.append(freq)
                x0s.append(x0)
                x1s.append(x1)
                pair_ids.append(self.pair_index[(key[1], key[2])] if key[0] == "pair" else -1)
        return (
            np.asarray(freqs),
            np.asarray(x0s),
            np.asarray(x1s),
            np.asarray(pair_ids),
        )

    def gate_infidelities(self, omega_q: np.ndarray, omega_s: float):
        freqs, x0s, x1s, pair_ids = self._spectator_table(omega_q, omega_s)
        pumps = np.array([abs(omega_q[a] - omega_q[b]) for a, b in self.module.gates])
        det = np.abs(pumps[:, None] - freqs[None, :])
        eps = np.clip(2.0 * x0s[None, :] / (x1s[None, :] + det) ** 2, 0.0, 1.0)
        own = pair_ids[None, :] == self.gate_pair_idx[:, None]
        eps_coh = np.clip(np.where(own, 0.0, eps).sum(axis=1), 0.0, 1.0)
        first_q = np.array([g[0] for g in self.module.gates])
        det_inc = np.abs(omega_q[first_q] - omega_s / 2.0)
        eps_inc = np.clip(self.params.inc_x0 / (self.params.inc_x1 + det_inc), 0.0, 1.0)
        eps_gate = 1.0 - (1.0 - eps_inc) * (1.0 - eps_coh)
        return eps_coh, eps_inc, eps_gate

    def penalty(self, omega_q: np.ndarray) -> float:
        total = 0.0
        n = len(omega_q)
        for a in range(n):
            for b in range(a + 1, n):
                gap = abs(omega_q[a] - omega_q[b])
                if gap < self.delta_q:
                    total += PENALTY_WEIGHT * ((self.delta_q - gap) / self.delta_q) ** 2
        return total

    def cost(self, omega_q: np.ndarray, omega_s: float) -> float:
        _, _, eps_gate = self.gate_infidelities(omega_q, omega_s)
        kept = np.sort(eps_gate)[::-1][self.k :]
        return float(kept.sum() + self.penalty(omega_q))


def allocation_cost(
    assign: FrequencyAssignment,
    module: FreqModule,
    params: CostModelParams,
    k: int = 0,
    delta_q: float = DEFAULT_DELTA_Q,
) -> float:
    """Algorithm-1 loss: spectator sums, lifetime term, spacing penalty,
    worst-k gates dropped."""
    ev = _CostEvaluator(module, params, k, delta_q)
    return ev.cost(np.asarray(assign.omega_q, dtype=float), assign.omega_s)


@dataclass(frozen=True)
class GateInfidelityReport:
    gates: tuple[tuple[int, int], ...]
    eps_coh: tuple[float, ...]
    eps_inc: tuple[float, ...]
    eps_gate: tuple[float, ...]
    geometric_mean_fidelity: float
    min_interaction_separation: float
    min_qubit_separation: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "gates": [list(g) for g in self.gates],
            "eps_coh": list(self.eps_coh),
            "eps_inc": list(self.eps_inc),
            "eps_gate": list(self.eps_gate),
            "geometric_mean_fidelity": self.geometric_mean_fidelity,
            "min_interaction_separation_hz": self.min_interaction_separation,
            "min_qubit_separation_hz": self.min_qubit_separation,
            "feasible": self.feasible,
        }


def build_report(
    assign: FrequencyAssignment,
    module: FreqModule,
    params: CostModelParams,
    delta_q: float = DEFAULT_DELTA_Q,
) -> GateInfidelityReport:
    ev = _CostEvaluator(module, params, 0, delta_q)
    omega_q = np.asarray(assign.omega_q, dtype=float)
    eps_coh, eps_inc, eps_gate = ev.gate_infidelities(omega_q, assign.omega_s)
    fid = np.clip(1.0 - eps_gate, 1e-12, 1.0)
    geo = float(np.exp(np.mean(np.log(fid))))
    pumps = [assign.conversion(a, b) for a, b in module.gates]
    if len(pumps) > 1:
        min_sep = min(
            abs(pumps[i] - pumps[j]) for i in range(len(pumps)) for j in range(i + 1, len(pumps))
        )
    else:
        min_sep = float("inf")
    return GateInfidelityReport(
        gates=tuple(module.gates),
        eps_coh=tuple(float(e) for e in eps_coh),
        eps_inc=tuple(float(e) for e in eps_inc),
        eps_gate=tuple(float(e) for e in eps_gate),
        geometric_mean_fidelity=geo,
        min_interaction_separation=float(min_sep),
        min_qubit_separation=float(assign.min_qubit_separation),
        # The spacing penalty is flat at the boundary, so optima can sit a
        # rounding error inside it.
        feasible=bool(assign.min_qubit_separation >= delta_q * (1.0 - 1e-5)),
    )


@dataclass(frozen=True)
class FrequencyBounds:
    qubit: tuple[float, float] = DEFAULT_QUBIT_BAND
    snail: tuple[float, float] = DEFAULT_SNAIL_BAND

    def __post_init__(self):
        if self.qubit[0] >= self.qubit[1] or self.snail[0] >= self.snail[1]:
            raise ValueError("bounds must be increasing intervals")


NM_MAX_ITER = 10_000
NM_FATOL = 1e-12
NM_RESTARTS = 16


def optimize_frequencies(
    module: FreqModule,
    bounds: FrequencyBounds = FrequencyBounds(),
    params: CostModelParams | None = None,
    k: int = 0,
    delta_q: float = DEFAULT_DELTA_Q,
    seed: int = 0,
    restarts: int = NM_RESTARTS,
) -> tuple[FrequencyAssignment, GateInfidelityReport]:
    """Nelder-Mead minimization of the allocation cost from seeded restarts.

    Trial points are clamped to the box bounds.  The best restart is kept;
    if no restart satisfies the qubit-spacing constraint the best-effort
    assignment is returned with the report flagged infeasible.
    """
    if params is None:
        params = calibrate_cost_model()
    ev = _CostEvaluator(module, params, k, delta_q)
    n = module.num_qubits
    scale = 1e9  # optimize in GHz for conditioning
    lo = np.array([bounds.qubit[0]] * n + [bounds.snail[0]]) / scale
    hi = np.array([bounds.qubit[1]] * n + [bounds.snail[1]]) / scale

    def objective(x: np.ndarray) -> float:
        return ev.cost(x[:n] * scale, x[n] * scale)

    def run_nm(x0: np.ndarray):
        return scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=scipy.optimize.Bounds(lo, hi),
            options={
                "maxiter": NM_MAX_ITER,
                "fatol": NM_FATOL,
                "xatol": 1e-8,
                "adaptive": False,
            },
        )

    def golomb_start(rng) -> np.ndarray:
        """Jittered ruler-spaced qubits plus a random coupler placement.

        The ruler is the separation-optimal construction this allocation
        problem relaxes, and restarts drawn from its neighborhood track the
        solution family with well-spread interaction frequencies.  Uniform
        starts instead collapse onto spacing-penalty-boundary packings.
        """
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # composite n is fine for a seed
            marks = np.array(golomb_frequencies(n, 1.0, 0.0))
        width = 0.35 + 0.65 * rng.random()
        span = (bounds.qubit[1] - bounds.qubit[0]) * width
        offset = bounds.qubit[0] + rng.random() * (bounds.qubit[1] - bounds.qubit[0] - span)
        qs = offset + marks / marks[-1] * span
        qs = qs + rng.normal(0.0, 0.01 * span, size=n)
        qs = np.clip(qs, bounds.qubit[0], bounds.qubit[1])
        snail = bounds.snail[0] + rng.random() * (bounds.snail[1] - bounds.snail[0])
        return np.concatenate([qs, [snail]]) / scale

    root = np.random.SeedSequence(entropy=seed, spawn_key=(0xA110C,))
    best_x, best_cost = None, np.inf
    for child in root.spawn(max(restarts, 1)):
        res = run_nm(golomb_start(np.random.default_rng(child)))
        if res.fun < best_cost:
            best_cost, best_x = float(res.fun), np.array(res.x)
    # NM stalls in shallow basins on the larger modules; restart from the
    # incumbent until it stops paying.
    for _ in range(8):
        res = run_nm(best_x)
        if res.fun >= best_cost - 1e-12:
            break
        best_cost, best_x = float(res.fun), np.array(res.x)
    assign = FrequencyAssignment(
        omega_q=tuple(float(v) for v in best_x[:n] * scale),
        omega_s=float(best_x[n] * scale),
    )
    report = build_report(assign, module, params, delta_q)
    if not report.feasible:
        warnings.warn(
            f"no assignment met the {delta_q / 1e6:.0f} MHz qubit spacing; "
            "returning best effort",
            stacklevel=2,
        )
    return assign, report


def fidelity_table(
    report: GateInfidelityReport, name: str = "module", drop_worst: int = 0
):
    """Emit the optimized module as a hardware ModuleSpec (C = 1 - eps_gate)."""
    from .hardware import ModuleSpec

    if not report.gates:
        raise ValueError("empty module: no gates to tabulate")
    records = sorted(zip(report.eps_gate, report.gates))
    if drop_worst:
        if drop_worst >= len(records):
            raise ValueError("cannot drop every gate")
        records = records[:-drop_worst]
    num_qubits = max(max(a, b) for a, b in report.gates) + 1
    return ModuleSpec(
        qubits_per_module=num_qubits,
        edges_per_module=tuple(g for _, g in records),
        edge_fidelities=tuple(1.0 - e for e, _ in records),
        name=name,
    )
