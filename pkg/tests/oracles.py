"""Independent oracles the tests check library results against.

Each oracle deliberately avoids the code path it validates: path minima by
exhaustive enumeration, two-qubit class labels by Makhlin invariants, basis
counts by sampled reachability with Nelder-Mead polish, spectator infidelity
by a closed form of the factorized matrix exponential.
"""
from __future__ import annotations

from math import pi

import numpy as np
import scipy.optimize

from finesse import gates
from finesse.weyl import MAGIC, weyl_coordinates


# --- graphs ---------------------------------------------------------------


def all_simple_paths(edges: dict, src: int, dst: int):
    """Yield every simple path src -> dst in an adjacency dict."""
    stack = [(src, [src])]
    while stack:
        node, path = stack.pop()
        if node == dst:
            yield path
            continue
        for nb in edges[node]:
            if nb not in path:
                stack.append((nb, path + [nb]))


def brute_force_fidelity_distance(cmap, weights, k_swap: int, src: int, dst: int) -> float:
    """Minimum accumulated k_swap * L over all simple paths."""
    if src == dst:
        return 0.0
    adj = {i: list(cmap.neighbors[i]) for i in range(cmap.num_physical)}
    best = float("inf")
    for path in all_simple_paths(adj, src, dst):
        cost = sum(k_swap * weights.of(a, b) for a, b in zip(path, path[1:]))
        best = min(best, cost)
    return best


def random_connected_map(rng, max_nodes: int = 8):
    """Random connected fidelity-weighted graph on <= max_nodes nodes."""
    from finesse.hardware import CouplingMap

    n = int(rng.integers(2, max_nodes + 1))
    pairs = set()
    order = list(rng.permutation(n))
    for a, b in zip(order, order[1:]):  # random spanning tree
        pairs.add((min(a, b), max(a, b)))
    extras = int(rng.integers(0, n))
    for _ in range(extras):
        a, b = rng.integers(0, n, size=2)
        if a != b:
            pairs.add((min(int(a), int(b)), max(int(a), int(b))))
    fids = [float(rng.uniform(0.9, 0.999)) for _ in pairs]
    return CouplingMap.from_pairs(n, sorted(pairs), fids)


# --- two-qubit invariants ---------------------------------------------------


def makhlin_invariants(u: np.ndarray) -> tuple[complex, complex]:
    su = u / np.linalg.det(u) ** 0.25
    m = MAGIC.conj().T @ su @ MAGIC
    mm = m.T @ m
    tr = np.trace(mm)
    return tr**2 / 16.0, (tr**2 - np.trace(mm @ mm)) / 4.0


def same_local_class(u: np.ndarray, v: np.ndarray, tol: float = 1e-7) -> bool:
    gu, gv = makhlin_invariants(u), makhlin_invariants(v)
    return abs(gu[0] - gv[0]) <= tol and abs(gu[1] - gv[1]) <= tol


def canonical_gate(c) -> np.ndarray:
    import scipy.linalg

    xx = np.kron(gates.X, gates.X)
    yy = np.kron(gates.Y, gates.Y)
    zz = np.kron(gates.Z, gates.Z)
    return scipy.linalg.expm(1j * (c[0] * xx + c[1] * yy + c[2] * zz))


def haar_su2(rng) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def haar_su4(rng) -> np.ndarray:
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# --- Monte-Carlo basis-count oracle ----------------------------------------


def _product(basis_u: np.ndarray, locals_flat: np.ndarray, k: int) -> np.ndarray:
    """basis (local) basis ... with k basis uses and k-1 local layers."""
    prod = basis_u
    for layer in range(k - 1):
        a = _su2_from_angles(locals_flat[6 * layer : 6 * layer + 3])
        b = _su2_from_angles(locals_flat[6 * layer + 3 : 6 * layer + 6])
        prod = prod @ np.kron(a, b) @ basis_u
    return prod


def _su2_from_angles(v) -> np.ndarray:
    return gates.rz(v[0]) @ gates.ry(v[1]) @ gates.rz(v[2])


class CoverageOracle:
    """Sampled reachability in invariant space, polished by Nelder-Mead.

    For each use count k the oracle samples interleaved products to seed a
    local search that minimizes the invariant-space distance to the target;
    the target is reachable with k uses iff the polished distance vanishes.
    """

    def __init__(self, basis_u: np.ndarray, seed: int = 0, samples: int = 3000):
        self.basis_u = np.asarray(basis_u, dtype=complex)
        self.basis_c = np.array(weyl_coordinates(self.basis_u))
        rng = np.random.default_rng(seed)
        self.clouds = {}
        for k in (2, 3):
            params = rng.uniform(0, 2 * pi, size=(samples, 6 * (k - 1)))
            points = np.array(
                [weyl_coordinates(_product(self.basis_u, p, k)) for p in params]
            )
            self.clouds[k] = (params, points)

    def _reach_distance(self, target_c: np.ndarray, k: int, polish: int = 6) -> float:
        params, points = self.clouds[k]
        order = np.argsort(np.linalg.norm(points - target_c, axis=1))
        best = float(np.linalg.norm(points[order[0]] - target_c))
        for idx in order[:polish]:
            res = scipy.optimize.minimize(
                lambda v: float(
                    np.linalg.norm(
                        np.array(weyl_coordinates(_product(self.basis_u, v, k))) - target_c
                    )
                ),
                params[idx],
                method="Nelder-Mead",
                options={"maxiter": 1200, "fatol": 1e-14, "xatol": 1e-10},
            )
            best = min(best, float(res.fun))
            if best < 1e-8:
                break
        return best

    def count(self, u: np.ndarray, tol: float = 1e-6) -> int:
        c = np.array(weyl_coordinates(u))
        if np.linalg.norm(c) <= 1e-8:
            return 0
        if np.linalg.norm(c - self.basis_c) <= 1e-8:
            return 1
        if self._reach_distance(c, 2) <= tol:
            return 2
        if self._reach_distance(c, 3) <= tol:
            return 3
        raise ValueError("target unreachable within three applications")


# --- bounded-spectator closed form -----------------------------------------


def factorized_spectator_infidelity(amp: float) -> float:
    """Closed form of the 16-dim oracle: target and spectator commute, so
    eps = 1 - (1 + 4 (1 + cos amp)^2) / 17."""
    return 1.0 - (1.0 + 4.0 * (1.0 + np.cos(amp)) ** 2) / 17.0
