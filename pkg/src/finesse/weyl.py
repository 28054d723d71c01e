"""Two-qubit invariants and minimal basis-gate counts.

Canonical coordinates (c1, c2, c3) satisfy pi/4 >= c1 >= c2 >= |c3| with
c3 >= 0 whenever c1 = pi/4.  Containment of a target class in the set of
unitaries reachable by k basis applications interleaved with arbitrary 1q
gates is tested in this invariant space: closed-form regions for the
supercontrolled bases (cx, ecr, iswap) and for the square-root-of-iswap
basis, sampled coverage hulls for deeper iswap roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import pi

import numpy as np
import scipy.linalg

from . import gates
from .ir import Gate

WEYL_TOL = 1e-8
_UNITARY_TOL = 1e-10

# Magic (Bell) basis; local gates become real orthogonal matrices here.
MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / np.sqrt(2.0)
_MAGIC_DAG = MAGIC.conj().T


class NonUnitaryError(ValueError):
    pass


class UnreachableError(ValueError):
    """Target needs more than three applications of the basis gate."""


def _require_unitary(u: np.ndarray, tol: float = _UNITARY_TOL):
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise NonUnitaryError(f"expected a 4x4 matrix, got shape {u.shape}")
    if np.max(np.abs(u @ u.conj().T - np.eye(4))) > tol:
        raise NonUnitaryError("matrix is not unitary within tolerance")
    return u


def _fold_half_pi(t: float) -> float:
    """Reduce modulo pi/2 into (-pi/4, pi/4]."""
    m = t % (pi / 2)
    return m - pi / 2 if m > pi / 4 + 1e-14 else m


def canonicalize(c1: float, c2: float, c3: float) -> tuple[float, float, float]:
    """Fold a coordinate triple into the canonical chamber.

    Allowed moves: shift any coordinate by pi/2, negate any two, permute.
    """
    v = [_fold_half_pi(c1), _fold_half_pi(c2), _fold_half_pi(c3)]
    v.sort(key=abs, reverse=True)
    negs = sum(1 for x in v if x < 0)
    if negs == 2:
        i, j = (k for k in range(3) if v[k] < 0)
        v[i], v[j] = -v[i], -v[j]
    elif negs in (1, 3):
        # push the single residual sign onto the smallest coordinate
        for k in range(2):
            if v[k] < 0:
                v[k], v[2] = -v[k], -v[2]
    v[:2] = sorted(v[:2], reverse=True)
    if abs(v[0] - pi / 4) < 1e-12 and v[2] < 0:
        v[2] = -v[2]
        v[1], v[2] = max(v[1], v[2]), min(v[1], v[2])
    return (v[0], v[1], abs(v[2]) if abs(v[2]) < 1e-15 else v[2])


def weyl_coordinates(u: np.ndarray) -> tuple[float, float, float]:
    """Canonical (c1, c2, c3) from the magic-basis eigenphases of U^T U."""
    u = _require_unitary(u)
    su = u / np.linalg.det(u) ** 0.25
    m = _MAGIC_DAG @ su @ MAGIC
    m2 = m.T @ m
    schur_t = scipy.linalg.schur(m2, output="complex")[0]
    two_theta = np.sort(np.angle(np.diag(schur_t)))[::-1]
    th = two_theta / 2.0
    # Any lift and any pairing land in the same local-equivalence orbit;
    # canonicalize absorbs the residual shifts, flips, and permutations.
    c1 = (th[0] + th[1]) / 2.0
    c2 = (th[1] + th[2]) / 2.0
    c3 = (th[0] + th[2]) / 2.0
    return canonicalize(c1, c2, c3)


def mirror(u: np.ndarray) -> np.ndarray:
    """SWAP times U: executes U and implicitly exchanges the two outputs."""
    return gates.SWAP @ np.asarray(u, dtype=complex)


def gate_unitary(g: Gate) -> np.ndarray:
    """Exact 4x4 matrix of a 2q gate (mirror folded in)."""
    if not g.is_two_qubit:
        raise ValueError(f"{g.kind} is not a 2-qubit gate")
    return gates.two_qubit_matrix(g)


@dataclass(frozen=True)
class BasisGate:
    """Native 2q basis: cx, ecr, or the n-th root of iswap."""

    kind: str  # cx | ecr | iswap | root_iswap
    n: int = 1

    def __post_init__(self):
        if self.kind not in ("cx", "ecr", "iswap", "root_iswap"):
            raise ValueError(f"unsupported basis kind {self.kind!r}")
        if self.kind == "root_iswap" and self.n < 1:
            raise ValueError("root_iswap order must be >= 1")

    @classmethod
    def root_iswap(cls, n: int) -> "BasisGate":
        return cls("iswap", 1) if n == 1 else cls("root_iswap", n)

    @classmethod
    def from_name(cls, name: str) -> "BasisGate":
        name = name.strip().lower()
        if name in ("cx", "ecr", "iswap"):
            return cls(name)
        if name in ("siswap", "sqiswap", "sqrt_iswap"):
            return cls("root_iswap", 2)
        if name.startswith("root_iswap"):
            return cls.root_iswap(int(name.rsplit("_", 1)[-1]))
        raise ValueError(f"unknown basis gate {name!r}")

    @property
    def name(self) -> str:
        if self.kind == "root_iswap":
            return f"root_iswap_{self.n}"
        return self.kind

    @property
    def unitary(self) -> np.ndarray:
        if self.kind == "cx":
            return gates.CX
        if self.kind == "ecr":
            return gates.ECR
        if self.kind == "iswap":
            return gates.ISWAP
        return gates.root_iswap(self.n)

    @property
    def coordinates(self) -> tuple[float, float, float]:
        return weyl_coordinates(self.unitary)

    @property
    def is_supercontrolled(self) -> bool:
        c = self.coordinates
        return abs(c[0] - pi / 4) < WEYL_TOL and abs(c[2]) < WEYL_TOL


def _is_local(c, tol=WEYL_TOL) -> bool:
    return abs(c[0]) <= tol and abs(c[1]) <= tol and abs(c[2]) <= tol


def _at_point(c, point, tol=WEYL_TOL) -> bool:
    return all(abs(a - b) <= tol for a, b in zip(c, point))


def _haar_su2(rng) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@lru_cache(maxsize=8)
def _sampled_hulls(kind: str, n: int):
    """Coverage convex hulls in coordinate space for deep iswap roots."""
    from scipy.spatial import ConvexHull

    basis = gates.root_iswap(n)
    rng = np.random.default_rng(20240717)
    hulls = {}
    for k, samples in ((2, 4000), (3, 6000)):
        pts = np.empty((samples, 3))
        for i in range(samples):
            prod = basis
            for _ in range(k - 1):
                local = np.kron(_haar_su2(rng), _haar_su2(rng))
                prod = prod @ local @ basis
            pts[i] = weyl_coordinates(prod)
        try:
            hull = ConvexHull(pts, qhull_options="QJ")
            hulls[k] = hull.equations
        except Exception:  # degenerate (flat) point cloud
            hulls[k] = None
    return hulls


def _in_hull(c, equations, margin=1e-4) -> bool:
    if equations is None:
        return False
    x = np.array([c[0], c[1], c[2], 1.0])
    return bool(np.all(equations @ x <= margin))


def basis_gate_count(u: np.ndarray, basis: BasisGate) -> int:
    """Smallest k in {0..3} with U reachable by k basis uses plus 1q gates."""
    c = weyl_coordinates(u)
    if _is_local(c):
        return 0
    if _at_point(c, basis.coordinates):
        return 1
    if basis.is_supercontrolled:
        # Two uses of any (pi/4, b, 0) basis cover exactly the c3 = 0 plane;
        # three uses cover the whole chamber.
        return 2 if abs(c[2]) <= WEYL_TOL else 3
    if basis.kind == "root_iswap" and basis.n == 2:
        # Two square-root-iswaps reach exactly c1 >= c2 + |c3|.
        if c[0] + WEYL_TOL >= c[1] + abs(c[2]):
            return 2
        return 3
    hulls = _sampled_hulls("root_iswap", basis.n)
    if _in_hull(c, hulls[2], margin=1e-6):
        return 2
    if _in_hull(c, hulls[3], margin=1e-6):
        return 3
    raise UnreachableError(
        f"target {tuple(round(x, 6) for x in c)} unreachable in <=3 uses of {basis.name}"
    )


@lru_cache(maxsize=64)
def _named_gate_count(basis: BasisGate, kind: str, n: int, mirrored: bool) -> int:
    g = Gate(id=0, kind=kind, wires=(0, 1), n=n, mirrored=mirrored)
    return basis_gate_count(gate_unitary(g), basis)


def gate_count(g: Gate, basis: BasisGate) -> int:
    """Decomposition count k(g, basis); cached for parameter-free kinds."""
    if not g.is_two_qubit:
        return 0
    if g.kind == "unitary":
        return basis_gate_count(gate_unitary(g), basis)
    return _named_gate_count(basis, g.kind, g.n, g.mirrored)


def swap_count(basis: BasisGate) -> int:
    """k(SWAP, basis): native cost of one routing hop."""
    return _named_gate_count(basis, "swap", 1, False)
