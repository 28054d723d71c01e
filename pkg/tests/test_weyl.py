from math import pi

import numpy as np
import pytest

from finesse import gates
from finesse.ir import Gate
from finesse.weyl import (
    BasisGate,
    NonUnitaryError,
    basis_gate_count,
    gate_count,
    gate_unitary,
    mirror,
    swap_count,
    weyl_coordinates,
)
from oracles import canonical_gate, haar_su2, haar_su4, same_local_class

SQISWAP = BasisGate.root_iswap(2)
ISWAP_B = BasisGate("iswap")
CX_B = BasisGate("cx")


class TestCoordinates:
    def test_identity(self):
        assert weyl_coordinates(np.eye(4)) == pytest.approx((0, 0, 0), abs=1e-10)

    def test_cx(self):
        assert weyl_coordinates(gates.CX) == pytest.approx((pi / 4, 0, 0), abs=1e-10)

    def test_swap(self):
        assert weyl_coordinates(gates.SWAP) == pytest.approx((pi / 4,) * 3, abs=1e-10)

    def test_iswap_and_root(self):
        assert weyl_coordinates(gates.ISWAP) == pytest.approx((pi / 4, pi / 4, 0), abs=1e-10)
        assert weyl_coordinates(gates.root_iswap(2)) == pytest.approx(
            (pi / 8, pi / 8, 0), abs=1e-10
        )

    def test_non_unitary_rejected(self):
        with pytest.raises(NonUnitaryError):
            weyl_coordinates(np.ones((4, 4)))

    def test_local_invariance_thousand_trials(self):
        rng = np.random.default_rng(71)
        for _ in range(1000):
            u = haar_su4(rng)
            c0 = weyl_coordinates(u)
            dressed = np.kron(haar_su2(rng), haar_su2(rng)) @ u @ np.kron(
                haar_su2(rng), haar_su2(rng)
            )
            assert weyl_coordinates(dressed) == pytest.approx(c0, abs=1e-8)

    def test_coordinates_label_the_class(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            u = haar_su4(rng)
            c = weyl_coordinates(u)
            assert same_local_class(u, canonical_gate(c))

    def test_chamber_constraints(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            c1, c2, c3 = weyl_coordinates(haar_su4(rng))
            assert pi / 4 + 1e-9 >= c1 >= c2 >= abs(c3) - 1e-12
            if abs(c1 - pi / 4) < 1e-9:
                assert c3 >= -1e-9


class TestMirror:
    def test_mirror_of_swap_is_identity_class(self):
        assert weyl_coordinates(mirror(gates.SWAP)) == pytest.approx((0, 0, 0), abs=1e-10)

    def test_involution(self):
        rng = np.random.default_rng(8)
        u = haar_su4(rng)
        assert np.allclose(mirror(mirror(u)), u)

    def test_mirror_of_cx_is_iswap_class(self):
        assert weyl_coordinates(mirror(gates.CX)) == pytest.approx(
            weyl_coordinates(gates.ISWAP), abs=1e-10
        )


class TestGateUnitary:
    def test_root_iswap_entries(self):
        m = gate_unitary(Gate(id=0, kind="root_iswap", wires=(0, 1), n=1))
        assert m[1, 2] == pytest.approx(1j)
        m2 = gate_unitary(Gate(id=0, kind="root_iswap", wires=(0, 1), n=2))
        assert m2[1, 1] == pytest.approx(np.sqrt(2) / 2)
        assert m2[1, 2] == pytest.approx(1j * np.sqrt(2) / 2)

    def test_large_order_approaches_identity(self):
        m = gate_unitary(Gate(id=0, kind="root_iswap", wires=(0, 1), n=10**6))
        assert np.max(np.abs(m - np.eye(4))) < 1e-5

    def test_one_qubit_rejected(self):
        with pytest.raises(ValueError):
            gate_unitary(Gate(id=0, kind="h", wires=(0,)))

    def test_mirrored_gate_folds_swap(self):
        g = Gate(id=0, kind="cx", wires=(0, 1), mirrored=True)
        assert np.allclose(gate_unitary(g), gates.SWAP @ gates.CX)

    def test_ecr_locally_equivalent_to_cx(self):
        assert weyl_coordinates(gates.ECR) == pytest.approx(
            weyl_coordinates(gates.CX), abs=1e-10
        )


class TestBasisCounts:
    def test_fixed_table_sqiswap(self):
        assert basis_gate_count(gates.CX, SQISWAP) == 2
        assert basis_gate_count(gates.SWAP, SQISWAP) == 3
        assert basis_gate_count(gates.ISWAP, SQISWAP) == 2
        assert basis_gate_count(gates.SWAP @ gates.CX, SQISWAP) == 2

    def test_fixed_table_iswap(self):
        assert basis_gate_count(gates.SWAP @ gates.CX, ISWAP_B) == 1

    def test_identity_and_self(self):
        for basis in (CX_B, ISWAP_B, SQISWAP, BasisGate("ecr")):
            assert basis_gate_count(np.eye(4), basis) == 0
            assert basis_gate_count(basis.unitary, basis) == 1

    def test_cx_basis_classics(self):
        assert basis_gate_count(gates.SWAP, CX_B) == 3
        assert basis_gate_count(gates.ISWAP, CX_B) == 2
        assert basis_gate_count(gates.CZ, CX_B) == 1

    def test_subadditive_under_composition(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            u, v = haar_su4(rng), haar_su4(rng)
            ku = basis_gate_count(u, SQISWAP)
            kv = basis_gate_count(v, SQISWAP)
            assert basis_gate_count(u @ v, SQISWAP) <= ku + kv

    def test_mirror_count_bounds(self):
        rng = np.random.default_rng(14)
        for _ in range(60):
            u = haar_su4(rng)
            k = basis_gate_count(u, SQISWAP)
            km = basis_gate_count(mirror(u), SQISWAP)
            assert 0 <= k <= 3 and 0 <= km <= 3 and abs(k - km) <= 3

    def test_gate_count_uses_mirror_flag(self):
        g = Gate(id=0, kind="swap", wires=(0, 1))
        assert gate_count(g, SQISWAP) == 3
        gm = Gate(id=0, kind="swap", wires=(0, 1), mirrored=True)
        assert gate_count(gm, SQISWAP) == 0

    def test_swap_cost_per_basis(self):
        assert swap_count(SQISWAP) == 3
        assert swap_count(CX_B) == 3
        assert swap_count(ISWAP_B) == 3

    def test_deep_root_reachability(self):
        basis = BasisGate.root_iswap(4)
        assert basis_gate_count(basis.unitary, basis) == 1
        prod = basis.unitary @ basis.unitary
        assert basis_gate_count(prod, basis) == 2
