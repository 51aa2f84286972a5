"""Test the oracle synthesis."""

import tempfile
import unittest
from pathlib import Path

import numpy as np

from eqc_deutsch_jozsa.models import BooleanOracle, OracleClass, OracleParams
from eqc_deutsch_jozsa.oracles import (
    PRESETS,
    alpha_coefficients,
    bit_dot,
    bits_of,
    classify,
    enumerate_all,
    enumerate_balanced,
    enumerate_constant,
    expanded_hamiltonian,
    preset,
    qubit_oracle_hamiltonian,
    qubit_oracle_unitary,
    qubit_position,
    random_params,
    read_oracle_file,
    verify_oracle,
)
from eqc_deutsch_jozsa.utils import CapacityError, ValidationError


class TestEnumeration(unittest.TestCase):
    """Test the oracle enumeration and presets."""

    def test_counts(self):
        """C(2^M, 2^(M−1)) balanced functions, two constant ones."""
        self.assertEqual([len(list(enumerate_balanced(m))) for m in (1, 2, 3)], [2, 6, 70])
        self.assertEqual(len(list(enumerate_all(2))), 8)
        self.assertEqual([str(oracle) for oracle in enumerate_constant(2)], ["0000", "1111"])

        with self.assertRaises(CapacityError):
            list(enumerate_balanced(5))

    def test_presets(self):
        """f1…f6 are the balanced M=2 functions in enumeration order."""
        balanced = [oracle.f_set for oracle in enumerate_balanced(2)]
        self.assertEqual([preset(f"f{index}").f_set for index in range(1, 7)], balanced)
        self.assertEqual(preset("f4").f_set, (0, 3))
        self.assertEqual(preset("m3-entangled").f_set, (0, 1, 2, 4))
        self.assertIn("m3-entangled", PRESETS)

        with self.assertRaises(ValidationError):
            preset("f7")

    def test_classify(self):
        """Classification of raw tables."""
        self.assertIs(classify((0, 1, 1, 0)), OracleClass.BALANCED)
        self.assertIs(classify((1, 1)), OracleClass.CONSTANT)
        self.assertIs(classify((1, 0, 0, 0)), OracleClass.INVALID)

        with self.assertRaises(ValidationError):
            classify((0, 1, 1))

    def test_read_oracle_file(self):
        """Files contain exactly one truth table line."""
        with tempfile.TemporaryDirectory() as tmp_dir:
            path = Path(tmp_dir) / "oracle.txt"
            path.write_text("\n1001\n\n")
            self.assertEqual(str(read_oracle_file(path)), "1001")

            path.write_text("1001\n0110\n")

            with self.assertRaises(ValidationError):
                read_oracle_file(path)

            with self.assertRaises(ValidationError):
                read_oracle_file(Path(tmp_dir) / "missing.txt")


class TestBits(unittest.TestCase):
    """Test the bit helpers."""

    def test_bits(self):
        """x₁ is the least significant bit of x and the most significant qubit position."""
        self.assertEqual(bits_of(6, 3), (0, 1, 1))
        self.assertEqual(bit_dot(0b101, 0b111), 0)
        self.assertEqual(bit_dot(0b100, 0b111), 1)
        self.assertEqual(qubit_position(1, 2), 2)
        self.assertEqual(qubit_position(2, 2), 1)
        self.assertEqual(qubit_position(0, 2, y=1), 4)


class TestHamiltonians(unittest.TestCase):
    """Test the oracle Hamiltonians."""

    def test_unitary(self):
        """U_f is a permutation flipping y exactly for x ∈ F."""
        oracle = BooleanOracle.from_str("01")
        unitary = qubit_oracle_unitary(oracle)
        np.testing.assert_allclose(
            unitary, [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]]
        )

    def test_alpha(self):
        """α_z of the Deutsch oracle and the inverse transform."""
        coeffs = alpha_coefficients(BooleanOracle.from_str("01"), OracleParams())
        np.testing.assert_allclose(coeffs.alpha, [0.5, -0.5])
        self.assertTrue(coeffs.is_linear)

        oracle = preset("f3")
        coeffs = alpha_coefficients(oracle, OracleParams())
        self.assertFalse(coeffs.is_linear)

        for x in range(4):
            value = sum(coeffs.alpha[z] * (-1) ** bit_dot(z, x) for z in range(4))
            self.assertAlmostEqual(value, oracle(x))

        with self.assertRaises(ValidationError):
            alpha_coefficients(BooleanOracle.from_str("00"), OracleParams())

    def test_verify_all(self):
        """exp(−iH_f) equals U_f for every oracle up to M=3 and random j_x."""
        rng = np.random.default_rng(1729)

        for m in (1, 2, 3):
            for oracle in enumerate_all(m):
                draws = [OracleParams()] + [random_params(oracle, rng) for _ in range(5)]

                for params in draws:
                    residual = verify_oracle(qubit_oracle_hamiltonian(oracle, params), oracle)
                    self.assertLess(residual, 1e-9, f"{oracle} {params}")

    def test_verify_random_draws(self):
        """Fifty random draws for every balanced oracle up to M=3."""
        rng = np.random.default_rng(7)

        for m in (1, 2, 3):
            oracles = list(enumerate_balanced(m))
            self.assertEqual(len(oracles), {1: 2, 2: 6, 3: 70}[m])

            for oracle in oracles:
                for _ in range(50):
                    params = random_params(oracle, rng)
                    residual = verify_oracle(qubit_oracle_hamiltonian(oracle, params), oracle)
                    self.assertLess(residual, 1e-9, f"{oracle} {params}")

    def test_constant_hamiltonians(self):
        """H_{f=0} = 2πj and H_{f=1} flips y for every j."""
        zero = BooleanOracle.from_str("0000")
        hamiltonian = qubit_oracle_hamiltonian(zero, OracleParams(j_const=2))
        self.assertLess(verify_oracle(hamiltonian, zero), 1e-9)
        one = BooleanOracle.from_str("1111")
        hamiltonian = qubit_oracle_hamiltonian(one, OracleParams(j_const=-3))
        self.assertLess(verify_oracle(hamiltonian, one), 1e-9)

    def test_expanded_form(self):
        """The Σα_z Πσ^Z expansion equals the projector form."""
        rng = np.random.default_rng(11)

        for oracle in enumerate_balanced(3):
            params = random_params(oracle, rng)
            np.testing.assert_allclose(
                expanded_hamiltonian(alpha_coefficients(oracle, params)),
                qubit_oracle_hamiltonian(oracle, params),
                atol=1e-12,
            )

    def test_invalid(self):
        """Neither constant nor balanced oracles and stray parameters are rejected."""
        with self.assertRaises(ValidationError):
            qubit_oracle_hamiltonian(BooleanOracle.from_str("0111"), OracleParams())

        with self.assertRaises(ValidationError):
            qubit_oracle_hamiltonian(preset("f1"), OracleParams({0: 1}))

        with self.assertRaises(ValidationError):
            verify_oracle(np.eye(4), preset("f1"))

    def test_random_params(self):
        """Draws are reproducible and cover F only."""
        oracle = preset("f5")
        first = random_params(oracle, np.random.default_rng(3))
        second = random_params(oracle, np.random.default_rng(3))
        self.assertEqual(first, second)
        self.assertEqual(set(first.j_map), {0, 2})
        self.assertTrue(all(-3 <= j <= 3 for j in first.j_map.values()))
