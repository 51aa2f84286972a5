"""Test the coherent-state encoding (Method 2)."""

import math
import unittest
from fractions import Fraction

import numpy as np

from eqc_deutsch_jozsa.analysis import epsilon_m
from eqc_deutsch_jozsa.fock import basis_state, max_abs_diff_up_to_phase, overlap
from eqc_deutsch_jozsa.method2 import (
    classical_mode_m2,
    cos_pi_fraction,
    deutsch_probability,
    dense_y_phase_check,
    initial_x_register,
    linear_p_init,
    mapped_hamiltonian_m2,
    oracle_coefficients,
    phase_function_m2,
    phase_grid,
    quantum_mode_m2,
    recommended_params,
)
from eqc_deutsch_jozsa.models import (
    BooleanOracle,
    EnsembleDims,
    FockIndex,
    OracleClass,
    OracleParams,
)
from eqc_deutsch_jozsa.oracles import (
    bit_dot,
    enumerate_all,
    enumerate_balanced,
    enumerate_constant,
    preset,
)
from eqc_deutsch_jozsa.qubit_reference import run_dj_qubits, x_register_state
from eqc_deutsch_jozsa.utils import CapacityError, ValidationError


def dense_p_init(run) -> float:
    """|⟨0…0|final⟩|² of a dense run."""
    ground = basis_state(run.dims.n_x, (0,) * run.dims.m)
    return abs(overlap(ground, run.final_state)) ** 2


class TestCoefficients(unittest.TestCase):
    """Test the α_z and the recommended parameters."""

    def test_zero_oracle(self):
        """f=0 has no Hamiltonian."""
        coeffs = oracle_coefficients(BooleanOracle.from_str("0000"), OracleParams())
        np.testing.assert_allclose(coeffs.alpha, 0)

    def test_recommended(self):
        """j_x = −x₁ bounds every α_z by 1/2 and makes α_{e₁} = 1/2."""
        for oracle in enumerate_balanced(2):
            params = recommended_params(oracle)
            coeffs = oracle_coefficients(oracle, params)
            self.assertTrue(np.all(np.abs(coeffs.alpha) <= 0.5 + 1e-12))
            self.assertAlmostEqual(coeffs.alpha[1], 0.5)

        with self.assertRaises(ValidationError):
            recommended_params(BooleanOracle.from_str("1111"))

    def test_phase_function(self):
        """The phase of a single Fock state matches the grid."""
        oracle = preset("f3")
        dims = EnsembleDims(4, (2, 3))
        coeffs = oracle_coefficients(oracle, OracleParams())
        grid = phase_grid(coeffs, dims)
        self.assertAlmostEqual(phase_function_m2(coeffs, dims, FockIndex((1, 2))), grid[1, 2])

        with self.assertRaises(ValidationError):
            phase_function_m2(coeffs, dims, FockIndex((3, 0)))

    def test_phase_function_qubit_sign(self):
        """At N=1 the phase is π·N₀·Σ α_z (−1)^{z·x}, the qubit σ^Z eigenvalues."""
        oracle = preset("f6")
        dims = EnsembleDims(3, (1, 1))
        coeffs = oracle_coefficients(oracle, OracleParams())

        for x in range(4):
            expected = math.pi * 3 * sum(
                coeffs.alpha[z] * (-1) ** bit_dot(z, x) for z in range(4)
            )
            k = FockIndex((x & 1, x >> 1))
            self.assertAlmostEqual(phase_function_m2(coeffs, dims, k), expected)


class TestClassicalMode(unittest.TestCase):
    """Test the classical mode."""

    def test_truth_tables(self):
        """Pole inputs are mapped exactly to y ⊕ f(x)."""
        dims = EnsembleDims.uniform(3, 2)

        for oracle in enumerate_all(2):
            for x in range(4):
                for y in (0, 1):
                    flipped = classical_mode_m2(oracle, OracleParams(), x, y, dims)
                    self.assertEqual(flipped, y ^ oracle(x))

    def test_cap(self):
        """Classical mode is simulated densely for small N only."""
        with self.assertRaises(CapacityError):
            classical_mode_m2(preset("f1"), OracleParams(), 0, 0, EnsembleDims.uniform(7, 2))

    def test_invalid_input(self):
        """x and y must be valid inputs."""
        with self.assertRaises(ValidationError):
            classical_mode_m2(preset("f1"), OracleParams(), 4, 0, EnsembleDims.uniform(2, 2))


class TestQuantumMode(unittest.TestCase):
    """Test the quantum mode."""

    def test_constants(self):
        """Constant oracles return to the initial state."""
        dims = EnsembleDims.uniform(6, 2)

        for oracle in enumerate_constant(2):
            run = quantum_mode_m2(oracle, OracleParams(), dims)
            self.assertAlmostEqual(run.p_init.to_float(), 1.0, places=10)
            self.assertIs(run.decision, OracleClass.CONSTANT)

    def test_global_phase(self):
        """The f=1 oracle multiplies the register by (−1)^{N₀}."""
        one = BooleanOracle.from_str("1111")

        for n0, params, expected in (
            (3, OracleParams(), -1),
            (4, OracleParams(), 1),
            (3, OracleParams(j_const=1), -1),
        ):
            dims = EnsembleDims(n0, (4, 4))
            run = quantum_mode_m2(one, params, dims)
            self.assertEqual(run.global_phase, expected)
            np.testing.assert_allclose(
                run.post_oracle_state.amps, expected * initial_x_register(dims).amps, atol=1e-12
            )

        zero = quantum_mode_m2(BooleanOracle.from_str("0000"), OracleParams(), dims)
        self.assertEqual(zero.global_phase, 1)

    def test_separation(self):
        """With recommended parameters every balanced oracle leaves p_init below 1e−3 at N=12."""
        dims = EnsembleDims.uniform(12, 2)

        for oracle in enumerate_balanced(2):
            run = quantum_mode_m2(oracle, recommended_params(oracle), dims)
            self.assertLess(run.p_init.to_float(), 1e-3, str(oracle))
            self.assertIs(run.decision, OracleClass.BALANCED)

    def test_second_order_bound(self):
        """At N=8 p_init stays within the second-order error at τ=1/(2N)."""
        dims = EnsembleDims.uniform(8, 2)
        bound = epsilon_m(1 / 16, 2, (8, 8)).to_float()

        for oracle in enumerate_balanced(2):
            run = quantum_mode_m2(oracle, recommended_params(oracle), dims)
            self.assertLessEqual(run.p_init.to_float(), bound * (1 + 1e-9) + 1e-15)

    def test_f4_vanishes(self):
        """f4 with recommended parameters is linear and gives exactly zero."""
        oracle = preset("f4")
        run = quantum_mode_m2(oracle, recommended_params(oracle), EnsembleDims.uniform(8, 2))
        self.assertTrue(run.coeffs.is_linear)
        self.assertTrue(run.p_init.is_zero)
        self.assertLess(dense_p_init(run), 1e-20)

    def test_closed_form_path(self):
        """Beyond the cap a linear Hamiltonian uses the closed form."""
        oracle = preset("f5")
        params = recommended_params(oracle)
        dims = EnsembleDims(7, (5, 9))
        dense = quantum_mode_m2(oracle, params, dims)
        closed = quantum_mode_m2(oracle, params, dims, cap=10)
        self.assertIsNone(closed.final_state)
        self.assertAlmostEqual(closed.p_init.to_float(), dense_p_init(dense), places=10)

        with self.assertRaises(CapacityError):
            quantum_mode_m2(preset("f3"), OracleParams(), dims, cap=10)

    def test_qubit_limit(self):
        """At N=1 the final register matches the qubit circuit."""
        dims = EnsembleDims.uniform(1, 2)

        for oracle in enumerate_all(2):
            run = quantum_mode_m2(oracle, OracleParams(), dims)
            reference = x_register_state(run_dj_qubits(oracle).final_state)
            self.assertLess(max_abs_diff_up_to_phase(run.final_state.amps, reference.amps), 1e-10)

    def test_y_eigenstate(self):
        """The y-ensemble is an exact eigenstate of the mapped Hamiltonian."""
        dims = EnsembleDims(3, (2, 2))

        for oracle in enumerate_balanced(2):
            coeffs = oracle_coefficients(oracle, OracleParams())
            self.assertLess(dense_y_phase_check(coeffs, dims), 1e-9)
            hamiltonian = mapped_hamiltonian_m2(coeffs, dims)
            np.testing.assert_allclose(hamiltonian, hamiltonian.conj().T, atol=1e-12)


class TestDeutsch(unittest.TestCase):
    """Test the M=1 closed form."""

    def test_large_n(self):
        """p ≈ 10^−1863 for N₀=1000, N₁=1100."""
        self.assertAlmostEqual(deutsch_probability(1000, 1100).log10, -1863, delta=1)

    def test_exact_zeros(self):
        """N₀ = N₁ gives exactly zero for every j."""
        for n in (1, 10, 1000):
            for j in (0, 1):
                self.assertTrue(deutsch_probability(n, n, j).is_zero)

    def test_dense_agrees(self):
        """The dense M=1 run reproduces the closed form."""
        oracle = BooleanOracle.from_str("01")

        for n0, n1 in ((1, 1), (3, 5), (4, 6), (2, 7)):
            run = quantum_mode_m2(oracle, OracleParams(), EnsembleDims(n0, (n1,)))
            expected = deutsch_probability(n0, n1).to_float()
            self.assertAlmostEqual(dense_p_init(run), expected, places=10)
            self.assertEqual(linear_p_init(run.coeffs, run.dims), run.p_init)

    def test_cos_pi_fraction(self):
        """Exact values at integers and half-integers."""
        self.assertEqual(cos_pi_fraction(Fraction(3, 2)), 0.0)
        self.assertEqual(cos_pi_fraction(Fraction(3)), -1.0)
        self.assertEqual(cos_pi_fraction(Fraction(-4)), 1.0)
        self.assertAlmostEqual(cos_pi_fraction(Fraction(1, 3)), 0.5)

    def test_invalid(self):
        """Particle numbers must be positive."""
        with self.assertRaises(ValidationError):
            deutsch_probability(0, 3)

        self.assertTrue(math.isfinite(deutsch_probability(1, 3).log10))
