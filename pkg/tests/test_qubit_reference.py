"""Test the qubit Deutsch-Jozsa reference circuit."""

import math
import unittest

import numpy as np

from eqc_deutsch_jozsa.models import BooleanOracle, OracleClass
from eqc_deutsch_jozsa.oracles import enumerate_all, preset, qubit_position
from eqc_deutsch_jozsa.qubit_reference import (
    classical_mode_qubits,
    run_dj_qubits,
    x_register_state,
)
from eqc_deutsch_jozsa.utils import ValidationError


class TestQubitCircuit(unittest.TestCase):
    """Test run_dj_qubits."""

    def test_exhaustive(self):
        """Every oracle up to M=3 is decided correctly with p_x0 ∈ {0, 1}."""
        for m in (1, 2, 3):
            for oracle in enumerate_all(m):
                result = run_dj_qubits(oracle)
                expected = 1.0 if oracle.oracle_class is OracleClass.CONSTANT else 0.0
                self.assertLess(abs(result.p_x0 - expected), 1e-12, str(oracle))
                self.assertIs(result.decision, oracle.oracle_class)
                self.assertAlmostEqual(result.final_state.norm(), 1.0, places=12)

    def test_entangled_example(self):
        """The x-register after the M=3 oracle F={0,1,2,4}."""
        oracle = preset("m3-entangled")
        register = x_register_state(run_dj_qubits(oracle).post_oracle_state)

        for x in range(8):
            self.assertAlmostEqual(
                register.amps[qubit_position(x, 3)].real, (-1) ** oracle(x) / math.sqrt(8)
            )

        np.testing.assert_allclose(register.amps.imag, 0, atol=1e-12)

    def test_invalid(self):
        """Neither constant nor balanced oracles are rejected."""
        with self.assertRaises(ValidationError):
            run_dj_qubits(BooleanOracle.from_str("0111"))


class TestClassicalMode(unittest.TestCase):
    """Test classical_mode_qubits."""

    def test_truth_tables(self):
        """y ⊕ f(x) for every input."""
        for oracle in enumerate_all(2):
            for x in range(4):
                for y in (0, 1):
                    self.assertEqual(classical_mode_qubits(oracle, y, x), y ^ oracle(x))
