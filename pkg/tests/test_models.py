"""Test the data structures."""

import argparse
import math
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from eqc_deutsch_jozsa.models import (
    BooleanOracle,
    DensityMatrix,
    DephasingSpec,
    EnsembleDims,
    ExperimentConfig,
    FockIndex,
    LogReal,
    OracleClass,
    OracleParams,
    ParityState,
    StateVector,
    parse_oracle_arg,
)
from eqc_deutsch_jozsa.utils import CapacityError, ValidationError

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(
    lambda value: abs(value) > 1e-6
)


class TestLogReal(unittest.TestCase):
    """Test the LogReal model."""

    def test_zero(self):
        """Zero is exact and absorbing."""
        zero = LogReal.zero()
        self.assertTrue(zero.is_zero)
        self.assertEqual(zero.ln_mag, -math.inf)
        self.assertTrue((zero * LogReal.from_float(3.0)).is_zero)
        self.assertEqual(float(zero + LogReal.from_float(2.0)), 2.0)
        self.assertTrue(LogReal.from_float(0.0).is_zero)
        self.assertTrue(LogReal.from_ln(-math.inf).is_zero)
        self.assertEqual(str(zero), "0")

    def test_tiny_values(self):
        """Values far below the float range keep their exponent."""
        tiny = LogReal.from_float(1e-300) ** 7
        self.assertAlmostEqual(tiny.log10, -2100, places=6)
        self.assertEqual(tiny.to_float(), 0.0)
        self.assertFalse(tiny.is_zero)

    def test_cancellation(self):
        """x + (−x) is an exact zero."""
        value = LogReal.from_float(0.375)
        self.assertTrue((value + -value).is_zero)

    def test_invalid(self):
        """Invalid signs and NaN are rejected."""
        with self.assertRaises(ValidationError):
            LogReal(2, 0.0)

        with self.assertRaises(ValidationError):
            LogReal(1, math.nan)

    @given(finite_floats, finite_floats)
    def test_arithmetic(self, a, b):
        """Products and sums agree with float arithmetic."""
        product = LogReal.from_float(a) * LogReal.from_float(b)
        self.assertTrue(math.isclose(product.to_float(), a * b, rel_tol=1e-9))
        total = LogReal.from_float(a) + LogReal.from_float(b)
        self.assertTrue(math.isclose(total.to_float(), a + b, rel_tol=1e-6, abs_tol=1e-6))

    def test_power(self):
        """Integer powers keep the sign."""
        self.assertAlmostEqual((LogReal.from_float(-2.0) ** 3).to_float(), -8.0)
        self.assertAlmostEqual((LogReal.from_float(-2.0) ** 2).to_float(), 4.0)
        self.assertEqual((LogReal.zero() ** 0).to_float(), 1.0)


class TestBooleanOracle(unittest.TestCase):
    """Test the BooleanOracle model."""

    def test_parse(self):
        """Truth tables are parsed and classified."""
        oracle = BooleanOracle.from_str("1001")
        self.assertEqual(oracle.m, 2)
        self.assertEqual(oracle.f_set, (0, 3))
        self.assertEqual(oracle(3), 1)
        self.assertEqual(str(oracle), "1001")
        self.assertIs(oracle.oracle_class, OracleClass.BALANCED)
        self.assertIs(BooleanOracle.from_str("0000").oracle_class, OracleClass.CONSTANT)
        self.assertIs(BooleanOracle.from_str("11").oracle_class, OracleClass.CONSTANT)
        self.assertIs(BooleanOracle.from_str("0111").oracle_class, OracleClass.INVALID)

    def test_invalid(self):
        """Malformed truth tables are rejected."""
        for value in ("", "1", "101", "10a1", "1021"):
            with self.assertRaises(ValidationError):
                BooleanOracle.from_str(value)

        with self.assertRaises(argparse.ArgumentTypeError):
            parse_oracle_arg("")

    def test_from_f_set(self):
        """F determines the table."""
        self.assertEqual(BooleanOracle.from_f_set(3, [0, 1, 2, 4]).table, (1, 1, 1, 0, 1, 0, 0, 0))

        with self.assertRaises(ValidationError):
            BooleanOracle.from_f_set(2, [4])


class TestParams(unittest.TestCase):
    """Test OracleParams."""

    def test_params(self):
        """j_x lookup with fallback and validation against F."""
        oracle = BooleanOracle.from_str("0110")
        params = OracleParams({1: 2}, j_const=-1)
        self.assertEqual(params.j_for(1), 2)
        self.assertEqual(params.j_for(2), -1)
        self.assertIs(params.validate(oracle), params)
        self.assertEqual(str(params), "j1=2")
        self.assertEqual(str(OracleParams()), "j=0")

        with self.assertRaises(ValidationError):
            OracleParams({0: 1}).validate(oracle)


class TestDims(unittest.TestCase):
    """Test EnsembleDims and the Fock labels."""

    def test_from_args(self):
        """A single --n is broadcast and N0 defaults to it."""
        dims = EnsembleDims.from_args(argparse.Namespace(n=[4], n0=None), 3)
        self.assertEqual(dims.n_x, (4, 4, 4))
        self.assertEqual(dims.n_y, 4)
        self.assertEqual(dims.all_counts, (4, 4, 4, 4))
        self.assertEqual(str(dims), "N0=4;N=4,4,4")

        dims = EnsembleDims.from_args(argparse.Namespace(n=[2, 3], n0=5), 2)
        self.assertEqual(dims.n_x, (2, 3))
        self.assertEqual(dims.n_y, 5)

        with self.assertRaises(ValidationError):
            EnsembleDims.from_args(argparse.Namespace(n=[2, 3], n0=None), 3)

    def test_caps(self):
        """Dimensions are checked against the cap."""
        dims = EnsembleDims.uniform(9, 2)
        self.assertEqual(dims.x_dim(100), 100)
        self.assertEqual(dims.total_dim(1000), 1000)

        with self.assertRaises(CapacityError):
            dims.x_dim(99)

    def test_invalid(self):
        """Empty registers and non-positive counts are rejected."""
        with self.assertRaises(ValidationError):
            EnsembleDims(n_y=1, n_x=())

        with self.assertRaises(ValidationError):
            EnsembleDims(n_y=0, n_x=(1,))

    def test_fock_index(self):
        """Labels are range checked and decode to parity bits."""
        index = FockIndex((3, 2, 5)).validate((4, 4, 5))
        self.assertEqual(ParityState.from_fock(index).bits, (1, 0, 1))
        self.assertEqual(ParityState.from_fock(index).x, 5)

        with self.assertRaises(ValidationError):
            FockIndex((3,)).validate((2,))


class TestStates(unittest.TestCase):
    """Test StateVector and DensityMatrix."""

    def test_state_vector(self):
        """Amplitudes are frozen and shape checked."""
        psi = StateVector((1, 2), np.arange(6))
        self.assertEqual(psi.shape, (2, 3))
        self.assertEqual(psi.amplitude(FockIndex((1, 0))), 3)

        with self.assertRaises(ValueError):
            psi.amps[0] = 1

        with self.assertRaises(ValidationError):
            StateVector((1, 2), np.arange(5))

    def test_density_matrix(self):
        """Pure states have trace one and are Hermitian."""
        psi = StateVector((1,), np.array([0.6, 0.8j]))
        rho = DensityMatrix.from_state(psi)
        self.assertAlmostEqual(rho.trace().real, 1.0)
        self.assertLess(rho.hermiticity_error(), 1e-15)
        np.testing.assert_allclose(rho.populations(), [0.36, 0.64])


class TestConfig(unittest.TestCase):
    """Test DephasingSpec and ExperimentConfig."""

    def test_dephasing_spec(self):
        """Targets default to every ensemble; negative rates are invalid."""
        self.assertEqual(DephasingSpec(0.1, 1.0).target_ensembles(3), frozenset({1, 2, 3}))
        self.assertEqual(DephasingSpec(0.1, 1.0, frozenset({2})).target_ensembles(2), {2})

        with self.assertRaises(ValidationError):
            DephasingSpec(-0.1, 1.0)

        with self.assertRaises(ValidationError):
            DephasingSpec(0.1, math.inf)

        with self.assertRaises(ValidationError):
            DephasingSpec(0.1, 1.0, frozenset({3})).target_ensembles(2)

    def test_experiment_config(self):
        """Config fields are copied from the arguments."""
        args = argparse.Namespace(
            command="method", n=[3], n0=None, m=2, seed=5, cap=77, method=1, debug=True
        )
        config = ExperimentConfig.from_args(args, [])
        self.assertEqual(config.command, "method")
        self.assertEqual(config.seed, 5)
        self.assertEqual(config.cap, 77)
        self.assertEqual(config.dims.n_x, (3, 3))

        with self.assertRaises(ValidationError):
            ExperimentConfig(command="curves", tau_grid=[0.0, math.nan])

        with self.assertRaises(ValidationError):
            ExperimentConfig(command="curves", plot_stub=True)
