"""Reference qubit (N=1) Deutsch-Jozsa circuit."""

import math

import numpy as np

from .fock import apply_local, basis_state, readout_hadamard
from .models import BooleanOracle, CircuitResult, OracleClass, StateVector
from .oracles import qubit_oracle_unitary, qubit_position
from .utils import ValidationError

#: Textbook Hadamard (equal to the readout Hadamard at N=1).
QUBIT_HADAMARD = readout_hadamard(1)


def _check(oracle: BooleanOracle) -> None:
    if oracle.oracle_class is OracleClass.INVALID:
        raise ValidationError(f"Oracle {oracle} is neither constant nor balanced.")


def _apply_unitary(unitary: np.ndarray, psi: StateVector) -> StateVector:
    return StateVector(psi.ns, unitary @ psi.amps)


def run_dj_qubits(oracle: BooleanOracle) -> CircuitResult:
    """Run the one-query Deutsch-Jozsa circuit starting from |1⟩|0…0⟩."""
    _check(oracle)
    m = oracle.m
    psi = basis_state((1,) * (m + 1), (1,) + (0,) * m)

    for qubit in range(m + 1):
        psi = apply_local(QUBIT_HADAMARD, qubit, psi)

    post_oracle = _apply_unitary(qubit_oracle_unitary(oracle), psi)
    final = post_oracle

    for qubit in range(1, m + 1):
        final = apply_local(QUBIT_HADAMARD, qubit, final)

    p_x0 = sum(abs(final.amps[qubit_position(0, m, y)]) ** 2 for y in (0, 1))

    return CircuitResult(
        post_oracle_state=post_oracle,
        final_state=final,
        p_x0=float(p_x0),
        decision=OracleClass.CONSTANT if p_x0 > 0.5 else OracleClass.BALANCED,
    )


def x_register_state(state: StateVector) -> StateVector:
    """Project the y-qubit onto |−⟩ and return the (unnormalized) x-register amplitudes."""
    m = len(state.ns) - 1
    rows = state.amps.reshape(2, 2**m)
    return StateVector((1,) * m, (rows[0] - rows[1]) / math.sqrt(2))


def classical_mode_qubits(oracle: BooleanOracle, y: int, x: int) -> int:
    """y ⊕ f(x), read off the y-qubit after applying the oracle to |y⟩|x⟩."""
    _check(oracle)
    m = oracle.m

    if not 0 <= x < 2**m or y not in (0, 1):
        raise ValidationError(f"Invalid classical input y={y}, x={x} for M={m}.")

    amps = np.zeros(2 ** (m + 1), dtype=complex)
    amps[qubit_position(x, m, y)] = 1
    out = qubit_oracle_unitary(oracle) @ amps
    p_one = sum(abs(out[qubit_position(x_out, m, 1)]) ** 2 for x_out in range(2**m))
    return int(p_one > 0.5)
