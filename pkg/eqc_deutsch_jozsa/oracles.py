"""
Deutsch-Jozsa functions and the oracle unitaries and Hamiltonians that realize them.

Bit convention: x₁ is the least significant bit of the integer x. In qubit state vectors the
qubit order is (y, x₁, …, x_M), row-major with the last qubit fastest.
"""

import itertools
import math
import typing
from pathlib import Path

import numpy as np

from .fock import expm_hermitian
from .models import BooleanOracle, OracleClass, OracleCoefficients, OracleParams
from .utils import LOGGER, CapacityError, ValidationError, log2_exact

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
#: Textbook σ^Z with eigenvalue (−1)^x on |x⟩ (this is −S^Z at N=1).
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: Largest M for which balanced functions are enumerated.
MAX_ENUMERATION_M = 4

#: Named oracles: the six balanced M=2 functions and the M=3 entangling example.
PRESETS: dict[str, tuple[int, tuple[int, ...]]] = {
    "f1": (2, (2, 3)),
    "f2": (2, (1, 3)),
    "f3": (2, (1, 2)),
    "f4": (2, (0, 3)),
    "f5": (2, (0, 2)),
    "f6": (2, (0, 1)),
    "m3-entangled": (3, (0, 1, 2, 4)),
}


def preset(name: str) -> BooleanOracle:
    """Look up a named oracle."""
    try:
        m, f_set = PRESETS[name]
    except KeyError as err:
        raise ValidationError(
            f"Unknown preset {name!r}. Known presets: {', '.join(PRESETS)}."
        ) from err

    return BooleanOracle.from_f_set(m, f_set)


def read_oracle_file(path: Path) -> BooleanOracle:
    """Read a truth table file: one line of 2^M characters in {0,1}."""
    try:
        lines = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    except OSError as err:
        raise ValidationError(f"Could not read oracle file {path}: {err}") from err

    if len(lines) != 1:
        raise ValidationError(f"Oracle file {path} must contain exactly one truth table line.")

    return BooleanOracle.from_str(lines[0])


def classify(table: typing.Sequence[int]) -> OracleClass:
    """Constant, balanced or invalid."""
    log2_exact(len(table))
    return BooleanOracle(tuple(table)).oracle_class


def bits_of(x: int, m: int) -> tuple[int, ...]:
    """(x₁, …, x_M) of the integer x."""
    return tuple((x >> n) & 1 for n in range(m))


def bit_dot(z: int, x: int) -> int:
    """z·x mod 2."""
    return bin(z & x).count("1") % 2


def qubit_position(x: int, m: int, y: int = 0) -> int:
    """Index of |y⟩|x⟩ in a qubit state vector ordered (y, x₁, …, x_M)."""
    position = y

    for bit in bits_of(x, m):
        position = 2 * position + bit

    return position


def x_register_diagonal(values: typing.Callable[[int], float], m: int) -> np.ndarray:
    """Diagonal of Σ_x values(x)|x⟩⟨x| in qubit order (x₁, …, x_M)."""
    diagonal = np.zeros(2**m)

    for x in range(2**m):
        diagonal[qubit_position(x, m)] = values(x)

    return diagonal


def alpha_coefficients(oracle: BooleanOracle, params: OracleParams) -> OracleCoefficients:
    """α_z = 2^{−M} Σ_{x∈F} (2j_x+1)(−1)^{z·x}."""
    if not oracle.f_set:
        raise ValidationError("F is empty; the f=0 oracle is realized by H = 2πj instead.")

    params.validate(oracle)
    size = 2**oracle.m
    alpha = np.array(
        [
            sum((2 * params.j_for(x) + 1) * (-1) ** bit_dot(z, x) for x in oracle.f_set)
            for z in range(size)
        ],
        dtype=float,
    )
    return OracleCoefficients(oracle.m, alpha / size)


def qubit_oracle_unitary(oracle: BooleanOracle) -> np.ndarray:
    """Permutation |y⟩|x⟩ → |y⊕f(x)⟩|x⟩."""
    m = oracle.m
    size = 2 ** (m + 1)
    unitary = np.zeros((size, size), dtype=complex)

    for y in (0, 1):
        for x in range(2**m):
            unitary[qubit_position(x, m, y ^ oracle(x)), qubit_position(x, m, y)] = 1

    return unitary


def _y_flip_generator() -> np.ndarray:
    return math.pi * (PAULI_X - IDENTITY_2) / 2


def qubit_oracle_hamiltonian(oracle: BooleanOracle, params: OracleParams) -> np.ndarray:
    """
    H_f = π((σ^X₀−I)/2) Σ_{x∈F}(2j_x+1)|x⟩⟨x|, and H_{f=0} = 2πj·I.

    exp(−iH_f) equals the oracle unitary up to a global phase.
    """
    if oracle.oracle_class is OracleClass.INVALID:
        raise ValidationError(f"Oracle {oracle} is neither constant nor balanced.")

    size = 2 ** (oracle.m + 1)

    if not oracle.f_set:
        return 2 * math.pi * params.j_const * np.eye(size, dtype=complex)

    params.validate(oracle)
    weights = x_register_diagonal(
        lambda x: (2 * params.j_for(x) + 1) if oracle(x) else 0, oracle.m
    )
    return np.kron(_y_flip_generator(), np.diag(weights))


def expanded_hamiltonian(coeffs: OracleCoefficients) -> np.ndarray:
    """π((σ^X₀−I)/2) Σ_z α_z Π_n (σ^Z_n)^{z_n}, the expanded form of H_f."""
    m = coeffs.m
    register = np.zeros((2**m, 2**m), dtype=complex)

    for z in range(2**m):
        if coeffs.alpha[z] == 0:
            continue

        factors = [PAULI_Z if bit else IDENTITY_2 for bit in bits_of(z, m)]
        register += coeffs.alpha[z] * _kron_all(factors)

    return np.kron(_y_flip_generator(), register)


def _kron_all(factors: typing.Sequence[np.ndarray]) -> np.ndarray:
    result = np.ones((1, 1), dtype=complex)

    for factor in factors:
        result = np.kron(result, factor)

    return result


def verify_oracle(h: np.ndarray, oracle: BooleanOracle) -> float:
    """max |exp(−iH) − e^{iφ}U_f| with the global phase φ fitted."""
    target = qubit_oracle_unitary(oracle)

    if h.shape != target.shape:
        raise ValidationError(f"Hamiltonian {h.shape} does not match oracle {target.shape}.")

    unitary = expm_hermitian(h)
    inner = np.vdot(target, unitary)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    residual = float(np.max(np.abs(unitary - phase * target)))
    LOGGER.debug("Oracle %s verified with residual %.3e", oracle, residual)
    return residual


def enumerate_constant(m: int) -> typing.Iterator[BooleanOracle]:
    """f=0 then f=1."""
    yield BooleanOracle((0,) * 2**m)
    yield BooleanOracle((1,) * 2**m)


def enumerate_balanced(m: int) -> typing.Iterator[BooleanOracle]:
    """Every balanced function on M bits once, ascending by truth table."""
    if not 1 <= m <= MAX_ENUMERATION_M:
        raise CapacityError(
            f"Balanced functions are enumerated for 1 <= M <= {MAX_ENUMERATION_M}, got M={m}."
        )

    size = 2**m
    tables = sorted(
        tuple(int(x in ones) for x in range(size))
        for ones in itertools.combinations(range(size), size // 2)
    )

    for table in tables:
        yield BooleanOracle(table)


def enumerate_all(m: int) -> typing.Iterator[BooleanOracle]:
    """Constant oracles followed by the balanced ones."""
    yield from enumerate_constant(m)
    yield from enumerate_balanced(m)


def random_params(
    oracle: BooleanOracle, rng: np.random.Generator, low: int = -3, high: int = 3
) -> OracleParams:
    """Draw j_x uniformly from [low, high] for every x ∈ F."""
    return OracleParams(
        {x: int(rng.integers(low, high, endpoint=True)) for x in oracle.f_set}
    )
