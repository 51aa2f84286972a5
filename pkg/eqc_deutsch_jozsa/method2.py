"""
Coherent-state encoding of the Deutsch-Jozsa algorithm.

Logical 0 and 1 are the poles |0,1⟩⟩ and |1,0⟩⟩. The qubit σ^Z (eigenvalue (−1)^x) becomes
−S^Z/N and the y-ensemble couples through (S^X₀−N₀)/2, whose eigenvalue is −N₀ on the state the
initial Hadamard prepares from |1,0⟩⟩.
"""

import math
import typing
from fractions import Fraction

import numpy as np

from .fock import (
    apply_diagonal,
    apply_to_all,
    basis_state,
    coherent_state,
    expm_hermitian,
    fock_grid,
    overlap,
    product_state,
    readout_hadamard,
    spin_operator,
)
from .models import (
    BooleanOracle,
    EnsembleDims,
    FockIndex,
    LogReal,
    Method2Run,
    OracleClass,
    OracleCoefficients,
    OracleParams,
    StateVector,
)
from .oracles import alpha_coefficients, bits_of
from .utils import DEFAULT_STATE_CAP, LOGGER, CapacityError, ValidationError

#: Classical-mode dense evolution is only done up to this particle number per ensemble.
MAX_CLASSICAL_N = 6


def oracle_coefficients(oracle: BooleanOracle, params: OracleParams) -> OracleCoefficients:
    """α_z of the oracle; all zero for f=0 (H = 0)."""
    if oracle.oracle_class is OracleClass.INVALID:
        raise ValidationError(f"Oracle {oracle} is neither constant nor balanced.")

    if not oracle.f_set:
        return OracleCoefficients(oracle.m, np.zeros(2**oracle.m))

    return alpha_coefficients(oracle, params)


def recommended_params(oracle: BooleanOracle) -> OracleParams:
    """j_x = −x₁, which makes α_{x₁} = 1/2 and bounds every |α_z| by 1/2."""
    if oracle.oracle_class is not OracleClass.BALANCED:
        raise ValidationError("Recommended parameters are defined for balanced oracles only.")

    return OracleParams({x: -(x & 1) for x in oracle.f_set})


def _register_diagonal(coeffs: OracleCoefficients, ns: typing.Sequence[int]) -> np.ndarray:
    """Σ_z α_z Π_n ((Nₙ−2kₙ)/Nₙ)^{z_n} over the x-register Fock basis."""
    grid = fock_grid(ns)
    scaled = [(n - 2.0 * k) / n for k, n in zip(grid, ns)]
    diagonal = np.zeros(grid[0].shape)

    for z in range(2**coeffs.m):
        if coeffs.alpha[z] == 0:
            continue

        term = np.full(grid[0].shape, coeffs.alpha[z])

        for factor, bit in zip(scaled, bits_of(z, coeffs.m)):
            if bit:
                term = term * factor

        diagonal += term

    return diagonal


def phase_grid(coeffs: OracleCoefficients, dims: EnsembleDims) -> np.ndarray:
    """phase_function_m2 for every x-register Fock state."""
    if coeffs.m != dims.m:
        raise ValidationError(f"Coefficients for M={coeffs.m} do not match {dims.m} ensembles.")

    return math.pi * dims.n_y * _register_diagonal(coeffs, dims.n_x)


def phase_function_m2(coeffs: OracleCoefficients, dims: EnsembleDims, k: FockIndex) -> float:
    """
    π·N₀·Σ_z α_z Π_n ((Nₙ−2kₙ)/Nₙ)^{z_n}, the phase picked up by |k⟩ in quantum mode.

    (Nₙ−2kₙ)/Nₙ is −S^Zₙ/Nₙ: σ^Z maps to −S^Z/N because the qubit σ^Z equals −S^Z at N=1, so
    this differs from the (2kₙ−Nₙ)/Nₙ form only by that sign convention.
    """
    k.validate(dims.n_x)
    return float(phase_grid(coeffs, dims)[k.k])


def mapped_hamiltonian_m2(coeffs: OracleCoefficients, dims: EnsembleDims) -> np.ndarray:
    """π((S^X₀−N₀)/2) ⊗ Σ_z α_z Π_n (−S^Zₙ/Nₙ)^{z_n} as a dense matrix over y ⊗ x."""
    y_operator = (spin_operator("X", dims.n_y) - dims.n_y * np.eye(dims.n_y + 1)) / 2
    register = np.diag(_register_diagonal(coeffs, dims.n_x).ravel())
    return math.pi * np.kron(y_operator, register)


def classical_mode_m2(
    oracle: BooleanOracle, params: OracleParams, x: int, y: int, dims: EnsembleDims
) -> int:
    """y ⊕ f(x), by dense evolution of |y⟩⟩|x⟩⟩ under the mapped Hamiltonian."""
    if not 0 <= x < 2**oracle.m or y not in (0, 1):
        raise ValidationError(f"Invalid classical input y={y}, x={x} for M={oracle.m}.")

    if max(dims.all_counts) > MAX_CLASSICAL_N:
        raise CapacityError(
            f"Classical mode is simulated densely up to N={MAX_CLASSICAL_N} per ensemble."
        )

    evolved = evolve_classical_m2(oracle, params, x, y, dims)
    p_one = float(np.sum(np.abs(evolved.tensor()[dims.n_y]) ** 2))
    LOGGER.debug("Method 2 classical mode x=%i y=%i: P(y=1)=%.12f", x, y, p_one)
    return int(p_one > 0.5)


def evolve_classical_m2(
    oracle: BooleanOracle, params: OracleParams, x: int, y: int, dims: EnsembleDims
) -> StateVector:
    """exp(−iH)|y⟩⟩|x⟩⟩ with the dense mapped Hamiltonian."""
    coeffs = oracle_coefficients(oracle, params)
    poles = tuple(n * bit for n, bit in zip(dims.n_x, bits_of(x, oracle.m)))
    psi = basis_state(dims.all_counts, (dims.n_y * y, *poles))
    unitary = expm_hermitian(mapped_hamiltonian_m2(coeffs, dims))
    return StateVector(psi.ns, unitary @ psi.amps)


def initial_x_register(dims: EnsembleDims) -> StateVector:
    """ψ_init = ⊗ₙ|1/√2,1/√2⟩⟩."""
    return product_state(*(coherent_state(1 / math.sqrt(2), 1 / math.sqrt(2), n) for n in dims.n_x))


def initial_y_ensemble(n_y: int) -> StateVector:
    """H|1,0⟩⟩ = |1/√2,−1/√2⟩⟩, the S^X eigenstate of eigenvalue −N₀."""
    return coherent_state(1 / math.sqrt(2), -1 / math.sqrt(2), n_y)


def cos_pi_fraction(value: Fraction) -> float:
    """cos(π·value) with exact zeros and signs at half-integers and integers."""
    if value.denominator == 1:
        return 1.0 if value.numerator % 2 == 0 else -1.0

    if value.denominator == 2:
        return 0.0

    return math.cos(math.pi * float(value))


def linear_p_init(coeffs: OracleCoefficients, dims: EnsembleDims) -> LogReal:
    """
    p_init = Π_n cos^{2Nₙ}(π N₀ α_{eₙ} / Nₙ) for Hamiltonians linear in every S^Z.

    α_0 only contributes a global phase.
    """
    if not coeffs.is_linear:
        raise ValidationError("The closed form needs a Hamiltonian linear in every S^Z.")

    result = LogReal.one()

    for alpha, n in zip(coeffs.linear_terms(), dims.n_x):
        # α_z are multiples of 2^{−M}, so the Fraction is exact.
        cosine = cos_pi_fraction(Fraction(dims.n_y) * Fraction(alpha) / n)
        result = result * LogReal.from_float(cosine) ** (2 * n)

    return result


def quantum_mode_m2(
    oracle: BooleanOracle,
    params: OracleParams,
    dims: EnsembleDims,
    cap: int = DEFAULT_STATE_CAP,
) -> Method2Run:
    """
    Run the coherent-state encoded algorithm with superposed x-register inputs.

    Dense simulation is used within ``cap``; beyond it the closed form for linear Hamiltonians.
    Linear Hamiltonians take p_init from the closed form in both cases, so values below the
    float range stay exact.
    """
    if oracle.m != dims.m:
        raise ValidationError(f"Oracle has M={oracle.m} but dims have {dims.m} x-ensembles.")

    coeffs = oracle_coefficients(oracle, params)

    try:
        dims.x_dim(cap)
    except CapacityError:
        if not coeffs.is_linear:
            raise

        LOGGER.debug("Dense cap %i exceeded for %s, using the linear closed form", cap, dims)
        p_init = linear_p_init(coeffs, dims)
        return Method2Run(
            dims=dims,
            params=params,
            coeffs=coeffs,
            post_oracle_state=None,
            final_state=None,
            p_init=p_init,
            decision=_decide(p_init),
        )

    initial = initial_x_register(dims)
    post_oracle = apply_diagonal(np.exp(1j * phase_grid(coeffs, dims)), initial)
    final = apply_to_all(readout_hadamard, post_oracle)

    if coeffs.is_linear:
        p_init = linear_p_init(coeffs, dims)
    else:
        p_init_value = abs(overlap(basis_state(dims.n_x, (0,) * dims.m), final)) ** 2
        p_init = LogReal.from_float(min(p_init_value, 1.0))

    run = Method2Run(
        dims=dims,
        params=params,
        coeffs=coeffs,
        post_oracle_state=post_oracle,
        final_state=final,
        p_init=p_init,
        decision=_decide(p_init),
    )
    LOGGER.debug(
        "Method 2 %s %s: p_init %s, global phase %s", oracle, dims, p_init, run.global_phase
    )
    return run


def _decide(p_init: LogReal) -> OracleClass:
    return OracleClass.CONSTANT if p_init.to_float() > 0.5 else OracleClass.BALANCED


def deutsch_probability(n0: int, n1: int, j: int = 0) -> LogReal:
    """p = cos^{2N₁}(πN₀(2j+1)/(2N₁)) for the balanced M=1 oracle."""
    if n0 < 1 or n1 < 1:
        raise ValidationError(f"Particle numbers must be >= 1, got N0={n0}, N1={n1}.")

    cosine = cos_pi_fraction(Fraction(n0 * (2 * j + 1), 2 * n1))
    return LogReal.from_float(cosine) ** (2 * n1)


def dense_y_phase_check(coeffs: OracleCoefficients, dims: EnsembleDims) -> float:
    """
    max |exp(−iH)(ψ_y ⊗ ψ_init) − ψ_y ⊗ diag(e^{iφ})ψ_init| with the full mapped Hamiltonian.

    Confirms that treating the y-ensemble as an S^X eigenstate is exact.
    """
    psi_y = initial_y_ensemble(dims.n_y)
    initial = initial_x_register(dims)
    full = product_state(psi_y, initial)
    evolved = expm_hermitian(mapped_hamiltonian_m2(coeffs, dims)) @ full.amps
    expected = product_state(
        psi_y, apply_diagonal(np.exp(1j * phase_grid(coeffs, dims)), initial)
    )
    return float(np.max(np.abs(evolved - expected.amps)))
