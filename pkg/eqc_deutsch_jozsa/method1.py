"""
Parity encoding of the Deutsch-Jozsa algorithm.

The logical value of ensemble n is kₙ mod 2. The oracle Hamiltonian replaces every projector
factor by the operator kₙ + x̄′ₙ, which is odd exactly when the decoded bit equals x′ₙ, and the
y-ensemble couples through (S^X₀+N₀)/2.
"""

import math
import typing

import numpy as np

from .fock import (
    apply_diagonal,
    apply_to_all,
    basis_state,
    coherent_state,
    expm_hermitian,
    fock_grid,
    log_binomials,
    max_abs_diff_up_to_phase,
    overlap,
    product_state,
    readout_hadamard,
    spin_operator,
)
from .models import (
    BooleanOracle,
    EnsembleDims,
    FockIndex,
    Method1Run,
    OracleClass,
    OracleParams,
    Parity,
    StateVector,
)
from .oracles import bits_of
from .utils import DEFAULT_STATE_CAP, LOGGER, ValidationError

#: Classical-mode dense evolution is only done up to this dimension.
DENSE_EVOLUTION_CAP = 4096


def _check(oracle: BooleanOracle, params: OracleParams) -> None:
    if oracle.oracle_class is OracleClass.INVALID:
        raise ValidationError(f"Oracle {oracle} is neither constant nor balanced.")

    params.validate(oracle)


def parity_px(oracle: BooleanOracle, params: OracleParams, k: FockIndex) -> Parity:
    """Parity of P_x = Σ_{x′∈F} (2j_{x′}+1) Π_n (kₙ + x̄′ₙ), in exact integer arithmetic."""
    if len(k.k) != oracle.m:
        raise ValidationError(f"Fock index {k.k} does not cover M={oracle.m} ensembles.")

    total = sum(
        (2 * params.j_for(x) + 1)
        * math.prod(k_n + 1 - bit for k_n, bit in zip(k.k, bits_of(x, oracle.m)))
        for x in oracle.f_set
    )
    return Parity(total % 2)


def parity_grid(
    oracle: BooleanOracle, params: OracleParams, ns: typing.Sequence[int]
) -> np.ndarray:
    """P_x mod 2 for every Fock basis state of the x-register."""
    grid = fock_grid(ns)
    parity = np.zeros(tuple(n + 1 for n in ns), dtype=np.int64)

    for x in oracle.f_set:
        # (2j+1) is odd, so only the parity of the product matters.
        term = np.ones_like(parity)

        for k_n, bit in zip(grid, bits_of(x, oracle.m)):
            term *= (k_n + 1 - bit) % 2

        parity ^= term

    return parity


def mapped_hamiltonian_m1(
    oracle: BooleanOracle, params: OracleParams, dims: EnsembleDims
) -> np.ndarray:
    """π((S^X₀+N₀)/2) ⊗ Σ_{x′∈F}(2j_{x′}+1) Π_n(kₙ + x̄′ₙ) as a dense matrix over y ⊗ x."""
    _check(oracle, params)
    grid = fock_grid(dims.n_x)
    diagonal = np.zeros(grid[0].shape)

    for x in oracle.f_set:
        term = np.full(grid[0].shape, 2.0 * params.j_for(x) + 1)

        for k_n, bit in zip(grid, bits_of(x, oracle.m)):
            term *= k_n + 1 - bit

        diagonal += term

    y_operator = (spin_operator("X", dims.n_y) + dims.n_y * np.eye(dims.n_y + 1)) / 2
    return math.pi * np.kron(y_operator, np.diag(diagonal.ravel()))


def classical_mode_m1(
    oracle: BooleanOracle,
    params: OracleParams,
    k: FockIndex,
    dims: EnsembleDims,
    dense: bool = False,
) -> bool:
    """
    Does the oracle flip the y-ensemble, started at |0,1⟩⟩, for the x-register Fock state k?

    With ``dense`` the mapped Hamiltonian is exponentiated and the y pole is read off.
    """
    _check(oracle, params)
    k.validate(dims.n_x)
    flipped = parity_px(oracle, params, k) is Parity.ODD

    if not dense:
        return flipped

    dims.total_dim(DENSE_EVOLUTION_CAP)
    evolved = evolve_classical_m1(oracle, params, k, dims)
    p_flipped = float(np.sum(np.abs(evolved.tensor()[dims.n_y]) ** 2))
    LOGGER.debug("Dense classical mode k=%s: P(y flipped)=%.12f", k.k, p_flipped)
    return p_flipped > 0.5


def evolve_classical_m1(
    oracle: BooleanOracle, params: OracleParams, k: FockIndex, dims: EnsembleDims
) -> StateVector:
    """exp(−iH) applied to |0,1⟩⟩|k⟩ with the dense mapped Hamiltonian."""
    psi = basis_state(dims.all_counts, (0, *k.k))
    unitary = expm_hermitian(mapped_hamiltonian_m1(oracle, params, dims))
    return StateVector(psi.ns, unitary @ psi.amps)


def classical_mode_prediction(k: FockIndex, dims: EnsembleDims, flipped: bool) -> StateVector:
    """|1,0⟩⟩|k⟩ if flipped else |0,1⟩⟩|k⟩."""
    return basis_state(dims.all_counts, (dims.n_y if flipped else 0, *k.k))


def cat_state(n: int, parity: Parity) -> StateVector:
    """Normalized superposition of the even or odd Fock states with weights √C(N,k)."""
    if n < 1:
        raise ValidationError(f"Particle number must be >= 1, got {n}.")

    k = np.arange(n + 1)
    amps = np.where(k % 2 == int(parity), np.exp(0.5 * (log_binomials(n) - n * math.log(2))), 0)
    # The even and odd halves each carry half of the binomial weight.
    return StateVector((n,), amps * math.sqrt(2))


def quantum_mode_m1(
    oracle: BooleanOracle,
    params: OracleParams,
    dims: EnsembleDims,
    k0: int = 1,
    cap: int = DEFAULT_STATE_CAP,
) -> Method1Run:
    """
    Run the parity-encoded algorithm with superposed x-register inputs.

    The y-ensemble sits in the S^X Fock state |k₀⟩, which is an eigenstate of the oracle, so only
    the phase (−1)^{k₀·P_x} acts on the x-register.
    """
    _check(oracle, params)

    if k0 % 2 != 1 or not 0 < k0 <= dims.n_y:
        raise ValidationError(f"k0 must be odd and within [1, N0={dims.n_y}], got {k0}.")

    dims.x_dim(cap)

    if oracle.m != dims.m:
        raise ValidationError(f"Oracle has M={oracle.m} but dims have {dims.m} x-ensembles.")

    initial = initial_x_register(dims)
    phases = (-1.0) ** (k0 * parity_grid(oracle, params, dims.n_x))
    post_oracle = apply_diagonal(phases, initial)
    final = apply_to_all(readout_hadamard, post_oracle)
    ground = basis_state(dims.n_x, (0,) * dims.m)
    overlap_zero = abs(overlap(ground, final)) ** 2
    LOGGER.debug("Method 1 %s %s: overlap with ground %.3e", oracle, dims, overlap_zero)

    return Method1Run(
        dims=dims,
        k0=k0,
        post_oracle_state=post_oracle,
        final_state=final,
        overlap_zero=float(overlap_zero),
        decision=OracleClass.CONSTANT if overlap_zero > 0.5 else OracleClass.BALANCED,
    )


def initial_x_register(dims: EnsembleDims) -> StateVector:
    """⊗ₙ H|0,1⟩⟩ = ⊗ₙ|1/√2,1/√2⟩⟩."""
    return product_state(*(coherent_state(1 / math.sqrt(2), 1 / math.sqrt(2), n) for n in dims.n_x))


def cat_projection_state(
    oracle: BooleanOracle, params: OracleParams, dims: EnsembleDims
) -> StateVector:
    """
    Post-oracle x-register built from cat-state components.

    ⊗|1/√2,1/√2⟩⟩ = ⊗(|+⟩⟩+|−⟩⟩)/√2; the oracle multiplies the component with parities
    (p₁…p_M) by −1 iff the decoded x = p lies in F.
    """
    _check(oracle, params)
    total = np.zeros(math.prod(n + 1 for n in dims.n_x), dtype=complex)

    for bits in np.ndindex(*(2,) * dims.m):
        x = sum(bit << n for n, bit in enumerate(bits))
        component = product_state(*(cat_state(n, Parity(bit)) for n, bit in zip(dims.n_x, bits)))
        total += (-1) ** oracle(x) * component.amps

    return StateVector(dims.n_x, total / math.sqrt(2**dims.m))


def post_oracle_residual(run: Method1Run, oracle: BooleanOracle, params: OracleParams) -> float:
    """Distance of a run's post-oracle state from the cat-state construction."""
    expected = cat_projection_state(oracle, params, run.dims)
    return max_abs_diff_up_to_phase(run.post_oracle_state.amps, expected.amps)
