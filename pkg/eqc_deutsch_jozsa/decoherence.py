"""
Collective S^Z dephasing during the oracle and the readout signal.

The quantum-mode oracle is diagonal in the Fock basis, as is the dephasing channel, so the
channel is applied exactly after the oracle phases instead of integrating a master equation.
"""

import math
import typing
from dataclasses import dataclass

import numpy as np

from . import method1, method2
from .fock import fock_grid, readout_hadamard, spin_z_expectations
from .models import (
    BooleanOracle,
    DensityMatrix,
    DephasingSpec,
    EnsembleDims,
    OracleClass,
    OracleParams,
)
from .utils import DEFAULT_DENSITY_CAP, LOGGER, ValidationError


@dataclass(frozen=True)
class DephasingOutcome:
    """Signal and decision of a dephased run, with the final x-register density matrix."""

    signal: float
    decision: OracleClass
    rho: DensityMatrix


def dephase(rho: DensityMatrix, spec: DephasingSpec) -> DensityMatrix:
    """ρ_{k,k′} · exp(−2Γt Σ_{n∈targets}(kₙ−k′ₙ)²) over the x-register ensembles of ``rho``."""
    targets = spec.target_ensembles(len(rho.ns))
    rate = 2 * spec.gamma * spec.t

    if rate == 0:
        return rho

    exponent = np.zeros(rho.rho.shape)

    for index, labels in enumerate(fock_grid(rho.ns), start=1):
        if index in targets:
            labels = labels.ravel()
            exponent += (labels[:, np.newaxis] - labels[np.newaxis, :]) ** 2

    return DensityMatrix(rho.ns, rho.rho * np.exp(-rate * exponent))


def signal(rho: DensityMatrix) -> float:
    """S = Π_n (1 − ⟨S^Zₙ⟩/Nₙ)/2, which is 1 for ⊗|0,1⟩⟩."""
    return math.prod(
        (1 - expectation / n) / 2 for expectation, n in zip(spin_z_expectations(rho), rho.ns)
    )


def constant_signal(gamma: float, t: float, m: int) -> float:
    """[(1+e^{−2Γt})/2]^M."""
    if m < 1:
        raise ValidationError(f"M must be >= 1, got {m}.")

    return ((1 + math.exp(-2 * gamma * t)) / 2) ** m


def constant_signal_linear(gamma: float, t: float, m: int) -> float:
    """1 − ΓMt, the first-order form of ``constant_signal``."""
    return 1 - gamma * m * t


def decision_threshold(m: int) -> float:
    """Midpoint between the ideal constant signal 1 and the fully mixed 2^{−M}."""
    return (1 + 2.0**-m) / 2


def conjugate_local(u: np.ndarray, ensemble_index: int, rho: DensityMatrix) -> DensityMatrix:
    """u ρ u† with u acting on one ensemble."""
    count = len(rho.ns)
    tensor = rho.rho.reshape(rho.shape + rho.shape)
    tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [ensemble_index])), 0, ensemble_index)
    bra_axis = count + ensemble_index
    tensor = np.moveaxis(np.tensordot(u.conj(), tensor, axes=([1], [bra_axis])), 0, bra_axis)
    dim = rho.rho.shape[0]
    return DensityMatrix(rho.ns, tensor.reshape(dim, dim))


def oracle_phases(
    method: int,
    oracle: BooleanOracle,
    params: OracleParams,
    dims: EnsembleDims,
    k0: int = 1,
) -> np.ndarray:
    """Diagonal quantum-mode oracle factors on the x-register for either encoding."""
    if method == 1:
        if k0 % 2 != 1:
            raise ValidationError(f"k0 must be odd, got {k0}.")

        return (-1.0) ** (k0 * method1.parity_grid(oracle, params, dims.n_x))

    if method == 2:
        coeffs = method2.oracle_coefficients(oracle, params)
        return np.exp(1j * method2.phase_grid(coeffs, dims))

    raise ValidationError(f"Unknown method {method}; expected 1 or 2.")


def run_dj_with_dephasing(
    method: int,
    oracle: BooleanOracle,
    params: OracleParams,
    dims: EnsembleDims,
    spec: DephasingSpec,
    k0: int = 1,
    density_cap: int = DEFAULT_DENSITY_CAP,
) -> DephasingOutcome:
    """Run either encoding with dephasing during the oracle and read out the signal."""
    if oracle.m != dims.m:
        raise ValidationError(f"Oracle has M={oracle.m} but dims have {dims.m} x-ensembles.")

    dims.x_dim(density_cap)
    initial = method1.initial_x_register(dims)
    phases = oracle_phases(method, oracle, params, dims, k0).ravel()
    post_oracle = initial.amps * phases
    rho = dephase(DensityMatrix(dims.n_x, np.outer(post_oracle, post_oracle.conj())), spec)

    for index, n in enumerate(dims.n_x):
        rho = conjugate_local(readout_hadamard(n), index, rho)

    value = signal(rho)
    decision = (
        OracleClass.CONSTANT if value > decision_threshold(dims.m) else OracleClass.BALANCED
    )
    LOGGER.debug(
        "Method %i %s %s Γt=%g: signal %.6f (%s)",
        method,
        oracle,
        dims,
        spec.gamma * spec.t,
        value,
        decision,
    )
    return DephasingOutcome(signal=value, decision=decision, rho=rho)


def positivity_margin(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of ρ."""
    return float(np.min(np.linalg.eigvalsh(rho.rho)))


def signals_over(
    gamma_ts: typing.Iterable[float],
    method: int,
    oracle: BooleanOracle,
    params: OracleParams,
    dims: EnsembleDims,
    density_cap: int = DEFAULT_DENSITY_CAP,
) -> list[DephasingOutcome]:
    """One dephased run per Γt (Γ = Γt, t = 1)."""
    return [
        run_dj_with_dephasing(
            method,
            oracle,
            params,
            dims,
            DephasingSpec(gamma=gamma_t, t=1.0),
            density_cap=density_cap,
        )
        for gamma_t in gamma_ts
    ]
