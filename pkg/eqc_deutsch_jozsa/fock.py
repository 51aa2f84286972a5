"""
Fock-basis machinery for two-mode (Schwinger boson) ensembles.

Basis ordering is k = 0 first, k counting the particles in mode a, so |0,1⟩⟩ (all particles in
mode b, the logical 0) is index 0. Product states are row-major with the last ensemble fastest.
"""

import functools
import math
import typing

import numpy as np
import scipy.linalg
from scipy.special import gammaln, xlogy

from .models import Axis, DensityMatrix, FockIndex, LogReal, StateVector
from .utils import ValidationError

NORM_TOLERANCE = 1e-10


def log_binomial(n: int, k: int) -> LogReal:
    """ln C(n, k) via log-gamma."""
    if not 0 <= k <= n:
        raise ValidationError(f"Binomial C({n}, {k}) is out of range.")

    return LogReal(1, float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


def log_binomials(n: int) -> np.ndarray:
    """ln C(n, k) for k = 0 … n."""
    if n < 0:
        raise ValidationError(f"Negative particle number {n}.")

    k = np.arange(n + 1)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def coherent_state(alpha: complex, beta: complex, n: int) -> StateVector:
    """|α,β⟩⟩ with amplitude √C(N,k) α^k β^(N−k) at k."""
    if n < 1:
        raise ValidationError(f"Particle number must be >= 1, got {n}.")

    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > NORM_TOLERANCE:
        raise ValidationError(f"|α|² + |β|² must be 1, got α={alpha}, β={beta}.")

    k = np.arange(n + 1)
    ln_mag = 0.5 * log_binomials(n) + xlogy(k, abs(alpha)) + xlogy(n - k, abs(beta))
    phase = k * np.angle(alpha) + (n - k) * np.angle(beta)

    return StateVector((n,), np.exp(ln_mag + 1j * phase))


def basis_state(ns: typing.Sequence[int], k: typing.Sequence[int]) -> StateVector:
    """The product Fock state |k₁⟩…|k_M⟩."""
    index = FockIndex(tuple(k)).validate(ns)
    amps = np.zeros(tuple(n + 1 for n in ns), dtype=complex)
    amps[index.k] = 1
    return StateVector(tuple(ns), amps)


def product_state(*states: StateVector) -> StateVector:
    """Tensor product in the given ensemble order."""
    amps = functools.reduce(np.kron, (state.amps for state in states))
    ns = tuple(n for state in states for n in state.ns)
    return StateVector(ns, amps)


def fock_grid(ns: typing.Sequence[int]) -> tuple[np.ndarray, ...]:
    """One integer array of Fock labels per ensemble, broadcast over the product basis."""
    return tuple(np.indices(tuple(n + 1 for n in ns)))


@functools.lru_cache(maxsize=256)
def _spin_operator(axis: str, n: int) -> np.ndarray:
    k = np.arange(n + 1)

    if axis == "Z":
        matrix = np.diag(2.0 * k - n).astype(complex)
    else:
        lower = np.sqrt((k[:-1] + 1.0) * (n - k[:-1]))
        matrix = np.zeros((n + 1, n + 1), dtype=complex)

        if axis == "X":
            matrix[k[1:], k[:-1]] = lower
            matrix[k[:-1], k[1:]] = lower
        else:
            matrix[k[1:], k[:-1]] = -1j * lower
            matrix[k[:-1], k[1:]] = 1j * lower

    matrix.setflags(write=False)
    return matrix


def spin_operator(axis: Axis, n: int) -> np.ndarray:
    """Total spin operator S^axis on the N+1 dimensional symmetric subspace."""
    if axis not in ("X", "Y", "Z"):
        raise ValidationError(f"Unknown axis {axis!r}.")

    if n < 1:
        raise ValidationError(f"Particle number must be >= 1, got {n}.")

    return _spin_operator(axis, n)


def expm_hermitian(h: np.ndarray, time: float = 1.0) -> np.ndarray:
    """exp(−i·time·H) for Hermitian H via eigendecomposition."""
    eigvals, eigvecs = scipy.linalg.eigh(h)
    return (eigvecs * np.exp(-1j * time * eigvals)) @ eigvecs.conj().T


@functools.lru_cache(maxsize=256)
def _rotation(axis: str, angle: float, n: int) -> np.ndarray:
    unitary = expm_hermitian(spin_operator(axis, n), angle)  # type: ignore[arg-type]
    unitary.setflags(write=False)
    return unitary


def rotation(axis: Axis, angle: float, n: int) -> np.ndarray:
    """exp(−i·angle·S^axis)."""
    if not math.isfinite(angle):
        raise ValidationError(f"Rotation angle must be finite, got {angle}.")

    return _rotation(axis, float(angle), n)


def hadamard(n: int) -> np.ndarray:
    """
    The ensemble Hadamard, realizing the mode map a → (a−b)/√2, b → (a+b)/√2.

    |0,1⟩⟩ goes to |1/√2,1/√2⟩⟩ and |1,0⟩⟩ to |1/√2,−1/√2⟩⟩.
    """
    return rotation("Y", -math.pi / 4, n)


@functools.lru_cache(maxsize=256)
def readout_hadamard(n: int) -> np.ndarray:
    """
    The Hadamard applied before readout: diag((−1)^k)·H†.

    It maps |1/√2,1/√2⟩⟩ back to |0,1⟩⟩ and |−1/√2,1/√2⟩⟩ to |1,0⟩⟩ and is the textbook
    Hadamard at N=1.
    """
    signs = (-1.0) ** np.arange(n + 1)
    unitary = signs[:, np.newaxis] * hadamard(n).conj().T
    unitary.setflags(write=False)
    return unitary


def apply_local(u: np.ndarray, ensemble_index: int, psi: StateVector) -> StateVector:
    """Apply ``u`` to one ensemble, identity elsewhere."""
    if not 0 <= ensemble_index < len(psi.ns):
        raise ValidationError(f"Ensemble index {ensemble_index} out of range.")

    local_dim = psi.ns[ensemble_index] + 1

    if u.shape != (local_dim, local_dim):
        raise ValidationError(f"Operator {u.shape} does not act on dimension {local_dim}.")

    tensor = np.tensordot(u, psi.tensor(), axes=([1], [ensemble_index]))
    return StateVector(psi.ns, np.moveaxis(tensor, 0, ensemble_index))


def apply_to_all(u_for: typing.Callable[[int], np.ndarray], psi: StateVector) -> StateVector:
    """Apply ``u_for(N)`` to every ensemble of ``psi``."""
    for index, n in enumerate(psi.ns):
        psi = apply_local(u_for(n), index, psi)

    return psi


def apply_diagonal(factors: np.ndarray, psi: StateVector) -> StateVector:
    """Multiply every amplitude by its factor (a diagonal operator in the Fock basis)."""
    factors = np.asarray(factors)

    if factors.size != psi.dim:
        raise ValidationError(f"Diagonal of size {factors.size} does not match {psi.dim}.")

    return StateVector(psi.ns, psi.amps * factors.ravel())


def overlap(a: StateVector, b: StateVector) -> complex:
    """⟨a|b⟩."""
    if a.ns != b.ns:
        raise ValidationError(f"Cannot overlap states over {a.ns} and {b.ns}.")

    return complex(np.vdot(a.amps, b.amps))


def align_global_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    amps = np.asarray(amps, dtype=complex)
    pivot = amps.flat[np.argmax(np.abs(amps))]

    if pivot == 0:
        return amps

    return amps * (abs(pivot) / pivot)


def max_abs_diff_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """max |a − e^{iφ}b| with φ chosen from the inner product."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def spin_z_expectations(rho: DensityMatrix) -> tuple[float, ...]:
    """⟨S^Zₙ⟩ for every ensemble of ``rho``."""
    populations = rho.populations()
    grid = fock_grid(rho.ns)
    return tuple(
        float(np.sum(populations * (2 * k - n))) for k, n in zip(grid, rho.ns)
    )
