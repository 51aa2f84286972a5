"""
Closed-form success and error probabilities of the coherent-state encoding.

p^(m)(τ) is the probability that ⊗|1/√2,1/√2⟩⟩ survives the m-th order term e^{iπτ S^Z₁…S^Z_m};
ε^(m)(τ) is the probability that this term moves the first ensemble onto the orthogonal
|−1/√2,1/√2⟩⟩ while the others stay put. Binomial sums are evaluated in the log domain.
"""

import math
import typing
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .fock import coherent_state, fock_grid, log_binomials, overlap, product_state
from .models import CurveSample, LogReal, ScalingFit, StateVector
from .utils import LOGGER, CapacityError, PreconditionError, ValidationError

#: Even N grid of the scaling fits.
DEFAULT_FIT_GRID = tuple(range(6, 41, 2))

MIN_FIT_POINTS = 6

#: Partner ensembles of the scaling fits: N₂ = … = N and N₂ = … = N+1, always with N₁ = N.
PARTNER_OFFSETS = (0, 1)

#: Truncation of the periodic Gaussian sum.
GAUSSIAN_TERMS = 3

#: Dense evolution is only done up to this dimension.
DENSE_CHECK_CAP = 4096

CurveKind = typing.Literal["p", "epsilon", "gaussian"]


@dataclass(frozen=True)
class EpsilonEstimate:
    """Exact single-rotation error next to its small-angle estimate."""

    exact: LogReal
    approx: LogReal
    n1: int

    @property
    def rate(self) -> float:
        """ln(ε)/N₁ of the estimate, −inf at τ=0."""
        return self.approx.ln_mag / self.n1


def cos_pi(x):
    """cos(πx), exactly 0 at half-integers and ±1 at integers."""
    x = np.asarray(x, dtype=float)
    twice = 2 * x
    rounded = np.round(twice)
    on_grid = twice == rounded
    result = np.cos(np.pi * x)
    result = np.where(on_grid & (rounded % 2 == 1), 0.0, result)
    result = np.where(on_grid & (rounded % 4 == 0), 1.0, result)
    result = np.where(on_grid & (rounded % 4 == 2), -1.0, result)
    return result


def sin_pi(x):
    """sin(πx), exactly 0 at integers and ±1 at half-integers."""
    x = np.asarray(x, dtype=float)
    twice = 2 * x
    rounded = np.round(twice)
    on_grid = twice == rounded
    result = np.sin(np.pi * x)
    result = np.where(on_grid & (rounded % 2 == 0), 0.0, result)
    result = np.where(on_grid & (rounded % 4 == 1), 1.0, result)
    result = np.where(on_grid & (rounded % 4 == 3), -1.0, result)
    return result


def _ln_weights(n: int) -> np.ndarray:
    """ln(C(N,k)/2^N), the |⟨k|1/√2,1/√2⟩⟩|² populations."""
    return log_binomials(n) - n * math.log(2)


def _weighted_power_sum(ln_weights: np.ndarray, base: np.ndarray, power: int) -> LogReal:
    """Σ w·base^power with w = exp(ln_weights), in the log domain."""
    ln_weights = np.ravel(ln_weights)
    base = np.ravel(base)
    nonzero = base != 0

    if not np.any(nonzero):
        return LogReal.zero()

    ln_terms = ln_weights[nonzero] + power * np.log(np.abs(base[nonzero]))

    signs = np.sign(base[nonzero]) ** power
    ln_total, sign = logsumexp(ln_terms, b=signs, return_sign=True)

    if sign == 0 or not np.isfinite(ln_total):
        return LogReal.zero()

    return LogReal(int(sign), float(ln_total))


def _squared(amplitude: LogReal) -> LogReal:
    if amplitude.is_zero:
        return LogReal.zero()

    return LogReal(1, 2 * amplitude.ln_mag)


def _check(m: int, ns: typing.Sequence[int]) -> tuple[int, ...]:
    if m not in (1, 2, 3):
        raise ValidationError(f"Closed forms exist for m in 1..3, got m={m}.")

    if len(ns) != m:
        raise ValidationError(f"Expected {m} particle numbers, got {len(ns)}.")

    if any(n < 1 for n in ns):
        raise ValidationError(f"Particle numbers must be >= 1, got {tuple(ns)}.")

    return tuple(int(n) for n in ns)


def _partner_grid(tau: float, partners: typing.Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """(ln weights, τ·Π(2kₙ−Nₙ)) over the Fock grid of the partner ensembles."""
    grid = fock_grid(partners)
    ln_weights = sum(_ln_weights(n)[k] for k, n in zip(grid, partners))
    product = np.ones(grid[0].shape)

    for k, n in zip(grid, partners):
        product = product * (2 * k - n)

    return np.asarray(ln_weights), tau * product


def p_m(tau: float, m: int, ns: typing.Sequence[int]) -> LogReal:
    """
    p^(m)(τ) = |⟨ψ_init|e^{iπτ S^Z₁…S^Z_m}|ψ_init⟩|².

    For m=1 this is cos^{2N₁}(πτ); for m ≥ 2 the first ensemble's cosine power is summed over
    the Fock states of the others.
    """
    ns = _check(m, ns)

    if m == 1:
        return LogReal.from_float(float(cos_pi(tau))) ** (2 * ns[0])

    ln_weights, angle = _partner_grid(tau, ns[1:])
    return _squared(_weighted_power_sum(ln_weights, cos_pi(angle), ns[0]))


def epsilon_m(tau: float, m: int, ns: typing.Sequence[int]) -> LogReal:
    """
    ε^(m)(τ) = |⟨ψ_⊥ ⊗ ψ_init…|e^{iπτ S^Z₁…S^Z_m}|ψ_init…⟩|².

    For m=1 this is sin^{2N₁}(πτ); for m ≥ 2 it vanishes exactly when N₁ is odd because the
    summands are odd in the partner Fock labels.
    """
    ns = _check(m, ns)

    if m == 1:
        return LogReal.from_float(float(sin_pi(tau))) ** (2 * ns[0])

    if ns[0] % 2 == 1:
        return LogReal.zero()

    ln_weights, angle = _partner_grid(tau, ns[1:])
    return _squared(_weighted_power_sum(ln_weights, sin_pi(angle), ns[0]))


def p1_gaussian(tau: float, n1: int) -> float:
    """Σ_{|j|≤3} exp(−N₁π²(τ+j)²), the large-N₁ form of p^(1)."""
    if n1 < 1:
        raise ValidationError(f"Particle number must be >= 1, got {n1}.")

    shifts = np.arange(-GAUSSIAN_TERMS, GAUSSIAN_TERMS + 1)
    return float(np.sum(np.exp(-n1 * math.pi**2 * (tau + shifts) ** 2)))


def epsilon1_estimate(tau: float, n1: int) -> EpsilonEstimate:
    """sin^{2N₁}(πτ) and its small-angle estimate (πτ)^{2N₁}."""
    if not abs(tau) < 0.5:
        raise ValidationError(f"The small-angle estimate needs |τ| < 1/2, got {tau}.")

    exact = epsilon_m(tau, 1, (n1,))

    if tau == 0:
        return EpsilonEstimate(exact=LogReal.zero(), approx=LogReal.zero(), n1=n1)

    return EpsilonEstimate(
        exact=exact,
        approx=LogReal.from_ln(2 * n1 * math.log(math.pi * abs(tau))),
        n1=n1,
    )


def _uniform_states(ns: typing.Sequence[int]) -> list[StateVector]:
    return [coherent_state(1 / math.sqrt(2), 1 / math.sqrt(2), n) for n in ns]


def _evolve_product_term(tau: float, psi: StateVector) -> StateVector:
    grid = fock_grid(psi.ns)
    product = np.ones(grid[0].shape)

    for k, n in zip(grid, psi.ns):
        product = product * (2 * k - n)

    return StateVector(psi.ns, psi.amps * np.exp(1j * math.pi * tau * product).ravel())


def _dense_initial(ns: typing.Sequence[int]) -> StateVector:
    if math.prod(n + 1 for n in ns) > DENSE_CHECK_CAP:
        raise CapacityError(f"Dense evolution is limited to dimension {DENSE_CHECK_CAP}.")

    return product_state(*_uniform_states(ns))


def dense_p_m(tau: float, ns: typing.Sequence[int]) -> float:
    """p^(m) by explicit evolution of the product state."""
    psi = _dense_initial(ns)
    return abs(overlap(psi, _evolve_product_term(tau, psi))) ** 2


def dense_epsilon_m(tau: float, ns: typing.Sequence[int]) -> float:
    """ε^(m) by explicit evolution of the product state."""
    psi = _dense_initial(ns)
    states = _uniform_states(ns)
    states[0] = coherent_state(-1 / math.sqrt(2), 1 / math.sqrt(2), ns[0])
    return abs(overlap(product_state(*states), _evolve_product_term(tau, psi))) ** 2


def sample_curve(
    kind: CurveKind, m: int, ns: typing.Sequence[int], taus: typing.Iterable[float]
) -> list[CurveSample]:
    """Evaluate p^(m), ε^(m) or the Gaussian p^(1) on a τ grid."""
    ns = _check(m, ns)

    if kind == "p":
        func: typing.Callable[[float], LogReal] = lambda tau: p_m(tau, m, ns)
    elif kind == "epsilon":
        func = lambda tau: epsilon_m(tau, m, ns)
    elif kind == "gaussian":
        if m != 1:
            raise ValidationError("The Gaussian approximation exists for m=1 only.")

        func = lambda tau: LogReal.from_float(p1_gaussian(tau, ns[0]))
    else:
        raise ValidationError(f"Unknown curve kind {kind!r}.")

    return [CurveSample(tau=float(tau), value=func(tau), m=m, ns=ns) for tau in taus]


def max_epsilon(m: int, n: int, grid_points: int = 33, partner_offset: int = 0) -> CurveSample:
    """
    max of ε^(m) over |τ| ≤ 1/(2N^{m−1}) with N₁ = N and the partners at N + ``partner_offset``.

    ε is even in τ, so only [0, τ_max] is searched: a coarse grid, the end point, and a bounded
    scalar refinement.
    """
    if partner_offset < 0:
        raise ValidationError(f"Partner offset must be >= 0, got {partner_offset}.")

    ns = (n,) + (n + partner_offset,) * (m - 1)
    tau_max = 1 / (2 * n ** (m - 1))

    def ln_eps(tau: float) -> float:
        return epsilon_m(tau, m, ns).ln_mag

    candidates = list(np.linspace(0, tau_max, grid_points))
    refined = minimize_scalar(
        lambda tau: -max(ln_eps(tau), -1e300),
        bounds=(0, tau_max),
        method="bounded",
        options={"xatol": 1e-4 * tau_max},
    )
    candidates.append(float(refined.x))
    best = max(candidates, key=ln_eps)
    return CurveSample(tau=float(best), value=epsilon_m(best, m, ns), m=m, ns=ns)


def fit_epsilon_scaling(
    m: int,
    n_grid: typing.Sequence[int] = DEFAULT_FIT_GRID,
    partner_offsets: typing.Sequence[int] = PARTNER_OFFSETS,
) -> ScalingFit:
    """
    Least-squares line through (N, ln max_τ ε^(m)) over an even N grid.

    Each N contributes the largest ε over the partner ensembles N + ``partner_offsets``, so the
    default fit bounds both the even and the odd partner parities.
    """
    if m not in (2, 3):
        raise ValidationError(f"Scaling fits are defined for m in (2, 3), got m={m}.")

    offsets = tuple(sorted({int(offset) for offset in partner_offsets}))

    if not offsets or offsets[0] < 0:
        raise ValidationError(f"Partner offsets must be >= 0, got {list(partner_offsets)}.")

    grid = tuple(sorted({int(n) for n in n_grid}))
    odd = [n for n in grid if n % 2]

    if odd:
        raise PreconditionError(f"Odd N {odd} give exactly zero error; use even N only.")

    if any(n < 6 for n in grid):
        raise PreconditionError(f"The fit grid must contain N >= 6 only, got {list(grid)}.")

    if len(grid) < MIN_FIT_POINTS:
        raise PreconditionError(
            f"The fit needs at least {MIN_FIT_POINTS} distinct N, got {len(grid)}."
        )

    samples = tuple(
        max(
            (max_epsilon(m, n, partner_offset=offset) for offset in offsets),
            key=lambda sample: sample.value.ln_mag,
        )
        for n in grid
    )
    ln_values = np.array([sample.value.ln_mag for sample in samples])

    if not np.all(np.isfinite(ln_values)):
        raise PreconditionError("The error vanished for some N; a log-linear fit is impossible.")

    slope, intercept = np.polyfit(np.array(grid, dtype=float), ln_values, 1)
    residual = float(np.sqrt(np.mean((ln_values - (slope * np.array(grid) + intercept)) ** 2)))
    LOGGER.debug(
        "ε^(%i) fit over N=%s: slope %.4f intercept %.4f rms %.4f",
        m,
        grid,
        slope,
        intercept,
        residual,
    )

    return ScalingFit(
        m=m,
        slope=float(slope),
        intercept=float(intercept),
        n_grid=grid,
        residual=residual,
        samples=samples,
    )
