"""Types and model classes / definitions."""

import argparse
import enum
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import termcolor

from .utils import (
    DEFAULT_DENSITY_CAP,
    DEFAULT_STATE_CAP,
    ValidationError,
    checked_product,
    get_default_cap,
    is_power_of_two,
)

Axis = typing.Literal["X", "Y", "Z"]


class OracleClass(enum.Enum):
    """Class of a Deutsch-Jozsa function, also used as the decision of a run."""

    CONSTANT = "constant"
    BALANCED = "balanced"
    INVALID = "invalid"

    def __str__(self):
        return self.value


class Parity(enum.IntEnum):
    """Parity of a Fock label or of the parity function."""

    EVEN = 0
    ODD = 1

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class LogReal:
    """
    A real number stored as sign and natural log of its magnitude.

    ``sign == 0`` marks an exact zero; ``ln_mag`` is ``-inf`` in that case.
    """

    sign: int
    ln_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValidationError(f"Invalid sign {self.sign}.")

        if self.sign == 0:
            object.__setattr__(self, "ln_mag", -math.inf)
        elif math.isnan(self.ln_mag):
            raise ValidationError("The log magnitude must not be NaN.")

    @classmethod
    def zero(cls) -> "LogReal":
        """Exact zero."""
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> "LogReal":
        """Exact one."""
        return cls(1, 0.0)

    @classmethod
    def from_float(cls, value: float) -> "LogReal":
        """Convert a plain float."""
        if value == 0:
            return cls.zero()

        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def from_ln(cls, ln_mag: float, sign: int = 1) -> "LogReal":
        """Build from a natural log magnitude; ``-inf`` collapses to zero."""
        if ln_mag == -math.inf:
            return cls.zero()

        return cls(sign, float(ln_mag))

    @property
    def is_zero(self) -> bool:
        """Exact zero?"""
        return self.sign == 0

    def __mul__(self, other: "LogReal") -> "LogReal":
        if self.is_zero or other.is_zero:
            return LogReal.zero()

        return LogReal(self.sign * other.sign, self.ln_mag + other.ln_mag)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.is_zero:
            return other

        if other.is_zero:
            return self

        big, small = (self, other) if self.ln_mag >= other.ln_mag else (other, self)
        ratio = math.exp(small.ln_mag - big.ln_mag)

        if big.sign == small.sign:
            return LogReal(big.sign, big.ln_mag + math.log1p(ratio))

        if ratio == 1.0:
            return LogReal.zero()

        return LogReal(big.sign, big.ln_mag + math.log1p(-ratio))

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.ln_mag)

    def __pow__(self, exponent: int) -> "LogReal":
        if exponent == 0:
            return LogReal.one()

        if self.is_zero:
            return LogReal.zero()

        return LogReal(self.sign**exponent, self.ln_mag * exponent)

    def to_float(self) -> float:
        """Convert to a plain float, underflowing to 0.0 and overflowing to inf."""
        if self.is_zero:
            return 0.0

        if self.ln_mag > 709.0:
            return self.sign * math.inf

        return self.sign * math.exp(self.ln_mag)

    def __float__(self) -> float:
        return self.to_float()

    @property
    def log10(self) -> float:
        """Decimal log of the magnitude, ``-inf`` for zero."""
        return self.ln_mag / math.log(10)

    def __str__(self):
        if self.is_zero:
            return "0"

        return f"{'-' if self.sign < 0 else ''}10^{self.log10:.6g}"


@dataclass(frozen=True)
class EnsembleDims:
    """Particle counts of the y-ensemble (N₀) and of the M x-register ensembles (N₁…N_M)."""

    n_y: int
    n_x: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "n_x", tuple(int(n) for n in self.n_x))

        if not self.n_x:
            raise ValidationError("At least one x-register ensemble is required.")

        for count in self.all_counts:
            if count < 1:
                raise ValidationError(f"Particle counts must be >= 1, got {count}.")

    @classmethod
    def uniform(cls, n: int, m: int, n_y: typing.Optional[int] = None) -> "EnsembleDims":
        """All x-ensembles with ``n`` particles; the y-ensemble defaults to ``n`` too."""
        return cls(n_y=n if n_y is None else n_y, n_x=(n,) * m)

    @classmethod
    def from_args(cls, args: argparse.Namespace, m: int) -> "EnsembleDims":
        """Create dims from command line arguments (``--n`` given once is broadcast)."""
        n_x = list(args.n or [1])

        if len(n_x) == 1:
            n_x = n_x * m
        elif len(n_x) != m:
            raise ValidationError(f"Expected 1 or {m} values for --n, got {len(n_x)}.")

        return cls(n_y=args.n0 if args.n0 is not None else n_x[0], n_x=tuple(n_x))

    @property
    def m(self) -> int:
        """Number of x-register ensembles."""
        return len(self.n_x)

    @property
    def all_counts(self) -> tuple[int, ...]:
        """(N₀, N₁, …, N_M)."""
        return (self.n_y, *self.n_x)

    def x_dim(self, cap: int) -> int:
        """Dimension of the x-register space, checked against ``cap``."""
        return checked_product((n + 1 for n in self.n_x), cap, "x-register dimension")

    def total_dim(self, cap: int) -> int:
        """Dimension of the full y ⊗ x space, checked against ``cap``."""
        return checked_product((n + 1 for n in self.all_counts), cap, "state dimension")

    def __str__(self):
        return f"N0={self.n_y};N={','.join(str(n) for n in self.n_x)}"


@dataclass(frozen=True)
class FockIndex:
    """Fock labels kₙ, one per ensemble."""

    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(k) for k in self.k))

    def validate(self, ns: typing.Sequence[int]) -> "FockIndex":
        """Check 0 ≤ kₙ ≤ Nₙ componentwise."""
        if len(ns) != len(self.k):
            raise ValidationError(f"Fock index {self.k} does not match {len(ns)} ensembles.")

        for k, n in zip(self.k, ns):
            if not 0 <= k <= n:
                raise ValidationError(f"Fock label {k} out of range [0, {n}].")

        return self


@dataclass(frozen=True)
class ParityState:
    """Logical bits decoded from Fock labels via kₙ mod 2."""

    bits: tuple[int, ...]

    @classmethod
    def from_fock(cls, index: FockIndex) -> "ParityState":
        """Decode a Fock index."""
        return cls(tuple(k % 2 for k in index.k))

    @property
    def x(self) -> int:
        """The integer x with x₁ as least significant bit."""
        return sum(bit << n for n, bit in enumerate(self.bits))


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the product Fock basis of ``ns`` (row-major, last fastest)."""

    ns: tuple[int, ...]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        amps = _freeze(np.ravel(self.amps))

        if amps.size != math.prod(self.shape):
            raise ValidationError(
                f"State with {amps.size} amplitudes does not match ensembles {self.ns}."
            )

        object.__setattr__(self, "amps", amps)

    @property
    def shape(self) -> tuple[int, ...]:
        """Tensor shape (N₁+1, …)."""
        return tuple(n + 1 for n in self.ns)

    @property
    def dim(self) -> int:
        """Number of amplitudes."""
        return self.amps.size

    def tensor(self) -> np.ndarray:
        """Amplitudes as a tensor with one axis per ensemble."""
        return self.amps.reshape(self.shape)

    def norm(self) -> float:
        """Euclidean norm."""
        return float(np.linalg.norm(self.amps))

    def amplitude(self, index: FockIndex) -> complex:
        """Amplitude of a single basis state."""
        index.validate(self.ns)
        return complex(self.tensor()[index.k])


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over the product Fock basis of ``ns``."""

    ns: tuple[int, ...]
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        dim = math.prod(n + 1 for n in self.ns)
        rho = _freeze(self.rho)

        if rho.shape != (dim, dim):
            raise ValidationError(f"Density matrix {rho.shape} does not match {self.ns}.")

        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityMatrix":
        """The pure state |ψ⟩⟨ψ|."""
        return cls(psi.ns, np.outer(psi.amps, psi.amps.conj()))

    @property
    def shape(self) -> tuple[int, ...]:
        """Tensor shape of one side."""
        return tuple(n + 1 for n in self.ns)

    def trace(self) -> complex:
        """Trace."""
        return complex(np.trace(self.rho))

    def populations(self) -> np.ndarray:
        """Real diagonal as a tensor with one axis per ensemble."""
        return self.rho.diagonal().real.reshape(self.shape)

    def hermiticity_error(self) -> float:
        """max |ρ − ρ†|."""
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))


@dataclass(frozen=True)
class BooleanOracle:
    """Truth table of f on [0, 2^M), f(x) = table[x]."""

    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(bit) for bit in self.table))

        if not is_power_of_two(len(self.table)) or len(self.table) < 2:
            raise ValidationError(
                f"Truth table length {len(self.table)} is not a power of two >= 2."
            )

        if any(bit not in (0, 1) for bit in self.table):
            raise ValidationError("Truth table entries must be 0 or 1.")

    @classmethod
    def from_str(cls, value: str) -> "BooleanOracle":
        """Parse a truth table line such as ``1001`` (character x is f(x))."""
        value = value.strip()

        if not value:
            raise ValidationError("Empty truth table.")

        if set(value) - {"0", "1"}:
            raise ValidationError(f"Invalid truth table {value!r}: only 0 and 1 are allowed.")

        return cls(tuple(int(char) for char in value))

    @classmethod
    def from_f_set(cls, m: int, f_set: typing.Iterable[int]) -> "BooleanOracle":
        """Build the oracle that is 1 exactly on ``f_set``."""
        ones = set(f_set)

        if any(not 0 <= x < 2**m for x in ones):
            raise ValidationError(f"F = {sorted(ones)} is not a subset of [0, {2**m}).")

        return cls(tuple(int(x in ones) for x in range(2**m)))

    def __str__(self):
        return "".join(str(bit) for bit in self.table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    @property
    def m(self) -> int:
        """Number of input bits."""
        return len(self.table).bit_length() - 1

    @property
    def f_set(self) -> tuple[int, ...]:
        """F = {x : f(x) = 1}, sorted."""
        return tuple(x for x, bit in enumerate(self.table) if bit)

    @property
    def oracle_class(self) -> OracleClass:
        """Constant, balanced or invalid."""
        ones = len(self.f_set)

        if ones in (0, len(self.table)):
            return OracleClass.CONSTANT

        if 2 * ones == len(self.table):
            return OracleClass.BALANCED

        return OracleClass.INVALID


@dataclass(frozen=True)
class OracleParams:
    """
    Free integers of the oracle Hamiltonian family.

    ``j_map`` holds j_x for x ∈ F. ``j_const`` is used for every x without an entry, which makes
    it the parameter of the constant oracles (H_{f=0} = 2πj, H_{f=1} multiplier 2j+1).
    """

    j_map: typing.Mapping[int, int] = field(default_factory=dict)
    j_const: int = 0

    def __post_init__(self):
        object.__setattr__(self, "j_map", {int(x): int(j) for x, j in self.j_map.items()})

    def j_for(self, x: int) -> int:
        """j_x."""
        return self.j_map.get(x, self.j_const)

    def validate(self, oracle: BooleanOracle) -> "OracleParams":
        """Check that j_map only names elements of F."""
        stray = set(self.j_map) - set(oracle.f_set)

        if stray:
            raise ValidationError(f"Parameters given for x = {sorted(stray)} outside of F.")

        return self

    def __str__(self):
        if not self.j_map:
            return f"j={self.j_const}"

        return ";".join(f"j{x}={j}" for x, j in sorted(self.j_map.items()))


@dataclass(frozen=True)
class OracleCoefficients:
    """Coefficients α_z of the expansion Σ_z α_z Π_n (σ^Z_n)^{z_n}."""

    m: int
    alpha: np.ndarray = field(repr=False)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        alpha.setflags(write=False)

        if alpha.shape != (2**self.m,):
            raise ValidationError(f"Expected {2**self.m} coefficients, got {alpha.shape}.")

        object.__setattr__(self, "alpha", alpha)

    @property
    def is_linear(self) -> bool:
        """True if only z with at most one set bit carry weight."""
        return all(
            self.alpha[z] == 0 for z in range(2**self.m) if bin(z).count("1") > 1
        )

    def linear_terms(self) -> tuple[float, ...]:
        """(α_{e₁}, …, α_{e_M}) for the single-bit z."""
        return tuple(float(self.alpha[1 << n]) for n in range(self.m))


@dataclass(frozen=True)
class CircuitResult:
    """Outcome of the qubit Deutsch-Jozsa circuit."""

    post_oracle_state: StateVector
    final_state: StateVector
    p_x0: float
    decision: OracleClass


@dataclass(frozen=True)
class Method1Run:
    """Outcome of a parity-encoded (Method 1) quantum-mode run."""

    dims: EnsembleDims
    k0: int
    post_oracle_state: StateVector
    final_state: StateVector
    overlap_zero: float
    decision: OracleClass


@dataclass(frozen=True)
class Method2Run:
    """
    Outcome of a coherent-state encoded (Method 2) quantum-mode run.

    The states are ``None`` if the closed-form path was taken.
    """

    dims: EnsembleDims
    params: OracleParams
    coeffs: OracleCoefficients
    post_oracle_state: typing.Optional[StateVector]
    final_state: typing.Optional[StateVector]
    p_init: LogReal
    decision: OracleClass

    @property
    def global_phase(self) -> complex:
        """
        e^{iπN₀α₀}, the phase the α₀ term gives every x-register state.

        The constant f=1 oracle has α₀ = 2j+1, so this is (−1)^{N₀}.
        """
        angle = self.dims.n_y * float(self.coeffs.alpha[0])

        if angle == round(angle):
            return complex((-1) ** int(round(angle)))

        return complex(np.exp(1j * math.pi * angle))


@dataclass(frozen=True)
class CurveSample:
    """One point of a p^(m) or ε^(m) curve."""

    tau: float
    value: LogReal
    m: int
    ns: tuple[int, ...]


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line through (N, ln ε_max)."""

    m: int
    slope: float
    intercept: float
    n_grid: tuple[int, ...]
    residual: float
    samples: tuple[CurveSample, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class DephasingSpec:
    """Collective S^Z dephasing with rate ``gamma`` for duration ``t`` on the ``targets``."""

    gamma: float
    t: float
    targets: typing.Optional[frozenset[int]] = None

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.t)):
            raise ValidationError("Dephasing rate and duration must be finite.")

        if self.gamma < 0 or self.t < 0:
            raise ValidationError(
                f"Dephasing rate and duration must be >= 0, got Γ={self.gamma}, t={self.t}."
            )

        if self.targets is not None:
            object.__setattr__(self, "targets", frozenset(int(n) for n in self.targets))

    def target_ensembles(self, m: int) -> frozenset[int]:
        """x-register ensembles (1-based) that dephase; all of them by default."""
        targets = frozenset(range(1, m + 1)) if self.targets is None else self.targets

        if not targets <= frozenset(range(1, m + 1)):
            raise ValidationError(f"Dephasing targets {sorted(targets)} not within 1..{m}.")

        return targets


@dataclass
class ExperimentConfig:
    """Everything a CLI subcommand needs, collected from flags and the config file."""

    command: str
    oracles: list[tuple[str, BooleanOracle]] = field(default_factory=list)
    m: int = 2
    n: list[int] = field(default_factory=list)
    n0: typing.Optional[int] = None
    method: typing.Optional[int] = None
    params: str = "zero"
    params_file: typing.Optional[Path] = None
    k0: int = 1
    kind: str = "p"
    dense: bool = False
    split: bool = False
    equal_partners: bool = False
    tau_grid: list[float] = field(default_factory=list)
    n_grid: list[int] = field(default_factory=list)
    gamma_t_grid: list[float] = field(default_factory=list)
    random_j: int = 0
    out: typing.Optional[Path] = None
    plot_stub: bool = False
    seed: int = 1729
    cap: int = DEFAULT_STATE_CAP
    density_cap: int = DEFAULT_DENSITY_CAP
    workers: int = 4

    def __post_init__(self):
        for name, grid in (
            ("tau_grid", self.tau_grid),
            ("gamma_t_grid", self.gamma_t_grid),
        ):
            if not all(math.isfinite(point) for point in grid):
                raise ValidationError(f"{name} must be finite.")

        if self.plot_stub and self.out is None:
            raise ValidationError("--plot-stub needs --out.")

        if self.split and self.out is None:
            raise ValidationError("--split needs --out.")

    @classmethod
    def from_args(
        cls, args: argparse.Namespace, oracles: list[tuple[str, BooleanOracle]]
    ) -> "ExperimentConfig":
        """Create a config from parsed command line arguments; the cap falls back to the env."""
        kwargs = {
            name: getattr(args, name)
            for name in cls.__dataclass_fields__  # pylint: disable=no-member
            if name != "oracles" and getattr(args, name, None) is not None
        }
        kwargs.setdefault("cap", get_default_cap())
        return cls(oracles=oracles, **kwargs)

    @property
    def dims(self) -> "EnsembleDims":
        """Ensemble sizes from ``n`` and ``n0`` for the configured M."""
        return EnsembleDims.from_args(argparse.Namespace(n=self.n, n0=self.n0), self.m)


def parse_oracle_arg(value: str) -> BooleanOracle:
    """argparse type for a truth table string."""
    try:
        return BooleanOracle.from_str(value)
    except ValidationError as err:
        raise argparse.ArgumentTypeError(termcolor.colored(str(err), "red")) from err
