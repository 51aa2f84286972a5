"""The subcommands: each turns an ExperimentConfig into one or more CSV tables."""

import typing
from pathlib import Path

import numpy as np

from . import analysis, decoherence
from .common import resolve_params
from .method1 import quantum_mode_m1
from .method2 import quantum_mode_m2
from .models import (
    BooleanOracle,
    CurveSample,
    DephasingSpec,
    EnsembleDims,
    ExperimentConfig,
    LogReal,
    OracleClass,
    OracleParams,
    ScalingFit,
)
from .oracles import qubit_oracle_hamiltonian, random_params, verify_oracle
from .qubit_reference import run_dj_qubits
from .report import CsvReport, run_sweep, write_plot_stub
from .utils import LOGGER, PreconditionError, ValidationError, sluggify

#: Default τ grid of the curves command.
DEFAULT_TAU_GRID = tuple(index / 200 for index in range(201))

#: Default Γt grid of the decoherence command.
DEFAULT_GAMMA_T_GRID = (0.0, 0.01, 0.1, 1.0)

#: Published lines ln max ε^(m) ≈ intercept + slope·N and the accepted deviations.
EXPECTED_SLOPES = {2: -0.77, 3: -1.78}
SLOPE_TOLERANCE = 0.15
EXPECTED_INTERCEPTS = {2: 0.81, 3: 2.62}
INTERCEPT_TOLERANCE = 0.5

#: Largest residual ‖exp(−iH) − U_f‖ accepted by oracle-verify.
VERIFY_TOLERANCE = 1e-9

CURVE_COLUMNS = ("m", "N1", "N2", "N3", "tau", "log10_value")


def _n_list(dims: EnsembleDims) -> str:
    return ";".join(str(n) for n in dims.n_x)


def _emit(
    config: ExperimentConfig,
    report: CsvReport,
    x_column: str,
    y_column: str,
    groups: typing.Sequence[str],
    out: typing.Optional[Path] = None,
) -> CsvReport:
    out = out or config.out
    report.write(out)

    if config.plot_stub and out is not None:
        write_plot_stub(out, x_column, y_column, groups)

    return report


def _params_for(config: ExperimentConfig, oracle: BooleanOracle) -> OracleParams:
    return resolve_params(config.params, oracle, config.params_file)


def cmd_qubit_dj(config: ExperimentConfig) -> CsvReport:
    """Run the qubit circuit for every configured oracle."""
    report = CsvReport(("oracle_id", "class", "p_x0", "decision", "correct"))
    results = run_sweep(lambda item: run_dj_qubits(item[1]), config.oracles, config.workers)

    for (oracle_id, oracle), result in zip(config.oracles, results):
        report.add(
            oracle_id,
            str(oracle.oracle_class),
            result.p_x0,
            str(result.decision),
            result.decision is oracle.oracle_class,
        )

    correct = sum(row[-1] == "true" for row in report.rows)
    LOGGER.success("Qubit circuit: %i of %i decisions correct.", correct, len(report.rows))
    return _emit(config, report, "oracle_id", "p_x0", ("class",))


def cmd_method(config: ExperimentConfig) -> CsvReport:
    """Run the quantum mode of Method 1 or Method 2 for every configured oracle."""
    method = config.method or 2
    dims = config.dims
    report = CsvReport(
        ("oracle_id", "class", "method", "n0", "n_list", "log10_value", "decision", "correct")
    )

    def run(item: tuple[str, BooleanOracle]) -> tuple[LogReal, OracleClass]:
        _, oracle = item
        params = _params_for(config, oracle)

        if method == 1:
            run1 = quantum_mode_m1(oracle, params, dims, k0=config.k0, cap=config.cap)
            return LogReal.from_float(run1.overlap_zero), run1.decision

        run2 = quantum_mode_m2(oracle, params, dims, cap=config.cap)
        return run2.p_init, run2.decision

    if method not in (1, 2):
        raise ValidationError(f"Unknown method {method}; expected 1 or 2.")

    for oracle_id, oracle in config.oracles:
        if oracle.m != dims.m:
            raise ValidationError(f"Oracle {oracle_id} has M={oracle.m}, but --m is {dims.m}.")

    results = run_sweep(run, config.oracles, config.workers)

    for (oracle_id, oracle), (value, decision) in zip(config.oracles, results):
        report.add(
            oracle_id,
            str(oracle.oracle_class),
            method,
            dims.n_y,
            _n_list(dims),
            value,
            str(decision),
            decision is oracle.oracle_class,
        )

    correct = sum(row[-1] == "true" for row in report.rows)
    LOGGER.success(
        "Method %i with %s: %i of %i decisions correct.", method, dims, correct, len(report.rows)
    )
    return _emit(config, report, "oracle_id", "log10_value", ("class",))


def _curve_ns(config: ExperimentConfig) -> list[tuple[int, ...]]:
    if config.n_grid:
        return [(n,) * config.m for n in config.n_grid]

    if config.n:
        return [config.dims.n_x]

    raise ValidationError("The curves command needs --n or --n-grid.")


def _curve_row(report: CsvReport, sample: CurveSample) -> None:
    padded = list(sample.ns) + [None] * (3 - len(sample.ns))
    report.add(sample.m, *padded, sample.tau, sample.value)


def cmd_curves(config: ExperimentConfig) -> list[CsvReport]:
    """Sample p^(m), ε^(m) or the Gaussian p^(1) on the τ grid for every N list."""
    if config.kind not in ("p", "epsilon", "gaussian"):
        raise ValidationError(f"Unknown curve kind {config.kind!r}.")

    if not 1 <= config.m <= 3:
        raise ValidationError(f"Curves exist for m in 1..3, got m={config.m}.")

    if config.dense and config.kind == "gaussian":
        raise ValidationError("--dense is available for p and epsilon only.")

    taus = list(config.tau_grid or DEFAULT_TAU_GRID)
    n_lists = _curve_ns(config)

    def sample(ns: tuple[int, ...]):
        if config.dense:
            dense = analysis.dense_p_m if config.kind == "p" else analysis.dense_epsilon_m
            return [
                CurveSample(
                    tau=tau, value=LogReal.from_float(dense(tau, ns)), m=config.m, ns=ns
                )
                for tau in taus
            ]

        return analysis.sample_curve(config.kind, config.m, ns, taus)  # type: ignore[arg-type]

    curves = run_sweep(sample, n_lists, config.workers)
    groups = ("m", "N1", "N2", "N3")
    LOGGER.success(
        "Sampled %s^(%i) at %i τ values for %i N lists.",
        config.kind,
        config.m,
        len(taus),
        len(n_lists),
    )

    if config.split:
        assert config.out is not None
        reports = []

        for ns, samples in zip(n_lists, curves):
            report = CsvReport(CURVE_COLUMNS)

            for item in samples:
                _curve_row(report, item)

            slug = sluggify(f"{config.kind} m={config.m} N={','.join(str(n) for n in ns)}")
            out = config.out.with_name(f"{config.out.stem}_{slug}{config.out.suffix or '.csv'}")
            reports.append(_emit(config, report, "tau", "log10_value", groups, out=out))

        return reports

    report = CsvReport(CURVE_COLUMNS)

    for samples in curves:
        for item in samples:
            _curve_row(report, item)

    return [_emit(config, report, "tau", "log10_value", groups)]


def fit_misses(fit: ScalingFit, check_intercept: bool = True) -> list[str]:
    """Deviations of the fitted line from the published one beyond the tolerance bands."""
    misses = []

    if abs(fit.slope - EXPECTED_SLOPES[fit.m]) > SLOPE_TOLERANCE:
        misses.append(
            f"slope {fit.slope:.4f} is outside {EXPECTED_SLOPES[fit.m]} ± {SLOPE_TOLERANCE}"
        )

    if check_intercept and abs(fit.intercept - EXPECTED_INTERCEPTS[fit.m]) > INTERCEPT_TOLERANCE:
        misses.append(
            f"intercept {fit.intercept:.4f} is outside"
            f" {EXPECTED_INTERCEPTS[fit.m]} ± {INTERCEPT_TOLERANCE}"
        )

    return misses


def cmd_fit(config: ExperimentConfig) -> CsvReport:
    """
    Fit ln max_τ ε^(m) over an even N grid.

    Writes one row per N and a summary row. The table is written before a slope or an intercept
    outside its band is reported as a failed precondition. ``--equal-partners`` restricts the
    samples to N₂ = … = N, whose line lies below the published one.
    """
    offsets = (0,) if config.equal_partners else analysis.PARTNER_OFFSETS
    fit = analysis.fit_epsilon_scaling(
        config.m, config.n_grid or analysis.DEFAULT_FIT_GRID, partner_offsets=offsets
    )
    report = CsvReport(
        (
            "row",
            "m",
            "N",
            "N_partner",
            "tau",
            "log10_eps_max",
            "ln_eps_max",
            "slope",
            "intercept",
            "residual",
        )
    )

    for sample in fit.samples:
        report.add(
            "sample",
            fit.m,
            sample.ns[0],
            sample.ns[1],
            sample.tau,
            sample.value,
            sample.value.ln_mag,
            None,
            None,
            None,
        )

    report.add("fit", fit.m, None, None, None, None, None, fit.slope, fit.intercept, fit.residual)
    _emit(config, report, "N", "ln_eps_max", ("m", "row"))
    misses = fit_misses(fit, check_intercept=not config.equal_partners)

    if misses:
        raise PreconditionError(f"Fit of ε^({fit.m}): {'; '.join(misses)}.")

    if config.equal_partners:
        LOGGER.info(
            "Equal partners: the intercept %.3f is not compared with %.2f.",
            fit.intercept,
            EXPECTED_INTERCEPTS[fit.m],
        )

    LOGGER.success(
        "ln ε^(%i)_max ≈ %.3f %+.3f·N (rms %.3g)", fit.m, fit.intercept, fit.slope, fit.residual
    )
    return report


def cmd_decoherence(config: ExperimentConfig) -> CsvReport:
    """Sweep Γt for every configured oracle and compare with the closed-form constant signal."""
    method = config.method or 1
    dims = config.dims
    gamma_ts = list(config.gamma_t_grid or DEFAULT_GAMMA_T_GRID)
    points = [
        (oracle_id, oracle, gamma_t)
        for oracle_id, oracle in config.oracles
        for gamma_t in gamma_ts
    ]

    def run(point: tuple[str, BooleanOracle, float]) -> decoherence.DephasingOutcome:
        _, oracle, gamma_t = point
        return decoherence.run_dj_with_dephasing(
            method,
            oracle,
            _params_for(config, oracle),
            dims,
            DephasingSpec(gamma=gamma_t, t=1.0),
            k0=config.k0,
            density_cap=config.density_cap,
        )

    outcomes = run_sweep(run, points, config.workers)
    report = CsvReport(
        ("oracle_id", "class", "gamma_t", "signal", "constant_signal", "decision", "correct")
    )

    for (oracle_id, oracle, gamma_t), outcome in zip(points, outcomes):
        report.add(
            oracle_id,
            str(oracle.oracle_class),
            gamma_t,
            outcome.signal,
            decoherence.constant_signal(gamma_t, 1.0, dims.m),
            str(outcome.decision),
            outcome.decision is oracle.oracle_class,
        )

    LOGGER.success(
        "Dephased Method %i runs: %i oracles at %i values of Γt.",
        method,
        len(config.oracles),
        len(gamma_ts),
    )
    return _emit(config, report, "gamma_t", "signal", ("oracle_id",))


def cmd_oracle_verify(config: ExperimentConfig) -> CsvReport:
    """
    Check exp(−iH_f) against U_f for every oracle.

    Each oracle is checked with the configured parameters and ``random_j`` random draws.
    """
    rng = np.random.default_rng(config.seed)
    points: list[tuple[str, BooleanOracle, OracleParams]] = []

    for oracle_id, oracle in config.oracles:
        if oracle.oracle_class is OracleClass.INVALID:
            raise ValidationError(f"Oracle {oracle_id} is neither constant nor balanced.")

        points.append((oracle_id, oracle, _params_for(config, oracle)))

        for _ in range(config.random_j):
            points.append((oracle_id, oracle, random_params(oracle, rng)))

    residuals = run_sweep(
        lambda point: verify_oracle(qubit_oracle_hamiltonian(point[1], point[2]), point[1]),
        points,
        config.workers,
    )
    report = CsvReport(("oracle_id", "class", "params", "residual", "certified"))

    for (oracle_id, oracle, params), residual in zip(points, residuals):
        report.add(
            oracle_id,
            str(oracle.oracle_class),
            str(params),
            residual,
            residual < VERIFY_TOLERANCE,
        )

    _emit(config, report, "oracle_id", "residual", ("class",))
    failed = [
        point[0] for point, residual in zip(points, residuals) if residual >= VERIFY_TOLERANCE
    ]

    if failed:
        raise PreconditionError(f"Oracle Hamiltonians failed verification: {', '.join(failed)}.")

    LOGGER.success("All %i oracle Hamiltonians certified.", len(points))
    return report


COMMANDS: dict[str, typing.Callable[[ExperimentConfig], typing.Any]] = {
    "qubit-dj": cmd_qubit_dj,
    "method": cmd_method,
    "curves": cmd_curves,
    "fit": cmd_fit,
    "decoherence": cmd_decoherence,
    "oracle-verify": cmd_oracle_verify,
}
