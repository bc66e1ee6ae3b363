"""
Experiment runner for the spin-qubit simulator.

This module turns a SweepConfig into results on disk and on the console:
- Parameter sweeps of the magnetic-field and Ising experiments
- CSV export of the sweep table
- SVG figures with analytic curves and estimated points
- The spin-algebra self-check report
- The error-budget report
- QASM export of experiment circuits

Functions named run_*, export_* and render_* raise on failure; the report_*
wrappers and run_experiment print to the console and return None on error.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from rich.console import Console  # noqa: E402
from rich.table import Table  # noqa: E402

from spinqubits.config import SweepConfig, load_device_params  # noqa: E402
from spinqubits.errors import ConfigError, ExportError, SpinQubitsError  # noqa: E402
from spinqubits.models import (  # noqa: E402
    SPIN_HALF_REGISTER,
    SPIN_ONE_REGISTER,
    FieldSpec,
    IsingSpec,
    analytic_field_means,
    analytic_field_probabilities,
    analytic_ising,
    analytic_ising_means,
    analytic_ising_probabilities,
    field_initial_state,
    field_preparation,
    ising_circuit,
    magnetic_field_circuit,
)
from spinqubits.noise import (  # noqa: E402
    REFERENCE_DEVICE,
    DeviceParams,
    NoiseModel,
    ensemble_leakage,
    error_budget,
    noisy_probabilities,
)
from spinqubits.protocols import (  # noqa: E402
    Estimate,
    estimate_from_counts,
    magnetic_numbers_from_counts,
    measurement_circuit,
    vector_magnitude,
)
from spinqubits.qasm import write_qasm  # noqa: E402
from spinqubits.spin_algebra import (  # noqa: E402
    ALGEBRA_TOL,
    AXES,
    MAX_DENSE_QUBITS,
    SpinRegister,
    SpinValue,
    casimir_operator,
    dicke_basis,
    singlet_leakage,
    verify_algebra,
)
from spinqubits.statevec import (  # noqa: E402
    Circuit,
    StateVector,
    derive_seed,
    exact_probabilities,
    gate_census,
    run_circuit,
    sample_probabilities,
)

# Initialize console for rich output
console = Console()

PROBABILITY_COLUMNS = ("p_plus1", "p_0", "p_minus1")
MEAN_COLUMNS = ("mean_x", "mean_y", "mean_z", "mean_norm")
ESTIMATORS = {
    "magfield": PROBABILITY_COLUMNS + MEAN_COLUMNS,
    "ising": PROBABILITY_COLUMNS + MEAN_COLUMNS + ("corr_xx",),
}
PARAM_LABELS = {"magfield": "omega t [rad]", "ising": "J t [rad]"}

# Gate census of the Ising experiment as reported for the device run
ISING_SINGLE_GATES = 20
ISING_CX_GATES = 4


@dataclass(frozen=True)
class SweepRow:
    """
    Results at one grid point.

    Args:
        param: The swept omega*t or J*t
        values: Estimated value per estimator column
        stderr: Standard error per estimator column
        analytic: Closed-form value per estimator column
        leakage: Weight of the spin-1 register outside the symmetric subspace
    """

    param: float
    values: Dict[str, float]
    stderr: Dict[str, float]
    analytic: Dict[str, float]
    leakage: float

    @property
    def estimators(self) -> Tuple[str, ...]:
        return tuple(self.values)

    @property
    def experiment(self) -> str:
        return "ising" if "corr_xx" in self.values else "magfield"

    def record(self) -> Dict[str, float]:
        """Flat column -> value mapping in CSV column order."""
        record = {"param": self.param}
        record.update(self.values)
        record.update({f"analytic_{name}": self.analytic[name] for name in self.values})
        record["leakage"] = self.leakage
        record.update({f"stderr_{name}": self.stderr[name] for name in self.values})
        return record


@dataclass(frozen=True)
class _Point:
    circuit: Circuit
    initial: StateVector
    analytic: Dict[str, float]


def _build_point(cfg: SweepConfig, param: float) -> _Point:
    if cfg.experiment == "magfield":
        m = cfg.initial_m
        analytic = dict(zip(PROBABILITY_COLUMNS, analytic_field_probabilities(m, param)))
        means = analytic_field_means(m, param)
        analytic.update(zip(MEAN_COLUMNS, means))
        analytic["mean_norm"] = float(np.linalg.norm(means))
        circuit = magnetic_field_circuit(FieldSpec(param), SPIN_ONE_REGISTER)
        return _Point(circuit, field_initial_state(m), _as_floats(analytic))

    analytic = dict(zip(PROBABILITY_COLUMNS, analytic_ising_probabilities(param)))
    analytic.update(zip(MEAN_COLUMNS, analytic_ising_means(param)))
    analytic["mean_norm"], analytic["corr_xx"] = analytic_ising(param)
    circuit = ising_circuit(IsingSpec(param))
    return _Point(circuit, StateVector.zero(circuit.n_qubits), _as_floats(analytic))


def _as_floats(values: Dict[str, Any]) -> Dict[str, float]:
    return {key: float(value) for key, value in values.items()}


def experiment_circuit(cfg: SweepConfig, param: float) -> Circuit:
    """The full circuit of one grid point, starting from |0...0>."""
    if cfg.experiment == "magfield":
        spec = FieldSpec(param)
        return field_preparation(cfg.initial_m) + magnetic_field_circuit(spec, SPIN_ONE_REGISTER)
    return ising_circuit(IsingSpec(param))


def _measured_distribution(point: _Point, settings: Sequence[Tuple[SpinRegister, str]],
                           model: Optional[NoiseModel], shots: Optional[int],
                           seed: np.random.SeedSequence):
    n_qubits = point.circuit.n_qubits
    measured = point.circuit + measurement_circuit(settings, n_qubits)
    if model is None:
        probs = exact_probabilities(run_circuit(measured, point.initial))
    else:
        probs = noisy_probabilities(measured, point.initial, model)
    if shots is None:
        return probs
    return sample_probabilities(probs, n_qubits, shots, seed)


def _level_stderr(p: float, shots: int) -> float:
    """
    Binomial standard error of a sampled level frequency.

    The frequency is shrunk to (k + 1) / (shots + 2) first, so a level that
    drew no counts (or every count) still gets a nonzero error.
    """
    shrunk = (p * shots + 1) / (shots + 2)
    return float(np.sqrt(shrunk * (1 - shrunk) / shots))


def evaluate_point(cfg: SweepConfig, index: int, param: float,
                   model: Optional[NoiseModel] = None) -> SweepRow:
    """
    Simulate and measure one grid point.

    Every measurement setting (z, x, y and for the Ising experiment the xx
    correlation) runs on its own copy of the evolved state with its own seed
    stream derived from (cfg.seed, index, setting).

    Args:
        cfg: Sweep configuration
        index: Position of the point in the grid
        param: omega*t or J*t at this point
        model: Noise applied to gates and readout; None for noiseless runs

    Returns:
        The SweepRow of this point
    """
    point = _build_point(cfg, param)
    reg = SPIN_ONE_REGISTER
    seed = derive_seed(cfg.seed, index)
    values: Dict[str, float] = {}
    errors: Dict[str, float] = {}

    components: List[Estimate] = []
    for setting, axis in enumerate(AXES):
        data = _measured_distribution(
            point, [(reg, axis)], model, cfg.shots, derive_seed(seed, setting)
        )
        estimate = estimate_from_counts(data, reg)
        components.append(estimate)
        values[f"mean_{axis}"] = estimate.value
        errors[f"mean_{axis}"] = estimate.stderr
        if axis == "z":
            levels = magnetic_numbers_from_counts(data, reg)
            for column, p in zip(PROBABILITY_COLUMNS, levels):
                values[column] = float(p)
                errors[column] = 0.0 if cfg.exact else _level_stderr(float(p), cfg.shots)

    magnitude = vector_magnitude(components)
    values["mean_norm"] = magnitude.value
    errors["mean_norm"] = magnitude.stderr

    if cfg.experiment == "ising":
        data = _measured_distribution(
            point, [(reg, "x"), (SPIN_HALF_REGISTER, "x")], model, cfg.shots,
            derive_seed(seed, len(AXES)),
        )
        estimate = estimate_from_counts(data, reg, SPIN_HALF_REGISTER)
        values["corr_xx"] = estimate.value
        errors["corr_xx"] = estimate.stderr

    if model is None:
        leakage = singlet_leakage(run_circuit(point.circuit, point.initial), reg)
    else:
        leakage = ensemble_leakage(
            point.circuit, point.initial, reg, model.single_qubit_rate, model.cx_rate
        )

    columns = ESTIMATORS[cfg.experiment]
    return SweepRow(
        param=float(param),
        values={name: values[name] for name in columns},
        stderr={name: errors[name] for name in columns},
        analytic={name: point.analytic[name] for name in columns},
        leakage=float(leakage),
    )


def noise_model_for(cfg: SweepConfig) -> Optional[NoiseModel]:
    """The noise model of cfg.noise, or None for a noiseless sweep."""
    if not cfg.noise:
        return None
    model = NoiseModel.from_device(load_device_params(cfg.noise))
    return None if model.is_noiseless() else model


def run_sweep(cfg: SweepConfig) -> List[SweepRow]:
    """
    Evaluate every grid point of a sweep.

    Points run on cfg.workers threads; rows come back in grid order and do
    not depend on the worker count.

    Args:
        cfg: Sweep configuration

    Returns:
        One SweepRow per grid point
    """
    model = noise_model_for(cfg)
    grid = cfg.grid()
    console.log(f"evaluating {len(grid)} points on {cfg.workers} worker(s)")
    if cfg.workers == 1:
        return [evaluate_point(cfg, index, param, model) for index, param in enumerate(grid)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        return list(
            executor.map(lambda item: evaluate_point(cfg, item[0], item[1], model), enumerate(grid))
        )


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    """The sweep table as a DataFrame, one row per grid point."""
    if not rows:
        raise ExportError("sweep produced no rows")
    return pd.DataFrame([row.record() for row in rows])


def export_csv(rows: Sequence[SweepRow], path: str) -> str:
    """
    Write the sweep table as CSV.

    Args:
        rows: Sweep rows in grid order
        path: Output file

    Returns:
        The path written
    """
    frame = sweep_frame(rows)
    try:
        frame.to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
    except OSError as exc:
        raise ExportError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc
    return path


@dataclass(frozen=True)
class PlotSeries:
    """
    One estimator as drawn in the figure.

    Args:
        column: Estimator column name
        x: Grid values
        curve: Analytic values, drawn as a line
        dots: Estimated values, drawn as markers
        errors: Standard errors, drawn as error bars when positive
    """

    column: str
    x: np.ndarray
    curve: np.ndarray
    dots: np.ndarray
    errors: np.ndarray

    @property
    def has_error_bars(self) -> bool:
        return bool(np.any(self.errors > 0))


def plot_model(rows: Sequence[SweepRow]) -> List[PlotSeries]:
    """Coordinates of every curve and marker before anything is drawn."""
    if not rows:
        raise ExportError("cannot plot an empty sweep")
    x = np.array([row.param for row in rows])
    return [
        PlotSeries(
            column,
            x,
            np.array([row.analytic[column] for row in rows]),
            np.array([row.values[column] for row in rows]),
            np.array([row.stderr[column] for row in rows]),
        )
        for column in rows[0].estimators
    ]


def build_figure(rows: Sequence[SweepRow], param_label: Optional[str] = None):
    """
    Draw probabilities and spin components in two panels.

    Analytic values are solid lines; estimates are dots, with error bars
    when their stderr is positive.
    """
    series = plot_model(rows)
    param_label = param_label or PARAM_LABELS[rows[0].experiment]
    fig, (ax_probs, ax_means) = plt.subplots(ncols=2, figsize=(11, 4.5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]

    for number, item in enumerate(series):
        ax = ax_probs if item.column in PROBABILITY_COLUMNS else ax_means
        color = colors[number % len(colors)]
        ax.plot(item.x, item.curve, "-", color=color, linewidth=1.2, label=item.column)
        if item.has_error_bars:
            ax.errorbar(item.x, item.dots, yerr=item.errors, fmt="o", color=color,
                        markersize=3, capsize=2, elinewidth=0.8)
        else:
            ax.plot(item.x, item.dots, "o", color=color, markersize=3)

    ax_probs.set_ylabel("probability |C_m|^2")
    ax_means.set_ylabel("expectation value")
    for ax in (ax_probs, ax_means):
        ax.set_xlabel(param_label)
        ax.legend(fontsize="small")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig


def render_plot(rows: Sequence[SweepRow], path: str, param_label: Optional[str] = None) -> str:
    """
    Write the sweep figure as SVG.

    Args:
        rows: Sweep rows in grid order (must not be empty)
        path: Output file
        param_label: x-axis label (defaults to the experiment's parameter)

    Returns:
        The path written
    """
    with plt.rc_context({"svg.hashsalt": "spinqubits", "svg.fonttype": "none"}):
        fig = build_figure(rows, param_label)
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise ExportError(f"cannot write SVG to {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
    return path


def export_qasm(circuit: Circuit, path: str) -> str:
    """Write a circuit with terminal measurements as an OpenQASM file."""
    try:
        return write_qasm(circuit, path, measure_all=True)
    except OSError as exc:
        raise ExportError(f"cannot write QASM to {path}: {exc.strerror or exc}") from exc


def sweep_deviations(rows: Sequence[SweepRow]) -> Dict[str, float]:
    """Largest |estimate - analytic| per estimator column."""
    frame = sweep_frame(rows)
    return {
        name: float((frame[name] - frame[f"analytic_{name}"]).abs().max())
        for name in rows[0].estimators
    }


def _summary_table(cfg: SweepConfig, rows: Sequence[SweepRow]) -> Table:
    table = Table(title=f"{cfg.experiment} sweep ({cfg.initial})")
    table.add_column("column")
    table.add_column("max |estimate - analytic|", justify="right")
    table.add_column("max stderr", justify="right")
    stderr = {name: max(row.stderr[name] for row in rows) for name in rows[0].estimators}
    for name, deviation in sweep_deviations(rows).items():
        table.add_row(name, f"{deviation:.3e}", f"{stderr[name]:.3e}")
    table.add_row("leakage", f"{max(row.leakage for row in rows):.3e}", "-")
    return table


def run_experiment(cfg: SweepConfig) -> Optional[Dict[str, Any]]:
    """
    Run a sweep, print a summary and write the requested outputs.

    Args:
        cfg: Sweep configuration

    Returns:
        A dictionary with the rows and written paths, or None on error
    """
    mode = "exact probabilities" if cfg.exact else f"{cfg.shots} shots"
    noise = f", noise from {cfg.noise}" if cfg.noise else ""
    console.print(
        f"[yellow]Running {cfg.experiment} sweep: {cfg.steps} points up to "
        f"{cfg.max_param:.6g}, {mode}{noise}...[/yellow]"
    )
    try:
        rows = run_sweep(cfg)
        outputs: Dict[str, str] = {}
        if cfg.csv:
            outputs["csv"] = export_csv(rows, cfg.csv)
        if cfg.svg:
            outputs["svg"] = render_plot(rows, cfg.svg)
        if cfg.qasm:
            outputs["qasm"] = export_qasm(experiment_circuit(cfg, cfg.grid()[-1]), cfg.qasm)
    except SpinQubitsError as exc:
        console.print(f"[red]Error running sweep: {exc}[/red]")
        return None

    console.print(_summary_table(cfg, rows))
    console.print(f"[green]Sweep finished: {len(rows)} points[/green]")
    for kind, path in outputs.items():
        console.print(f"[green]{kind.upper()} written to: {path}[/green]")
    return {"rows": rows, "outputs": outputs}


def algebra_check(max_twice_s: int = 6) -> Dict[str, Any]:
    """
    Verify the spin algebra for s = 1/2 .. max_twice_s/2 and print the residuals.

    Args:
        max_twice_s: Largest 2s to check, at most 12

    Returns:
        Dictionary with per-spin residual rows, the list of violations
        (spin, identity, residual) and the largest residual
    """
    if not 1 <= max_twice_s <= MAX_DENSE_QUBITS:
        raise ConfigError(f"max_twice_s must be in 1..{MAX_DENSE_QUBITS}, got {max_twice_s}")

    rows: List[Dict[str, Any]] = []
    violations: List[Tuple[str, str, float]] = []
    for twice_s in range(1, max_twice_s + 1):
        spin = SpinValue(twice_s)
        console.log(f"checking s={spin} on {spin.qubit_count()} qubits")
        residuals = verify_algebra(spin)
        top = dicke_basis(spin)[:, 0]
        measured = float(np.real(np.vdot(top, casimir_operator(spin) @ top)))
        rows.append({"s": str(spin), "casimir_eigenvalue": measured, **residuals})
        violations.extend(
            (str(spin), name, value) for name, value in residuals.items() if value >= ALGEBRA_TOL
        )

    names = [key for key in rows[0] if key not in ("s", "casimir_eigenvalue")]
    table = Table(title="Spin algebra residuals")
    table.add_column("s")
    table.add_column("s(s+1)", justify="right")
    for name in names:
        table.add_column(name, justify="right")
    for row in rows:
        bad = any(row[name] >= ALGEBRA_TOL for name in names)
        table.add_row(
            row["s"],
            f"{row['casimir_eigenvalue']:.6g}",
            *(f"{row[name]:.2e}" for name in names),
            style="red" if bad else None,
        )
    console.print(table)

    worst = max(row[name] for row in rows for name in names)
    if violations:
        console.print(f"[red]{len(violations)} identities exceed {ALGEBRA_TOL:g}[/red]")
    else:
        console.print(f"[green]All identities hold below {ALGEBRA_TOL:g} "
                      f"(largest residual {worst:.2e})[/green]")
    return {"rows": rows, "violations": violations, "max_residual": worst}


def budget_report(params: DeviceParams = REFERENCE_DEVICE,
                  n_single: int = ISING_SINGLE_GATES,
                  n_cx: int = ISING_CX_GATES) -> Dict[str, float]:
    """
    Print the error budgets of the Ising experiment.

    Args:
        params: Device averages
        n_single: Single-qubit gates per circuit
        n_cx: CX gates per circuit

    Returns:
        Budget in percent for the gates alone, the spin-1 mean (2 measured
        qubits) and the xx correlation (3 measured qubits)
    """
    budgets = {
        "gates": error_budget(n_single, n_cx, 0, params, include_statistics=False),
        "mean": error_budget(n_single, n_cx, 2, params),
        "correlation": error_budget(n_single, n_cx, 3, params),
    }
    table = Table(title="Error budget of the Ising experiment")
    table.add_column("quantity")
    table.add_column("measured qubits", justify="right")
    table.add_column("budget [%]", justify="right")
    for (name, value), measured in zip(budgets.items(), (0, 2, 3)):
        table.add_row(name, str(measured), f"{value:.3f}")
    console.print(table)

    single, cx = gate_census(ising_circuit(IsingSpec(np.pi / 2)), native=True)
    console.print(
        f"[yellow]Native census of the simulated Ising circuit: "
        f"{single} single-qubit gates, {cx} CX[/yellow]"
    )
    return budgets


def report_budget(noise_path: Optional[str] = None) -> Optional[Dict[str, float]]:
    """budget_report for a device file (or the default device); None on error."""
    try:
        params = load_device_params(noise_path) if noise_path else REFERENCE_DEVICE
    except SpinQubitsError as exc:
        console.print(f"[red]Error loading device parameters: {exc}[/red]")
        return None
    return budget_report(params)


def report_qasm(cfg: SweepConfig, param: float, path: str) -> Optional[str]:
    """Export the experiment circuit at one parameter value; None on error."""
    try:
        circuit = experiment_circuit(cfg, param)
        export_qasm(circuit, path)
    except SpinQubitsError as exc:
        console.print(f"[red]Error exporting QASM: {exc}[/red]")
        return None
    single, cx = gate_census(circuit)
    console.print(f"[green]QASM written to: {path} ({single} single-qubit gates, {cx} CX)[/green]")
    return path
