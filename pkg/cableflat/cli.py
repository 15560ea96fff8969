import functools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
from click_spinner import spinner  # type: ignore

from cableflat.backend import BACKENDS, get_backend
from cableflat.errors import EXIT_IO, CableFlatError, InvalidConfig
from cableflat.flatness.planner import EPS_RES, PlannedTrajectory
from cableflat.model.params import CableParams
from cableflat.model.system import RobotFleet
from cableflat.parse.scenario import ScenarioFile, ScenarioParser
from cableflat.parse.tables import load_published_errors
from cableflat.parse.utilities import document_hash, dump_json, load_json
from cableflat.simulation.report import compare_published, format_table, metrics_table
from cableflat.simulation.simulator import MODES, SimLog, output_error_metrics, simulate
from cableflat.sysid import IdentificationConfig, identify, preprocess, synthetic_dataset

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

logger = logging.getLogger(__name__)


def exit_codes(command):
    r"""Echo library errors and leave with their exit code"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except CableFlatError as error:
            click.echo("Error: {}".format(error), err=True)
            sys.exit(error.exit_code)
        except OSError as error:
            click.echo("Error: {}".format(error), err=True)
            sys.exit(EXIT_IO)

    return wrapper


def output_option(default: str):
    return click.option(
        "-o",
        "--output-dir",
        type=click.Path(exists=False, file_okay=False, resolve_path=True),
        default=default,
        show_default=True,
        help="Output directory",
    )


def _prepare(output_dir: str) -> Path:
    path = Path(output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option(
    "-v",
    "--verbose",
    count=True,
    help="Log progress, twice for debugging output",
)
@click.version_option()
def main(verbose: int) -> None:
    r"""Cableflat command line interface

    Plan flatness-based trajectories for elastic cables carried by quadrotors,
    simulate them, identify cable parameters from motion capture data and
    report output errors.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command(context_settings=CONTEXT_SETTINGS)
@click.argument("scenario", type=click.Path(dir_okay=False))
@output_option("results")
@exit_codes
def plan(scenario: str, output_dir: str) -> None:
    r"""Plan the trajectory of a SCENARIO document.

    Writes the planned trajectory as '<name>_plan.csv' and the residual summary
    as '<name>_plan.json'.
    """
    document = ScenarioParser().parse(scenario)
    click.echo(f"Planning '{document.name}' on {document.topology}...")
    with spinner():
        trajectory = document.plan()
        residuals = trajectory.residuals(
            document.cable, RobotFleet(document.topology, document.cable, document.quads)
        )
    output = _prepare(output_dir)
    trajectory.to_csv(output / f"{document.name}_plan.csv")
    worst = {
        name: float(np.max(values)) if values.size else 0.0
        for name, values in residuals.items()
    }
    summary = {
        "name": document.name,
        "scenario_hash": document.hash,
        "params_hash": document_hash(document.cable.to_dict()),
        "samples": trajectory.n_samples,
        "residual": worst,
        "max_residual": max(worst.values()),
        "tolerance": EPS_RES,
    }
    dump_json(summary, output / f"{document.name}_plan.json")
    click.echo(f"Maximum residual {summary['max_residual']:.3g}")
    click.echo("Done")


def _with_provenance(log: SimLog, document: ScenarioFile, **extra) -> SimLog:
    metadata = dict(log.metadata)
    metadata.update(name=document.name, scenario_hash=document.hash, **extra)
    return replace(log, metadata=metadata)


def _metrics(log: SimLog) -> Dict:
    frame = output_error_metrics(log)
    return {
        row.output: {"mean": row.mean, "max": row.max}
        for row in frame.itertuples(index=False)
    }


def run_scenario(
    scenario: str,
    output_dir: str,
    plan_path: Optional[str] = None,
    mode: Optional[str] = None,
    dt: Optional[float] = None,
    duration: Optional[float] = None,
    compare_open: bool = False,
) -> Tuple[str, Dict]:
    r"""Plan and simulate one scenario, writing its log and metrics.

    Returns:
        The scenario name and its metrics document
    """
    document = ScenarioParser().parse(scenario)
    document = document.with_simulation(mode=mode, dt=dt, duration=duration)
    config = document.simulation
    if plan_path is not None:
        trajectory = PlannedTrajectory.read_csv(plan_path, document.topology)
    else:
        trajectory = document.plan()
    controller = None
    if config.mode == "closed_loop":
        controller = document.closed_loop_controller()
    log = simulate(
        config,
        document.topology,
        document.plant,
        document.quads,
        plan=trajectory,
        controller=controller,
    )
    log = _with_provenance(log, document)
    output = _prepare(output_dir)
    log.to_csv(output / f"{document.name}.csv")
    metrics = {
        "name": document.name,
        "mode": config.mode,
        "scenario_hash": document.hash,
        "config_hash": log.metadata["config_hash"],
        "params_hash": log.metadata["params_hash"],
        "outputs": _metrics(log),
    }
    if compare_open:
        if config.mode != "closed_loop":
            raise InvalidConfig("'--compare-open' needs a closed-loop run")
        open_loop = simulate(
            config.replace(mode="tracked"),
            document.topology,
            document.plant,
            document.quads,
            plan=trajectory,
        )
        open_loop = _with_provenance(open_loop, document)
        open_loop.to_csv(output / f"{document.name}_open.csv")
        metrics["open_loop"] = _metrics(open_loop)
        metrics["comparison"] = [
            {
                "output": name,
                "open_mean": metrics["open_loop"][name]["mean"],
                "closed_mean": values["mean"],
                "improvement": metrics["open_loop"][name]["mean"] - values["mean"],
            }
            for name, values in sorted(metrics["outputs"].items())
        ]
    dump_json(metrics, output / f"{document.name}_metrics.json")
    return document.name, metrics


@main.command(name="simulate", context_settings=CONTEXT_SETTINGS)
@click.argument("scenarios", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option(
    "--plan",
    "plan_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Planned trajectory CSV written by 'cableflat plan', single scenario only",
)
@click.option(
    "--mode",
    type=click.Choice(MODES),
    default=None,
    help="Simulation mode, overrides the scenario",
)
@click.option("--dt", type=click.FLOAT, default=None, help="Integration step in s")
@click.option(
    "--duration", type=click.FLOAT, default=None, help="Simulated time in s"
)
@click.option(
    "--compare-open",
    is_flag=True,
    default=False,
    show_default=True,
    help="Also run the open-loop plan of a closed-loop scenario and compare errors",
)
@click.option(
    "-j",
    "--jobs",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Number of scenarios simulated in parallel",
)
@output_option("results")
@exit_codes
def simulate_command(
    scenarios: List[str],
    plan_path: Optional[str],
    mode: Optional[str],
    dt: Optional[float],
    duration: Optional[float],
    compare_open: bool,
    jobs: int,
    output_dir: str,
) -> None:
    r"""Simulate one or more SCENARIOS.

    Every scenario produces '<name>.csv' with the simulation log and
    '<name>_metrics.json' with its output errors.
    """
    if plan_path is not None and len(scenarios) > 1:
        raise InvalidConfig("'--plan' applies to a single scenario")
    run = functools.partial(
        run_scenario,
        output_dir=output_dir,
        plan_path=plan_path,
        mode=mode,
        dt=dt,
        duration=duration,
        compare_open=compare_open,
    )
    click.echo(f"Simulating {len(scenarios)} scenario(s)...")
    with spinner():
        if jobs == 1 or len(scenarios) == 1:
            results = [run(scenario) for scenario in scenarios]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run, scenarios))
    for name, metrics in results:
        for output, values in sorted(metrics["outputs"].items()):
            click.echo(
                f"{name} {output}: mean {values['mean']:.4f} m, max {values['max']:.4f} m"
            )
    click.echo("Done")


@main.command(name="identify", context_settings=CONTEXT_SETTINGS)
@click.argument("data", type=click.Path(dir_okay=False))
@click.option(
    "--config",
    type=click.STRING,
    default="identification",
    show_default=True,
    help="Identification settings document, a path or a fixture name",
)
@click.option(
    "--paper-exact",
    "--single-window",
    "paper_exact",
    is_flag=True,
    default=False,
    show_default=True,
    help="Integrate the whole dataset from its first sample instead of 2 s windows",
)
@click.option(
    "--max-gap",
    type=click.IntRange(min=0),
    default=10,
    show_default=True,
    help="Longest run of missing samples that is interpolated",
)
@click.option(
    "--smoothing",
    type=click.INT,
    default=None,
    help="Odd Savitzky-Golay window in samples applied to the markers",
)
@click.option(
    "-fmt",
    "--format",
    type=click.STRING,
    default=None,
    help="When given, the prediction errors are also plotted to a file of this format",
)
@output_option("results")
@exit_codes
def identify_command(
    data: str,
    config: str,
    paper_exact: bool,
    max_gap: int,
    smoothing: Optional[int],
    format: Optional[str],
    output_dir: str,
) -> None:
    r"""Identify the stiffnesses and the damping of a cable from marker DATA.

    DATA is a CSV with columns 't,p1x,p1y,p1z,...' of a cable held at both ends.
    """
    settings = IdentificationConfig.from_dict(load_json(config))
    if paper_exact:
        settings = replace(settings, window=None)
    dataset = preprocess(data, max_gap=max_gap, smoothing=smoothing)
    click.echo(
        f"Identifying {settings.theta0.size} parameters from {dataset.n_samples} samples..."
    )
    with spinner():
        report = identify(dataset, settings)
    metadata = {
        "data": Path(data).name,
        "config_hash": document_hash(settings.to_dict()),
        "data_hash": document_hash({"positions": dataset.positions}),
    }
    report = replace(report, metadata={**report.metadata, **metadata})
    output = _prepare(output_dir)
    stem = Path(data).stem
    dump_json(report.to_dict(), output / f"{stem}_identification.json")
    report.error_frame().to_csv(
        output / f"{stem}_errors.csv", index=False, float_format="%.12g"
    )
    if format is not None:
        backend = get_backend("matplotlib")(output_dir=output, format=format)
        backend.plot_identification_errors(report, name=f"{stem}_errors")
    click.echo("k = {}".format(", ".join(f"{k:.4g}" for k in report.theta.k)))
    click.echo(f"c = {report.theta.c:.4g}")
    click.echo(f"Mean coordinate error {report.mean_coordinate_error:.4g} m")
    if report.near_zero:
        click.echo("Weakly identifiable: {}".format(", ".join(report.near_zero)))
    click.echo("Done")


@main.command(context_settings=CONTEXT_SETTINGS)
@click.argument("logs", nargs=-1, type=click.Path(dir_okay=False))
@click.option(
    "--compare",
    type=click.STRING,
    default=None,
    help="Table of published errors to compare with, e.g. 'table2'",
)
@click.option(
    "--start-fraction",
    type=click.FloatRange(0.0, 1.0),
    default=0.0,
    show_default=True,
    help="Fraction of every run discarded before averaging",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also write the table to this CSV file",
)
@exit_codes
def report(
    logs: List[str], compare: Optional[str], start_fraction: float, output: Optional[str]
) -> None:
    r"""Tabulate the output errors of simulation LOGS."""
    runs = {}
    for path in logs:
        log = SimLog.read_csv(path)
        runs[log.metadata.get("name", Path(path).stem)] = log
    table = metrics_table(runs, start_fraction=start_fraction)
    if compare is not None:
        table = compare_published(table, load_published_errors(compare))
    click.echo(format_table(table))
    if output is not None:
        table.to_csv(output, index=False, float_format="%.12g")


@main.command(context_settings=CONTEXT_SETTINGS)
@click.option(
    "--cable",
    type=click.STRING,
    default="table1",
    show_default=True,
    help="Cable parameter document, a path or a fixture name",
)
@click.option(
    "--duration", type=click.FLOAT, default=120.0, show_default=True, help="Recorded time in s"
)
@click.option(
    "--rate", type=click.FLOAT, default=100.0, show_default=True, help="Recording rate in Hz"
)
@click.option(
    "--amplitude",
    type=click.FLOAT,
    default=0.15,
    show_default=True,
    help="Excursion scale of the cable ends in m",
)
@click.option("--seed", type=click.INT, default=0, show_default=True, help="Random seed")
@click.option(
    "--noise",
    type=click.FLOAT,
    default=0.0,
    show_default=True,
    help="Standard deviation of the marker noise in m",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    default="synthetic.csv",
    show_default=True,
    help="Marker CSV written",
)
@exit_codes
def synthesize(
    cable: str,
    duration: float,
    rate: float,
    amplitude: float,
    seed: int,
    noise: float,
    output: str,
) -> None:
    r"""Simulate a cable shaken at both ends and write its markers as CSV."""
    params = CableParams.from_dict(load_json(cable))
    click.echo(f"Simulating {duration:.0f} s of excitation...")
    with spinner():
        dataset = synthetic_dataset(
            params,
            duration=duration,
            rate=rate,
            amplitude=amplitude,
            noise_std=noise,
            seed=seed,
        )
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    dataset.to_csv(output)
    click.echo("Done")


PLOTS = ("topology", "trajectory", "outputs")


@main.command(context_settings=CONTEXT_SETTINGS)
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option(
    "--log",
    "log_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Simulation log whose output errors are plotted",
)
@click.option(
    "-k",
    "--kind",
    "kinds",
    type=click.Choice(PLOTS),
    multiple=True,
    help="Plots to draw, every plot the back end supports by default",
)
@click.option(
    "-o",
    "--output-dir",
    type=click.Path(exists=False, dir_okay=True, resolve_path=True),
    default="graphs",
    show_default=True,
    help="Output directory",
)
@click.option(
    "-fmt",
    "--format",
    type=click.STRING,
    default=None,
    show_default=True,
    help="Output format, if specified the plots will be rendered to files"
    " with the given format",
)
@click.option(
    "--backend",
    type=click.Choice(BACKENDS),
    default="matplotlib",
    show_default=True,
    help="Backend used for plotting",
)
@click.option(
    "--dims",
    "--image-dimensions",
    "image_dimensions",
    type=click.STRING,
    default="800,600",
    show_default=True,
    help="Dimensions of the rendered plots given as 'width,height'",
)
@exit_codes
def plot(
    scenario: str,
    log_path: Optional[str],
    kinds: Tuple[str, ...],
    output_dir: str,
    format: Optional[str],
    backend: str,
    image_dimensions: str,
) -> None:
    r"""Plot the topology and trajectories of a SCENARIO."""
    try:
        image_width, image_height = map(int, image_dimensions.split(","))
    except ValueError:
        raise InvalidConfig("'--dims' must be given as 'width,height'")
    if not kinds:
        kinds = ("topology",) if backend == "graphviz" else ("topology", "trajectory")
        if log_path is not None and backend != "graphviz":
            kinds += ("outputs",)
    if "outputs" in kinds and log_path is None:
        raise InvalidConfig("output error plots need '--log'")
    document = ScenarioParser().parse(scenario)
    plotter = get_backend(backend)(
        output_dir=output_dir,
        format=format,
        figure_dimensions=(image_width, image_height),
    )
    click.echo("Plotting...")
    with spinner():
        if "topology" in kinds:
            plotter.plot_topology(document.topology, name=f"{document.name}_topology")
        if "trajectory" in kinds:
            trajectory = document.plan()
            plotter.plot_trajectory(
                trajectory.positions,
                trajectory.times,
                document.topology,
                name=f"{document.name}_trajectory",
            )
        if "outputs" in kinds:
            plotter.plot_output_errors(
                SimLog.read_csv(log_path), name=f"{document.name}_outputs"
            )
    click.echo("Done")


if __name__ == "__main__":
    main()
