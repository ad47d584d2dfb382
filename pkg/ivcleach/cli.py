import logging
import sys
from functools import wraps
from pathlib import Path

import click

import ivcleach
from ivcleach import config as defaults
from ivcleach.config import _mkdir, load_config
from ivcleach.core import Protocol
from ivcleach.errors import ConfigError, IvcLeachError
from ivcleach.serializers import (
    RunManifest,
    Series,
    emit_charts,
    read_rounds_csv,
    write_events,
    write_manifest,
    write_rounds_csv,
    write_summary,
)
from ivcleach.simulator import compare as compare_protocols
from ivcleach.simulator import run as run_protocol

ERROR = "[ERROR] {}"
INFO = "[INFO] {}"

CONFIG_ERROR_EXIT = 1
RUNTIME_ERROR_EXIT = 2


@click.group()
@click.version_option(version=ivcleach.__version__)
def cli():
    pass


def _set_logging(verbose, debug):
    if debug:
        logging.basicConfig(level=logging.DEBUG)
    elif verbose:
        logging.basicConfig(level=logging.INFO)


def _pair(value, sep, key):
    if value is None:
        return None
    try:
        a, b = (float(part) for part in value.lower().split(sep))
    except ValueError:
        raise ConfigError(key, f"`{value}` is not of the form A{sep}B")
    return a, b


def parse_seeds(value):
    """`0,3,7`, `0-9` or a mix of both."""
    seeds = []
    try:
        for part in value.split(","):
            part = part.strip()
            if "-" in part:
                start, end = (int(p) for p in part.split("-"))
                seeds.extend(range(start, end + 1))
            elif part:
                seeds.append(int(part))
    except ValueError:
        raise ConfigError("seeds", f"`{value}` is not a seed list like 0,1,2 or 0-9")
    if not seeds:
        raise ConfigError("seeds", "at least one seed is required")
    return seeds


def _resolve_config(kwargs):
    overrides = {
        "protocol": kwargs.get("protocol"),
        "seed": kwargs.get("seed"),
        "max_rounds": kwargs["rounds"],
        "n_nodes": kwargs["nodes"],
        "k_clusters": kwargs["k_clusters"],
        "leach_p": kwargs["leach_p"],
        "fail_prob": kwargs["fail_prob"],
        "kills": list(kwargs["kill"]) or None,
    }
    area = _pair(kwargs["area"], "x", "area")
    if area:
        overrides["area_width"], overrides["area_height"] = area
    bs = _pair(kwargs["bs"], ",", "bs")
    if bs:
        overrides["bs_x"], overrides["bs_y"] = bs
    return load_config(kwargs["config"], overrides)


def simulation_options(f):
    options = [
        click.option("--config", "-c", type=click.Path(), help="flat key: value config file"),
        click.option("--rounds", type=int, help="maximum number of rounds"),
        click.option("--nodes", type=int, help="number of sensor nodes"),
        click.option("--area", help="field size as WxH meters, e.g. 100x100"),
        click.option("--bs", help="base station position as X,Y"),
        click.option("--k-clusters", type=int, help="clusters formed by the BS (IVC)"),
        click.option("--leach-p", type=float, help="desired CH fraction (LEACH)"),
        click.option("--fail-prob", type=float, help="per node, per round failure probability"),
        click.option(
            "--kill", multiple=True, help="scripted failure ROUND:NODE[:SLOT] (repeatable)"
        ),
        click.option(
            "--out", "-o", type=click.Path(), default=str(defaults.OUTPUT_PATH), help="output directory"
        ),
        click.option("--charts", is_flag=True, help="also write SVG charts"),
        click.option("--verbose", "-v", help="verbose", is_flag=True),
        click.option("--debug", "-d", help="debug", is_flag=True),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def handle_errors(f):
    """Map errors onto exit codes: 1 for configuration, 2 for runtime or I/O."""

    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ConfigError as e:
            click.echo(ERROR.format(f"configuration: {e}"), err=True)
            sys.exit(CONFIG_ERROR_EXIT)
        except (IvcLeachError, OSError) as e:
            click.echo(ERROR.format(e), err=True)
            sys.exit(RUNTIME_ERROR_EXIT)

    return wrapper


@cli.command()
@click.option(
    "--protocol",
    "-p",
    type=click.Choice([p.value for p in Protocol], case_sensitive=False),
    help="protocol to simulate (default IVC)",
)
@click.option("--seed", "-s", type=int, help="random seed")
@simulation_options
@handle_errors
def run(**kwargs):
    """Simulate one protocol with one seed."""
    _set_logging(kwargs["verbose"], kwargs["debug"])
    if kwargs["protocol"]:
        kwargs["protocol"] = kwargs["protocol"].upper()
    config = _resolve_config(kwargs)
    out = _mkdir(Path(kwargs["out"]))
    outputs = {
        "rounds": out / "rounds.csv",
        "summary": out / "summary.yml",
        "events": out / "events.tsv",
    }
    write_manifest(RunManifest.of(config, outputs), out / "manifest.yml")

    result = run_protocol(config)
    write_rounds_csv(result, outputs["rounds"])
    write_summary(result, outputs["summary"])
    write_events(result, outputs["events"])
    if kwargs["charts"]:
        emit_charts([result], out)

    marks = f"fnd={result.fnd} hnd={result.hnd} lnd={result.lnd}"
    if result.partial:
        marks += f" (partial: nodes alive after {result.rounds} rounds)"
    click.echo(INFO.format(f"{config.protocol.value} seed {config.seed}: {marks}"))
    click.echo(INFO.format(f"Results written to {out}"))


@cli.command()
@click.option("--seeds", default="0-9", show_default=True, help="seed list, e.g. 0,1,2 or 0-9")
@click.option("--workers", "-w", type=int, default=1, show_default=True, help="parallel runs")
@simulation_options
@handle_errors
def compare(**kwargs):
    """Run LEACH and IVC on the same deployments and compare their lifetimes."""
    _set_logging(kwargs["verbose"], kwargs["debug"])
    seeds = parse_seeds(kwargs["seeds"])
    config = _resolve_config(kwargs)
    out = _mkdir(Path(kwargs["out"]))
    outputs = {"summary": out / "comparison.yml"}
    write_manifest(RunManifest.of(config, outputs), out / "manifest.yml")

    report = compare_protocols(
        config,
        seeds,
        workers=kwargs["workers"],
        progress=sys.stderr.isatty(),
        keep_results=kwargs["charts"],
    )
    write_summary(report, outputs["summary"])
    if kwargs["charts"]:
        for result in report.results:
            name = f"{result.protocol.value.lower()}_seed{result.config.seed}.csv"
            write_rounds_csv(result, out / name)
        emit_charts(report.results[:2], out)

    click.echo(
        INFO.format(
            f"mean lnd ratio {report.candidate.value}/{report.baseline.value}: "
            f"{report.mean_ratio} over {len(report.ratios)} of {len(seeds)} seeds"
        )
    )
    if report.unterminated_seeds:
        click.echo(
            INFO.format(f"partial: seeds {report.unterminated_seeds} left survivors")
        )
    click.echo(INFO.format(f"Results written to {out}"))


@cli.command()
@click.argument("csv_paths", nargs=-1, required=True, type=click.Path())
@click.option("--label", "-l", multiple=True, help="series label, one per CSV")
@click.option("--out", "-o", type=click.Path(), default=str(defaults.OUTPUT_PATH), help="output directory")
@handle_errors
def chart(csv_paths, label, out):
    """Render charts from rounds CSV files written by `run` or `compare`."""
    if label and len(label) != len(csv_paths):
        raise ConfigError("label", "give one --label per CSV file")
    labels = label or [Path(p).stem for p in csv_paths]
    series = []
    for name, path in zip(labels, csv_paths):
        table = read_rounds_csv(path)
        if table.partial:
            name += " (partial)"
        series.append(Series.from_metrics(name, table.metrics))
    paths = emit_charts(series, _mkdir(Path(out)))
    for path in paths:
        click.echo(INFO.format(f"Chart written to {path}"))
