"""Static SVG line charts: live nodes, dead nodes and average residual energy per round."""
import logging
from pathlib import Path
from typing import List, NamedTuple, Sequence, Union

import matplotlib
from matplotlib.figure import Figure

from ivcleach.errors import ReportError
from ivcleach.simulator import RoundMetrics, SimResult

CHARTS = (
    ("live_nodes", "Number Of Live Nodes", "Live nodes"),
    ("dead_nodes", "Number Of Dead Nodes", "Dead nodes"),
    ("average_residual_energy", "Average Residual Energy", "Energy (J)"),
)
SVG_STYLE = {"svg.hashsalt": "ivcleach", "svg.fonttype": "path"}


class Series(NamedTuple):
    label: str
    metrics: List[RoundMetrics]
    n_nodes: int

    @classmethod
    def of(cls, result: SimResult):
        label = result.protocol.value
        if result.partial:
            label += " (partial)"
        return cls(label, result.metrics, result.config.n_nodes)

    @classmethod
    def from_metrics(cls, label, metrics):
        if not metrics:
            raise ReportError(f"series {label} is empty")
        first = metrics[0]
        return cls(label, list(metrics), first.alive + first.died_this_round)

    def values(self, chart):
        if chart == "live_nodes":
            return [m.alive for m in self.metrics]
        if chart == "dead_nodes":
            return [self.n_nodes - m.alive for m in self.metrics]
        return [m.average_residual(self.n_nodes) for m in self.metrics]


def _plot(series: Sequence[Series], chart, title, ylabel, path: Path):
    fig = Figure(figsize=(7, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    for s in series:
        ax.plot([m.round for m in s.metrics], s.values(chart), label=s.label)
    ax.set_title(title)
    ax.set_xlabel("Round")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise ReportError(f"cannot write: {e.strerror}", path=path)


def emit_charts(
    sources: Sequence[Union[SimResult, Series]], out_dir: Union[str, Path]
) -> List[Path]:
    """Write one SVG per chart with a line per source; returns the paths."""
    series = [s if isinstance(s, Series) else Series.of(s) for s in sources]
    if not series:
        raise ReportError("no series to chart")
    for s in series:
        if not s.metrics:
            raise ReportError(f"series {s.label} is empty: nothing to chart")
    out_dir = Path(out_dir)
    paths = []
    with matplotlib.rc_context(SVG_STYLE):
        for chart, title, ylabel in CHARTS:
            path = out_dir / f"{chart}.svg"
            _plot(series, chart, title, ylabel, path)
            paths.append(path)
            logging.info(f"Chart written to {path}")
    return paths
