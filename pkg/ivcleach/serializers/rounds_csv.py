"""Per-round metrics as CSV.

The column set and order are fixed:

    round,alive,died,total_residual_j,deliveries,ch_count

A run stopped by max_rounds with nodes still alive ends with one comment
line, `# partial: nodes alive after N rounds`.
"""
import csv
import io
from pathlib import Path
from typing import List, NamedTuple, Union

from ivcleach.errors import ReportError
from ivcleach.simulator import RoundMetrics
from .serialize import Serialize

HEADER = ("round", "alive", "died", "total_residual_j", "deliveries", "ch_count")
PARTIAL_MARKER = "# partial"


class RoundsTable(NamedTuple):
    metrics: List[RoundMetrics]
    partial: bool = False


class RoundsCsv(Serialize):
    def get_result(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(HEADER)
        for m in self.source.metrics:
            writer.writerow(
                [
                    m.round,
                    m.alive,
                    m.died_this_round,
                    f"{m.total_residual:.9f}",
                    m.deliveries,
                    m.ch_count,
                ]
            )
        if self.source.metrics and self.source.partial:
            out.write(f"{PARTIAL_MARKER}: nodes alive after {self.source.rounds} rounds\n")
        return out.getvalue()


def write_rounds_csv(result, path: Union[str, Path]) -> Path:
    return RoundsCsv(result).save(path)


def read_rounds_csv(path: Union[str, Path]) -> RoundsTable:
    path = Path(path)
    metrics, partial = [], False
    try:
        with path.open(encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if tuple(header or ()) != HEADER:
                raise ReportError("not a rounds CSV (unexpected header)", path=path)
            for row in reader:
                if row and row[0].startswith(PARTIAL_MARKER):
                    partial = True
                    continue
                metrics.append(
                    RoundMetrics(
                        round=int(row[0]),
                        alive=int(row[1]),
                        died_this_round=int(row[2]),
                        total_residual=float(row[3]),
                        deliveries=int(row[4]),
                        ch_count=int(row[5]),
                    )
                )
    except OSError as e:
        raise ReportError(f"cannot read: {e.strerror}", path=path)
    except (ValueError, IndexError) as e:
        raise ReportError(f"malformed row: {e}", path=path)
    return RoundsTable(metrics, partial)
