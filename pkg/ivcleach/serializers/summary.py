"""Key-value summaries of a run or of a comparison, written as YAML.

Lifetime marks that were never reached are written as `null`. A run that
still had survivors at max_rounds carries `partial: true`.
"""
from pathlib import Path
from typing import Union

import yaml

from ivcleach import __version__
from ivcleach.simulator import ComparisonReport, SimResult
from .serialize import Serialize


def _dump(data):
    return yaml.safe_dump(data, default_flow_style=False, sort_keys=False)


class ResultSummary(Serialize):
    def get_result(self):
        result = self.source
        return _dump(
            {
                "protocol": result.protocol.value,
                "seed": result.config.seed,
                "n_nodes": result.config.n_nodes,
                "rounds": result.rounds,
                "partial": result.partial,
                "fnd": result.fnd,
                "hnd": result.hnd,
                "lnd": result.lnd,
                "total_deliveries": result.total_deliveries,
                "ivcleach_version": __version__,
            }
        )


class ComparisonSummary(Serialize):
    def _side(self, run):
        return {
            "fnd": run.fnd,
            "hnd": run.hnd,
            "lnd": run.lnd,
            "steepness": run.steepness,
            "deliveries": run.deliveries,
            "terminated": run.terminated,
        }

    def get_result(self):
        report: ComparisonReport = self.source
        base, cand = report.baseline.value, report.candidate.value
        seeds = [
            {
                "seed": s.seed,
                "baseline": self._side(s.baseline),
                "candidate": self._side(s.candidate),
                "ratio": s.ratio,
            }
            for s in report.seeds
        ]
        return _dump(
            {
                "baseline": base,
                "candidate": cand,
                "partial": bool(report.unterminated_seeds),
                "seeds": seeds,
                "aggregate": {
                    "ratio_of": f"lnd({cand}) / lnd({base})",
                    "mean_ratio": report.mean_ratio,
                    "min_ratio": report.min_ratio,
                    "max_ratio": report.max_ratio,
                    "mean_fnd_baseline": report.mean_fnd("baseline"),
                    "mean_fnd_candidate": report.mean_fnd("candidate"),
                    "mean_steepness_baseline": report.mean_steepness("baseline"),
                    "mean_steepness_candidate": report.mean_steepness("candidate"),
                    "steeper_baseline_seeds": report.steeper_baseline_seeds,
                    "unterminated_seeds": report.unterminated_seeds,
                },
                "ivcleach_version": __version__,
            }
        )


def write_summary(source, path: Union[str, Path]) -> Path:
    """Summary of a SimResult or of a ComparisonReport."""
    if isinstance(source, SimResult):
        return ResultSummary(source).save(path)
    return ComparisonSummary(source).save(path)
