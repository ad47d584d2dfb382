"""Round loop, lifetime marks and paired protocol comparison."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from ivcleach.core import Protocol, SimConfig, deploy, rng_streams
from ivcleach.errors import DomainError, SimulationError
from ivcleach.protocols import RoundEvent, get_protocol

LEDGER_TOLERANCE = 1e-9
STEEPNESS_WINDOW = 10


class RoundMetrics(BaseModel):
    round: int
    alive: int
    died_this_round: int
    total_residual: float
    deliveries: int
    ch_count: int
    charged: float = 0.0  # joules drawn by the ledger this round

    def average_residual(self, n_nodes):
        return self.total_residual / n_nodes


class SimResult(BaseModel):
    config: SimConfig
    metrics: List[RoundMetrics] = []
    fnd: Optional[int] = None
    hnd: Optional[int] = None
    lnd: Optional[int] = None
    events: List[RoundEvent] = []
    terminated: bool = False  # every node died before max_rounds ran out

    @property
    def protocol(self):
        return self.config.protocol

    @property
    def rounds(self):
        return len(self.metrics)

    @property
    def total_deliveries(self):
        return sum(m.deliveries for m in self.metrics)

    @property
    def partial(self):
        return not self.terminated


def half_death_threshold(n_nodes):
    """Alive count at or below which half the network is gone.

    HND is the first round in which at least floor(n/2) nodes (never fewer
    than one) have died, i.e. alive <= n - max(1, floor(n/2)). For even n
    this is alive <= n/2; for odd n it fires one death earlier than
    alive <= floor(n/2), so [3, 3, 2, 1, 0] with n=3 gives HND at round 3.
    """
    return n_nodes - max(1, n_nodes // 2)


def lifetime_marks(
    metrics: Sequence[RoundMetrics], n_nodes: int = None
) -> Tuple[Optional[int], Optional[int], Optional[int]]:
    """(fnd, hnd, lnd) read off the alive series; None where never reached."""
    if not metrics:
        raise DomainError("lifetime marks need at least one round")
    if n_nodes is None:
        n_nodes = metrics[0].alive + metrics[0].died_this_round
    fnd = hnd = lnd = None
    half = half_death_threshold(n_nodes)
    for m in metrics:
        if fnd is None and m.alive < n_nodes:
            fnd = m.round
        if hnd is None and m.alive <= half:
            hnd = m.round
        if lnd is None and m.alive == 0:
            lnd = m.round
            break
    return fnd, hnd, lnd


def _check_round(prev: RoundMetrics, current: RoundMetrics, n_nodes, dead_so_far):
    if current.alive > prev.alive:
        raise SimulationError(f"round {current.round}: alive count went up")
    if current.total_residual > prev.total_residual:
        raise SimulationError(f"round {current.round}: residual energy went up")
    if current.alive + dead_so_far != n_nodes:
        raise SimulationError(f"round {current.round}: alive + dead != {n_nodes}")
    drop = prev.total_residual - current.total_residual
    if abs(drop - current.charged) > LEDGER_TOLERANCE:
        raise SimulationError(
            f"round {current.round}: residual dropped {drop} J but {current.charged} J were charged"
        )


def run(config: SimConfig, record=False) -> SimResult:
    """Simulate `config.protocol` until every node is dead or max_rounds is hit."""
    streams = rng_streams(config.seed)
    nodes = deploy(config, streams.deployment)
    protocol = get_protocol(config, record=record)
    logging.info(
        f"Running {config.protocol.value}: {config.n_nodes} nodes, seed {config.seed}"
    )

    prev = RoundMetrics(
        round=0,
        alive=config.n_nodes,
        died_this_round=0,
        total_residual=math.fsum(node.residual_energy for node in nodes),
        deliveries=0,
        ch_count=0,
    )
    metrics, events = [], []
    dead = 0
    for round_index in range(1, config.max_rounds + 1):
        outcome = protocol.play_round(nodes, round_index, streams)
        alive = sum(node.alive for node in nodes)
        current = RoundMetrics(
            round=round_index,
            alive=alive,
            died_this_round=prev.alive - alive,
            total_residual=math.fsum(node.residual_energy for node in nodes),
            deliveries=outcome.deliveries,
            ch_count=outcome.ch_count,
            charged=protocol.ledger.round_total,
        )
        dead += current.died_this_round
        _check_round(prev, current, config.n_nodes, dead)
        metrics.append(current)
        events.extend(outcome.events)
        prev = current
        if round_index % 100 == 0:
            logging.debug(f"Round {round_index}: {alive} nodes alive")
        if alive == 0:
            break

    fnd, hnd, lnd = lifetime_marks(metrics, config.n_nodes)
    result = SimResult(
        config=config,
        metrics=metrics,
        fnd=fnd,
        hnd=hnd,
        lnd=lnd,
        events=events,
        terminated=lnd is not None,
    )
    logging.info(
        f"{config.protocol.value} seed {config.seed}: fnd={fnd} hnd={hnd} lnd={lnd}"
    )
    if result.partial:
        logging.warning(
            f"{config.protocol.value} seed {config.seed}: {prev.alive} nodes survived {config.max_rounds} rounds"
        )
    return result


def steepness(metrics: Sequence[RoundMetrics], window=STEEPNESS_WINDOW) -> int:
    """Most deaths inside any `window` consecutive rounds."""
    deaths = np.array([m.died_this_round for m in metrics], dtype=int)
    if deaths.size == 0:
        return 0
    if deaths.size <= window:
        return int(deaths.sum())
    return int(np.convolve(deaths, np.ones(window, dtype=int), mode="valid").max())


class RunSummary(BaseModel):
    protocol: Protocol
    seed: int
    fnd: Optional[int] = None
    hnd: Optional[int] = None
    lnd: Optional[int] = None
    terminated: bool
    deliveries: int
    steepness: int

    @classmethod
    def of(cls, result: SimResult):
        return cls(
            protocol=result.protocol,
            seed=result.config.seed,
            fnd=result.fnd,
            hnd=result.hnd,
            lnd=result.lnd,
            terminated=result.terminated,
            deliveries=result.total_deliveries,
            steepness=steepness(result.metrics),
        )


class SeedComparison(BaseModel):
    seed: int
    baseline: RunSummary
    candidate: RunSummary

    @property
    def ratio(self) -> Optional[float]:
        """lnd(candidate) / lnd(baseline), only when both runs terminated."""
        if not (self.baseline.terminated and self.candidate.terminated):
            return None
        return self.candidate.lnd / self.baseline.lnd


def _mean(values):
    return float(np.mean(values)) if values else None


class ComparisonReport(BaseModel):
    baseline: Protocol
    candidate: Protocol
    seeds: List[SeedComparison]
    results: List[SimResult] = []  # only filled by compare(keep_results=True)

    @property
    def ratios(self) -> List[float]:
        return [s.ratio for s in self.seeds if s.ratio is not None]

    @property
    def mean_ratio(self):
        return _mean(self.ratios)

    @property
    def min_ratio(self):
        return min(self.ratios, default=None)

    @property
    def max_ratio(self):
        return max(self.ratios, default=None)

    def mean_fnd(self, side):
        return _mean(
            [getattr(s, side).fnd for s in self.seeds if getattr(s, side).fnd is not None]
        )

    def mean_steepness(self, side):
        return _mean([getattr(s, side).steepness for s in self.seeds])

    @property
    def steeper_baseline_seeds(self) -> int:
        """Seeds where the baseline lost more nodes in its worst window."""
        return sum(s.baseline.steepness > s.candidate.steepness for s in self.seeds)

    @property
    def unterminated_seeds(self) -> List[int]:
        return [s.seed for s in self.seeds if s.ratio is None]


def compare(
    config: SimConfig,
    seeds: Sequence[int],
    protocols: Tuple[Protocol, Protocol] = (Protocol.leach, Protocol.ivc),
    workers=1,
    progress=False,
    keep_results=False,
) -> ComparisonReport:
    """Run baseline and candidate on the same deployment for every seed."""
    if not seeds:
        raise DomainError("compare needs at least one seed")
    baseline, candidate = protocols
    jobs = [
        config.with_(seed=seed, protocol=protocol)
        for seed in seeds
        for protocol in (baseline, candidate)
    ]
    summaries: List[RunSummary] = []
    kept: List[SimResult] = []
    with tqdm(total=len(jobs), desc="Simulating", disable=not progress, ascii=True) as bar:
        if workers > 1:
            executor = ProcessPoolExecutor(max_workers=workers)
            results = executor.map(run, jobs)
        else:
            executor = None
            results = map(run, jobs)
        try:
            # results arrive in job order whatever the interleaving
            for result in results:
                summaries.append(RunSummary.of(result))
                if keep_results:
                    kept.append(result)
                bar.update()
        finally:
            if executor is not None:
                executor.shutdown()

    pairs = [
        SeedComparison(seed=seed, baseline=summaries[2 * i], candidate=summaries[2 * i + 1])
        for i, seed in enumerate(seeds)
    ]
    report = ComparisonReport(
        baseline=baseline, candidate=candidate, seeds=pairs, results=kept
    )
    logging.info(
        f"{candidate.value}/{baseline.value} lnd ratio over {len(report.ratios)} seeds: {report.mean_ratio}"
    )
    return report
