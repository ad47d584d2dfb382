import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Dict, FrozenSet, List, NamedTuple, Optional

from pydantic import BaseModel

from ivcleach.core import (
    FailureInjection,
    FailureMode,
    NodeRecord,
    Position,
    Protocol,
    RadioModel,
    aggregation_energy,
    deduct,
    distance,
    rx_energy,
    tx_energy,
)
from ivcleach.election import RoleTable


class EventKind(Enum):
    node_died = "NodeDied"
    ch_failover = "ChFailover"
    chsec_failover = "ChsecFailover"
    delivery = "DeliveryToBS"
    cluster_isolated = "ClusterIsolated"


class RoundEvent(BaseModel):
    round: int
    kind: EventKind
    subject: int  # node id, or cluster index for cluster-level events
    detail: str = ""

    def line(self):
        return f"{self.round}\t{self.kind.value}\t{self.subject}\t{self.detail}"


class LedgerEntry(NamedTuple):
    round: int
    node_id: int
    kind: str
    joules: float


class EnergyLedger:
    """Single entry point for every energy draw of a run.

    Keeps the per-round total of energy actually removed from batteries and
    the round's events, including a NodeDied event the moment a draw empties
    a node. With `record=True` every draw is kept as a LedgerEntry.
    """

    def __init__(self, radio: RadioModel, record=False):
        self.radio = radio
        self.round = 0
        self.charged = []
        self.events: List[RoundEvent] = []
        self.entries: Optional[List[LedgerEntry]] = [] if record else None

    def start_round(self, round_index):
        self.round = round_index
        self.charged = []
        self.events = []

    @property
    def round_total(self):
        return math.fsum(self.charged)

    def emit(self, kind: EventKind, subject: int, detail=""):
        self.events.append(
            RoundEvent(round=self.round, kind=kind, subject=subject, detail=detail)
        )

    def charge(self, node: NodeRecord, cost: float, kind: str) -> bool:
        """Draw `cost` from `node`; returns whether the node survived it."""
        before = node.residual_energy
        deduct(node, cost)
        self._book(node, before - node.residual_energy, kind)
        if not node.alive:
            self.emit(EventKind.node_died, node.id, f"depleted by {kind}")
        return node.alive

    def fail(self, node: NodeRecord, cause: str):
        """Injected failure: the remaining charge is written off."""
        before = node.residual_energy
        node.retire()
        self._book(node, before, "failure")
        self.emit(EventKind.node_died, node.id, cause)
        logging.debug(f"Round {self.round}: node {node.id} failed ({cause})")

    def _book(self, node, joules, kind):
        self.charged.append(joules)
        if self.entries is not None:
            self.entries.append(LedgerEntry(self.round, node.id, kind, joules))

    def tx(self, node: NodeRecord, bits: int, d: float, kind: str) -> bool:
        return self.charge(node, tx_energy(self.radio, bits, d), kind)

    def rx(self, node: NodeRecord, bits: int, kind: str) -> bool:
        return self.charge(node, rx_energy(self.radio, bits), kind)

    def aggregate(self, node: NodeRecord, signals: int) -> bool:
        return self.charge(
            node, aggregation_energy(self.radio, self.radio.data_bits, signals), "aggregate"
        )

    def spent_by(self, node_id, kind=None):
        """Recorded joules drawn from `node_id` (optionally of one kind)."""
        return math.fsum(
            e.joules
            for e in self.entries or []
            if e.node_id == node_id and (kind is None or e.kind == kind)
        )


class RoundPlan(BaseModel):
    protocol: Protocol
    roles: Optional[RoleTable] = None  # IVC
    heads: List[int] = []  # LEACH cluster heads, ascending
    membership: Dict[int, int] = {}  # LEACH member id -> CH id
    tdma: List[List[int]] = []  # per cluster, slot order

    def cluster_nodes(self, cluster_index) -> List[int]:
        if self.protocol == Protocol.ivc:
            leaders = [i for _, i in self.roles.clusters[cluster_index].leaders()]
        else:
            leaders = [self.heads[cluster_index]]
        return leaders + [i for i in self.tdma[cluster_index] if i not in leaders]


class SteadyStateOutcome(NamedTuple):
    deliveries: int
    events: List[RoundEvent]
    reported: FrozenSet[int] = frozenset()  # ids whose status reached the BS


class RoundOutcome(NamedTuple):
    deliveries: int
    ch_count: int
    events: List[RoundEvent]


def apply_failures(
    nodes: List[NodeRecord],
    failures: FailureInjection,
    ledger: EnergyLedger,
    rng,
    slot=None,
    within=None,
):
    """Kill the nodes scheduled to fail now.

    `slot=None` is the start of the steady state: probabilistic failures are
    drawn then (one draw per alive node, by id). Slot kills only apply to the
    node ids in `within`, the cluster whose slot is about to start.
    """
    by_id = {node.id: node for node in nodes}
    if slot is None and failures.mode == FailureMode.probabilistic:
        for node in nodes:
            if node.alive and rng.random() < failures.probability:
                ledger.fail(node, "random failure")
    for node_id in failures.kills_at(ledger.round, slot):
        if within is not None and node_id not in within:
            continue
        node = by_id[node_id]
        if node.alive:
            ledger.fail(node, "scripted kill" if slot is None else f"scripted kill at slot {slot}")


def apply_leftover_kills(nodes, failures, ledger):
    """Slot kills that no schedule reached still happen at the end of the round."""
    by_id = {node.id: node for node in nodes}
    for kill in failures.kills:
        if kill.round == ledger.round and kill.slot is not None:
            node = by_id[kill.node_id]
            if node.alive:
                ledger.fail(node, f"scripted kill at slot {kill.slot}")


def farthest(origin: Position, nodes) -> float:
    return max((distance(origin, node.pos) for node in nodes), default=0.0)


class BaseProtocol(ABC):
    """
    Per-run state machine of a clustering protocol.

    A round is one configuration (or election) phase followed by one
    steady-state TDMA cycle. Subclasses keep whatever they must remember
    between rounds (epochs, previous roles) and charge every message through
    the shared EnergyLedger.
    """

    name: Protocol

    def __init__(self, config, record=False):
        self.config = config
        self.radio = config.radio
        self.ledger = EnergyLedger(config.radio, record=record)

    @abstractmethod
    def play_round(self, nodes, round_index, streams) -> RoundOutcome:
        pass

    def start_round(self, round_index):
        self.ledger.start_round(round_index)
