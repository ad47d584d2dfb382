"""IVC-LEACH rounds: BS-side configuration plus a four-level steady state.

Data climbs Normal -> CHsec -> CH -> BS. CHsec confirms every slot with a
live message; a member that hears none re-sends to CHsecv, which takes over
the remaining slots. Before forwarding, CHsec asks CH for an ACK; a CH that
stays silent is replaced by CHv.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Optional, Sequence

from ivcleach.core import NodeRecord, Protocol, Role, StatusReports, distance, rx_energy
from ivcleach.election import ClusterRoles, RoleTable, configure_round
from ivcleach.errors import PlanMismatch
from .base import (
    BaseProtocol,
    EnergyLedger,
    EventKind,
    RoundOutcome,
    RoundPlan,
    SteadyStateOutcome,
    apply_failures,
    apply_leftover_kills,
    farthest,
)


def ivc_configuration(
    nodes: List[NodeRecord],
    config,
    prev_roles: Optional[RoleTable],
    rng,
    ledger: EnergyLedger,
    reported=None,
) -> RoundPlan:
    """Status reports, BS-side election, role broadcast and TDMA schedules.

    `reported` holds the ids whose status already reached the BS inside last
    round's data; those skip their report. None means everybody reports.
    """
    radio, bs = config.radio, config.bs_pos
    prev_chs = prev_roles.ch_ids() if prev_roles else set()
    for node in nodes:
        if node.alive:
            node.role, node.cluster_id = Role.normal, None
            node.was_ch_prev_round = node.id in prev_chs

    for node in nodes:
        if node.alive and (reported is None or node.id not in reported):
            ledger.tx(node, radio.ctrl_bits, distance(node.pos, bs), "status")

    if not any(node.alive for node in nodes):
        return RoundPlan(protocol=Protocol.ivc, roles=RoleTable())

    assignment, _, roles = configure_round(nodes, config, prev_roles, rng)
    for node in nodes:
        if node.alive:
            ledger.rx(node, radio.ctrl_bits, "broadcast")

    by_id = {node.id: node for node in nodes}
    tdma = []
    for c, (entry, member_ids) in enumerate(zip(roles.clusters, assignment.members)):
        schedule = []
        for node_id in member_ids:
            node = by_id[node_id]
            if not node.alive:
                continue
            role = entry.role_of(node_id)
            node.role, node.cluster_id = role, c
            if role not in (Role.ch, Role.chsec):
                schedule.append(node_id)
        tdma.append(schedule)
    return RoundPlan(protocol=Protocol.ivc, roles=roles, tdma=tdma)


class ClusterRound:
    """Steady state of one cluster, with the acting CHsec and CH it settles on."""

    def __init__(
        self,
        index: int,
        roles: ClusterRoles,
        schedule: Sequence[int],
        by_id: Dict[int, NodeRecord],
        ledger: EnergyLedger,
        config,
    ):
        self.index = index
        self.schedule = list(schedule)
        self.by_id = by_id
        self.ledger = ledger
        self.radio = config.radio
        self.bs = config.bs_pos
        self.collectors = [i for i in (roles.chsec, roles.chsecv) if i is not None]
        self.heads = [i for i in (roles.ch, roles.chv) if i is not None]
        self.nodes = {i for _, i in roles.leaders()} | set(self.schedule)
        self.members = [by_id[i] for i in self.schedule]
        self._live_rx = rx_energy(self.radio, self.radio.ctrl_bits)
        self._collector_pos = 0
        self._head_pos = 0
        self._ranges = {}

    def _range(self, node):
        """Broadcast range of `node` over the cluster's schedule."""
        if node.id not in self._ranges:
            members = [self.by_id[i] for i in self.schedule if i != node.id]
            self._ranges[node.id] = farthest(node.pos, members)
        return self._ranges[node.id]

    def _failover(self, chain, pos, kind, label):
        if pos + 1 < len(chain) and self.by_id[chain[pos + 1]].alive:
            old, new = chain[pos], chain[pos + 1]
            self.ledger.emit(kind, self.index, f"{label[0]} {old} -> {label[1]} {new}")
            logging.info(
                f"Round {self.ledger.round}: cluster {self.index} {label[1]} {new} replaces {label[0]} {old}"
            )

    def acting_head(self) -> Optional[NodeRecord]:
        while self._head_pos < len(self.heads):
            node = self.by_id[self.heads[self._head_pos]]
            if node.alive:
                return node
            self._failover(self.heads, self._head_pos, EventKind.ch_failover, ("CH", "CHv"))
            self._head_pos += 1
        return None

    def acting_collector(self) -> Optional[NodeRecord]:
        """CHsec, then CHsecv; the acting CH collects once both are gone."""
        while self._collector_pos < len(self.collectors):
            node = self.by_id[self.collectors[self._collector_pos]]
            if node.alive:
                return node
            self._failover(
                self.collectors, self._collector_pos, EventKind.chsec_failover, ("CHsec", "CHsecv")
            )
            self._collector_pos += 1
        return self.acting_head()

    def isolated(self):
        self.ledger.emit(EventKind.cluster_isolated, self.index, "all leaders dead")
        logging.info(f"Round {self.ledger.round}: cluster {self.index} is isolated")
        return frozenset()

    def announce(self, collector):
        listeners = [
            self.by_id[i] for i in self.schedule if i != collector.id and self.by_id[i].alive
        ]
        if not listeners:
            return
        self.ledger.tx(collector, self.radio.ctrl_bits, self._range(collector), "schedule")
        for member in listeners:
            if member.alive:
                self.ledger.rx(member, self.radio.ctrl_bits, "schedule")

    def live(self, collector):
        """Live message closing a slot, heard by every scheduled member still up."""
        self.ledger.tx(collector, self.radio.ctrl_bits, self._range(collector), "live")
        for member in self.members:
            if member.alive and member is not collector:
                self.ledger.charge(member, self._live_rx, "live")

    def deliver(self, member, collector, received: List[int]):
        """One TDMA slot. Returns the collector that ends up holding the packet."""
        data = self.radio.data_bits
        while True:
            self.ledger.tx(member, data, distance(member.pos, collector.pos), "data")
            if collector.alive and self.ledger.rx(collector, data, "data"):
                received.append(member.id)
                self.live(collector)
                return collector
            # no live message: whatever the collector held is gone with it
            received.clear()
            collector = self.acting_collector()
            if collector is None or collector is member or not member.alive:
                return collector

    def _drop_head(self):
        self._failover(self.heads, self._head_pos, EventKind.ch_failover, ("CH", "CHv"))
        self._head_pos += 1

    def handshake(self, collector) -> Optional[NodeRecord]:
        """ctrl request and ACK with CH, then CHv. None when neither answers."""
        ctrl = self.radio.ctrl_bits
        while self._head_pos < len(self.heads) and collector.alive:
            candidate = self.by_id[self.heads[self._head_pos]]
            d = distance(collector.pos, candidate.pos)
            self.ledger.tx(collector, ctrl, d, "ack")
            if candidate.alive and self.ledger.rx(candidate, ctrl, "ack"):
                self.ledger.tx(candidate, ctrl, d, "ack")
                if collector.alive:
                    self.ledger.rx(collector, ctrl, "ack")
                if candidate.alive:
                    return candidate
            self._drop_head()
        return None

    def uplink(self, node, detail):
        self.ledger.tx(node, self.radio.data_bits, distance(node.pos, self.bs), "uplink")
        self.ledger.emit(EventKind.delivery, self.index, detail)

    def climb(self, collector, fused: frozenset) -> Optional[frozenset]:
        """Carry the fused packet from `collector` to the BS.

        None when the collector dies before the packet left it.
        """
        if collector.id in self.heads:
            self.uplink(collector, f"CH {collector.id} collected the cluster itself")
            return fused
        data = self.radio.data_bits
        while True:
            head = self.handshake(collector)
            if not collector.alive:
                return None
            if head is None:
                self.uplink(collector, f"CHsec {collector.id} direct to BS")
                return fused
            self.ledger.tx(collector, data, distance(collector.pos, head.pos), "data")
            if self.ledger.rx(head, data, "data") and self.ledger.aggregate(head, 2):
                self.uplink(head, f"CH {head.id}")
                return fused | {head.id}
            if not collector.alive:
                return None
            # the head went down holding the packet; the collector still has it
            self._drop_head()

    def play(self, slot_kills: Dict[int, List[int]]) -> frozenset:
        """Run the cluster's schedule; returns the ids whose data reached the BS."""
        collector = self.acting_collector()
        if collector is None:
            return self.isolated()
        self.announce(collector)

        received: List[int] = []
        for slot, member_id in enumerate(self.schedule):
            for node_id in slot_kills.get(slot, ()):
                node = self.by_id[node_id]
                if node_id in self.nodes and node.alive:
                    self.ledger.fail(node, f"scripted kill at slot {slot}")
            member = self.by_id[member_id]
            if not member.alive or member is collector:
                continue
            collector = self.deliver(member, collector, received)
            if collector is None:
                return self.isolated()

        while collector is not None:
            if collector.alive and self.ledger.aggregate(collector, len(received) + 1):
                delivered = self.climb(collector, frozenset([collector.id, *received]))
                if delivered is not None:
                    return delivered
            # the next leader in line starts over from its own reading
            received = []
            collector = self.acting_collector()
        return self.isolated()


def ivc_steady_state(
    plan: RoundPlan,
    nodes: List[NodeRecord],
    failures,
    rng,
    ledger: EnergyLedger,
    config,
) -> SteadyStateOutcome:
    if plan.protocol != Protocol.ivc or plan.roles is None:
        raise PlanMismatch("steady state needs an IVC plan")
    if len(plan.tdma) != len(plan.roles.clusters):
        raise PlanMismatch("one TDMA schedule per cluster is required")
    by_id = {node.id: node for node in nodes}
    for schedule in plan.tdma:
        for node_id in schedule:
            if not by_id[node_id].alive:
                raise PlanMismatch(f"slot owner {node_id} is dead")

    first_event = len(ledger.events)
    apply_failures(nodes, failures, ledger, rng)
    slot_kills = defaultdict(list)
    for kill in failures.kills:
        if kill.round == ledger.round and kill.slot is not None:
            slot_kills[kill.slot].append(kill.node_id)

    deliveries = 0
    reported = set()
    for c, (entry, schedule) in enumerate(zip(plan.roles.clusters, plan.tdma)):
        delivered = ClusterRound(c, entry, schedule, by_id, ledger, config).play(slot_kills)
        if delivered:
            deliveries += 1
            reported |= delivered
    apply_leftover_kills(nodes, failures, ledger)
    return SteadyStateOutcome(deliveries, ledger.events[first_event:], frozenset(reported))


class IVCProtocol(BaseProtocol):
    name = Protocol.ivc

    def __init__(self, config, record=False):
        super().__init__(config, record=record)
        self.prev_roles: Optional[RoleTable] = None
        self.reported = frozenset()

    def play_round(self, nodes, round_index, streams) -> RoundOutcome:
        self.start_round(round_index)
        piggyback = self.config.status_reports == StatusReports.piggyback
        plan = ivc_configuration(
            nodes,
            self.config,
            self.prev_roles,
            streams.election,
            self.ledger,
            reported=self.reported if piggyback else None,
        )
        outcome = ivc_steady_state(
            plan,
            nodes,
            self.config.failure_injection,
            streams.failure,
            self.ledger,
            self.config,
        )
        self.prev_roles = plan.roles
        self.reported = outcome.reported
        return RoundOutcome(
            outcome.deliveries, len(plan.roles.clusters), list(self.ledger.events)
        )
