"""Baseline LEACH.

Every alive node draws a number in [0, 1) and becomes CH when the draw is
below the threshold

    T(n) = p / (1 - p * (r mod ceil(1/p)))

unless it already served as CH in the current epoch of ceil(1/p) rounds.
Non-CH nodes join the nearest CH; with no CH at all, every node sends
straight to the BS. No vices, no failover: a CH that dies takes its
cluster's round of data with it.
"""
import logging
import math
from typing import Dict, List

from ivcleach.core import NodeRecord, Protocol, Role, distance
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


def epoch_length(p: float) -> int:
    return max(1, math.ceil(1 / p - 1e-9))


def leach_threshold(round_index: int, p: float, eligible: bool) -> float:
    """T(n) for 1-indexed `round_index`."""
    if not eligible:
        return 0.0
    return p / (1 - p * ((round_index - 1) % epoch_length(p)))


def leach_elect(
    nodes: List[NodeRecord], round_index: int, p: float, rng, ch_epochs: Dict[int, int]
) -> RoundPlan:
    """Pick this round's CHs and attach every other alive node to its nearest CH.

    `ch_epochs` maps node id to the last epoch in which the node was CH and
    is updated in place.
    """
    epoch = (round_index - 1) // epoch_length(p)
    alive = [node for node in nodes if node.alive]
    heads = []
    for node in alive:
        draw = rng.random()
        eligible = ch_epochs.get(node.id) != epoch
        if draw < leach_threshold(round_index, p, eligible):
            heads.append(node.id)
            ch_epochs[node.id] = epoch

    by_id = {node.id: node for node in alive}
    membership = {}
    head_ids = set(heads)
    if heads:
        for node in alive:
            if node.id in head_ids:
                continue
            membership[node.id] = min(
                heads, key=lambda h: (distance(node.pos, by_id[h].pos), h)
            )
    tdma = [
        sorted(member for member, head in membership.items() if head == h)
        for h in heads
    ]
    return RoundPlan(
        protocol=Protocol.leach, heads=heads, membership=membership, tdma=tdma
    )


def leach_setup(plan: RoundPlan, nodes: List[NodeRecord], ledger: EnergyLedger):
    """Set-up traffic: CH advertisements, join requests, CH TDMA schedules."""
    if not plan.heads:
        return
    ctrl = ledger.radio.ctrl_bits
    by_id = {node.id: node for node in nodes}
    alive = [node for node in nodes if node.alive]

    adverts = 0
    for h in plan.heads:
        head = by_id[h]
        if head.alive:
            ledger.tx(head, ctrl, farthest(head.pos, alive), "advert")
            adverts += 1
    for member_id in plan.membership:
        member = by_id[member_id]
        if member.alive and adverts:
            ledger.rx(member, ctrl * adverts, "advert")

    for member_id, h in plan.membership.items():
        member, head = by_id[member_id], by_id[h]
        if member.alive and head.alive:
            ledger.tx(member, ctrl, distance(member.pos, head.pos), "join")
            if head.alive:  # a join can empty the head
                ledger.rx(head, ctrl, "join")

    for h, schedule in zip(plan.heads, plan.tdma):
        head = by_id[h]
        members = [by_id[i] for i in schedule if by_id[i].alive]
        if head.alive and members:
            ledger.tx(head, ctrl, farthest(head.pos, members), "schedule")
            for member in members:
                ledger.rx(member, ctrl, "schedule")


def leach_steady_state(
    plan: RoundPlan, nodes: List[NodeRecord], ledger: EnergyLedger, config, failures, rng
) -> SteadyStateOutcome:
    radio, bs = config.radio, config.bs_pos
    by_id = {node.id: node for node in nodes}
    first_event = len(ledger.events)
    apply_failures(nodes, failures, ledger, rng)

    deliveries = 0
    if not plan.heads:
        for node in nodes:
            if node.alive:
                ledger.tx(node, radio.data_bits, distance(node.pos, bs), "uplink")
                ledger.emit(EventKind.delivery, node.id, "direct")
                deliveries += 1
        # no TDMA without heads
        apply_leftover_kills(nodes, failures, ledger)
        return SteadyStateOutcome(deliveries, ledger.events[first_event:])

    for c, (h, schedule) in enumerate(zip(plan.heads, plan.tdma)):
        head = by_id[h]
        within = set(plan.cluster_nodes(c))
        received = 0
        for slot, member_id in enumerate(schedule):
            apply_failures(nodes, failures, ledger, rng, slot=slot, within=within)
            member = by_id[member_id]
            if not member.alive:
                continue
            ledger.tx(member, radio.data_bits, distance(member.pos, head.pos), "data")
            if head.alive:
                ledger.rx(head, radio.data_bits, "data")
                received += 1
        if head.alive and ledger.aggregate(head, received + 1):
            ledger.tx(head, radio.data_bits, distance(head.pos, bs), "uplink")
            ledger.emit(EventKind.delivery, h, f"cluster {c}")
            deliveries += 1
        else:
            logging.debug(f"Round {ledger.round}: CH {h} lost the data of cluster {c}")
    apply_leftover_kills(nodes, failures, ledger)
    return SteadyStateOutcome(deliveries, ledger.events[first_event:])


class LeachProtocol(BaseProtocol):
    name = Protocol.leach

    def __init__(self, config, record=False):
        super().__init__(config, record=record)
        self.ch_epochs: Dict[int, int] = {}
        self.prev_heads = set()

    def _mark_roles(self, plan, nodes):
        cluster_of = {h: c for c, h in enumerate(plan.heads)}
        for node in nodes:
            if not node.alive:
                continue
            node.was_ch_prev_round = node.id in self.prev_heads
            if node.id in cluster_of:
                node.role, node.cluster_id = Role.ch, cluster_of[node.id]
            else:
                node.role = Role.normal
                node.cluster_id = cluster_of.get(plan.membership.get(node.id))

    def play_round(self, nodes, round_index, streams) -> RoundOutcome:
        self.start_round(round_index)
        plan = leach_elect(
            nodes, round_index, self.config.leach_p, streams.election, self.ch_epochs
        )
        self._mark_roles(plan, nodes)
        if self.config.leach_setup_messages:
            leach_setup(plan, nodes, self.ledger)
        outcome = leach_steady_state(
            plan,
            nodes,
            self.ledger,
            self.config,
            self.config.failure_injection,
            streams.failure,
        )
        self.prev_heads = set(plan.heads)
        return RoundOutcome(outcome.deliveries, len(plan.heads), list(self.ledger.events))
