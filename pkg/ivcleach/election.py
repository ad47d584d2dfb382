"""Base-station side of the configuration phase.

The BS groups the alive nodes by position (seeded k-means), values every
node and hands out the four leader roles of each cluster:

    1. CH      the best value
    2. CHsec   the second best value
    3. CHv     the third best value
    4. CHsecv  the fourth best value

Ties are broken by residual energy (higher first), then by node id.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from ivcleach.core import NodeRecord, Position, Role
from ivcleach.errors import DomainError
from ivcleach.valuation import (
    Centrality,
    centrality_flags,
    max_bs_distance,
    score,
)

MAX_ITERATIONS = 100
ROLE_ORDER = (Role.ch, Role.chsec, Role.chv, Role.chsecv)


class ClusterAssignment(BaseModel):
    labels: Dict[int, int]  # node id -> cluster index
    members: List[List[int]]  # node ids per cluster, ascending
    centroids: List[Position]

    @validator("members")
    def clusters_must_not_be_empty(cls, v):
        if any(not ids for ids in v):
            raise ValueError("clusters must not be empty")
        return v

    @property
    def k(self):
        return len(self.members)


class ValueTable(BaseModel):
    values: Dict[int, float]

    def __getitem__(self, node_id):
        return self.values[node_id]

    def __contains__(self, node_id):
        return node_id in self.values

    def __len__(self):
        return len(self.values)


class ClusterRoles(BaseModel):
    ch: int
    chsec: Optional[int] = None
    chv: Optional[int] = None
    chsecv: Optional[int] = None

    @root_validator(skip_on_failure=True)
    def leaders_must_be_distinct(cls, values):
        ids = [values[r] for r in ("ch", "chsec", "chv", "chsecv")]
        ids = [i for i in ids if i is not None]
        if len(ids) != len(set(ids)):
            raise ValueError("a node cannot hold two roles")
        return values

    def leaders(self) -> List[Tuple[Role, int]]:
        pairs = zip(ROLE_ORDER, (self.ch, self.chsec, self.chv, self.chsecv))
        return [(role, node_id) for role, node_id in pairs if node_id is not None]

    def role_of(self, node_id) -> Role:
        for role, leader in self.leaders():
            if leader == node_id:
                return role
        return Role.normal


class RoleTable(BaseModel):
    clusters: List[ClusterRoles] = []

    def ch_ids(self):
        return {entry.ch for entry in self.clusters}

    def leader_ids(self):
        return {node_id for entry in self.clusters for _, node_id in entry.leaders()}


def _nearest(points, centroids):
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    # argmin keeps the lower cluster index on ties
    return d2.argmin(axis=1)


def _seed_centroids(points, k, rng):
    """k-means++ seeding; always picks k distinct points."""
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        weights = d2.copy()
        weights[chosen] = 0.0
        total = weights.sum()
        if total > 0:
            idx = int(rng.choice(n, p=weights / total))
        else:
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        d2 = np.minimum(d2, ((points - points[idx]) ** 2).sum(axis=1))
    return points[chosen].astype(float)


def _repair_empty(points, labels, centroids, k):
    labels = labels.copy()
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        own = ((points - centroids[labels]) ** 2).sum(axis=1)
        own[counts[labels] < 2] = -1.0
        idx = int(own.argmax())
        labels[idx] = j
        centroids[j] = points[idx]
    return labels


def partition(alive_nodes: Sequence[NodeRecord], k: int, rng) -> ClusterAssignment:
    """Seeded Lloyd's k-means over node positions, with effective k = min(k, n)."""
    if not alive_nodes:
        raise DomainError("cannot partition an empty node set")
    if k < 1:
        raise DomainError("k must be >= 1")
    ids = [node.id for node in alive_nodes]
    points = np.array([[node.pos.x, node.pos.y] for node in alive_nodes])
    k = min(k, len(points))

    centroids = _seed_centroids(points, k, rng)
    labels = None
    for _ in range(MAX_ITERATIONS):
        new_labels = _nearest(points, centroids)
        new_labels = _repair_empty(points, new_labels, centroids, k)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centroids = np.array([points[labels == j].mean(axis=0) for j in range(k)])

    members = [[] for _ in range(k)]
    for node_id, label in sorted(zip(ids, labels.tolist())):
        members[label].append(node_id)
    return ClusterAssignment(
        labels=dict(zip(ids, labels.tolist())),
        members=members,
        centroids=[Position(x=float(x), y=float(y)) for x, y in centroids],
    )


def build_value_table(
    nodes: Sequence[NodeRecord],
    assignment: ClusterAssignment,
    bs: Position,
    area_width: float,
    area_height: float,
    prev_roles: Optional[RoleTable] = None,
) -> ValueTable:
    by_id = {node.id: node for node in nodes}
    prev_chs = prev_roles.ch_ids() if prev_roles else set()
    reach = max_bs_distance(bs, area_width, area_height)

    values = {}
    for member_ids in assignment.members:
        members = [by_id[i] for i in member_ids]
        points = np.array([[m.pos.x, m.pos.y] for m in members])
        flags = centrality_flags(points)
        bs_dists = np.hypot(points[:, 0] - bs.x, points[:, 1] - bs.y) / reach
        for node, is_center, d_frac in zip(members, flags, bs_dists):
            values[node.id] = score(
                node.r_frac,
                min(1.0, float(d_frac)),
                Centrality.center if is_center else Centrality.side,
                node.id in prev_chs,
            )
    return ValueTable(values=values)


def election_key(node: NodeRecord, values: ValueTable):
    return (-values[node.id], -node.residual_energy, node.id)


def elect_roles(cluster_members: Sequence[NodeRecord], values: ValueTable) -> ClusterRoles:
    if not cluster_members:
        raise DomainError("cannot elect roles in an empty cluster")
    ranked = sorted(cluster_members, key=lambda node: election_key(node, values))
    ids = [node.id for node in ranked[: len(ROLE_ORDER)]]
    ids += [None] * (len(ROLE_ORDER) - len(ids))
    return ClusterRoles(ch=ids[0], chsec=ids[1], chv=ids[2], chsecv=ids[3])


def configure_round(
    nodes: Sequence[NodeRecord], config, prev_roles: Optional[RoleTable], rng
) -> Tuple[ClusterAssignment, ValueTable, RoleTable]:
    alive = [node for node in nodes if node.alive]
    if not alive:
        raise DomainError("configuration needs at least one alive node")
    assignment = partition(alive, config.k_clusters, rng)
    values = build_value_table(
        alive,
        assignment,
        config.bs_pos,
        config.area_width,
        config.area_height,
        prev_roles,
    )
    by_id = {node.id: node for node in alive}
    roles = RoleTable(
        clusters=[
            elect_roles([by_id[i] for i in member_ids], values)
            for member_ids in assignment.members
        ]
    )
    logging.debug(f"Elected CHs {sorted(roles.ch_ids())}")
    return assignment, values, roles
