import numpy as np
import pytest
from pydantic import ValidationError

from ivcleach.core import NodeRecord, Position, SimConfig, deploy
from ivcleach.election import (
    ClusterRoles,
    RoleTable,
    ValueTable,
    build_value_table,
    configure_round,
    elect_roles,
    election_key,
    partition,
)
from ivcleach.errors import DomainError
from ivcleach.valuation import (
    Centrality,
    classify_centrality,
    normalize_bs_distance,
    score,
)


def make_nodes(points, energies=None, initial=0.5):
    energies = energies or [initial] * len(points)
    return [
        NodeRecord(
            id=i,
            pos=Position(x=x, y=y),
            initial_energy=initial,
            residual_energy=e,
        )
        for i, ((x, y), e) in enumerate(zip(points, energies))
    ]


def test_partition_single_node():
    assignment = partition(make_nodes([(3, 4)]), 1, np.random.default_rng(0))
    assert assignment.members == [[0]]
    assert assignment.labels == {0: 0}
    assert assignment.centroids[0] == Position(x=3, y=4)


def test_partition_with_more_clusters_than_nodes():
    nodes = make_nodes([(0, 0), (10, 10), (20, 5)])
    assignment = partition(nodes, 5, np.random.default_rng(1))
    assert assignment.k == 3
    assert sorted(sorted(m) for m in assignment.members) == [[0], [1], [2]]


def test_partition_rejects_bad_input():
    with pytest.raises(DomainError):
        partition([], 3, np.random.default_rng(0))
    with pytest.raises(DomainError):
        partition(make_nodes([(0, 0)]), 0, np.random.default_rng(0))


def test_partition_finds_separated_groups():
    rng = np.random.default_rng(5)
    centers = [(10, 10), (90, 10), (10, 90), (90, 90)]
    points = [
        (cx + float(dx), cy + float(dy))
        for cx, cy in centers
        for dx, dy in rng.uniform(-1, 1, size=(6, 2))
    ]
    nodes = make_nodes(points)
    for seed in range(5):
        assignment = partition(nodes, 4, np.random.default_rng(seed))
        groups = sorted(sorted(m) for m in assignment.members)
        assert groups == [list(range(g * 6, g * 6 + 6)) for g in range(4)]
        # every node sits with its nearest centroid
        for node in nodes:
            label = assignment.labels[node.id]
            d = [
                (node.pos.x - c.x) ** 2 + (node.pos.y - c.y) ** 2
                for c in assignment.centroids
            ]
            assert d[label] == min(d)


def test_partition_covers_every_node_once():
    config = SimConfig()
    nodes = deploy(config, np.random.default_rng(3))
    assignment = partition(nodes, 5, np.random.default_rng(4))
    ids = [i for members in assignment.members for i in members]
    assert sorted(ids) == list(range(100))
    assert all(members for members in assignment.members)
    assert all(members == sorted(members) for members in assignment.members)


def test_partition_is_deterministic():
    nodes = deploy(SimConfig(n_nodes=40), np.random.default_rng(8))
    first = partition(nodes, 5, np.random.default_rng(2))
    second = partition(nodes, 5, np.random.default_rng(2))
    assert first == second


def test_partition_of_identical_points_repairs_empty_clusters():
    nodes = make_nodes([(5, 5)] * 4)
    assignment = partition(nodes, 3, np.random.default_rng(0))
    assert assignment.k == 3
    assert all(assignment.members)


def test_value_table_on_a_fresh_network():
    config = SimConfig(n_nodes=30)
    nodes = deploy(config, np.random.default_rng(12))
    assignment = partition(nodes, 3, np.random.default_rng(13))
    values = build_value_table(nodes, assignment, config.bs_pos, 100, 100)
    assert len(values) == 30
    for members in assignment.members:
        positions = [nodes[i].pos for i in members]
        for i in members:
            node = nodes[i]
            expected = score(
                1.0,
                normalize_bs_distance(node.pos, config.bs_pos, 100, 100),
                classify_centrality(node.pos, positions),
                False,
            )
            assert values[i] == pytest.approx(expected, abs=1e-12)


def test_value_table_halves_previous_heads():
    config = SimConfig(n_nodes=10, k_clusters=1)
    nodes = deploy(config, np.random.default_rng(0))
    assignment = partition(nodes, 1, np.random.default_rng(0))
    fresh = build_value_table(nodes, assignment, config.bs_pos, 100, 100)
    prev = RoleTable(clusters=[ClusterRoles(ch=4)])
    penalised = build_value_table(nodes, assignment, config.bs_pos, 100, 100, prev)
    assert penalised[4] == pytest.approx(fresh[4] / 2, abs=1e-12)
    assert all(penalised[i] == fresh[i] for i in range(10) if i != 4)


@pytest.fixture(
    params=[
        {
            "values": [1.0, 0.9, 0.8, 0.7, 0.6],
            "roles": {"ch": 0, "chsec": 1, "chv": 2, "chsecv": 3},
        },
        {
            "values": [0.6, 0.9, 0.6, 1.0, 0.7],
            "roles": {"ch": 3, "chsec": 1, "chv": 4, "chsecv": 0},
        },
        {"values": [0.6] * 6, "roles": {"ch": 0, "chsec": 1, "chv": 2, "chsecv": 3}},
        {"values": [0.4], "roles": {"ch": 0, "chsec": None, "chv": None, "chsecv": None}},
        {"values": [0.4, 0.5], "roles": {"ch": 1, "chsec": 0, "chv": None, "chsecv": None}},
    ]
)
def election_case(request):
    return request.param


def test_elect_roles(election_case):
    n = len(election_case["values"])
    nodes = make_nodes([(i, i) for i in range(n)])
    values = ValueTable(values=dict(enumerate(election_case["values"])))
    roles = elect_roles(nodes, values)
    assert roles.dict() == election_case["roles"]


def test_elect_roles_breaks_value_ties_by_energy():
    nodes = make_nodes([(0, 0), (1, 1), (2, 2)], energies=[0.2, 0.4, 0.3])
    values = ValueTable(values={0: 0.6, 1: 0.6, 2: 0.6})
    roles = elect_roles(nodes, values)
    assert (roles.ch, roles.chsec, roles.chv) == (1, 2, 0)


def test_elect_roles_rejects_empty_cluster():
    with pytest.raises(DomainError):
        elect_roles([], ValueTable(values={}))


def test_roles_must_be_distinct():
    with pytest.raises(ValidationError):
        ClusterRoles(ch=1, chsec=2, chv=1)
    with pytest.raises(ValidationError):
        ClusterRoles(ch=1, chsecv=1)


def test_election_matches_sort_oracle():
    rng = np.random.default_rng(77)
    levels = [0.15, 0.2, 0.25, 0.3, 0.4, 0.6, 0.8, 1.0]
    for _ in range(1000):
        n = int(rng.integers(1, 11))
        energies = [float(e) for e in rng.choice([0.1, 0.2, 0.3, 0.5], size=n)]
        nodes = make_nodes([(0, 0)] * n, energies=energies)
        ids = rng.permutation(n)
        for node, new_id in zip(nodes, ids):
            node.id = int(new_id)
        values = ValueTable(
            values={node.id: float(rng.choice(levels)) for node in nodes}
        )
        roles = elect_roles(nodes, values)

        remaining = list(nodes)
        expected = []
        while remaining and len(expected) < 4:
            best = max(
                remaining,
                key=lambda n: (values[n.id], n.residual_energy, -n.id),
            )
            expected.append(best.id)
            remaining.remove(best)
        expected += [None] * (4 - len(expected))
        assert [roles.ch, roles.chsec, roles.chv, roles.chsecv] == expected


def test_previous_head_never_ranks_higher():
    rng = np.random.default_rng(31)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        nodes = make_nodes([(0, 0)] * n)
        base = {
            i: float(v)
            for i, v in enumerate(rng.choice([0.3, 0.4, 0.5, 0.6, 0.8], size=n))
        }
        target = int(rng.integers(n))
        penalised = dict(base)
        penalised[target] = base[target] * 0.5

        def rank(table):
            ranked = sorted(nodes, key=lambda node: election_key(node, ValueTable(values=table)))
            return [node.id for node in ranked].index(target)

        assert rank(penalised) >= rank(base)


def test_configure_round_single_node():
    config = SimConfig(n_nodes=1, k_clusters=1)
    nodes = deploy(config, np.random.default_rng(0))
    assignment, values, roles = configure_round(
        nodes, config, None, np.random.default_rng(0)
    )
    assert assignment.members == [[0]]
    assert roles.clusters == [ClusterRoles(ch=0)]


def test_configure_round_elects_the_argmax():
    config = SimConfig()
    nodes = deploy(config, np.random.default_rng(21))
    for node in nodes[::3]:
        node.residual_energy = 0.15
    assignment, values, roles = configure_round(
        nodes, config, None, np.random.default_rng(22)
    )
    by_id = {node.id: node for node in nodes}
    for members, entry in zip(assignment.members, roles.clusters):
        remaining = [by_id[i] for i in members]
        for _, leader in entry.leaders():
            best = min(remaining, key=lambda node: election_key(node, values))
            assert leader == best.id
            remaining.remove(best)
    leaders = [i for entry in roles.clusters for _, i in entry.leaders()]
    assert len(leaders) == len(set(leaders))


def test_configure_round_skips_dead_nodes():
    config = SimConfig(n_nodes=20, k_clusters=2)
    nodes = deploy(config, np.random.default_rng(1))
    for node in nodes[:5]:
        node.retire()
    assignment, values, roles = configure_round(
        nodes, config, None, np.random.default_rng(2)
    )
    assert set(assignment.labels) == set(range(5, 20))
    assert set(values.values) == set(range(5, 20))
    assert not roles.leader_ids() & set(range(5))


def test_configure_round_is_deterministic():
    config = SimConfig(n_nodes=50)
    nodes = deploy(config, np.random.default_rng(6))
    first = configure_round(nodes, config, None, np.random.default_rng(9))
    second = configure_round(nodes, config, None, np.random.default_rng(9))
    assert first[2] == second[2]


def test_configure_round_needs_an_alive_node():
    config = SimConfig(n_nodes=2, k_clusters=1)
    nodes = deploy(config, np.random.default_rng(0))
    for node in nodes:
        node.retire()
    with pytest.raises(DomainError):
        configure_round(nodes, config, None, np.random.default_rng(0))
