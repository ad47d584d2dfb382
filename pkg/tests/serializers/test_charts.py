import pytest

from ivcleach.core import Protocol, SimConfig
from ivcleach.errors import ReportError
from ivcleach.serializers import Series, emit_charts
from ivcleach.simulator import run


@pytest.fixture(scope="module")
def results():
    config = SimConfig(n_nodes=10, k_clusters=2, initial_energy=0.01, max_rounds=300)
    return [run(config.with_(protocol=p)) for p in (Protocol.leach, Protocol.ivc)]


def test_three_charts(results, tmp_path):
    paths = emit_charts(results, tmp_path)
    assert [p.name for p in paths] == [
        "live_nodes.svg",
        "dead_nodes.svg",
        "average_residual_energy.svg",
    ]
    live = paths[0].read_text()
    assert live.lstrip().startswith("<?xml")
    assert "<svg" in live
    assert "Number Of Live Nodes" in live
    assert "Average Residual Energy" in paths[2].read_text()


def test_charts_are_deterministic(results, tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first = emit_charts(results, tmp_path / "a")
    second = emit_charts(results, tmp_path / "b")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()


def test_series_values(results):
    series = Series.of(results[1])
    n = results[1].config.n_nodes
    assert series.label == "IVC"
    assert series.values("dead_nodes")[-1] == n
    assert series.values("live_nodes")[-1] == 0
    assert series.values("average_residual_energy")[0] == pytest.approx(
        results[1].metrics[0].total_residual / n
    )


def test_partial_runs_are_labelled():
    result = run(SimConfig(n_nodes=5, k_clusters=1, max_rounds=2))
    assert Series.of(result).label == "IVC (partial)"


def test_empty_input_is_rejected(tmp_path):
    with pytest.raises(ReportError):
        emit_charts([], tmp_path)
    with pytest.raises(ReportError):
        emit_charts([Series("empty", [], 10)], tmp_path)
    with pytest.raises(ReportError):
        Series.from_metrics("empty", [])
