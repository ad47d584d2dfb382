import pytest
import yaml

from ivcleach.config import load_config
from ivcleach.core import Protocol, SimConfig
from ivcleach.serializers import (
    RunManifest,
    write_events,
    write_manifest,
    write_rounds_csv,
    write_summary,
)
from ivcleach.simulator import compare, run


@pytest.fixture(scope="module")
def finished():
    return run(SimConfig(n_nodes=12, k_clusters=2, initial_energy=0.01, max_rounds=300))


def test_summary_of_a_finished_run(finished, tmp_path):
    summary = yaml.safe_load(write_summary(finished, tmp_path / "summary.yml").read_text())
    assert summary["protocol"] == "IVC"
    assert summary["seed"] == 0
    assert summary["partial"] is False
    assert (summary["fnd"], summary["hnd"], summary["lnd"]) == (
        finished.fnd,
        finished.hnd,
        finished.lnd,
    )
    assert summary["total_deliveries"] == finished.total_deliveries

    rows = write_rounds_csv(finished, tmp_path / "rounds.csv").read_text().splitlines()
    assert int(rows[-1].split(",")[0]) == summary["lnd"]
    assert rows[-1].split(",")[1] == "0"


def test_summary_without_deaths(tmp_path):
    result = run(SimConfig(n_nodes=5, k_clusters=1, max_rounds=3))
    summary = yaml.safe_load(write_summary(result, tmp_path / "summary.yml").read_text())
    assert summary["fnd"] is None
    assert summary["hnd"] is None
    assert summary["lnd"] is None
    assert summary["partial"] is True


def test_self_comparison_summary(tmp_path):
    config = SimConfig(n_nodes=8, k_clusters=2, initial_energy=0.01, max_rounds=500)
    report = compare(config, [0, 1], protocols=(Protocol.leach, Protocol.leach))
    summary = yaml.safe_load(write_summary(report, tmp_path / "comparison.yml").read_text())
    assert summary["baseline"] == summary["candidate"] == "LEACH"
    assert [s["ratio"] for s in summary["seeds"]] == [1.0, 1.0]
    assert summary["aggregate"]["mean_ratio"] == 1.0
    assert summary["aggregate"]["unterminated_seeds"] == []
    assert summary["seeds"][0]["baseline"]["lnd"] == summary["seeds"][0]["candidate"]["lnd"]


def test_summaries_are_deterministic(finished, tmp_path):
    again = run(finished.config)
    for writer in (write_summary, write_events):
        first = writer(finished, tmp_path / "a").read_bytes()
        second = writer(again, tmp_path / "b").read_bytes()
        assert first == second


def test_event_log(finished, tmp_path):
    lines = write_events(finished, tmp_path / "events.tsv").read_text().splitlines()
    assert lines[0] == "round\tkind\tsubject\tdetail"
    assert len(lines) == len(finished.events) + 1
    kinds = {line.split("\t")[1] for line in lines[1:]}
    assert {"NodeDied", "DeliveryToBS"} <= kinds


def test_manifest_reproduces_the_run(finished, tmp_path):
    config = finished.config.with_(seed=7)
    manifest = RunManifest.of(config, {"rounds": tmp_path / "r.csv"})
    path = write_manifest(manifest, tmp_path / "manifest.yml")
    data = yaml.safe_load(path.read_text())
    assert data["ivcleach_version"]
    assert data["outputs"] == {"rounds": str(tmp_path / "r.csv")}
    reloaded = load_config(path)
    assert reloaded == config
    first = write_rounds_csv(run(config), tmp_path / "first.csv").read_bytes()
    second = write_rounds_csv(run(reloaded), tmp_path / "second.csv").read_bytes()
    assert first == second
