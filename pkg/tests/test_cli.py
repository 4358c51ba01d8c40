import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from osnsim.cli import main
from osnsim.events import write_events
from osnsim.synth import ScenarioConfig, ShockSpike, generate


@pytest.fixture()
def runner():
    return CliRunner()


def _small_scenario_yaml(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(
        "users: 10\n"
        "ticks: 400\n"
        "weekly_seasonality: 0.3\n"
        "base_rate: 0.05\n"
        "shock_schedule:\n"
        "  - {source: price, tick: 100, magnitude: 6.0}\n"
        "  - {source: price, tick: 300, magnitude: 6.0}\n"
    )
    return path


def _invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def test_synth_ingest_influence_evaluate_roundtrip(runner, tmp_path):
    scenario = _small_scenario_yaml(tmp_path)
    out = tmp_path / "truth.jsonl"
    ann = tmp_path / "ann.json"
    shocks_dir = tmp_path / "shocks"
    _invoke(runner, ["synth", "--scenario", str(scenario), "--seed", "5",
                     "--out", str(out), "--annotations", str(ann),
                     "--shocks-dir", str(shocks_dir)])
    assert out.exists() and ann.exists()
    assert (shocks_dir / "price.csv").exists()
    manifest = json.loads((tmp_path / "truth.jsonl.manifest.json").read_text())
    assert manifest["seed"] == 5
    assert manifest["config"]["scenario"] == str(scenario)

    clean = tmp_path / "clean.jsonl"
    rejects = tmp_path / "rejects.jsonl"
    _invoke(runner, ["ingest", "--events", str(out), "--out", str(clean),
                     "--rejects", str(rejects)])
    assert clean.exists()
    assert rejects.read_text() == ""

    net = tmp_path / "influence.csv"
    _invoke(runner, ["influence", "--events", str(clean), "--out", str(net)])
    assert net.read_text().startswith("source,target,te,nte")

    masks = tmp_path / "masks.jsonl"
    exo = tmp_path / "exo.csv"
    _invoke(runner, ["shocks", "--series", f"price={shocks_dir / 'price.csv'}",
                     "--events", str(clean), "--out", str(masks),
                     "--exo-out", str(exo)])
    assert masks.exists() and exo.exists()

    report_dir = tmp_path / "report"
    _invoke(runner, ["evaluate", "--sim", str(clean), "--truth", str(clean),
                     "--out-dir", str(report_dir)])
    rows = (report_dir / "report.csv").read_text().splitlines()[1:]
    assert rows
    for row in rows:
        fields = row.split(",")
        if fields[6] == "ok":
            assert float(fields[4]) == pytest.approx(0.0, abs=1e-12)


def test_simulate_all_models_and_determinism(runner, tmp_path):
    events, _ = generate(ScenarioConfig(users=12, ticks=500, seed=9, base_rate=0.04))
    train = tmp_path / "train.jsonl"
    write_events(train, events)

    for model in ("shd", "mbm", "macm"):
        out_a = tmp_path / f"{model}-a.jsonl"
        out_b = tmp_path / f"{model}-b.jsonl"
        args = ["simulate", "--model", model, "--events", str(train),
                "--ticks", "72", "--seed", "7"]
        _invoke(runner, args + ["--out", str(out_a)])
        _invoke(runner, args + ["--out", str(out_b)])
        assert out_a.read_bytes() == out_b.read_bytes(), model

    # shd output obeys replay conservation over the window
    out = tmp_path / "shd-a.jsonl"
    lines = out.read_text().splitlines()
    assert lines, "replay should produce events"


def test_simulate_mix_shd_manifest_records_fractions(runner, tmp_path):
    events, _ = generate(ScenarioConfig(users=12, ticks=500, seed=10, base_rate=0.04))
    train = tmp_path / "train.jsonl"
    write_events(train, events)
    out = tmp_path / "mixed.jsonl"
    _invoke(runner, ["simulate", "--model", "mbm", "--events", str(train),
                     "--ticks", "48", "--seed", "3", "--mix-shd",
                     "--out", str(out)])
    manifest = json.loads((tmp_path / "mixed.jsonl.manifest.json").read_text())
    mix_info = manifest["config"]["mix"]
    assert mix_info["shd_fraction"] == 0.10
    assert mix_info["full_model_shd_fraction"] == 0.10
    assert mix_info["ifn_shd_fraction"] == 0.90
    assert mix_info["mixed_events"] == len(out.read_text().splitlines())
    # every user is assigned to exactly one stream
    assert not set(mix_info["active_users"]) & set(mix_info["less_active_users"])


def test_simulate_ifn_restricts_training(runner, tmp_path):
    events, _ = generate(ScenarioConfig(
        users=10, ticks=600, seed=11, base_rate=0.05,
        planted_edges=[],
    ))
    train = tmp_path / "train.jsonl"
    write_events(train, events)
    out = tmp_path / "ifn.jsonl"
    result = runner.invoke(main, ["simulate", "--model", "mbm", "--events",
                                  str(train), "--ticks", "24", "--seed", "1",
                                  "--ifn", "--nte-threshold", "0.02",
                                  "--out", str(out)])
    if result.exit_code == 0:
        manifest = json.loads((tmp_path / "ifn.jsonl.manifest.json").read_text())
        assert "ifn_users" in manifest["config"]
    else:
        # acceptable: no influence edges above threshold in this tiny log
        payload = json.loads(result.output.strip().splitlines()[-1]) if result.output.strip() else {}
        assert result.exit_code == 1


def test_error_emits_machine_readable_json(runner, tmp_path):
    result = runner.invoke(main, ["influence", "--events",
                                  str(tmp_path / "missing.jsonl")])
    assert result.exit_code == 1
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["error"] == "io_error"


def test_bad_config_reports_exit_code_two(runner, tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("influence:\n  no_such_key: 1\n")
    result = runner.invoke(main, ["influence", "--config", str(cfg),
                                  "--events", "whatever.jsonl"])
    assert result.exit_code == 2
    payload = json.loads(result.output.strip().splitlines()[-1])
    assert payload["error"] == "bad_config"


def test_report_combines_models(runner, tmp_path):
    events, _ = generate(ScenarioConfig(users=10, ticks=400, seed=12, base_rate=0.05))
    truth = tmp_path / "truth.jsonl"
    write_events(truth, events)
    sim_dir = tmp_path / "r1"
    _invoke(runner, ["evaluate", "--sim", str(truth), "--truth", str(truth),
                     "--out-dir", str(sim_dir)])
    combined = tmp_path / "combined"
    _invoke(runner, ["report", "--run", f"perfect={sim_dir / 'report.json'}",
                     "--run", f"again={sim_dir / 'report.json'}",
                     "--out-dir", str(combined)])
    header = (combined / "combined.csv").read_text().splitlines()[0]
    assert header.startswith("model,level,metric,platform")


def test_plot_writes_pngs(runner, tmp_path):
    events, _ = generate(ScenarioConfig(users=10, ticks=400, seed=13, base_rate=0.05))
    truth = tmp_path / "truth.jsonl"
    write_events(truth, events)
    report_dir = tmp_path / "rep"
    _invoke(runner, ["evaluate", "--sim", str(truth), "--truth", str(truth),
                     "--out-dir", str(report_dir)])
    plots = tmp_path / "plots"
    _invoke(runner, ["plot", "--report", str(report_dir / "report.json"),
                     "--out-dir", str(plots)])
    assert list(plots.glob("*.png"))
