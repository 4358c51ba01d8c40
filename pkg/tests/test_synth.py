import numpy as np
import pytest
from scipy import stats

from osnsim.errors import BadConfig
from osnsim.events import dumps_event, validate_event
from osnsim.influence import build_influence_network
from osnsim.synth import (
    PlantedEdge,
    ScenarioConfig,
    ShockSpike,
    generate,
    standard_scenario,
)


def test_seed_determinism_byte_identical():
    cfg = ScenarioConfig(users=15, ticks=300, weekly_seasonality=0.3, seed=99)
    events_a, ann_a = generate(cfg)
    events_b, ann_b = generate(ScenarioConfig(users=15, ticks=300,
                                              weekly_seasonality=0.3, seed=99))
    assert [dumps_event(e) for e in events_a] == [dumps_event(e) for e in events_b]
    assert ann_a.user_rates == ann_b.user_rates


def test_different_seed_different_log():
    a, _ = generate(ScenarioConfig(users=15, ticks=300, seed=1))
    b, _ = generate(ScenarioConfig(users=15, ticks=300, seed=2))
    assert [dumps_event(e) for e in a] != [dumps_event(e) for e in b]


def test_generated_events_are_valid_and_sorted():
    events, _ = generate(ScenarioConfig(users=10, ticks=200, seed=3))
    seen = {}
    for e in events:
        result = validate_event(e, known=seen)
        assert result.ok, (e, result.violations)
        seen[e.event_id] = e.timestamp
    ts = [e.timestamp for e in events]
    assert ts == sorted(ts)
    ids = [e.event_id for e in events]
    assert len(set(ids)) == len(ids)


def test_weekly_seasonality_nonuniform_dow():
    events, _ = generate(ScenarioConfig(users=40, ticks=24 * 7 * 8,
                                        weekly_seasonality=0.6, seed=4))
    counts = np.zeros(7)
    for e in events:
        counts[(e.timestamp // 86400) % 7] += 1
    _, p_value = stats.chisquare(counts)
    assert p_value < 0.01


def test_no_seasonality_is_uniform_ish():
    events, _ = generate(ScenarioConfig(users=40, ticks=24 * 7 * 8,
                                        weekly_seasonality=0.0, seed=4))
    counts = np.zeros(7)
    for e in events:
        counts[(e.timestamp // 86400) % 7] += 1
    _, p_value = stats.chisquare(counts)
    assert p_value > 0.01


def test_planted_edge_recovered_end_to_end():
    cfg = ScenarioConfig(
        users=12, ticks=1500,
        planted_edges=[PlantedEdge("u000", "u005", 1.0, 1)],
        seed=6,
    )
    events, ann = generate(cfg)
    net = build_influence_network(events, nte_threshold=0.5)
    assert ("u000", "u005") in {(e.source, e.target) for e in net.edges}


def test_shock_series_emitted_with_spikes():
    cfg = ScenarioConfig(
        users=5, ticks=100,
        shock_schedule=[ShockSpike("oil", 40, 5.0), ShockSpike("oil", 80, 5.0)],
        seed=7,
    )
    _, ann = generate(cfg)
    values = np.array(ann.shock_series["oil"])
    assert values.size == 100
    baseline = np.median(values)
    assert values[40] > baseline + 4.0
    assert values[80] > baseline + 4.0


def test_bad_configs_raise():
    with pytest.raises(BadConfig):
        generate(ScenarioConfig(users=0, ticks=10))
    with pytest.raises(BadConfig):
        generate(ScenarioConfig(users=3, ticks=10,
                                planted_edges=[PlantedEdge("u000", "u001", 2.0, 1)]))
    with pytest.raises(BadConfig):
        generate(ScenarioConfig(users=3, ticks=10,
                                planted_edges=[PlantedEdge("ghost", "u001", 0.5, 1)]))


def test_standard_scenario_shape():
    cfg = standard_scenario()
    assert cfg.users == 100
    assert cfg.ticks == 5000
    user_edges = [e for e in cfg.planted_edges if e.src.startswith("u")]
    assert len(user_edges) == 10
    assert all(e.lag == 1 and e.copy_prob == 0.9 for e in user_edges)


def test_annotations_roundtrip(tmp_path):
    cfg = ScenarioConfig(users=5, ticks=50, seed=8,
                         shock_schedule=[ShockSpike("gold", 10, 3.0)])
    _, ann = generate(cfg)
    path = tmp_path / "ann.json"
    ann.to_json(path)
    from osnsim.synth import GroundTruthAnnotations
    loaded = GroundTruthAnnotations.from_json(path)
    assert loaded.seed == 8
    assert loaded.shock_series["gold"] == ann.shock_series["gold"]
    assert loaded.user_rates == ann.user_rates
