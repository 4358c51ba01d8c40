import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osnsim.errors import EmptyLog, LengthMismatch, SeriesTooShort, UnknownSeed
from osnsim.influence import (
    InfluenceEdge,
    InfluenceNetwork,
    build_influence_network,
    normalized_te,
    snowball_sample,
    split_by_interaction_share,
    split_users,
    transfer_entropy,
)

from conftest import make_event
from oracles import nte_bruteforce, te_bruteforce

# Fixed fixture: i.i.d.-fair-bit source, destination is the source lagged
# by one.  Expected values frozen from the brute-force oracle.
SRC_FIXTURE = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1]
DST_FIXTURE = [0] + SRC_FIXTURE[:-1]
TE_FIXTURE = 0.5279280773517969
NTE_FIXTURE = 1.0


def test_constant_target_gives_zero():
    src = np.array([0, 1, 1, 0, 1, 0, 1, 1], dtype=np.uint8)
    dst = np.zeros(8, dtype=np.uint8)
    assert transfer_entropy(src, dst) == 0.0
    assert normalized_te(src, dst) == 0.0  # 0/0 convention


def test_perfect_lagged_copy_fixture():
    assert transfer_entropy(SRC_FIXTURE, DST_FIXTURE) == pytest.approx(TE_FIXTURE, abs=1e-12)
    assert normalized_te(SRC_FIXTURE, DST_FIXTURE) == pytest.approx(NTE_FIXTURE, abs=1e-12)


def test_matches_bruteforce_on_random_pairs():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(4, 40))
        src = rng.integers(0, 2, n)
        dst = rng.integers(0, 2, n)
        expected = te_bruteforce(list(src), list(dst))
        assert transfer_entropy(src, dst) == pytest.approx(expected, abs=1e-12)
        assert normalized_te(src, dst) == pytest.approx(
            nte_bruteforce(list(src), list(dst)), abs=1e-12)


def test_independent_long_series_near_zero():
    # statistical bound, checked over 100 seeds
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        src = rng.integers(0, 2, 10_000)
        dst = rng.integers(0, 2, 10_000)
        worst = max(worst, transfer_entropy(src, dst))
    assert worst < 0.02


def test_asymmetry_detection():
    # dst_t = src_{t-1}: the forward direction wins on every seed
    for seed in range(100):
        rng = np.random.default_rng(seed)
        src = rng.integers(0, 2, 1000)
        dst = np.roll(src, 1)
        dst[0] = 0
        forward = transfer_entropy(src, dst)
        backward = transfer_entropy(dst, src)
        assert forward > backward


@settings(max_examples=200)
@given(st.lists(st.integers(0, 1), min_size=3, max_size=64),
       st.lists(st.integers(0, 1), min_size=3, max_size=64))
def test_nte_stays_in_unit_interval(a, b):
    n = min(len(a), len(b))
    value = normalized_te(np.array(a[:n]), np.array(b[:n]))
    assert 0.0 <= value <= 1.0


def test_length_and_size_errors():
    with pytest.raises(LengthMismatch):
        transfer_entropy([0, 1, 0], [0, 1])
    with pytest.raises(SeriesTooShort):
        transfer_entropy([0, 1], [0, 1])


def _copy_log(n_ticks=400, seed=3):
    """Two users: u2 copies u1's previous-tick activity exactly."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_ticks)
    events = []
    k = 0
    for t in range(n_ticks):
        if bits[t]:
            events.append(make_event(f"a{k}", t * 3600, "u1"))
            k += 1
        if t >= 1 and bits[t - 1]:
            events.append(make_event(f"b{k}", t * 3600, "u2"))
            k += 1
    return events


def test_build_network_single_user():
    events = [make_event("a", 0, "u1"), make_event("b", 3600, "u1")]
    net = build_influence_network(events)
    assert net.edges == []
    assert net.activity == {"u1": 2}


def test_build_network_recovers_copy_edge():
    net = build_influence_network(_copy_log(), nte_threshold=0.5)
    assert [(e.source, e.target) for e in net.edges] == [("u1", "u2")]
    assert net.edges[0].nte > 0.9


def test_build_network_threshold_above_one_empty():
    net = build_influence_network(_copy_log(), nte_threshold=1.01)
    assert net.edges == []


def test_build_network_empty_log():
    with pytest.raises(EmptyLog):
        build_influence_network([])


def test_network_csv_roundtrip(tmp_path):
    net = InfluenceNetwork(edges=[InfluenceEdge("a", "b", 0.123456789123, 0.5)],
                           activity={"a": 3, "b": 1})
    path = tmp_path / "net.csv"
    net.to_csv(path)
    loaded = InfluenceNetwork.from_csv(path)
    assert len(loaded.edges) == 1
    edge = loaded.edges[0]
    assert (edge.source, edge.target) == ("a", "b")
    assert edge.te == pytest.approx(0.123456789123, rel=1e-8)  # 9 significant digits


def _chain_net():
    return InfluenceNetwork(
        edges=[InfluenceEdge("a", "b", 1.0, 1.0), InfluenceEdge("b", "c", 1.0, 1.0)],
        activity={"a": 1, "b": 1, "c": 1, "lone": 1},
    )


def test_snowball_zero_waves_returns_seeds():
    assert snowball_sample(_chain_net(), {"a"}, 0) == {"a"}


def test_snowball_one_wave_on_path():
    assert snowball_sample(_chain_net(), {"a"}, 1) == {"a", "b"}


def test_snowball_saturates_at_component():
    net = _chain_net()
    full = snowball_sample(net, {"a"}, 10)
    assert full == {"a", "b", "c"}
    # monotone in waves
    prev = set()
    for waves in range(4):
        cur = snowball_sample(net, {"a"}, waves)
        assert prev <= cur
        prev = cur


def test_snowball_unknown_seed():
    with pytest.raises(UnknownSeed):
        snowball_sample(_chain_net(), {"ghost"}, 1)


def _counts_log(counts):
    events = []
    i = 0
    for user, count in counts.items():
        for _ in range(count):
            events.append(make_event(f"e{i}", i, user))
            i += 1
    return events


def test_split_all_equal_ties_go_active():
    split = split_users(_counts_log({"a": 3, "b": 3, "c": 3}), 0.9)
    assert split.active == {"a", "b", "c"}
    assert split.less_active == frozenset()


def test_split_quantile_075():
    split = split_users(_counts_log({"a": 1, "b": 1, "c": 1, "d": 100}), 0.75)
    assert split.active == {"d"}
    assert split.less_active == {"a", "b", "c"}


def test_split_quantile_05():
    split = split_users(_counts_log({"a": 1, "b": 2, "c": 3, "d": 4}), 0.5)
    assert split.active == {"c", "d"}


def test_split_partition_invariant():
    log = _counts_log({"a": 5, "b": 2, "c": 9, "d": 1})
    split = split_users(log, 0.5)
    users = {e.actor for e in log}
    assert split.active | split.less_active == users
    assert split.active & split.less_active == frozenset()


def test_split_by_interaction_share():
    # counts: a=1, b=2, c=3, d=14 -> total 20; 10% budget = 2 events
    split = split_by_interaction_share(_counts_log({"a": 1, "b": 2, "c": 3, "d": 14}), 0.10)
    assert split.less_active == {"a"}
    bigger = split_by_interaction_share(_counts_log({"a": 1, "b": 2, "c": 3, "d": 14}), 0.35)
    assert bigger.less_active == {"a", "b", "c"}
