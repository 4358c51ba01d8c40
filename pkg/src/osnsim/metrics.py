"""Multi-resolution evaluation of simulated logs against ground truth.

Primitive statistics (gini, palma, burstiness, K-S, Jensen-Shannon,
rank-biased overlap, absolute percentage error, interaction-graph
summaries) plus the harness that scores a simulated log against a truth
log at the community / content / population / user levels and normalizes
errors to [0, 1] within each measurement group.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import networkx as nx
import numpy as np

from .errors import (
    BadPersistence,
    DisjointTimeRanges,
    EmptyLog,
    EmptySample,
    NegativeValue,
    SupportMismatch,
    TooFewEvents,
)
from .events import Event, PLATFORM_ACTIONS, Platform

LN2 = math.log(2.0)
APE_DELTA = 1e-9
#: Finite stand-in for unbounded scalars (palma's +inf sentinel) inside reports.
SCALAR_CAP = 1e9

DAY = 86400


# -- primitive statistics ------------------------------------------------

def gini(values) -> float:
    """Gini coefficient of a nonnegative vector; 0 for uniform or all-zero input."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise EmptySample("gini needs at least one value")
    if (x < 0).any():
        raise NegativeValue("gini is defined for nonnegative values")
    total = x.sum()
    if total == 0.0:
        return 0.0
    x = np.sort(x)
    n = x.size
    i = np.arange(1, n + 1)
    return float(((2 * i - n - 1) * x).sum() / (n * total))


def _bottom_share(sorted_x: np.ndarray, frac: float) -> float:
    """Prorated mass of the bottom ``frac`` of a sorted-ascending vector."""
    n = sorted_x.size
    pos = frac * n
    full = int(pos)
    share = float(sorted_x[:full].sum())
    if full < n:
        share += (pos - full) * float(sorted_x[full])
    return share


def palma(values) -> float:
    """Top-10% share over bottom-40% share; +inf when the bottom share is zero."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    if x.size == 0:
        raise EmptySample("palma needs at least one value")
    total = x.sum()
    if total == 0.0:
        return 0.0
    bottom = _bottom_share(x, 0.4)
    top = total - _bottom_share(x, 0.9)
    if bottom == 0.0:
        return math.inf
    return float(top / bottom)


def burstiness(gaps) -> float:
    """(sigma - mu) / (sigma + mu) over inter-event gaps: -1 periodic, ~0 Poisson-like."""
    g = np.asarray(gaps, dtype=np.float64)
    if g.size < 2:
        raise TooFewEvents("burstiness needs at least 2 gaps")
    mu = float(g.mean())
    sigma = float(g.std())  # population std
    if sigma + mu == 0.0:
        return -1.0
    return (sigma - mu) / (sigma + mu)


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |ECDF_a - ECDF_b|."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise EmptySample("ks_statistic needs non-empty samples")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def js_divergence(pdf_a, pdf_b) -> float:
    """Jensen-Shannon divergence in nats over aligned supports; 0*log 0 := 0."""
    a = np.asarray(pdf_a, dtype=np.float64)
    b = np.asarray(pdf_b, dtype=np.float64)
    if a.shape != b.shape:
        raise SupportMismatch(f"supports differ: {a.shape} vs {b.shape}")
    if (a < 0).any() or (b < 0).any():
        raise NegativeValue("probability masses must be nonnegative")
    if a.sum() == 0.0 or b.sum() == 0.0:
        raise EmptySample("cannot normalize zero-mass distribution")
    a = a / a.sum()
    b = b / b.sum()
    m = 0.5 * (a + b)

    def _kl(p, q):
        mask = p > 0
        return float((p[mask] * np.log(p[mask] / q[mask])).sum())

    return 0.5 * _kl(a, m) + 0.5 * _kl(b, m)


def rbo(rank_a: Sequence, rank_b: Sequence, persistence: float = 0.9) -> float:
    """Extrapolated rank-biased overlap of two rankings; 1 identical, 0 disjoint.

    Evaluated at depth k = min(len(a), len(b)); two empty rankings count
    as identical.
    """
    if not 0.0 < persistence < 1.0:
        raise BadPersistence("persistence must be in (0, 1)")
    a = list(rank_a)
    b = list(rank_b)
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise ValueError("rankings must not contain duplicates")
    k = min(len(a), len(b))
    if k == 0:
        return 1.0 if not a and not b else 0.0
    if len(a) == len(b) and a == b:
        return 1.0  # exact, not a float-dust sum
    p = persistence
    seen_a: set = set()
    seen_b: set = set()
    overlap = 0
    acc = 0.0
    x_k = 0
    for d in range(1, k + 1):
        item_a, item_b = a[d - 1], b[d - 1]
        if item_a == item_b:
            overlap += 1
        else:
            if item_a in seen_b:
                overlap += 1
            if item_b in seen_a:
                overlap += 1
            seen_a.add(item_a)
            seen_b.add(item_b)
        acc += (overlap / d) * p ** d
        x_k = overlap
    return float((x_k / k) * p ** k + (1.0 - p) / p * acc)


def ape(sim: float, truth: float) -> float:
    """Absolute percentage error with a tiny-denominator guard."""
    if sim == truth:
        return 0.0
    return abs(sim - truth) / max(abs(truth), APE_DELTA)


# -- interaction-graph summary -------------------------------------------

@dataclass
class NetworkStats:
    nodes: int
    edges: int
    mean_degree: float
    max_degree: int
    degree_values: np.ndarray
    density: float
    assortativity: float
    avg_clustering: float
    components: int
    mean_shortest_path: float
    modularity: float

    def scalar(self, name: str) -> float:
        return float(getattr(self, name))


def interaction_graph(events: Sequence[Event]) -> nx.Graph:
    """Undirected weighted actor-target graph; insertion order is deterministic."""
    graph = nx.Graph()
    weights: dict[tuple[str, str], int] = {}
    for e in events:
        if e.actor == e.content:
            continue
        key = (e.actor, e.content) if e.actor <= e.content else (e.content, e.actor)
        weights[key] = weights.get(key, 0) + 1
    for node in sorted({n for pair in weights for n in pair} |
                       {e.actor for e in events} | {e.content for e in events}):
        graph.add_node(node)
    for (u, v), w in sorted(weights.items()):
        graph.add_edge(u, v, weight=w)
    return graph


_PATH_SAMPLE_LIMIT = 800  # exact mean shortest path below this component size


def _mean_shortest_path(graph: nx.Graph) -> float:
    if graph.number_of_nodes() == 0 or graph.number_of_edges() == 0:
        return 0.0
    component = max(nx.connected_components(graph), key=lambda c: (len(c), min(c)))
    nodes = sorted(component)
    if len(nodes) < 2:
        return 0.0
    if len(nodes) <= _PATH_SAMPLE_LIMIT:
        sources = nodes
    else:
        step = len(nodes) / 128
        sources = [nodes[int(i * step)] for i in range(128)]
    sub = graph.subgraph(component)
    total = 0
    pairs = 0
    for source in sources:
        lengths = nx.single_source_shortest_path_length(sub, source)
        total += sum(lengths.values())
        pairs += len(lengths) - 1
    return total / pairs if pairs else 0.0


def detect_communities(graph: nx.Graph) -> list[set]:
    if graph.number_of_edges() == 0:
        return [set(graph.nodes)] if graph.number_of_nodes() else []
    return [set(c) for c in nx.community.greedy_modularity_communities(graph)]


def network_summary(events: Sequence[Event]) -> NetworkStats:
    """Structural summary of the actor-target interaction graph."""
    if not events:
        raise EmptyLog("cannot summarize an empty log")
    graph = interaction_graph(events)
    degrees = np.array([d for _, d in sorted(graph.degree())], dtype=np.int64)
    n = graph.number_of_nodes()
    communities = detect_communities(graph)
    if graph.number_of_edges() > 0 and len(communities) > 0:
        modularity = float(nx.community.modularity(graph, communities))
    else:
        modularity = 0.0
    try:
        # uniform-degree graphs have zero degree variance: define as 0
        with np.errstate(invalid="ignore"):
            assortativity = float(nx.degree_assortativity_coefficient(graph))
        if math.isnan(assortativity):
            assortativity = 0.0
    except (ValueError, ZeroDivisionError):
        assortativity = 0.0
    return NetworkStats(
        nodes=n,
        edges=graph.number_of_edges(),
        mean_degree=float(degrees.mean()) if n else 0.0,
        max_degree=int(degrees.max()) if n else 0,
        degree_values=degrees,
        density=float(nx.density(graph)),
        assortativity=assortativity,
        avg_clustering=float(nx.average_clustering(graph)) if n else 0.0,
        components=nx.number_connected_components(graph),
        mean_shortest_path=_mean_shortest_path(graph),
        modularity=modularity,
    )


# -- evaluation harness ----------------------------------------------------

@dataclass
class _ContentInfo:
    first_ts: int
    last_ts: int
    owner: str
    count: int = 0
    contributors: set = field(default_factory=set)
    delays: list = field(default_factory=list)


class _LogView:
    """Lazily computed per-(log, platform) aggregates shared by extractors."""

    def __init__(self, events: list[Event], ctx: "EvalContext"):
        self.events = events
        self.ctx = ctx
        self._cache: dict = {}

    def _get(self, key: str, build: Callable):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def n(self) -> int:
        return len(self.events)

    @property
    def by_user(self) -> dict[str, int]:
        def build():
            counts: dict[str, int] = {}
            for e in self.events:
                counts[e.actor] = counts.get(e.actor, 0) + 1
            return counts
        return self._get("by_user", build)

    @property
    def by_content(self) -> dict[str, _ContentInfo]:
        def build():
            contents: dict[str, _ContentInfo] = {}
            for e in self.events:  # events are sorted ascending
                info = contents.get(e.content)
                if info is None:
                    info = _ContentInfo(first_ts=e.timestamp, last_ts=e.timestamp,
                                        owner=e.actor)
                    contents[e.content] = info
                else:
                    info.delays.append(e.timestamp - info.first_ts)
                    info.last_ts = e.timestamp
                info.count += 1
                info.contributors.add(e.actor)
            return contents
        return self._get("by_content", build)

    @property
    def user_delays(self) -> dict[str, list[int]]:
        def build():
            delays: dict[str, list[int]] = {}
            firsts = {cid: info.first_ts for cid, info in self.by_content.items()}
            seen: set[str] = set()
            for e in self.events:
                if e.content in seen:
                    delays.setdefault(e.actor, []).append(e.timestamp - firsts[e.content])
                else:
                    seen.add(e.content)
            return delays
        return self._get("user_delays", build)

    @property
    def received(self) -> dict[str, int]:
        """Events performed by others on content a user owns."""
        def build():
            owners = {cid: info.owner for cid, info in self.by_content.items()}
            counts: dict[str, int] = {u: 0 for u in self.by_user}
            seen: set[str] = set()
            for e in self.events:
                if e.content in seen:
                    owner = owners[e.content]
                    if owner != e.actor and owner in counts:
                        counts[owner] += 1
                else:
                    seen.add(e.content)
            return counts
        return self._get("received", build)

    @property
    def out_on_others(self) -> dict[str, int]:
        def build():
            owners = {cid: info.owner for cid, info in self.by_content.items()}
            counts: dict[str, int] = {u: 0 for u in self.by_user}
            for e in self.events:
                if owners[e.content] != e.actor:
                    counts[e.actor] += 1
            return counts
        return self._get("out_on_others", build)

    @property
    def unique_content(self) -> dict[str, int]:
        def build():
            seen: dict[str, set] = {}
            for e in self.events:
                seen.setdefault(e.actor, set()).add(e.content)
            return {u: len(s) for u, s in seen.items()}
        return self._get("unique_content", build)

    @property
    def graph_stats(self) -> NetworkStats:
        return self._get("graph_stats", lambda: network_summary(self.events))

    def tick_hist(self) -> np.ndarray:
        def build():
            hist = np.zeros(self.ctx.n_ticks, dtype=np.float64)
            for e in self.events:
                idx = (e.timestamp - self.ctx.t_lo) // self.ctx.tick_len
                hist[min(max(idx, 0), self.ctx.n_ticks - 1)] += 1
            return hist
        return self._get("tick_hist", build)

    def day_hist(self) -> np.ndarray:
        def build():
            hist = np.zeros(self.ctx.n_days, dtype=np.float64)
            for e in self.events:
                idx = (e.timestamp - self.ctx.t_lo) // DAY
                hist[min(max(idx, 0), self.ctx.n_days - 1)] += 1
            return hist
        return self._get("day_hist", build)

    def dow_hist(self) -> np.ndarray:
        def build():
            hist = np.zeros(7, dtype=np.float64)
            for e in self.events:
                hist[(e.timestamp // DAY) % 7] += 1
            return hist
        return self._get("dow_hist", build)

    def action_hist(self, vocab: Sequence[str]) -> np.ndarray:
        counts: dict[str, int] = {}
        for e in self.events:
            counts[e.action] = counts.get(e.action, 0) + 1
        return np.array([counts.get(a, 0) for a in vocab], dtype=np.float64)

    def lifespan_ticks(self, info: _ContentInfo) -> int:
        return (info.last_ts - info.first_ts) // self.ctx.tick_len + 1


@dataclass
class EvalContext:
    tick_len: int
    t_lo: int
    t_hi: int
    top_k: int
    rbo_persistence: float
    communities: dict[str, int]      # actor -> community index (from truth)
    n_communities: int
    platform: Platform

    @property
    def n_ticks(self) -> int:
        return (self.t_hi - self.t_lo) // self.tick_len + 1

    @property
    def n_days(self) -> int:
        return (self.t_hi - self.t_lo) // DAY + 1


def _capped(value: float) -> float:
    if value == math.inf:
        return SCALAR_CAP
    return min(value, SCALAR_CAP)


def _ranking(counts: dict[str, float], k: int) -> list[str]:
    order = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [key for key, _ in order[:k]]


# extractor return kinds: ("scalar", x) ("samples", arr) ("dist", arr)
# ("ranking", list) ("groups", {gid: scalar-or-None}) ("skipped", reason)

def _x_scalar(fn):
    return lambda ctx, view: ("scalar", fn(ctx, view))


def _community_events(ctx: EvalContext, view: _LogView) -> dict[int, list[Event]]:
    grouped: dict[int, list[Event]] = {c: [] for c in range(ctx.n_communities)}
    for e in view.events:
        cid = ctx.communities.get(e.actor)
        if cid is not None:
            grouped[cid].append(e)
    return grouped


def _per_user_counts(events: list[Event]) -> list[int]:
    counts: dict[str, int] = {}
    for e in events:
        counts[e.actor] = counts.get(e.actor, 0) + 1
    return list(counts.values())


def _gaps(events: list[Event]) -> np.ndarray:
    ts = np.array([e.timestamp for e in events], dtype=np.float64)
    return np.diff(ts)


def _x_comm_burstiness(ctx, view):
    out = {}
    for cid, events in _community_events(ctx, view).items():
        gaps = _gaps(events)
        out[cid] = burstiness(gaps) if gaps.size >= 2 else None
    return ("groups", out)


def _x_comm_contributors(ctx, view):
    return ("groups", {cid: float(len({e.actor for e in events})) for cid, events
                       in _community_events(ctx, view).items()})


def _x_comm_proportions(ctx, view):
    grouped = _community_events(ctx, view)
    return ("dist", np.array([len(grouped[c]) for c in range(ctx.n_communities)],
                             dtype=np.float64))


def _x_comm_gini(ctx, view):
    out = {}
    for cid, events in _community_events(ctx, view).items():
        counts = _per_user_counts(events)
        out[cid] = gini(counts) if counts else None
    return ("groups", out)


def _x_comm_action_counts(ctx, view):
    vocab = sorted(PLATFORM_ACTIONS[ctx.platform])
    out = {}
    for cid, events in _community_events(ctx, view).items():
        if not events:
            out[cid] = None
            continue
        counts: dict[str, int] = {}
        for e in events:
            counts[e.action] = counts.get(e.action, 0) + 1
        out[cid] = np.array([counts.get(a, 0) for a in vocab], dtype=np.float64)
    return ("group_dists", out)


def _x_comm_palma(ctx, view):
    out = {}
    for cid, events in _community_events(ctx, view).items():
        counts = _per_user_counts(events)
        out[cid] = _capped(palma(counts)) if counts else None
    return ("groups", out)


def _x_comm_user_burstiness(ctx, view):
    out = {}
    for cid, events in _community_events(ctx, view).items():
        per_user: dict[str, list[int]] = {}
        for e in events:
            per_user.setdefault(e.actor, []).append(e.timestamp)
        values = []
        for ts_list in per_user.values():
            if len(ts_list) >= 3:
                values.append(burstiness(np.diff(np.asarray(ts_list, dtype=float))))
        out[cid] = float(np.mean(values)) if values else None
    return ("groups", out)


def _x_content_counts(ctx, view):
    return ("samples", np.array([i.count for i in view.by_content.values()], dtype=float))


def _x_content_contributors(ctx, view):
    return ("samples", np.array([len(i.contributors) for i in view.by_content.values()],
                                dtype=float))


def _x_content_delay(ctx, view):
    delays = [d for info in view.by_content.values() for d in info.delays]
    return ("samples", np.array(delays, dtype=float))


def _x_growth(ctx, view):
    values = [len(info.contributors) / view.lifespan_ticks(info)
              for info in view.by_content.values()]
    return ("samples", np.array(values, dtype=float))


def _x_liveliness(ctx, view):
    values = [info.count / view.lifespan_ticks(info) for info in view.by_content.values()]
    return ("samples", np.array(values, dtype=float))


def _x_liveliness_topk(ctx, view):
    scores = {cid: info.count / view.lifespan_ticks(info)
              for cid, info in view.by_content.items()}
    return ("ranking", _ranking(scores, ctx.top_k))


def _x_popularity_topk_dist(ctx, view):
    counts = sorted((info.count for info in view.by_content.values()), reverse=True)
    return ("samples", np.array(counts[: ctx.top_k], dtype=float))


def _x_popularity_topk(ctx, view):
    return ("ranking", _ranking({cid: float(info.count)
                                 for cid, info in view.by_content.items()}, ctx.top_k))


def _x_unique_content(ctx, view):
    return ("samples", np.array(list(view.unique_content.values()), dtype=float))


def _x_pop_scalar(name):
    return lambda ctx, view: ("scalar", view.graph_stats.scalar(name))


def _x_degree_dist(ctx, view):
    return ("samples", view.graph_stats.degree_values.astype(float))


def _x_most_active(ctx, view):
    return ("ranking", _ranking({u: float(c) for u, c in view.by_user.items()}, ctx.top_k))


def _continue_proportion(ctx, view):
    mid = (ctx.t_lo + ctx.t_hi) // 2
    first: set[tuple[str, str]] = set()
    second: set[tuple[str, str]] = set()
    for e in view.events:
        (first if e.timestamp < mid else second).add((e.actor, e.content))
    if not first:
        return 0.0
    return len(first & second) / len(first)


def _x_continue(platform: Platform):
    def fn(ctx, view):
        if ctx.platform != platform:
            return ("skipped", f"platform-specific ({platform.value})")
        return ("scalar", _continue_proportion(ctx, view))
    return fn


def _x_activity_dist(ctx, view):
    return ("samples", np.array(list(view.by_user.values()), dtype=float))


def _x_activity_timeline(ctx, view):
    return ("dist", view.tick_hist())


def _x_user_delay(ctx, view):
    values = [float(np.median(d)) for d in view.user_delays.values()]
    return ("samples", np.array(values, dtype=float))


def _x_user_gini(ctx, view):
    return ("scalar", gini(list(view.by_user.values())))


def _x_user_palma(ctx, view):
    return ("scalar", _capped(palma(list(view.by_user.values()))))


def _x_user_popularity(ctx, view):
    return ("ranking", _ranking({u: float(c) for u, c in view.received.items()},
                                ctx.top_k))


def _x_trustingness(ctx, view):
    values = []
    received = view.received
    for user, out in sorted(view.out_on_others.items()):
        total = out + received.get(user, 0)
        values.append(out / total if total else 0.0)
    return ("samples", np.array(values, dtype=float))


def _x_disparity_gini(ctx, view):
    return ("scalar", gini([i.count for i in view.by_content.values()]))


def _x_disparity_palma(ctx, view):
    return ("scalar", _capped(palma([i.count for i in view.by_content.values()])))


def _x_daily_dist(ctx, view):
    return ("dist", view.day_hist())


def _x_dow_dist(ctx, view):
    return ("dist", view.dow_hist())


def _skipped(reason):
    return lambda ctx, view: ("skipped", reason)


@dataclass(frozen=True)
class MetricSpec:
    level: str
    name: str
    error_metric: str  # ape | absdiff | ks | jsd | rbo | mean_ape | mean_absdiff | mean_jsd
    extract: Callable


MetricSuite = Sequence[MetricSpec]

DEFAULT_SUITE: tuple[MetricSpec, ...] = (
    # community level
    MetricSpec("community", "burstiness", "mean_ape", _x_comm_burstiness),
    MetricSpec("community", "contributing_users", "mean_ape", _x_comm_contributors),
    MetricSpec("community", "event_proportions", "jsd", _x_comm_proportions),
    MetricSpec("community", "geo_locations", "ape",
               _skipped("event schema carries no geo fields")),
    MetricSpec("community", "gini_coefficient", "mean_absdiff", _x_comm_gini),
    MetricSpec("community", "issue_types", "ape",
               _skipped("event schema carries no issue-state fields")),
    MetricSpec("community", "user_action_counts", "mean_jsd", _x_comm_action_counts),
    MetricSpec("community", "palma_coefficient", "mean_ape", _x_comm_palma),
    MetricSpec("community", "user_account_ages", "ape",
               _skipped("event schema carries no account-age fields")),
    MetricSpec("community", "user_burstiness", "mean_ape", _x_comm_user_burstiness),
    # content level
    MetricSpec("content", "activity_disparity_gini", "ape", _x_disparity_gini),
    MetricSpec("content", "activity_disparity_palma", "ape", _x_disparity_palma),
    MetricSpec("content", "contributors", "ks", _x_content_contributors),
    MetricSpec("content", "diffusion_delay", "ks", _x_content_delay),
    MetricSpec("content", "event_counts", "ks", _x_content_counts),
    MetricSpec("content", "daily_event_distribution", "jsd", _x_daily_dist),
    MetricSpec("content", "day_of_week_event_distribution", "jsd", _x_dow_dist),
    MetricSpec("content", "growth", "ks", _x_growth),
    MetricSpec("content", "liveliness_distribution", "ks", _x_liveliness),
    MetricSpec("content", "liveliness_top_k", "rbo", _x_liveliness_topk),
    MetricSpec("content", "popularity_distribution_top_k", "ks", _x_popularity_topk_dist),
    MetricSpec("content", "popularity_top_k", "rbo", _x_popularity_topk),
    MetricSpec("content", "user_unique_content", "ks", _x_unique_content),
    # population level
    MetricSpec("population", "assortativity_coefficient", "ape", _x_pop_scalar("assortativity")),
    MetricSpec("population", "average_clustering_coefficient", "ape",
               _x_pop_scalar("avg_clustering")),
    MetricSpec("population", "community_modularity", "ape", _x_pop_scalar("modularity")),
    MetricSpec("population", "degree_distribution", "ks", _x_degree_dist),
    MetricSpec("population", "density", "ape", _x_pop_scalar("density")),
    MetricSpec("population", "max_node_degree", "ape", _x_pop_scalar("max_degree")),
    MetricSpec("population", "mean_node_degree", "ape", _x_pop_scalar("mean_degree")),
    MetricSpec("population", "mean_shortest_path_length", "ape",
               _x_pop_scalar("mean_shortest_path")),
    MetricSpec("population", "connected_components", "ape", _x_pop_scalar("components")),
    MetricSpec("population", "num_edges", "ape", _x_pop_scalar("edges")),
    MetricSpec("population", "num_nodes", "ape", _x_pop_scalar("nodes")),
    # user level
    MetricSpec("user", "most_active_users", "rbo", _x_most_active),
    MetricSpec("user", "repo_user_continue_proportion", "ape", _x_continue(Platform.GITHUB)),
    MetricSpec("user", "subreddit_user_continue_proportion", "ape",
               _x_continue(Platform.REDDIT)),
    MetricSpec("user", "activity_distribution", "ks", _x_activity_dist),
    MetricSpec("user", "activity_timeline", "jsd", _x_activity_timeline),
    MetricSpec("user", "diffusion_delay", "ks", _x_user_delay),
    MetricSpec("user", "gini_coefficient", "ape", _x_user_gini),
    MetricSpec("user", "palma_coefficient", "ape", _x_user_palma),
    MetricSpec("user", "popularity", "rbo", _x_user_popularity),
    MetricSpec("user", "trustingness", "ks", _x_trustingness),
    MetricSpec("user", "user_unique_content", "ks", _x_unique_content),
)


@dataclass
class MetricRow:
    level: str
    metric: str
    platform: str
    error_metric: str
    error: Optional[float]
    normalized: Optional[float]
    status: str = "ok"           # "ok" or "skipped"
    reason: str = ""
    sim_value: Optional[object] = None
    truth_value: Optional[object] = None


@dataclass
class MetricReport:
    rows: list[MetricRow]
    normalization: str

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("level,metric,platform,error_metric,error,normalized,status\n")
            for r in self.rows:
                error = "" if r.error is None else f"{r.error:.9g}"
                normalized = "" if r.normalized is None else f"{r.normalized:.9g}"
                status = r.status if r.status == "ok" else f"skipped:{r.reason}"
                fh.write(f"{r.level},{r.metric},{r.platform},{r.error_metric},"
                         f"{error},{normalized},{status}\n")

    def to_obj(self) -> dict:
        levels: dict = {}
        for r in self.rows:
            entry = {
                "error_metric": r.error_metric,
                "error": r.error,
                "normalized": r.normalized,
                "status": r.status,
            }
            if r.reason:
                entry["reason"] = r.reason
            levels.setdefault(r.level, {}).setdefault(r.metric, {})[r.platform] = entry
        return {"normalization": self.normalization, "levels": levels}

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_obj(), fh, sort_keys=True, indent=2)
            fh.write("\n")

    def ok_rows(self) -> list[MetricRow]:
        return [r for r in self.rows if r.status == "ok"]


def _summary(value) -> object:
    kind, payload = value
    if kind == "scalar":
        return payload
    if kind == "samples":
        return {"n": int(np.asarray(payload).size)}
    if kind == "dist":
        return {"mass": float(np.asarray(payload).sum())}
    if kind == "ranking":
        return {"depth": len(payload)}
    if kind in ("groups", "group_dists"):
        return {"groups": len(payload)}
    return None


def _row_error(spec: MetricSpec, sim_value, truth_value, ctx: EvalContext
               ) -> tuple[Optional[float], str, str]:
    """(error, status, reason) for one suite row."""
    s_kind, s_val = sim_value
    t_kind, t_val = truth_value
    if t_kind == "skipped":
        return None, "skipped", t_val
    if s_kind == "skipped":
        return None, "skipped", s_val
    metric = spec.error_metric
    if metric == "ape":
        return ape(_capped(float(s_val)), _capped(float(t_val))), "ok", ""
    if metric == "absdiff":
        return abs(float(s_val) - float(t_val)), "ok", ""
    if metric == "ks":
        s_arr = np.asarray(s_val, dtype=float)
        t_arr = np.asarray(t_val, dtype=float)
        if s_arr.size == 0 and t_arr.size == 0:
            return 0.0, "ok", ""
        if s_arr.size == 0 or t_arr.size == 0:
            return 1.0, "ok", ""
        return ks_statistic(s_arr, t_arr), "ok", ""
    if metric == "jsd":
        s_arr = np.asarray(s_val, dtype=float)
        t_arr = np.asarray(t_val, dtype=float)
        if s_arr.sum() == 0.0 and t_arr.sum() == 0.0:
            return 0.0, "ok", ""
        if s_arr.sum() == 0.0 or t_arr.sum() == 0.0:
            return LN2, "ok", ""
        return js_divergence(s_arr, t_arr), "ok", ""
    if metric == "rbo":
        return 1.0 - rbo(s_val, t_val, ctx.rbo_persistence), "ok", ""
    if metric in ("mean_ape", "mean_absdiff"):
        errors = []
        for gid, truth_scalar in t_val.items():
            sim_scalar = s_val.get(gid)
            if truth_scalar is None or sim_scalar is None:
                continue
            if metric == "mean_ape":
                errors.append(ape(float(sim_scalar), float(truth_scalar)))
            else:
                errors.append(abs(float(sim_scalar) - float(truth_scalar)))
        if not errors:
            return None, "skipped", "no community had enough events on both sides"
        return float(np.mean(errors)), "ok", ""
    if metric == "mean_jsd":
        errors = []
        for gid, truth_hist in t_val.items():
            sim_hist = s_val.get(gid)
            if truth_hist is None or truth_hist.sum() == 0.0:
                continue
            if sim_hist is None or sim_hist.sum() == 0.0:
                errors.append(LN2)
            else:
                errors.append(js_divergence(sim_hist, truth_hist))
        if not errors:
            return None, "skipped", "no community had events on the truth side"
        return float(np.mean(errors)), "ok", ""
    raise ValueError(f"unknown error metric {spec.error_metric!r}")


def _minmax(members: list[MetricRow]) -> None:
    """Min-max the error over one row group; near-degenerate spreads go to 0."""
    finite = [r.error for r in members if math.isfinite(r.error)]
    lo = min(finite) if finite else 0.0
    hi = max(finite) if finite else 0.0
    degenerate = (hi - lo) <= 1e-12 * max(1.0, abs(hi))
    for r in members:
        if not math.isfinite(r.error):
            r.normalized = 1.0
        elif degenerate:
            r.normalized = 0.0
        else:
            r.normalized = (r.error - lo) / (hi - lo)


def _normalize_within(rows: list[MetricRow], key: Callable[[MetricRow], tuple]) -> None:
    groups: dict[tuple, list[MetricRow]] = {}
    for row in rows:
        if row.status == "ok" and row.error is not None:
            groups.setdefault(key(row), []).append(row)
    for members in groups.values():
        _minmax(members)


def evaluate(sim: Sequence[Event], truth: Sequence[Event],
             suite: MetricSuite = DEFAULT_SUITE, tick_len: int = 3600,
             top_k: int = 100, rbo_persistence: float = 0.9) -> MetricReport:
    """Score a simulated log against ground truth across all four levels.

    Communities are detected once, on the truth interaction graph, and
    both logs are scored over that membership.  Rows the schema cannot
    support are emitted as skipped-with-reason rather than dropped.  The
    single-report ``normalized`` column min-maxes the error over the
    metric rows within each (level, platform) group; cross-model
    normalization (``compare``) replaces it with the per-row min-max
    across models.
    """
    sim = sorted(sim, key=lambda e: (e.timestamp, e.event_id))
    truth = sorted(truth, key=lambda e: (e.timestamp, e.event_id))
    if not truth:
        raise EmptyLog("truth log is empty")
    if not sim:
        raise EmptyLog("simulated log is empty")
    sim_lo, sim_hi = sim[0].timestamp, sim[-1].timestamp
    truth_lo, truth_hi = truth[0].timestamp, truth[-1].timestamp
    if sim_hi < truth_lo or truth_hi < sim_lo:
        raise DisjointTimeRanges(
            f"sim [{sim_lo}, {sim_hi}] does not overlap truth [{truth_lo}, {truth_hi}]"
        )

    rows: list[MetricRow] = []
    platforms = sorted({e.platform for e in truth}, key=lambda p: p.value)
    for platform in platforms:
        truth_p = [e for e in truth if e.platform == platform]
        sim_p = [e for e in sim if e.platform == platform]
        graph = interaction_graph(truth_p)
        actors = {e.actor for e in truth_p}
        communities: dict[str, int] = {}
        comm_sets = detect_communities(graph)
        comm_sets = [c & actors for c in comm_sets]
        comm_sets = [c for c in comm_sets if c]
        comm_sets.sort(key=lambda c: (-len(c), min(c)))
        for cid, members in enumerate(comm_sets):
            for actor in members:
                communities[actor] = cid
        ctx = EvalContext(
            tick_len=tick_len,
            t_lo=min(truth_p[0].timestamp, sim_p[0].timestamp) if sim_p
            else truth_p[0].timestamp,
            t_hi=max(truth_p[-1].timestamp, sim_p[-1].timestamp) if sim_p
            else truth_p[-1].timestamp,
            top_k=top_k,
            rbo_persistence=rbo_persistence,
            communities=communities,
            n_communities=len(comm_sets),
            platform=platform,
        )
        truth_view = _LogView(truth_p, ctx)
        sim_view = _LogView(sim_p, ctx)
        for spec in suite:
            if not sim_p:
                rows.append(MetricRow(spec.level, spec.name, platform.value,
                                      spec.error_metric, None, None,
                                      "skipped", "no simulated events on this platform"))
                continue
            truth_value = spec.extract(ctx, truth_view)
            sim_value = spec.extract(ctx, sim_view)
            error, status, reason = _row_error(spec, sim_value, truth_value, ctx)
            rows.append(MetricRow(
                spec.level, spec.name, platform.value, spec.error_metric,
                error, None, status, reason,
                _summary(sim_value), _summary(truth_value),
            ))
    report = MetricReport(
        rows=rows,
        normalization="min-max of the error over metric rows within each "
                      "(level, platform) group (single-model report)",
    )
    _normalize_within(report.rows, lambda r: (r.level, r.platform))
    return report


def compare(reports: dict[str, MetricReport]) -> dict[str, MetricReport]:
    """Re-normalize several models' reports per (level, metric, platform) row group.

    Mutates and returns the input reports: within each row group the
    normalized value is the min-max position of the model's error across
    models, matching how model comparisons are scored.
    """
    groups: dict[tuple, list[MetricRow]] = {}
    for report in reports.values():
        for row in report.rows:
            if row.status == "ok" and row.error is not None:
                groups.setdefault((row.level, row.metric, row.platform), []).append(row)
    for members in groups.values():
        _minmax(members)
    for report in reports.values():
        report.normalization = "min-max of the error across models within each " \
                               "(level, metric, platform) group"
    return reports
