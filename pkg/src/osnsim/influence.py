"""Pairwise transfer entropy and the static endogenous influence network.

Transfer entropy from a source series to a destination series is estimated
with a plug-in (histogram) estimator over the joint distribution of
(dst_t, dst_{t-lag}, src_{t-lag}), in natural-log units.  On a binary
alphabet the joint table has 8 cells, which keeps the estimator exact and
desk-checkable.  The normalized variant divides by H(dst_t | dst_{t-lag}),
the residual uncertainty of the target given its own past, which bounds
the result to [0, 1]: a source that removes all residual uncertainty
scores 1, an uninformative source scores 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyLog, LengthMismatch, SeriesTooShort, UnknownSeed
from .events import Event
from .ingestion import BinarySeries, bin_activity, binarize

DEFAULT_LAG = 1
DEFAULT_NTE_THRESHOLD = 0.1


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _joint(src: np.ndarray, dst: np.ndarray, lag: int) -> np.ndarray:
    """8-cell joint probability table of (dst_t, dst_{t-lag}, src_{t-lag})."""
    y_t = dst[lag:]
    y_p = dst[:-lag]
    x_p = src[:-lag]
    code = (y_t.astype(np.int64) << 2) | (y_p.astype(np.int64) << 1) | x_p.astype(np.int64)
    counts = np.bincount(code, minlength=8).astype(np.float64)
    return (counts / counts.sum()).reshape(2, 2, 2)  # [y_t, y_p, x_p]


def _check_pair(src, dst, lag: int) -> tuple[np.ndarray, np.ndarray]:
    src = np.asarray(src, dtype=np.uint8)
    dst = np.asarray(dst, dtype=np.uint8)
    if src.shape != dst.shape:
        raise LengthMismatch(f"src length {src.size} != dst length {dst.size}")
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if src.size < lag + 2:
        raise SeriesTooShort(f"need length >= {lag + 2}, got {src.size}")
    return src, dst


def transfer_entropy(src, dst, lag: int = DEFAULT_LAG) -> float:
    """TE(src -> dst) in nats; zero when dst is conditionally independent of lagged src."""
    src, dst = _check_pair(src, dst, lag)
    p = _joint(src, dst, lag)
    h_ytyp = _entropy(p.sum(axis=2).ravel())
    h_yp = _entropy(p.sum(axis=(0, 2)))
    h_full = _entropy(p.ravel())
    h_ypxp = _entropy(p.sum(axis=0).ravel())
    te = (h_ytyp - h_yp) - (h_full - h_ypxp)
    return max(te, 0.0)  # clamp float dust; plug-in TE is nonnegative


def normalized_te(src, dst, lag: int = DEFAULT_LAG) -> float:
    """TE rescaled by H(dst_t | dst_{t-lag}); 0 by convention when that entropy is 0."""
    src, dst = _check_pair(src, dst, lag)
    p = _joint(src, dst, lag)
    denom = _entropy(p.sum(axis=2).ravel()) - _entropy(p.sum(axis=(0, 2)))
    if denom <= 0.0:
        return 0.0
    h_full = _entropy(p.ravel())
    h_ypxp = _entropy(p.sum(axis=0).ravel())
    te = denom - (h_full - h_ypxp)
    return float(min(max(te / denom, 0.0), 1.0))


@dataclass(frozen=True)
class InfluenceEdge:
    source: str
    target: str
    te: float
    nte: float


@dataclass
class InfluenceNetwork:
    """Weighted directed influence graph: source drives target."""

    edges: list[InfluenceEdge] = field(default_factory=list)
    activity: dict[str, int] = field(default_factory=dict)  # node -> total events

    @property
    def nodes(self) -> set[str]:
        out = set(self.activity)
        for e in self.edges:
            out.add(e.source)
            out.add(e.target)
        return out

    def successors(self, node: str) -> list[str]:
        return sorted({e.target for e in self.edges if e.source == node})

    def predecessors(self, node: str) -> list[str]:
        return sorted({e.source for e in self.edges if e.target == node})

    def edge_map(self) -> dict[tuple[str, str], InfluenceEdge]:
        return {(e.source, e.target): e for e in self.edges}

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("source,target,te,nte\n")
            for e in self.edges:
                fh.write(f"{e.source},{e.target},{e.te:.9g},{e.nte:.9g}\n")

    @classmethod
    def from_csv(cls, path) -> "InfluenceNetwork":
        edges = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if header.strip() != "source,target,te,nte":
                raise ValueError(f"unexpected header: {header.strip()!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                source, target, te, nte = line.split(",")
                edges.append(InfluenceEdge(source, target, float(te), float(nte)))
        net = cls(edges=edges)
        for e in edges:
            net.activity.setdefault(e.source, 0)
            net.activity.setdefault(e.target, 0)
        return net


def pairwise_nte(
    series: dict[str, BinarySeries], lag: int = DEFAULT_LAG
) -> dict[tuple[str, str], tuple[float, float]]:
    """(te, nte) for every ordered (source, target) pair, excluding self-pairs."""
    owners = sorted(series)
    bits = {owner: np.asarray(series[owner].bits, dtype=np.uint8) for owner in owners}
    out: dict[tuple[str, str], tuple[float, float]] = {}
    for src in owners:
        for dst in owners:
            if src == dst:
                continue
            te = transfer_entropy(bits[src], bits[dst], lag)
            nte = normalized_te(bits[src], bits[dst], lag)
            out[(src, dst)] = (te, nte)
    return out


def build_influence_network(
    events: Sequence[Event],
    lag: int = DEFAULT_LAG,
    nte_threshold: float = DEFAULT_NTE_THRESHOLD,
    tick_len: int = 3600,
    binarize_threshold: int = 1,
) -> InfluenceNetwork:
    """Static endogenous network: edge j->i iff nte(j, i) >= threshold.

    Deterministic for a given log and parameters; node attributes carry
    per-user activity totals.
    """
    if not events:
        raise EmptyLog("cannot build an influence network from an empty log")
    activity_series = bin_activity(events, tick_len)
    binary = {u: binarize(s, binarize_threshold) for u, s in activity_series.items()}
    net = InfluenceNetwork(
        activity={u: int(s.counts.sum()) for u, s in sorted(activity_series.items())}
    )
    if len(binary) < 2:
        return net
    frame_len = next(iter(binary.values())).bits.size
    if frame_len < lag + 2:
        return net
    for (src, dst), (te, nte) in pairwise_nte(binary, lag).items():
        if nte >= nte_threshold:
            net.edges.append(InfluenceEdge(src, dst, te, nte))
    net.edges.sort(key=lambda e: (e.source, e.target))
    return net


def snowball_sample(net: InfluenceNetwork, seeds: Iterable[str], waves: int) -> set[str]:
    """Expand seed users through influence edges, one neighborhood wave at a time.

    Each wave adds all in- and out-neighbors of the current set; waves=0
    returns the seeds unchanged.  Monotone nondecreasing in waves.
    """
    if waves < 0:
        raise ValueError("waves must be >= 0")
    nodes = net.nodes
    seeds = set(seeds)
    unknown = seeds - nodes
    if unknown:
        raise UnknownSeed(f"seeds not in network: {sorted(unknown)}")
    out_adj: dict[str, set[str]] = {}
    in_adj: dict[str, set[str]] = {}
    for e in net.edges:
        out_adj.setdefault(e.source, set()).add(e.target)
        in_adj.setdefault(e.target, set()).add(e.source)
    sampled = set(seeds)
    frontier = set(seeds)
    for _ in range(waves):
        nxt = set()
        for node in frontier:
            nxt |= out_adj.get(node, set())
            nxt |= in_adj.get(node, set())
        nxt -= sampled
        if not nxt:
            break
        sampled |= nxt
        frontier = nxt
    return sampled


@dataclass(frozen=True)
class UserSplit:
    """Disjoint partition of the log's users into active and less-active sets."""

    active: frozenset[str]
    less_active: frozenset[str]


def _user_counts(events: Sequence[Event]) -> dict[str, int]:
    if not events:
        raise EmptyLog("no users to split")
    counts: dict[str, int] = {}
    for event in events:
        counts[event.actor] = counts.get(event.actor, 0) + 1
    return counts


def split_users(events: Sequence[Event], quantile: float) -> UserSplit:
    """Active = users whose total event count reaches the given quantile.

    Ties at the quantile go to the active side, so an all-equal population
    is entirely active.
    """
    if not 0.0 < quantile < 1.0:
        raise ValueError("quantile must be in (0, 1)")
    counts = _user_counts(events)
    cut = float(np.quantile(np.array(list(counts.values()), dtype=float), quantile))
    active = frozenset(u for u, c in counts.items() if c >= cut)
    less = frozenset(counts) - active
    return UserSplit(active=active, less_active=less)


def split_by_interaction_share(events: Sequence[Event], shd_share: float) -> UserSplit:
    """Split so the less-active side carries about ``shd_share`` of all events.

    Users are taken in ascending activity order (ties by id) into the
    less-active set while their cumulative event share stays <= the
    target, so the realized share is the largest one not exceeding it.
    """
    if not 0.0 <= shd_share <= 1.0:
        raise ValueError("shd_share must be in [0, 1]")
    counts = _user_counts(events)
    total = sum(counts.values())
    budget = shd_share * total
    less: set[str] = set()
    acc = 0
    for user, count in sorted(counts.items(), key=lambda kv: (kv[1], kv[0])):
        if acc + count > budget:
            break
        acc += count
        less.add(user)
    return UserSplit(active=frozenset(counts) - frozenset(less), less_active=frozenset(less))
