"""Multiplexity-based network-growth model.

A directed bipartite multiplex graph (one layer per fundamental action
kind) evolves tick by tick under fitness-weighted preferential attachment
with age-driven decay:

  I)   node selection - an active set of users is drawn in proportion to
       node fitness, plus Poisson-arriving new nodes;
  II)  interaction - each selected user is paired with a target drawn in
       proportion to target fitness, on a layer drawn in proportion to
       layer popularity;
  III) update - action counts, degrees, ages and fitness scores are
       recomputed for every node, layer popularity is refreshed, and
       nodes past the removal age leave the graph.

A node that acted this tick ages by ``a <- a + (1 - (t_c - t_p) * F)``;
an idle node ages by ``a <- a + (1 - (t_c - t_p) * (t_c + 1))``.  Fitness
is productivity per unit age, ``F = |A| / a``.  Both age updates can run
negative for long idle gaps, so age is floored at AGE_EPS (fitness is
thereby capped at |A| / AGE_EPS); in that saturated regime selection
weight degenerates to pure activity-count preferential attachment, which
is what drives the heavy-tailed degree distributions the model is after.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .base import BaseSimulator, check_event_log, check_rng, infer_platform
from .errors import AllZeroWeights, ClockSkew, EmptyLog
from .events import Event, OntologyAction, Platform, map_platform_action
from .ingestion import tick_frame

AGE_EPS = 1e-6

LAYERS = (
    OntologyAction.CREATE,
    OntologyAction.POST,
    OntologyAction.VOTE,
    OntologyAction.FOLLOW,
)


@dataclass(frozen=True)
class NodeState:
    """Per-node simulation state; kind is 'user' or 'target'."""

    node_id: str
    kind: str
    fitness: float
    age: float
    degree: int
    action_count: int
    last_active: int


def update_node(node: NodeState, t_c: int, acted: bool, eps: float = AGE_EPS) -> NodeState:
    """Apply one tick's age/fitness update to a single node.

    Acting increments the action count, stamps the activity time and ages
    via the fitness-coupled rule; idling ages via the bulk rule.  Age is
    floored at ``eps`` and fitness recomputed as count / age.
    """
    if t_c < node.last_active:
        raise ClockSkew(f"t_c={t_c} precedes last activity {node.last_active}")
    dt = t_c - node.last_active
    if acted:
        count = node.action_count + 1
        age = node.age + (1.0 - dt * node.fitness)
        last = t_c
    else:
        count = node.action_count
        age = node.age + (1.0 - dt * (t_c + 1.0))
        last = node.last_active
    if age < eps:
        age = eps
    return replace(
        node,
        fitness=count / age,
        age=age,
        action_count=count,
        last_active=last,
        degree=node.degree + (1 if acted else 0),
    )


def select_weighted(candidates: Sequence[tuple[str, float]], rng: np.random.Generator) -> str:
    """Draw one id with probability proportional to its nonnegative weight."""
    ids = [c[0] for c in candidates]
    weights = np.asarray([c[1] for c in candidates], dtype=np.float64)
    if weights.size and weights.min() < 0:
        raise ValueError("weights must be nonnegative")
    total = weights.sum()
    if total <= 0.0:
        raise AllZeroWeights("no strictly positive weight to sample from")
    cuts = np.cumsum(weights)
    return ids[int(np.searchsorted(cuts, rng.random() * total, side="right"))]


def _draw_indices(weights: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """n weighted draws with replacement; empty when no positive mass."""
    total = weights.sum()
    if n <= 0 or total <= 0.0:
        return np.empty(0, dtype=np.int64)
    cuts = np.cumsum(weights)
    picks = np.searchsorted(cuts, rng.random(n) * total, side="right")
    return np.minimum(picks, weights.size - 1)


class _Pool:
    """Columnar store for one node kind; order of insertion is stable."""

    def __init__(self):
        self.ids: list[str] = []
        self.index: dict[str, int] = {}
        self.fitness = np.empty(0, dtype=np.float64)
        self.age = np.empty(0, dtype=np.float64)
        self.degree = np.empty(0, dtype=np.int64)
        self.actions = np.empty(0, dtype=np.int64)
        self.last = np.empty(0, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.ids)

    def add(self, node_id: str, fitness: float, age: float, degree: int,
            actions: int, last: int) -> None:
        self.index[node_id] = len(self.ids)
        self.ids.append(node_id)
        self.fitness = np.append(self.fitness, fitness)
        self.age = np.append(self.age, age)
        self.degree = np.append(self.degree, degree)
        self.actions = np.append(self.actions, actions)
        self.last = np.append(self.last, last)

    def keep(self, mask: np.ndarray) -> None:
        if mask.all():
            return
        self.ids = [i for i, k in zip(self.ids, mask) if k]
        self.index = {node_id: i for i, node_id in enumerate(self.ids)}
        self.fitness = self.fitness[mask]
        self.age = self.age[mask]
        self.degree = self.degree[mask]
        self.actions = self.actions[mask]
        self.last = self.last[mask]

    def node(self, node_id: str, kind: str) -> NodeState:
        i = self.index[node_id]
        return NodeState(node_id, kind, float(self.fitness[i]), float(self.age[i]),
                         int(self.degree[i]), int(self.actions[i]), int(self.last[i]))


@dataclass
class MbmConfig:
    """Run parameters; rates left as None are fitted from the training log."""

    node_add_rate: Optional[float] = None
    events_per_tick: Optional[float] = None
    removal_age: Optional[float] = None
    seed: int = 0
    ticks: int = 0
    tick_len: int = 3600
    age_update: str = "split"  # "split": acted->Eq-act, idle->Eq-bulk; "sequenced": both for actors
    platform: Optional[Platform] = None


@dataclass
class MbmState:
    users: _Pool
    targets: _Pool
    layer_weights: dict[OntologyAction, float]
    action_choices: dict[OntologyAction, tuple[list[str], np.ndarray]]
    platform: Platform
    tick_len: int
    forecast_t0: int
    node_add_rate: float
    events_per_tick: float
    removal_age: float
    age_update: str
    rng: np.random.Generator
    seq: int = 0
    tick: int = 0
    removed: list[str] = field(default_factory=list)


def init_from_log(events: Sequence[Event], cfg: MbmConfig) -> MbmState:
    """Seed model state from a training log.

    Every observed node starts at the assigned fitness F = 1 (age equals
    its observed action count, so F = |A| / a holds from the start); the
    node-addition rate defaults to the mean number of first-seen actors
    per tick over the training frame.
    """
    events = check_event_log(events)
    platform = Platform(cfg.platform) if cfg.platform is not None else infer_platform(events)
    events = [e for e in events if e.platform == platform]
    if not events:
        raise EmptyLog(f"no {platform.value} events to initialize from")
    t0, n_ticks = tick_frame(events, cfg.tick_len)

    user_count: dict[str, int] = {}
    user_last: dict[str, int] = {}
    target_count: dict[str, int] = {}
    target_last: dict[str, int] = {}
    layer_counts: dict[OntologyAction, float] = {k: 0.0 for k in LAYERS}
    action_counts: dict[OntologyAction, dict[str, int]] = {k: {} for k in LAYERS}
    gaps: list[int] = []
    for e in events:
        tick = (e.timestamp - t0) // cfg.tick_len
        if e.actor in user_last:
            gaps.append(tick - user_last[e.actor])
        user_count[e.actor] = user_count.get(e.actor, 0) + 1
        user_last[e.actor] = tick
        target_count[e.content] = target_count.get(e.content, 0) + 1
        target_last[e.content] = tick
        kind = map_platform_action(e.action, platform)
        layer_counts[kind] += 1.0
        action_counts[kind][e.action] = action_counts[kind].get(e.action, 0) + 1

    node_add_rate = cfg.node_add_rate
    if node_add_rate is None:
        node_add_rate = len(user_count) / n_ticks
    events_per_tick = cfg.events_per_tick
    if events_per_tick is None:
        events_per_tick = len(events) / n_ticks

    # Ticks are renumbered so the last training tick is 0 and simulation
    # starts at 1; training activity times become <= 0 offsets.
    shift = n_ticks - 1
    users = _Pool()
    for uid in sorted(user_count):
        count = user_count[uid]
        users.add(uid, 1.0, float(max(count, 1)), count, count, user_last[uid] - shift)
    targets = _Pool()
    for tid in sorted(target_count):
        count = target_count[tid]
        targets.add(tid, 1.0, float(max(count, 1)), count, count, target_last[tid] - shift)

    removal_age = cfg.removal_age
    if removal_age is None:
        p95 = float(np.percentile(np.array(gaps, dtype=float), 95)) if gaps else 1.0
        removal_age = 4.0 * max(p95, 1.0)
        # the default must clear the initial ages (a node seeded with
        # age = |A| would otherwise be culled before its first update)
        max_init = float(max(users.age.max(initial=1.0), targets.age.max(initial=1.0)))
        removal_age = max(removal_age, max_init + 2.0)

    action_choices: dict[OntologyAction, tuple[list[str], np.ndarray]] = {}
    for kind in LAYERS:
        names = sorted(action_counts[kind])
        weights = np.array([action_counts[kind][a] for a in names], dtype=np.float64)
        action_choices[kind] = (names, weights)

    return MbmState(
        users=users,
        targets=targets,
        layer_weights=layer_counts,
        action_choices=action_choices,
        platform=platform,
        tick_len=cfg.tick_len,
        forecast_t0=t0 + n_ticks * cfg.tick_len,
        node_add_rate=float(node_add_rate),
        events_per_tick=float(events_per_tick),
        removal_age=float(removal_age),
        age_update=cfg.age_update,
        rng=check_rng(cfg.seed),
    )


_CANONICAL_CREATE = {
    Platform.GITHUB: "create",
    Platform.TWITTER: "tweet",
    Platform.REDDIT: "post",
}


def _pick_action(state: MbmState, kind: OntologyAction) -> str:
    names, weights = state.action_choices[kind]
    if not names:
        return _CANONICAL_CREATE[state.platform]
    cuts = np.cumsum(weights)
    i = int(np.searchsorted(cuts, state.rng.random() * cuts[-1], side="right"))
    return names[min(i, len(names) - 1)]


def _bulk_update(pool: _Pool, acted: np.ndarray, t: int, mode: str) -> None:
    """Vectorized step-III update; mirrors update_node arithmetic exactly.

    ``acted`` holds per-node action counts for this tick; multiple actions
    in one tick add to |A| and degree together under a single age update.
    """
    if not len(pool):
        return
    acted_mask = acted > 0
    dt = (t - pool.last).astype(np.float64)
    if mode == "split":
        age = np.where(
            acted_mask,
            pool.age + (1.0 - dt * pool.fitness),
            pool.age + (1.0 - dt * (t + 1.0)),
        )
    else:  # sequenced: actors age by the fitness rule, then everyone by the bulk rule
        age = np.where(acted_mask, pool.age + (1.0 - dt * pool.fitness), pool.age)
        dt_bulk = np.where(acted_mask, 0.0, dt)
        age = age + (1.0 - dt_bulk * (t + 1.0))
    age = np.maximum(age, AGE_EPS)
    pool.actions = pool.actions + acted
    pool.degree = pool.degree + acted
    pool.last = np.where(acted_mask, t, pool.last)
    pool.age = age
    pool.fitness = pool.actions / age


def step(state: MbmState, t: int) -> tuple[MbmState, list[Event]]:
    """Advance one tick: select, interact, update.  Mutates and returns the state."""
    rng = state.rng
    # I) node selection: Poisson arrivals join the candidate set at F = 1
    for _ in range(int(rng.poisson(state.node_add_rate))):
        state.seq += 1
        state.users.add(f"agent-{state.seq:06d}", 1.0, 1.0, 0, 0, t)
    n_events = int(rng.poisson(state.events_per_tick))

    events: list[Event] = []
    user_acts = np.zeros(len(state.users), dtype=np.int64)
    target_acts = np.zeros(len(state.targets), dtype=np.int64)

    actors = _draw_indices(state.users.fitness, n_events, rng)
    layer_names = [k for k in LAYERS]
    layer_w = np.array([state.layer_weights[k] for k in layer_names], dtype=np.float64)
    ts = state.forecast_t0 + (t - 1) * state.tick_len

    for ui in actors:
        if layer_w.sum() <= 0:
            break
        kind = layer_names[int(_draw_indices(layer_w, 1, rng)[0])]
        # II) interaction: pair with a fitness-weighted target on that layer
        if kind == OntologyAction.CREATE or len(state.targets) == 0 or \
                state.targets.fitness.sum() <= 0.0:
            kind = OntologyAction.CREATE
            state.seq += 1
            tid = f"content-{state.seq:06d}"
            state.targets.add(tid, 1.0, 1.0, 0, 0, t)
            target_acts = np.append(target_acts, 0)
            ti = state.targets.index[tid]
        else:
            ti = int(_draw_indices(state.targets.fitness, 1, rng)[0])
        state.seq += 1
        events.append(Event(
            event_id=f"mbm-{state.seq:08d}",
            timestamp=ts,
            actor=state.users.ids[int(ui)],
            action=_pick_action(state, kind),
            content=state.targets.ids[ti],
            platform=state.platform,
        ))
        user_acts[int(ui)] += 1
        target_acts[ti] += 1
        state.layer_weights[kind] += 1.0

    # III) update: ages, fitness, degrees, removals (a barrier over all nodes)
    _bulk_update(state.users, user_acts, t, state.age_update)
    _bulk_update(state.targets, target_acts, t, state.age_update)
    for pool in (state.users, state.targets):
        keep = pool.age < state.removal_age
        if not keep.all():
            state.removed.extend(i for i, k in zip(pool.ids, keep) if not k)
            pool.keep(keep)
    state.tick = t
    return state, events


class MultiplexityModel(BaseSimulator):
    """Estimator wrapper: fit seeds the state from a log, predict rolls ticks forward.

    predict always restarts from the fitted state (including the seeded
    RNG), so repeated predictions with the same fitted model are
    byte-identical.
    """

    def __init__(self, node_add_rate=None, events_per_tick=None, removal_age=None,
                 seed=0, tick_len=3600, age_update="split", platform=None):
        self.node_add_rate = node_add_rate
        self.events_per_tick = events_per_tick
        self.removal_age = removal_age
        self.seed = seed
        self.tick_len = tick_len
        self.age_update = age_update
        self.platform = platform

    def fit(self, events: Sequence[Event], y=None):
        cfg = MbmConfig(
            node_add_rate=self.node_add_rate,
            events_per_tick=self.events_per_tick,
            removal_age=self.removal_age,
            seed=self.seed,
            tick_len=self.tick_len,
            age_update=self.age_update,
            platform=self.platform,
        )
        self.state_ = init_from_log(events, cfg)
        return self

    def predict(self, horizon: int) -> list[Event]:
        self._check_fitted("state_")
        if horizon < 1:
            raise ValueError("horizon must be >= 1 tick")
        state = copy.deepcopy(self.state_)
        out: list[Event] = []
        for t in range(1, horizon + 1):
            state, events = step(state, t)
            out.extend(events)
        self.last_state_ = state
        return out
