"""Multi-action cascade model.

Users respond probabilistically to messages from the neighbors that
influence them and to external shocks.  Per-pair response probabilities
evolve by transfer-entropy-scaled increments,

    q(t) = q(t-1) + eps / (1 + T),

clamped to [0, 1]; shock probabilities update the same way per shock and
combine by independent union.  The endogenous and exogenous forces merge
per draw as q + p - q*p.  Each user processes at most the last ``m``
messages in its inbox (cognitive overload), decides per message, and the
committed responses fan out to the sender's influencees one tick later.

Formal response actions: create a conversation, contribute to one, share
a message into a new conversation, or delete (emitted as an event whose
message is empty rather than erased history).
"""

from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .base import BaseSimulator, check_event_log, check_rng, infer_platform
from .errors import EmptyLog, KeyMismatch
from .events import Event, Platform
from .influence import InfluenceNetwork, build_influence_network
from .ingestion import tick_frame

#: Formal action cases, in the order (new conversation; same conversation,
#: new message; different conversation, same message; same conversation,
#: empty message).
MACM_ACTIONS = ("create", "contribute", "share", "delete")

#: Platform vocabulary for each formal case; empty means the platform
#: cannot express it, so it is never drawn there.
MACM_ACTION_SETS: dict[Platform, dict[str, tuple[str, ...]]] = {
    Platform.GITHUB: {
        "create": ("create",),
        "contribute": ("push", "pull_request", "issues", "commit_comment",
                       "issue_comment", "watch"),
        "share": ("fork",),
        "delete": ("delete",),
    },
    Platform.TWITTER: {
        "create": ("tweet",),
        "contribute": ("reply",),
        "share": ("retweet", "quote"),
        "delete": (),
    },
    Platform.REDDIT: {
        "create": ("post",),
        "contribute": ("comment",),
        "share": (),
        "delete": (),
    },
}

#: Respond-in-kind defaults: what a response to each received case does.
RESPOND_IN_KIND = {
    "create": "contribute",
    "contribute": "contribute",
    "share": "share",
    "delete": "contribute",
}


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def update_q(prev: float, te: float, noise: float) -> float:
    """One endogenous probability step: prev + noise / (1 + te), clamped to [0, 1]."""
    if te < 0:
        raise ValueError("transfer entropy must be nonnegative")
    return _clamp01(prev + noise / (1.0 + te))


def update_p(prev_per_shock: Mapping[str, float], te_per_shock: Mapping[str, float],
             noise_per_shock: Mapping[str, float]) -> float:
    """Update each shock term like update_q, then combine by independent union.

    The union of per-shock probabilities is 1 - prod(1 - p_s); any shock
    at 1 is absorbing.  All three maps must share the same keys.
    """
    keys = set(prev_per_shock)
    if keys != set(te_per_shock) or keys != set(noise_per_shock):
        raise KeyMismatch("prev/te/noise maps must have identical shock keys")
    miss = 1.0
    for s in keys:
        miss *= 1.0 - update_q(prev_per_shock[s], te_per_shock[s], noise_per_shock[s])
    return 1.0 - miss


def response_probability(q: float, p: float) -> float:
    """Union of the endogenous and exogenous forces: q + p - q*p."""
    return q + p - q * p


@dataclass(frozen=True)
class MacmMessage:
    sender: str
    action: str          # one of MACM_ACTIONS
    conversation: str
    message: Optional[str]


class Inbox:
    """Bounded FIFO of (arrival_tick, message); the oldest entry is evicted first."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._queue: deque = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._queue)

    def push(self, tick: int, message: MacmMessage) -> None:
        self._queue.append((tick, message))

    def pop_ready(self, tick: int) -> list[MacmMessage]:
        """Remove and return messages that arrived before this tick."""
        ready = []
        while self._queue and self._queue[0][0] < tick:
            ready.append(self._queue.popleft()[1])
        return ready


@dataclass
class MacmState:
    users: list[str]
    q: dict[tuple[str, str], float]          # (receiver i, sender j)
    p: dict[tuple[str, str], float]          # (receiver i, shock s)
    te_q: dict[tuple[str, str], float]
    te_p: dict[tuple[str, str], float]
    followers: dict[str, list[str]]          # sender -> receivers
    shock_sources: dict[str, list[str]]      # user -> shocks with an edge to them
    inboxes: dict[str, Inbox]
    action_choices: dict[str, tuple[list[str], np.ndarray]]
    delete_share: float
    noise_sigma: float
    platform: Platform
    tick_len: int
    forecast_t0: int
    rng: np.random.Generator
    activity_prev: dict[str, int] = field(default_factory=dict)
    seq: int = 0
    tick: int = 0


def _respond(state: MacmState, actor: str, msg: Optional[MacmMessage], ts: int
             ) -> tuple[Event, str, str, Optional[str]]:
    """Build the response event (and message bookkeeping) for one accepted draw."""
    rng = state.rng
    if msg is None:
        action = "create"
    elif state.delete_share > 0 and rng.random() < state.delete_share:
        action = "delete"
    else:
        action = RESPOND_IN_KIND[msg.action]
    if not MACM_ACTION_SETS[state.platform][action]:
        action = "contribute"
    state.seq += 1
    if action == "create":
        conversation = f"conv-{state.seq:08d}"
        message_id = f"msg-{state.seq:08d}"
    elif action == "contribute":
        conversation = msg.conversation
        message_id = f"msg-{state.seq:08d}"
    elif action == "share":
        conversation = f"conv-{state.seq:08d}"
        message_id = msg.message if msg.message is not None else f"msg-{state.seq:08d}"
    else:  # delete: same conversation, empty message marker
        conversation = msg.conversation
        message_id = None
    names, weights = state.action_choices[action]
    if names:
        cuts = np.cumsum(weights)
        pick = int(np.searchsorted(cuts, rng.random() * cuts[-1], side="right"))
        platform_action = names[min(pick, len(names) - 1)]
    else:
        platform_action = MACM_ACTION_SETS[state.platform][action][0]
    return Event(
        event_id=f"macm-{state.seq:08d}",
        timestamp=ts,
        actor=actor,
        action=platform_action,
        content=conversation,
        platform=state.platform,
        message=message_id,
    ), action, conversation, message_id


def step(state: MacmState, t: int,
         shock_bits: Optional[Mapping[str, int]] = None) -> tuple[MacmState, list[Event]]:
    """Advance one tick under the two-phase contract.

    Phase 1 reads every inbox snapshot and decides responses; phase 2
    commits the emitted events and fans them out to follower inboxes, so
    nothing sent at tick t is visible before t+1.
    """
    rng = state.rng
    shock_bits = shock_bits or {}
    events: list[Event] = []
    outgoing: list[tuple[str, MacmMessage]] = []
    activity_now: dict[str, int] = {}
    ts = state.forecast_t0 + (t - 1) * state.tick_len

    for user in state.users:
        # exogenous force: shocks active this tick update p before any draw
        active_shocks = [s for s in state.shock_sources.get(user, ())
                         if shock_bits.get(s, 0)]
        if active_shocks:
            prev = {s: state.p[(user, s)] for s in active_shocks}
            te = {s: state.te_p[(user, s)] for s in active_shocks}
            noise = {s: rng.normal(0.0, state.noise_sigma) for s in active_shocks}
            for s in active_shocks:
                state.p[(user, s)] = update_q(prev[s], te[s], noise[s])
            p_user = 1.0
            for s in active_shocks:
                p_user *= 1.0 - state.p[(user, s)]
            p_user = 1.0 - p_user
        else:
            p_user = 0.0

        inbox = state.inboxes.get(user)
        messages = inbox.pop_ready(t) if inbox is not None else []
        for msg in messages:
            key = (user, msg.sender)
            q_prev = state.q.get(key)
            if q_prev is None:
                continue
            # noise scales with the pair's activity disparity over the last tick
            disparity = abs(state.activity_prev.get(msg.sender, 0)
                            - state.activity_prev.get(user, 0))
            noise = rng.normal(0.0, state.noise_sigma) * disparity
            q_new = update_q(q_prev, state.te_q[key], noise)
            state.q[key] = q_new
            if rng.random() < response_probability(q_new, p_user):
                event, action, conversation, message_id = _respond(state, user, msg, ts)
                events.append(event)
                activity_now[user] = activity_now.get(user, 0) + 1
                outgoing.append((user, MacmMessage(user, action, conversation, message_id)))

        if p_user > 0.0 and rng.random() < p_user:
            # shock-driven spontaneous conversation creation
            event, action, conversation, message_id = _respond(state, user, None, ts)
            events.append(event)
            activity_now[user] = activity_now.get(user, 0) + 1
            outgoing.append((user, MacmMessage(user, action, conversation, message_id)))

    # phase 2: committed events fan out, readable from the next tick on
    for sender, message in outgoing:
        for receiver in state.followers.get(sender, ()):
            state.inboxes[receiver].push(t, message)
    state.activity_prev = activity_now
    state.tick = t
    return state, events


def categorize_action(action: str, platform: Platform) -> str:
    for category, names in MACM_ACTION_SETS[platform].items():
        if action in names:
            return category
    return "contribute"


class MultiActionCascadeModel(BaseSimulator):
    """Estimator wrapper around the cascade dynamics.

    fit() derives the follower graph and initial probabilities from the
    endogenous/exogenous influence networks (built from the training log
    when not supplied), loads the last ``m`` training messages into the
    inboxes for cascade momentum, and freezes per-category platform-action
    frequencies.  predict(horizon, shocks=...) replays from the fitted
    state, so repeated predictions are identical.
    """

    def __init__(self, m=10, noise_sigma=0.01, seed=0, tick_len=3600,
                 endogenous=None, exogenous=None, nte_threshold=0.1, lag=1,
                 platform=None):
        self.m = m
        self.noise_sigma = noise_sigma
        self.seed = seed
        self.tick_len = tick_len
        self.endogenous = endogenous
        self.exogenous = exogenous
        self.nte_threshold = nte_threshold
        self.lag = lag
        self.platform = platform

    def fit(self, events: Sequence[Event], y=None):
        events = check_event_log(events)
        platform = Platform(self.platform) if self.platform is not None \
            else infer_platform(events)
        events = [e for e in events if e.platform == platform]
        if not events:
            raise EmptyLog(f"no {platform.value} events to initialize from")
        if self.m < 1:
            raise ValueError("inbox capacity m must be >= 1")
        t0, n_ticks = tick_frame(events, self.tick_len)

        endo: InfluenceNetwork = self.endogenous
        if endo is None:
            endo = build_influence_network(
                events, lag=self.lag, nte_threshold=self.nte_threshold,
                tick_len=self.tick_len,
            )
        exo: Optional[InfluenceNetwork] = self.exogenous

        users = sorted({e.actor for e in events})
        q = {}
        te_q = {}
        followers: dict[str, list[str]] = {}
        for edge in endo.edges:
            q[(edge.target, edge.source)] = edge.nte
            te_q[(edge.target, edge.source)] = edge.te
            followers.setdefault(edge.source, []).append(edge.target)
        for sender in followers:
            followers[sender].sort()
        p = {}
        te_p = {}
        shock_sources: dict[str, list[str]] = {}
        if exo is not None:
            for edge in exo.edges:
                p[(edge.target, edge.source)] = edge.nte
                te_p[(edge.target, edge.source)] = edge.te
                shock_sources.setdefault(edge.target, []).append(edge.source)
        for user in shock_sources:
            shock_sources[user].sort()

        action_counts: dict[str, dict[str, int]] = {c: {} for c in MACM_ACTIONS}
        deletes = 0
        for event in events:
            category = categorize_action(event.action, platform)
            action_counts[category][event.action] = \
                action_counts[category].get(event.action, 0) + 1
            if category == "delete":
                deletes += 1
        action_choices = {}
        for category in MACM_ACTIONS:
            names = sorted(action_counts[category])
            weights = np.array([action_counts[category][a] for a in names], dtype=float)
            action_choices[category] = (names, weights)

        inboxes = {u: Inbox(self.m) for u in users}
        # network message information: the last m training messages seed
        # the inboxes of each sender's influencees (arrival tick 0)
        for event in events[-self.m:]:
            message = MacmMessage(
                event.actor,
                categorize_action(event.action, platform),
                event.content,
                event.message if event.message is not None else f"seed-{event.event_id}",
            )
            for receiver in followers.get(event.actor, ()):
                inboxes[receiver].push(0, message)

        self.state_ = MacmState(
            users=users,
            q=q, p=p, te_q=te_q, te_p=te_p,
            followers=followers,
            shock_sources=shock_sources,
            inboxes=inboxes,
            action_choices=action_choices,
            delete_share=deletes / len(events),
            noise_sigma=self.noise_sigma,
            platform=platform,
            tick_len=self.tick_len,
            forecast_t0=t0 + n_ticks * self.tick_len,
            rng=check_rng(self.seed),
        )
        self.endogenous_ = endo
        self.exogenous_ = exo
        return self

    def predict(self, horizon: int, shocks: Optional[Mapping[str, Sequence[int]]] = None
                ) -> list[Event]:
        """Simulate ``horizon`` ticks; ``shocks`` maps source -> per-tick bits."""
        self._check_fitted("state_")
        if horizon < 1:
            raise ValueError("horizon must be >= 1 tick")
        state = copy.deepcopy(self.state_)
        out: list[Event] = []
        for t in range(1, horizon + 1):
            bits = {}
            if shocks:
                for source, series in shocks.items():
                    arr = np.asarray(getattr(series, "bits", series))
                    if t - 1 < arr.size:
                        bits[source] = int(arr[t - 1])
            state, events = step(state, t, bits)
            out.extend(events)
        self.last_state_ = state
        return out
