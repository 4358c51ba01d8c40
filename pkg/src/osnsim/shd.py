"""Sampled-historical-data replay and the model mixing strategy.

Replay takes the most recent window of training activity and tiles it
cyclically over the forecast horizon, preserving actor, action and
content while minting fresh event ids.  Because the default window is a
whole number of weeks, the shift is week-aligned and day-of-week phase
is preserved, which is the seasonality argument for replaying history at
all.

Mixing merges a generative model's stream for the active users with the
replay stream for the less-active users: every output event comes from
exactly one stream, decided by its author's side of the split.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .base import BaseSimulator, check_event_log
from .errors import EmptyWindow
from .events import Event
from .influence import UserSplit

SECONDS_PER_WEEK = 7 * 24 * 3600


@dataclass(frozen=True)
class ReplayWindow:
    """The most recent slice of training history, in ticks."""

    start: int            # inclusive tick
    end: int              # exclusive tick
    events: tuple[Event, ...]
    tick_len: int
    t0: int               # epoch of tick 0 of the frame the ticks refer to

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("window end must be after start")

    @property
    def length(self) -> int:
        return self.end - self.start


def extract_window(events: Sequence[Event], window_ticks: int, tick_len: int,
                   t0: Optional[int] = None) -> ReplayWindow:
    """The last ``window_ticks`` of a log, clamped to the log's frame.

    ``t0`` pins the tick frame explicitly (to align with a binning frame);
    by default it is the log's first timestamp.
    """
    events = check_event_log(events)
    if t0 is None:
        t0 = min(e.timestamp for e in events)
    n_ticks = (max(e.timestamp for e in events) - t0) // tick_len + 1
    start = max(0, n_ticks - window_ticks)
    window_events = tuple(
        e for e in events if (e.timestamp - t0) // tick_len >= start
    )
    return ReplayWindow(start=start, end=n_ticks, events=window_events,
                        tick_len=tick_len, t0=t0)


def replay(window: ReplayWindow, horizon: int,
           forecast_t0: Optional[int] = None, id_prefix: str = "shd") -> list[Event]:
    """Tile the window cyclically over ``horizon`` forecast ticks.

    An event at window-relative tick r reappears at forecast ticks
    r, r + L, r + 2L, ... (L = window length) until the horizon cuts the
    last cycle off.  Sub-tick offsets are preserved; ids are fresh.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1 tick")
    if not window.events:
        raise EmptyWindow("cannot replay an empty window")
    if forecast_t0 is None:
        forecast_t0 = window.t0 + window.end * window.tick_len
    out: list[Event] = []
    seq = 0
    cycles = -(-horizon // window.length)  # ceil
    for cycle in range(cycles):
        base_tick = cycle * window.length
        for event in window.events:
            rel = (event.timestamp - window.t0) // window.tick_len - window.start
            tick = base_tick + rel
            if tick >= horizon:
                continue
            offset = (event.timestamp - window.t0) % window.tick_len
            seq += 1
            out.append(replace(
                event,
                event_id=f"{id_prefix}-{seq:08d}",
                timestamp=forecast_t0 + tick * window.tick_len + offset,
            ))
    out.sort(key=lambda e: (e.timestamp, e.event_id))
    return out


@dataclass(frozen=True)
class MixConfig:
    """Target interaction shares handed to the replay stream.

    Full models hand ~10% of interactions to replay; influence-filtered
    models hand ~90%.
    """

    full_model_shd_fraction: float = 0.10
    ifn_shd_fraction: float = 0.90

    def __post_init__(self):
        for value in (self.full_model_shd_fraction, self.ifn_shd_fraction):
            if not 0.0 <= value <= 1.0:
                raise ValueError("mix fractions must be in [0, 1]")

    def fraction(self, ifn: bool) -> float:
        return self.ifn_shd_fraction if ifn else self.full_model_shd_fraction


def mix(model_events: Sequence[Event], shd_events: Sequence[Event],
        split: UserSplit, cfg: MixConfig = MixConfig()) -> list[Event]:
    """Merge the two streams along the user split.

    Output = model events authored by active users + replay events
    authored by less-active users, sorted by timestamp.  No event crosses
    streams, so |output| is exactly the sum of the two restricted counts.
    """
    merged = [e for e in model_events if e.actor in split.active]
    merged.extend(e for e in shd_events if e.actor in split.less_active)
    merged.sort(key=lambda e: (e.timestamp, e.event_id))
    return merged


class HistoricalReplayModel(BaseSimulator):
    """Estimator wrapper: fit captures the trailing window, predict tiles it."""

    def __init__(self, window_weeks=4, tick_len=3600, window_ticks=None):
        self.window_weeks = window_weeks
        self.tick_len = tick_len
        self.window_ticks = window_ticks  # overrides window_weeks when set

    def fit(self, events: Sequence[Event], y=None):
        ticks = self.window_ticks
        if ticks is None:
            ticks = max(1, int(round(self.window_weeks * SECONDS_PER_WEEK / self.tick_len)))
        self.window_ = extract_window(events, ticks, self.tick_len)
        return self

    def predict(self, horizon: int) -> list[Event]:
        self._check_fitted("window_")
        return replay(self.window_, horizon)
