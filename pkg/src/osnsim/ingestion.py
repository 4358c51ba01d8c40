"""Event-log loading, per-user activity binning, and binarization.

Batch only: a log is read once, sorted, and binned into a single shared
tick frame so that every per-user series lines up bin for bin (a
prerequisite for pairwise transfer entropy).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptyLog, FormatError
from .events import Event, Platform, event_from_obj, validate_event


@dataclass(frozen=True)
class Reject:
    """One rejected input line: kept, never silently dropped."""

    line: int
    reason: str
    raw: str

    def to_obj(self) -> dict:
        return {"line": self.line, "reason": self.reason, "raw": self.raw}


@dataclass
class LoadResult:
    events: list[Event]
    rejects: list[Reject]


def load_events(
    path,
    platform: Optional[Platform] = None,
    t_start: Optional[int] = None,
    t_end: Optional[int] = None,
    strict: bool = False,
) -> LoadResult:
    """Load a JSON-lines event log, sorted ascending by (timestamp, id).

    Malformed or invariant-violating lines land in the rejects report.
    With ``strict=True`` the first bad line raises FormatError instead.
    Optional filters drop (not reject) events outside the requested
    platform / time range.
    """
    events: list[Event] = []
    rejects: list[Reject] = []
    if platform is not None:
        platform = Platform(platform)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                event = event_from_obj(json.loads(line))
            except (json.JSONDecodeError, ValueError) as exc:
                if strict:
                    raise FormatError(f"line {lineno}: {exc}", line=lineno) from exc
                rejects.append(Reject(lineno, str(exc), line))
                continue
            result = validate_event(event)
            if not result.ok:
                if strict:
                    raise FormatError(
                        f"line {lineno}: {','.join(result.violations)}", line=lineno
                    )
                rejects.append(Reject(lineno, ",".join(result.violations), line))
                continue
            if platform is not None and event.platform != platform:
                continue
            if t_start is not None and event.timestamp < t_start:
                continue
            if t_end is not None and event.timestamp >= t_end:
                continue
            events.append(event)
    events.sort(key=lambda e: (e.timestamp, e.event_id))
    return LoadResult(events, rejects)


def write_rejects(path, rejects: Iterable[Reject]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for reject in rejects:
            fh.write(json.dumps(reject.to_obj(), sort_keys=True, ensure_ascii=False))
            fh.write("\n")


@dataclass
class ActivitySeries:
    """Per-owner event counts on the shared tick frame."""

    owner: str
    counts: np.ndarray  # int64, length = frame ticks
    tick_len: int
    t0: int


@dataclass
class BinarySeries:
    """0/1 activity indicator on the same tick frame as its source."""

    owner: str
    bits: np.ndarray  # uint8
    tick_len: int
    t0: int


def tick_frame(events: Sequence[Event], tick_len: int) -> tuple[int, int]:
    """(t0, n_ticks) of the global frame covering the log."""
    if not events:
        raise EmptyLog("cannot derive a tick frame from an empty log")
    t0 = min(e.timestamp for e in events)
    t_max = max(e.timestamp for e in events)
    n_ticks = (t_max - t0) // tick_len + 1
    return t0, int(n_ticks)


def bin_activity(
    events: Sequence[Event],
    tick_len: int,
    t0: Optional[int] = None,
    n_ticks: Optional[int] = None,
) -> dict[str, ActivitySeries]:
    """Bin per-actor activity into tick-indexed count series.

    All series share one frame aligned to the run's global t0, so the sum
    over all series equals the number of events.  Frame bounds can be
    pinned explicitly to align multiple logs.
    """
    if tick_len <= 0:
        raise ValueError("tick_len must be positive")
    if not events:
        raise EmptyLog("no events to bin")
    auto_t0, auto_n = tick_frame(events, tick_len)
    if t0 is None:
        t0 = auto_t0
    if n_ticks is None:
        n_ticks = (max(e.timestamp for e in events) - t0) // tick_len + 1
    series: dict[str, ActivitySeries] = {}
    for event in events:
        idx = (event.timestamp - t0) // tick_len
        if idx < 0 or idx >= n_ticks:
            raise ValueError(f"event {event.event_id} falls outside the pinned frame")
        entry = series.get(event.actor)
        if entry is None:
            entry = ActivitySeries(event.actor, np.zeros(n_ticks, dtype=np.int64), tick_len, t0)
            series[event.actor] = entry
        entry.counts[idx] += 1
    return series


def binarize(series: ActivitySeries, threshold: int = 1) -> BinarySeries:
    """bits[i] = 1 iff counts[i] >= threshold (threshold >= 1)."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    bits = (series.counts >= threshold).astype(np.uint8)
    return BinarySeries(series.owner, bits, series.tick_len, series.t0)
