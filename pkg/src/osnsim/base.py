"""Estimator base class and shared input-validation helpers.

The generative models follow the scikit-learn estimator contract:
constructor arguments are stored verbatim (get_params/set_params/clone
all work), ``fit`` consumes a training event log and derives state into
trailing-underscore attributes, and ``predict`` rolls the fitted model
forward over a forecast horizon, returning simulated events.  That keeps
the simulators composable with the wider ecosystem (parameter sweeps,
cloning per seed, pipelines that treat a simulator as a step).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .errors import EmptyLog, NotFittedError
from .events import Event, Platform


def check_event_log(events: Sequence[Event], require_sorted: bool = False) -> list[Event]:
    """Validate and normalize a training log: non-empty, sorted ascending."""
    events = list(events)
    if not events:
        raise EmptyLog("model requires a non-empty training log")
    if require_sorted:
        for prev, cur in zip(events, events[1:]):
            if cur.timestamp < prev.timestamp:
                raise ValueError("event log must be sorted ascending by timestamp")
    else:
        events.sort(key=lambda e: (e.timestamp, e.event_id))
    return events


def check_rng(seed) -> np.random.Generator:
    """Accept an int seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def infer_platform(events: Sequence[Event]) -> Platform:
    """Majority platform of a log (logs are typically single-platform)."""
    counts: dict[Platform, int] = {}
    for event in events:
        counts[event.platform] = counts.get(event.platform, 0) + 1
    return max(sorted(counts.items(), key=lambda kv: kv[0].value), key=lambda kv: kv[1])[0]


class BaseSimulator(BaseEstimator):
    """fit(events) -> self; predict(horizon_ticks) -> list[Event]."""

    def fit(self, events: Sequence[Event], y=None):
        raise NotImplementedError

    def predict(self, horizon: int) -> list[Event]:
        raise NotImplementedError

    def simulate(self, horizon: int) -> list[Event]:
        """Alias for predict; reads better in simulation scripts."""
        return self.predict(horizon)

    def _check_fitted(self, attr: str) -> None:
        if not hasattr(self, attr):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted; call fit(events) first"
            )
