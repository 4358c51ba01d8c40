"""External-shock detection and the static exogenous influence network.

An exogenous series (price, news volume, ...) is turned into a binary
anomaly mask in three steps: a zero-phase high-pass Butterworth filter
applied as frequency-domain multiplication by the analytic magnitude
response (isolates fast components and kills trend/DC), a moving-window
magnitude filter implemented as a rolling z-score of the absolute
filtered signal, and binary digitization of the z-scores at a threshold.
Shock-to-user influence then reuses the transfer-entropy machinery with
shock masks as sources.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadConfig, SeriesTooShort
from .influence import (
    DEFAULT_LAG,
    DEFAULT_NTE_THRESHOLD,
    InfluenceEdge,
    InfluenceNetwork,
    normalized_te,
    transfer_entropy,
)
from .ingestion import BinarySeries

#: Anomaly masks share the BinarySeries representation.
AnomalyMask = BinarySeries


@dataclass
class ShockSeries:
    source: str
    values: np.ndarray
    tick_len: int
    t0: int


@dataclass(frozen=True)
class ShockConfig:
    cutoff_frac: float = 0.1   # normalized cutoff, cycles/sample, in (0, 0.5]
    order: int = 2
    window: int = 24           # rolling z-score window, ticks
    z_threshold: float = 3.0

    def check(self) -> None:
        if not 0.0 < self.cutoff_frac <= 0.5:
            raise BadConfig("cutoff_frac must be in (0, 0.5]")
        if self.order < 1:
            raise BadConfig("order must be >= 1")
        if self.window < 1:
            raise BadConfig("window must be >= 1")
        if self.z_threshold <= 0:
            raise BadConfig("z_threshold must be positive")


def butterworth_response(
    freq_frac: float, cutoff_frac: float, order: int, kind: str = "high"
) -> float:
    """Squared magnitude |H|^2 of an order-n Butterworth filter.

    Low-pass: 1 / (1 + (f/f_c)^(2n)); high-pass: 1 / (1 + (f_c/f)^(2n)).
    Frequencies are in cycles per sample, so 0.5 is Nyquist.  |H|^2 = 0.5
    at f = f_c for any order (the -3.01 dB point).
    """
    if not 0.0 < freq_frac <= 0.5:
        raise BadConfig("freq_frac must be in (0, 0.5]")
    if not 0.0 < cutoff_frac <= 0.5:
        raise BadConfig("cutoff_frac must be in (0, 0.5]")
    if order < 1:
        raise BadConfig("order must be >= 1")
    if kind == "low":
        ratio = freq_frac / cutoff_frac
    elif kind == "high":
        ratio = cutoff_frac / freq_frac
    else:
        raise BadConfig(f"kind must be 'low' or 'high', got {kind!r}")
    return 1.0 / (1.0 + ratio ** (2 * order))


def highpass_filter(values: np.ndarray, cutoff_frac: float, order: int) -> np.ndarray:
    """Zero-phase high-pass: FT, multiply by the Butterworth magnitude, invert.

    The series is extended by odd reflection before the transform so the
    circular wrap-around seam stays slope-continuous; without it the seam
    discontinuity leaks broadband energy into the filtered edges.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    pad = min(max(8, n // 2), n - 1)
    extended = np.pad(x, (pad, pad), mode="reflect", reflect_type="odd")
    m = extended.size
    spectrum = np.fft.rfft(extended)
    freqs = np.fft.rfftfreq(m, d=1.0)
    gain = np.zeros_like(freqs)
    nonzero = freqs > 0
    gain[nonzero] = np.sqrt(
        1.0 / (1.0 + (cutoff_frac / freqs[nonzero]) ** (2 * order))
    )
    # DC gain is exactly zero for a high-pass filter
    return np.fft.irfft(spectrum * gain, m)[pad:pad + n]


#: Windows whose std falls below this fraction of the series peak are held
#: at the floor, which keeps the z-score well-posed on noise-free baselines
#: (filter ringing over numerically-flat history would otherwise explode).
Z_STD_REL_FLOOR = 0.01


def rolling_zscore(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing-window z-score with shrinking windows at the left edge.

    z[i] compares values[i] against the mean/std (population) of
    values[max(0, i-window+1) : i+1].  The std is floored at
    Z_STD_REL_FLOOR * max(values); all-zero input yields all-zero z.
    """
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n == 0:
        return x.copy()
    csum = np.concatenate([[0.0], np.cumsum(x)])
    csq = np.concatenate([[0.0], np.cumsum(x * x)])
    idx = np.arange(n)
    lo = np.maximum(0, idx - window + 1)
    cnt = idx - lo + 1
    s = csum[idx + 1] - csum[lo]
    s2 = csq[idx + 1] - csq[lo]
    mean = s / cnt
    var = np.maximum(s2 / cnt - mean * mean, 0.0)
    std = np.sqrt(var)
    floor = Z_STD_REL_FLOOR * float(np.abs(x).max())
    eff = np.maximum(std, floor)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(eff > 0, (x - mean) / np.where(eff > 0, eff, 1.0), 0.0)
    return z


def detect_shocks(series: ShockSeries, cfg: ShockConfig = ShockConfig()) -> AnomalyMask:
    """Binary anomaly mask: 1 where the filtered magnitude spikes past the z threshold."""
    cfg.check()
    values = np.asarray(series.values, dtype=np.float64)
    if values.size < 8:
        raise SeriesTooShort(f"need at least 8 ticks, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise BadConfig("shock series must be finite")
    filtered = highpass_filter(values, cfg.cutoff_frac, cfg.order)
    z = rolling_zscore(np.abs(filtered), cfg.window)
    bits = (z >= cfg.z_threshold).astype(np.uint8)
    return AnomalyMask(series.source, bits, series.tick_len, series.t0)


def load_shock_csv(path, source: Optional[str] = None, tick_len: int = 3600,
                   t0: Optional[int] = None, n_ticks: Optional[int] = None) -> ShockSeries:
    """Read a `ts,value` CSV into a tick-aligned series.

    Multiple rows in one tick are averaged; empty ticks are forward-filled
    so slow exogenous signals stay continuous on the event tick frame.
    """
    rows: list[tuple[int, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "ts,value":
            raise ValueError(f"unexpected header {header!r}, want 'ts,value'")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            ts_str, value_str = line.split(",")
            rows.append((int(ts_str), float(value_str)))
    if not rows:
        raise ValueError(f"no rows in {path}")
    rows.sort()
    if t0 is None:
        t0 = rows[0][0]
    if n_ticks is None:
        n_ticks = (rows[-1][0] - t0) // tick_len + 1
    sums = np.zeros(n_ticks)
    counts = np.zeros(n_ticks)
    for ts, value in rows:
        idx = (ts - t0) // tick_len
        if 0 <= idx < n_ticks:
            sums[idx] += value
            counts[idx] += 1
    values = np.full(n_ticks, np.nan)
    np.divide(sums, counts, out=values, where=counts > 0)
    # forward-fill gaps, back-fill any leading gap
    last = np.nan
    for i in range(n_ticks):
        if np.isnan(values[i]):
            values[i] = last
        else:
            last = values[i]
    first_valid = values[~np.isnan(values)]
    if first_valid.size == 0:
        raise ValueError(f"no in-frame rows in {path}")
    values[np.isnan(values)] = first_valid[0]
    name = source if source is not None else str(path)
    return ShockSeries(name, values, tick_len, t0)


def write_masks(path, masks: Sequence[AnomalyMask]) -> None:
    """Sparse JSON-lines mask dump: one `{source, tick, bit}` row per 1-bit."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for mask in masks:
            for tick in np.flatnonzero(mask.bits):
                fh.write(json.dumps(
                    {"bit": 1, "source": mask.owner, "tick": int(tick)}, sort_keys=True
                ))
                fh.write("\n")


def read_masks(path, n_ticks: int, tick_len: int = 3600, t0: int = 0) -> dict[str, AnomalyMask]:
    masks: dict[str, AnomalyMask] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            source = str(obj["source"])
            if source not in masks:
                masks[source] = AnomalyMask(source, np.zeros(n_ticks, dtype=np.uint8), tick_len, t0)
            tick = int(obj["tick"])
            if 0 <= tick < n_ticks and int(obj["bit"]):
                masks[source].bits[tick] = 1
    return masks


def build_exogenous_network(
    masks: Sequence[AnomalyMask],
    user_series: Sequence[BinarySeries],
    lag: int = DEFAULT_LAG,
    nte_threshold: float = DEFAULT_NTE_THRESHOLD,
) -> InfluenceNetwork:
    """Static exogenous network: edge shock->user iff nte >= threshold."""
    net = InfluenceNetwork()
    for mask in masks:
        net.activity[mask.owner] = int(np.asarray(mask.bits).sum())
    for series in user_series:
        net.activity.setdefault(series.owner, int(np.asarray(series.bits).sum()))
    for mask in sorted(masks, key=lambda m: m.owner):
        src = np.asarray(mask.bits, dtype=np.uint8)
        for series in sorted(user_series, key=lambda s: s.owner):
            dst = np.asarray(series.bits, dtype=np.uint8)
            if src.size < lag + 2 or src.size != dst.size:
                continue
            nte = normalized_te(src, dst, lag)
            if nte >= nte_threshold:
                te = transfer_entropy(src, dst, lag)
                net.edges.append(InfluenceEdge(mask.owner, series.owner, te, nte))
    return net
