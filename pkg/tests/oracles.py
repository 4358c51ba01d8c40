"""Independent brute-force oracles used to derive and pin expected values.

Everything here is deliberately written from first principles (plain
loops, dict counting, direct definitions) and never calls into the
package, so a test comparing the two paths is a real cross-check.
"""

from __future__ import annotations

import math
from collections import Counter


def te_bruteforce(src, dst, lag=1):
    """Transfer entropy src->dst by direct definition over triple counts."""
    n = len(dst) - lag
    triples = Counter()
    for t in range(lag, len(dst)):
        triples[(dst[t], dst[t - lag], src[t - lag])] += 1
    pairs_yp_xp = Counter()
    pairs_yt_yp = Counter()
    singles_yp = Counter()
    for (yt, yp, xp), c in triples.items():
        pairs_yp_xp[(yp, xp)] += c
        pairs_yt_yp[(yt, yp)] += c
        singles_yp[yp] += c
    te = 0.0
    for (yt, yp, xp), c in triples.items():
        p_joint = c / n
        p_cond_full = c / pairs_yp_xp[(yp, xp)]
        p_cond_self = pairs_yt_yp[(yt, yp)] / singles_yp[yp]
        te += p_joint * math.log(p_cond_full / p_cond_self)
    return te


def conditional_entropy_bruteforce(dst, lag=1):
    """H(dst_t | dst_{t-lag}) in nats by direct definition."""
    n = len(dst) - lag
    pairs = Counter()
    singles = Counter()
    for t in range(lag, len(dst)):
        pairs[(dst[t], dst[t - lag])] += 1
        singles[dst[t - lag]] += 1
    h = 0.0
    for (yt, yp), c in pairs.items():
        h -= (c / n) * math.log(c / singles[yp])
    return h


def nte_bruteforce(src, dst, lag=1):
    denom = conditional_entropy_bruteforce(dst, lag)
    if denom <= 0.0:
        return 0.0
    return te_bruteforce(src, dst, lag) / denom


def update_node_transcription(action_count, age, fitness, last_active, t_c, acted,
                              eps=1e-6):
    """Literal transcription of the age/fitness update equations.

    Acting:  a <- a + (1 - (t_c - t_p) * F);  |A| <- |A| + 1;  t_p <- t_c
    Idle:    a <- a + (1 - (t_c - t_p) * (t_c + 1))
    Then:    a <- max(a, eps);  F <- |A| / a
    """
    dt = t_c - last_active
    if acted:
        action_count = action_count + 1
        age = age + (1.0 - dt * fitness)
        last_active = t_c
    else:
        age = age + (1.0 - dt * (t_c + 1.0))
    if age < eps:
        age = eps
    return action_count, age, action_count / age, last_active


def update_q_straightline(prev, te, eps):
    value = prev + eps / (1.0 + te)
    if value < 0.0:
        return 0.0
    if value > 1.0:
        return 1.0
    return value


def update_p_straightline(prev_map, te_map, eps_map):
    miss = 1.0
    for key in prev_map:
        miss *= 1.0 - update_q_straightline(prev_map[key], te_map[key], eps_map[key])
    return 1.0 - miss


def response_probability_straightline(q, p):
    return 1.0 - (1.0 - q) * (1.0 - p)


def gini_bruteforce(values):
    """Mean-absolute-difference form: sum |xi - xj| / (2 n^2 mean)."""
    n = len(values)
    mean = sum(values) / n
    if mean == 0.0:
        return 0.0
    acc = 0.0
    for a in values:
        for b in values:
            acc += abs(a - b)
    return acc / (2.0 * n * n * mean)


def ks_bruteforce(a, b):
    """Sup of |ECDF_a - ECDF_b| over every sample point."""
    best = 0.0
    for x in list(a) + list(b):
        fa = sum(1 for v in a if v <= x) / len(a)
        fb = sum(1 for v in b if v <= x) / len(b)
        best = max(best, abs(fa - fb))
    return best


def jsd_bruteforce(pdf_a, pdf_b):
    sa, sb = sum(pdf_a), sum(pdf_b)
    a = [x / sa for x in pdf_a]
    b = [x / sb for x in pdf_b]
    out = 0.0
    for pa, pb in zip(a, b):
        m = 0.5 * (pa + pb)
        if pa > 0:
            out += 0.5 * pa * math.log(pa / m)
        if pb > 0:
            out += 0.5 * pb * math.log(pb / m)
    return out


def rbo_bruteforce(rank_a, rank_b, p):
    """Depth-by-depth prefix-overlap summation (extrapolated form)."""
    k = min(len(rank_a), len(rank_b))
    if k == 0:
        return 1.0 if not rank_a and not rank_b else 0.0
    acc = 0.0
    for d in range(1, k + 1):
        overlap = len(set(rank_a[:d]) & set(rank_b[:d]))
        acc += (overlap / d) * p ** d
    x_k = len(set(rank_a[:k]) & set(rank_b[:k]))
    return (x_k / k) * p ** k + (1.0 - p) / p * acc


def butterworth_squared(freq, cutoff, order, kind):
    if kind == "low":
        return 1.0 / (1.0 + (freq / cutoff) ** (2 * order))
    return 1.0 / (1.0 + (cutoff / freq) ** (2 * order))
