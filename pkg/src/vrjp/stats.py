"""Statistical test utilities: exact path histograms, total-variation and
Kolmogorov-Smirnov verdicts, batch path surgery, and a distance-correlation
permutation test.

Histograms key on exact vertex sequences (integer tuples), never hashes of
them, so total-variation numbers are exact given the counts.  All thresholds
are computed from sample sizes and support sizes by the formulas documented
here and recorded in the verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class TestVerdict:
    name: str
    statistic: float
    threshold: float
    passed: bool
    n: int
    notes: str = ""


def path_histogram(x: np.ndarray) -> dict:
    """Counts of exact row tuples of an integer path array."""
    x = np.asarray(x)
    rows, counts = np.unique(x, axis=0, return_counts=True)
    return {tuple(int(v) for v in row): int(c) for row, c in zip(rows, counts)}


def two_sample_tv(hist_a: dict, hist_b: dict, n_a: int, n_b: int,
                  name: str = "two-sample-tv") -> TestVerdict:
    """Total variation between two empirical laws over the union support.

    Passes when TV <= 3 (sqrt(K/n_a) + sqrt(K/n_b)) with K the union
    support size."""
    keys = set(hist_a) | set(hist_b)
    tv = 0.5 * sum(abs(hist_a.get(k, 0) / n_a - hist_b.get(k, 0) / n_b)
                   for k in keys)
    k = len(keys)
    threshold = 3.0 * (math.sqrt(k / n_a) + math.sqrt(k / n_b))
    return TestVerdict(name=name, statistic=tv, threshold=threshold,
                       passed=tv <= threshold, n=n_a + n_b,
                       notes=f"support={k}")


def tv_against_exact(hist: dict, law: dict, n: int,
                     name: str = "tv-vs-exact") -> TestVerdict:
    """Total variation of an empirical histogram against an exact law."""
    keys = set(hist) | set(law)
    tv = 0.5 * sum(abs(hist.get(k, 0) / n - law.get(k, 0.0)) for k in keys)
    k = len(keys)
    threshold = 3.0 * math.sqrt(k / n)
    return TestVerdict(name=name, statistic=tv, threshold=threshold,
                       passed=tv <= threshold, n=n, notes=f"support={k}")


def tv_exact(law_a: dict, law_b: dict) -> float:
    keys = set(law_a) | set(law_b)
    return 0.5 * sum(abs(law_a.get(k, 0.0) - law_b.get(k, 0.0)) for k in keys)


def ks_two_sample(a: np.ndarray, b: np.ndarray, level: float = 0.01,
                  name: str = "ks-2sample") -> TestVerdict:
    res = sps.ks_2samp(a, b, method="asymp")
    return TestVerdict(name=name, statistic=float(res.statistic),
                       threshold=level, passed=bool(res.pvalue >= level),
                       n=len(a) + len(b), notes=f"pvalue={res.pvalue:.5g}")


def ks_against_cdf(a: np.ndarray, cdf, level: float = 0.01,
                   name: str = "ks-cdf") -> TestVerdict:
    res = sps.kstest(a, cdf)
    return TestVerdict(name=name, statistic=float(res.statistic),
                       threshold=level, passed=bool(res.pvalue >= level),
                       n=len(a), notes=f"pvalue={res.pvalue:.5g}")


def chi2_binned(counts_obs: np.ndarray, probs: np.ndarray, level: float = 0.01,
                name: str = "chi2") -> TestVerdict:
    """Chi-square of observed bin counts against exact bin probabilities."""
    counts_obs = np.asarray(counts_obs, dtype=np.float64)
    n = counts_obs.sum()
    expected = np.asarray(probs) * n
    keep = expected >= 5.0
    obs = np.append(counts_obs[keep], counts_obs[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] <= 0:
        if obs[-1] > 0:
            return TestVerdict(name=name, statistic=float("inf"),
                               threshold=level, passed=False, n=int(n),
                               notes="mass observed outside the support")
        obs, exp = obs[:-1], exp[:-1]
    if len(obs) < 2:
        return TestVerdict(name=name, statistic=0.0, threshold=level,
                           passed=True, n=int(n),
                           notes="single effective bin (deterministic law)")
    exp = exp * (obs.sum() / exp.sum())
    stat, pvalue = sps.chisquare(obs, exp)
    return TestVerdict(name=name, statistic=float(stat), threshold=level,
                       passed=bool(pvalue >= level), n=int(n),
                       notes=f"pvalue={pvalue:.5g}, bins={len(obs)}")


def chi2_two_sample(counts_a: np.ndarray, counts_b: np.ndarray,
                    level: float = 0.01, name: str = "chi2-2sample") -> TestVerdict:
    table = np.vstack([np.asarray(counts_a), np.asarray(counts_b)])
    keep = table.sum(axis=0) > 0
    stat, pvalue, _, _ = sps.chi2_contingency(table[:, keep])
    return TestVerdict(name=name, statistic=float(stat), threshold=level,
                       passed=bool(pvalue >= level),
                       n=int(table.sum()), notes=f"pvalue={pvalue:.5g}")


def restrict_collapse_batch(x: np.ndarray, in_subset: np.ndarray, depth: int,
                            collapse: bool = True):
    """First ``depth + 1`` restricted (optionally collapsed) symbols per row.

    ``in_subset`` is a boolean mask over vertex indices; row starts must lie
    inside.  Returns (prefixes (N, depth+1) int32, completed mask); rows that
    never accumulate depth+1 symbols keep a -1 padding and report False.
    """
    x = np.asarray(x)
    n_rows, n_cols = x.shape
    out = np.full((n_rows, depth + 1), -1, dtype=np.int32)
    out[:, 0] = x[:, 0]
    if not np.all(in_subset[x[:, 0]]):
        raise ValueError("all paths must start inside the subset")
    filled = np.ones(n_rows, dtype=np.int64)
    last = x[:, 0].astype(np.int64)
    rows = np.arange(n_rows)
    for t in range(1, n_cols):
        s = x[:, t].astype(np.int64)
        visit = in_subset[s] & (filled <= depth)
        if collapse:
            visit &= s != last
        hit = rows[visit]
        out[hit, filled[hit]] = s[hit]
        filled[hit] += 1
        upd = in_subset[s]
        last[upd] = s[upd]
    return out, filled == depth + 1


def histogram_with_incomplete(prefixes: np.ndarray, completed: np.ndarray) -> dict:
    """Histogram of completed prefix rows; incomplete mass keyed "incomplete"."""
    hist = path_histogram(prefixes[completed])
    n_bad = int((~completed).sum())
    if n_bad:
        hist["incomplete"] = n_bad
    return hist


def distance_correlation(x: np.ndarray, y: np.ndarray) -> float:
    """Sample distance correlation of two 1-d variables."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    def centered(v):
        d = np.abs(v[:, None] - v[None, :])
        return d - d.mean(axis=0) - d.mean(axis=1)[:, None] + d.mean()

    ax, ay = centered(x), centered(y)
    dcov2 = (ax * ay).mean()
    dvar_x = (ax * ax).mean()
    dvar_y = (ay * ay).mean()
    if dvar_x <= 0 or dvar_y <= 0:
        return 0.0
    return math.sqrt(max(dcov2, 0.0) / math.sqrt(dvar_x * dvar_y))


def dcor_permutation_test(x: np.ndarray, y: np.ndarray,
                          rng: np.random.Generator, n_perm: int = 199,
                          level: float = 0.01,
                          name: str = "dcor-perm") -> TestVerdict:
    """Permutation test of independence based on distance correlation."""
    obs = distance_correlation(x, y)
    hits = 1
    for _ in range(n_perm):
        if distance_correlation(x, rng.permutation(y)) >= obs:
            hits += 1
    pvalue = hits / (n_perm + 1)
    return TestVerdict(name=name, statistic=obs, threshold=level,
                       passed=pvalue >= level, n=len(x),
                       notes=f"pvalue={pvalue:.5g}, permutations={n_perm}")
