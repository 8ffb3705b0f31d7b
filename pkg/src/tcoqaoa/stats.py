"""Approximation ratio and the nonparametric tests used to compare solvers.

The rank tests follow the usual large-sample formulas: Mann-Whitney U with a
tie-corrected normal approximation, Kruskal-Wallis with a tie-corrected H
referred to a chi-square distribution, and the Vargha-Delaney A12 effect size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_EPS = 1e-15
_MAX_ITER = 500


def approximation_ratio(fvals, fval_min: float) -> np.ndarray:
    """``fval / fval_min`` per entry; 1.0 means the best-known value was reached."""
    if not (np.isfinite(fval_min) and fval_min > 0):
        raise ValueError(f"fval_min must be positive, got {fval_min}")
    return np.asarray(fvals, dtype=np.float64) / fval_min


def rankdata(values) -> np.ndarray:
    """Ranks starting at 1; tied values share their mean rank."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    sorted_x = x[order]
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, sorted_x[1:] != sorted_x[:-1]])
    ends = np.r_[starts[1:], x.size]
    ranks = np.empty(x.size)
    ranks[order] = np.repeat((starts + ends + 1) / 2.0, ends - starts)
    return ranks


def _tie_term(ranks: np.ndarray) -> float:
    """``sum(t^3 - t)`` over groups of tied ranks."""
    _, counts = np.unique(ranks, return_counts=True)
    return float(np.sum(counts.astype(np.float64) ** 3 - counts))


def normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma ``Q(a, x)``.

    Series expansion below ``x < a + 1``, continued fraction (modified Lentz)
    above it.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    log_prefactor = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1:
        term = total = 1.0 / a
        ap = a
        for _ in range(_MAX_ITER):
            ap += 1
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return max(0.0, 1.0 - total * math.exp(log_prefactor))
    tiny = 1e-300
    b = x + 1 - a
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < _EPS:
            break
    return min(1.0, h * math.exp(log_prefactor))


def chi2_sf(x: float, dof: int) -> float:
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if x <= 0:
        return 1.0
    return regularized_gamma_q(dof / 2.0, x / 2.0)


@dataclass(frozen=True)
class RankTest:
    statistic: float
    p_value: float


def mann_whitney_u(a: Sequence[float], b: Sequence[float],
                   continuity: bool = True) -> RankTest:
    """Two-sided Mann-Whitney U test, normal approximation with tie correction.

    The reported statistic is ``min(U_a, U_b)``.  When every value is tied the
    test carries no information and the p-value is 1.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    n1, n2 = x.size, y.size
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    ranks = rankdata(np.concatenate([x, y]))
    u1 = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    u = min(u1, n1 * n2 - u1)
    n = n1 + n2
    variance = n1 * n2 / 12.0 * ((n + 1) - _tie_term(ranks) / (n * (n - 1)))
    if variance <= 0:
        return RankTest(u, 1.0)
    diff = abs(u - n1 * n2 / 2.0)
    if continuity:
        diff = max(diff - 0.5, 0.0)
    p = 2.0 * normal_sf(diff / math.sqrt(variance))
    return RankTest(u, min(1.0, p))


def a12(a: Sequence[float], b: Sequence[float]) -> float:
    """Vargha-Delaney A12: probability that a draw from ``a`` exceeds one from ``b``.

    Ties count one half.  For minimization, values below 0.5 favour ``a``.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    greater = np.sum(x[:, None] > y[None, :])
    equal = np.sum(x[:, None] == y[None, :])
    # integer counts keep a12(a, b) + a12(b, a) == 1 exact
    return float((2 * greater + equal) / (2 * x.size * y.size))


def kruskal_wallis(*groups: Sequence[float]) -> RankTest:
    """Kruskal-Wallis H test with tie correction; chi-square with k-1 dof."""
    samples = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(samples) < 2:
        raise ValueError("need at least two groups")
    if any(s.size == 0 for s in samples):
        raise ValueError("every group must be non-empty")
    pooled = np.concatenate(samples)
    n = pooled.size
    ranks = rankdata(pooled)
    bounds = np.cumsum([0] + [s.size for s in samples])
    h = 12.0 / (n * (n + 1)) * sum(
        ranks[lo:hi].sum() ** 2 / (hi - lo) for lo, hi in zip(bounds[:-1], bounds[1:])
    ) - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(ranks) / (n ** 3 - n)
    if correction <= 0:
        return RankTest(0.0, 1.0)
    h /= correction
    return RankTest(h, chi2_sf(h, len(samples) - 1))


@dataclass(frozen=True)
class Comparison:
    """Pairwise comparison of two algorithms on one metric (lower is better)."""

    first: str
    second: str
    mean_first: float
    mean_second: float
    u: float
    p_value: float
    a12: float

    @property
    def significant(self) -> bool:
        return self.p_value < 0.05

    @property
    def verdict(self) -> str:
        if not self.significant:
            return "no significant difference"
        return f"{self.first} better" if self.a12 < 0.5 else f"{self.second} better"


def compare(first: str, a: Sequence[float], second: str, b: Sequence[float]) -> Comparison:
    test = mann_whitney_u(a, b)
    return Comparison(first, second, float(np.mean(a)), float(np.mean(b)),
                      test.statistic, test.p_value, a12(a, b))


@dataclass(frozen=True)
class ComparisonReport:
    """Kruskal-Wallis across all groups plus every pairwise MWU/A12 comparison."""

    groups: tuple[str, ...]
    kruskal_wallis: RankTest
    pairwise: tuple[Comparison, ...]
    alpha: float = 0.05

    def to_dict(self) -> dict:
        return {
            "groups": list(self.groups),
            "alpha": self.alpha,
            "kruskal_wallis": {"H": self.kruskal_wallis.statistic,
                               "p_value": self.kruskal_wallis.p_value},
            "pairwise": [
                {"first": c.first, "second": c.second, "mean_first": c.mean_first,
                 "mean_second": c.mean_second, "U": c.u, "p_value": c.p_value,
                 "a12": c.a12, "significant": c.p_value < self.alpha}
                for c in self.pairwise
            ],
        }

    def format(self) -> str:
        kw = self.kruskal_wallis
        lines = [f"Kruskal-Wallis over {len(self.groups)} groups: "
                 f"H={kw.statistic:.4f} p={kw.p_value:.4g}"]
        for c in self.pairwise:
            mark = "*" if c.p_value < self.alpha else " "
            lines.append(
                f"{mark} {c.first} vs {c.second}: mean {c.mean_first:.6g} vs "
                f"{c.mean_second:.6g}, U={c.u:g} p={c.p_value:.4g} A12={c.a12:.3f}"
            )
        return "\n".join(lines)


def compare_groups(samples: dict[str, Sequence[float]], alpha: float = 0.05) -> ComparisonReport:
    """Full comparison of two or more labelled samples (lower values are better)."""
    if len(samples) < 2:
        raise ValueError(f"need at least two groups to compare, got {len(samples)}")
    names = tuple(samples)
    kw = kruskal_wallis(*(samples[k] for k in names))
    pairs = tuple(
        compare(a, samples[a], b, samples[b])
        for i, a in enumerate(names) for b in names[i + 1:]
    )
    return ComparisonReport(names, kw, pairs, alpha)
