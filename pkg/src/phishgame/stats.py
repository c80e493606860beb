"""Small-sample nonparametric statistics.

Spearman's rank correlation is authored here (tie-corrected, Pearson on
average ranks) because the test suite validates it against an independent
brute-force pair-counting oracle; Wilcoxon signed-rank p-values come from
scipy, which is standard machinery rather than anything this package
contributes.
"""

from __future__ import annotations

import math
from typing import Sequence

from scipy import stats as _scipy_stats


def average_ranks(values: Sequence[float]) -> list[float]:
    """Ranks 1..n with ties sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """(rho, two-sided p) of Spearman's rank correlation.

    rho is Pearson's correlation of the average ranks; p uses the
    t-approximation with n-2 degrees of freedom.  Returns (nan, nan) for
    n < 3 or a constant series.
    """
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    n = len(x)
    if n < 3:
        return (float("nan"), float("nan"))
    rx = average_ranks(x)
    ry = average_ranks(y)
    mx = sum(rx) / n
    my = sum(ry) / n
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0.0 or syy == 0.0:
        return (float("nan"), float("nan"))
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    rho = sxy / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0:
        return (rho, 0.0)
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), n - 2))
    return (rho, p)


def wilcoxon_signed_rank(diffs: Sequence[float]) -> tuple[float, float]:
    """(statistic, two-sided p) of the one-sample signed-rank test.

    Zero differences are dropped (Wilcoxon's original treatment); if all
    differences are zero the test is vacuous and p = 1.
    """
    nonzero = [d for d in diffs if d != 0.0]
    if not nonzero:
        return (0.0, 1.0)
    res = _scipy_stats.wilcoxon(nonzero)
    return (float(res.statistic), float(res.pvalue))
