"""Summary statistics for paired profit samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import ComparisonSamples


def quantile(xs, level: float) -> float:
    """Linear interpolation between order statistics at rank ``level * (n - 1)``."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"quantile level must be in [0, 1], got {level}")
    return float(np.quantile(xs, level, method="linear"))


def relative_l2(a, b) -> float:
    """``||a - b||_2 / ||a||_2`` under the empirical measure."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("need two non-empty samples of equal length")
    denom = np.sqrt(np.mean(a * a))
    if denom == 0:
        raise ZeroDivisionError("reference sample has zero L2 norm")
    return float(np.sqrt(np.mean((a - b) ** 2)) / denom)


@dataclass(frozen=True)
class ComparisonStats:
    mean_diff: float
    q05: float
    median: float
    q95: float
    rel_l2: float
    frac_a_better: float
    frac_b_better: float
    n: int
    n_excluded: int = 0


def summarise(samples: ComparisonSamples) -> ComparisonStats:
    """Quantiles of ``1 - P_B / P_A`` plus distance and win-rate statistics.

    Pairs with a zero reference profit are left out of the quantile columns and
    counted in ``n_excluded``.
    """
    a, b = np.asarray(samples.profits_a), np.asarray(samples.profits_b)
    if a.size < 2:
        raise ValueError("need at least two pairs")
    keep = a != 0
    rel = 1.0 - b[keep] / a[keep]
    if rel.size == 0:
        raise ValueError("every reference profit is zero")
    return ComparisonStats(
        mean_diff=float(np.mean(a - b)),
        q05=quantile(rel, 0.05),
        median=quantile(rel, 0.5),
        q95=quantile(rel, 0.95),
        rel_l2=relative_l2(a, b),
        frac_a_better=float(np.mean(a > b)),
        frac_b_better=float(np.mean(b > a)),
        n=int(a.size),
        n_excluded=int(a.size - rel.size),
    )


def histogram(xs, bins: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width bins over ``[min, max]``; returns ``(edges, counts)``."""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0 or bins < 1:
        raise ValueError("need a non-empty sample and at least one bin")
    counts, edges = np.histogram(xs, bins=bins)
    return edges, counts
