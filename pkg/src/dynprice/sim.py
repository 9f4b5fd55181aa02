"""Forward simulation of controlled stock paths and paired policy comparisons.

Disturbance paths are drawn per path index from ``(root_seed, k)``, so two
policies compared on the same seed see identical realisations (common
random numbers) regardless of how paths are batched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .model import PricingProblem
from .policies import Policy


@dataclass(frozen=True)
class PathRecord:
    prices: np.ndarray
    stocks: np.ndarray
    sales: np.ndarray
    profit: float


@dataclass(frozen=True)
class PathBatch:
    """Many paths at once; arrays have one row per path."""

    prices: np.ndarray
    stocks: np.ndarray
    sales: np.ndarray
    profits: np.ndarray


@dataclass(frozen=True)
class ComparisonSamples:
    profits_a: np.ndarray
    profits_b: np.ndarray
    label_a: str = "A"
    label_b: str = "B"

    @property
    def n(self) -> int:
        return int(self.profits_a.size)


def simulate_path(p: PricingProblem, policy: Policy, w, path_id: int = 0) -> PathRecord:
    """Run one path from ``S_0 = 1`` with disturbances ``w`` (length T)."""
    w = np.asarray(w, dtype=float)
    if w.shape != (p.T,):
        raise ValueError(f"need {p.T} disturbance values, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("disturbances must be non-negative")
    batch = simulate_batch(p, policy, w[None, :], path_ids=np.array([path_id]))
    return PathRecord(batch.prices[0], batch.stocks[0], batch.sales[0], float(batch.profits[0]))


def simulate_batch(p: PricingProblem, policy: Policy, W: np.ndarray, t0: int = 0,
                   s0: float = 1.0, path_ids=None) -> PathBatch:
    """Simulate every row of ``W`` (columns are periods ``t0 .. T-1``)."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n, H = W.shape
    if H != p.T - t0:
        raise ValueError(f"expected {p.T - t0} disturbance columns, got {H}")
    ids = np.arange(n) if path_ids is None else np.asarray(path_ids)
    prices = np.empty((n, H))
    sold = np.empty((n, H))
    stocks = np.empty((n, H + 1))
    stocks[:, 0] = s0
    revenue = np.zeros(n)
    for j in range(H):
        S = stocks[:, j]
        a = np.clip(policy.prices(t0 + j, S, ids), p.a_min, p.a_max)
        q = np.minimum(S, p.demand(a) * W[:, j])
        prices[:, j] = a
        sold[:, j] = q
        stocks[:, j + 1] = S - q
        revenue += a * q
    profits = revenue - p.C * stocks[:, H]
    return PathBatch(prices, stocks, sold, profits)


def draw_paths(p: PricingProblem, n: int, root_seed: int, first: int = 0, periods=None) -> np.ndarray:
    """Disturbance paths ``first .. first+n-1``, one independent stream each."""
    periods = p.T if periods is None else periods
    out = np.empty((n, periods))
    for r in range(n):
        gen = rng.stream(root_seed, rng.SIM_PATH, first + r)
        out[r] = p.disturbance.sample(gen, periods)
    return out


def simulate(p: PricingProblem, policy: Policy, n_sim: int, root_seed: int) -> PathBatch:
    W = draw_paths(p, n_sim, root_seed)
    return simulate_batch(p, policy, W, path_ids=np.arange(n_sim))


def paired_compare(p: PricingProblem, policy_a: Policy, policy_b: Policy, n_sim: int,
                   root_seed: int) -> ComparisonSamples:
    """Profits of two policies on the same ``n_sim`` disturbance paths."""
    if n_sim < 1:
        raise ValueError(f"n_sim must be >= 1, got {n_sim}")
    W = draw_paths(p, n_sim, root_seed)
    ids = np.arange(n_sim)
    a = simulate_batch(p, policy_a, W, path_ids=ids).profits
    b = a.copy() if policy_b is policy_a else simulate_batch(p, policy_b, W, path_ids=ids).profits
    return ComparisonSamples(a, b, getattr(policy_a, "label", "A"), getattr(policy_b, "label", "B"))


def estimate_objective(p: PricingProblem, policy: Policy, t: int, s: float, n_sim: int,
                       seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of expected remaining profit from ``(t, s)`` and its standard error."""
    if n_sim < 2:
        raise ValueError("need at least two paths for a standard error")
    W = draw_paths(p, n_sim, seed, periods=p.T - t)
    profits = simulate_batch(p, policy, W, t0=t, s0=s, path_ids=np.arange(n_sim)).profits
    # centring first makes identical profits give an exact zero
    spread = (profits - profits[0]).std(ddof=1)
    return float(profits.mean()), float(spread / np.sqrt(n_sim))
