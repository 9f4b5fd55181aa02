"""Backward induction for the Bellman equation on an equispaced stock grid.

Expectations use per-node quadrature (Monte Carlo draws for the Beta
disturbance, exact atoms for discrete ones). The inner maximisation scans an
equispaced price grid and then refines around the best candidate with golden
section search; the same draws are reused for every candidate price at a
node, so the argmax is a deterministic function of the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .model import PricingProblem, terminal_value


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    K: int = 201
    M: int = 201
    n_exp: int = 1000
    refine_iters: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.K < 2:
            raise ConfigError(f"K must be >= 2, got {self.K}")
        if self.M < 2:
            raise ConfigError(f"M must be >= 2, got {self.M}")
        if self.n_exp < 1:
            raise ConfigError(f"n_exp must be >= 1, got {self.n_exp}")
        if self.refine_iters < 0:
            raise ConfigError(f"refine_iters must be >= 0, got {self.refine_iters}")


def state_grid(K: int) -> np.ndarray:
    """``K`` equispaced stock levels from 0 to 1 inclusive."""
    if K < 2:
        raise ConfigError(f"grid needs at least two points, got {K}")
    return np.linspace(0.0, 1.0, K)


def interpolate(grid: np.ndarray, row_values: np.ndarray, s):
    """Piecewise-linear interpolant through ``(grid, row_values)`` at ``s``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0) or np.any(s_arr > 1.0) or np.any(np.isnan(s_arr)):
        raise ValueError(f"stock must lie in [0, 1], got {s}")
    out = np.interp(s_arr, grid, row_values)
    return float(out) if out.ndim == 0 else out


def expected_stage_value(p: PricingProblem, s: float, a: float, w: np.ndarray,
                         next_row: np.ndarray, grid: np.ndarray, weights=None) -> float:
    """Quadrature estimate of ``E[a Q + v(t+1, s - Q)]`` over disturbance nodes ``w``."""
    w = np.asarray(w, dtype=float)
    if weights is None:
        weights = np.full(w.shape, 1.0 / w.size)
    sold = np.minimum(s, p.demand(a) * w)
    nxt = np.clip(s - sold, 0.0, 1.0)
    return float(np.sum(weights * (a * sold + interpolate(grid, next_row, nxt))))


@dataclass(frozen=True)
class ValuePolicyTable:
    """Gridded value function ``values[i, t]`` (t = 0..T) and policy ``policy[i, t]`` (t < T)."""

    grid: np.ndarray
    values: np.ndarray
    policy: np.ndarray
    problem: PricingProblem

    @property
    def T(self) -> int:
        return self.policy.shape[1]

    def value(self, t: int, s):
        return interpolate(self.grid, self.values[:, t], s)


def _node_quadrature(p: PricingProblem, cfg: SolverConfig, t: int, K: int):
    """Disturbance nodes for every grid point at period ``t``; shape (K, n)."""
    rows = []
    wts = None
    for i in range(K):
        w, wts = p.disturbance.quadrature(rng.stream(cfg.seed, rng.DP_NODE, t, i), cfg.n_exp)
        rows.append(w)
    return np.ascontiguousarray(np.vstack(rows)), np.ascontiguousarray(wts)


def solve_bellman(p: PricingProblem, cfg: SolverConfig | None = None,
                  backend: str | None = None) -> ValuePolicyTable:
    """Solve the pricing problem by backward induction.

    ``backend`` forces a kernel implementation ('numba' or 'numpy'); by default
    the module-level selection applies.
    """
    cfg = cfg or SolverConfig()
    impl = kernels.backend(backend) if backend else kernels
    grid = state_grid(cfg.K)
    cand = np.linspace(p.a_min, p.a_max, cfg.M)
    values = np.empty((cfg.K, p.T + 1))
    policy = np.empty((cfg.K, p.T))
    values[:, p.T] = terminal_value(p, grid)
    q1, q2 = float(p.demand.q1), float(p.demand.q2)
    for t in range(p.T - 1, -1, -1):
        W, wts = _node_quadrature(p, cfg, t, cfg.K)
        v, a = impl.bellman_step(grid, np.ascontiguousarray(values[:, t + 1]), W, wts,
                                 cand, q1, q2, int(cfg.refine_iters))
        # nothing to sell at s = 0: value is the continuation, price convention a_max
        v[0] = values[0, t + 1]
        a[0] = p.a_max
        values[:, t] = v
        policy[:, t] = np.clip(a, p.a_min, p.a_max)
    return ValuePolicyTable(grid=grid, values=values, policy=policy, problem=p)
