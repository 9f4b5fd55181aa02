"""Pricing policies: maps ``(t, s) -> price`` within the admissible interval.

Every policy has a scalar ``price(t, s)`` and a batched ``prices(t, s, path_ids)``
used by the simulator. ``path_ids`` only matters for policies that draw their
own samples (OLFC), whose inner randomness is keyed by ``(seed, path, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, rng
from .dp import ValuePolicyTable, interpolate
from .model import PricingProblem

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Policy:
    label = "policy"

    def price(self, t: int, s: float) -> float:
        raise NotImplementedError

    def prices(self, t: int, s: np.ndarray, path_ids: np.ndarray) -> np.ndarray:
        return np.array([self.price(t, float(x)) for x in s])


class ConstantPolicy(Policy):
    """Fixed price at every period; handy for tests and baselines."""

    label = "constant"

    def __init__(self, a: float):
        self.a = float(a)

    def price(self, t, s):
        return self.a

    def prices(self, t, s, path_ids):
        return np.full(np.shape(s), self.a)


def _check_epoch(T: int, t: int) -> None:
    if not 0 <= t < T:
        raise ValueError(f"decision epoch must be in 0..{T - 1}, got {t}")


# -- Bellman -----------------------------------------------------------------

def bellman_price(table: ValuePolicyTable, t: int, s):
    p = table.problem
    _check_epoch(p.T, t)
    a = interpolate(table.grid, table.policy[:, t], s)
    return np.clip(a, p.a_min, p.a_max) if np.ndim(a) else float(np.clip(a, p.a_min, p.a_max))


class BellmanPolicy(Policy):
    label = "bellman"

    def __init__(self, table: ValuePolicyTable):
        self.table = table

    def price(self, t, s):
        return bellman_price(self.table, t, s)

    def prices(self, t, s, path_ids):
        return np.asarray(bellman_price(self.table, t, np.asarray(s, dtype=float)), dtype=float)


# -- Certainty equivalent control ----------------------------------------------

def cec_objective(p: PricingProblem, t: int, s, a, w_hat: float = 1.0):
    """Single-price certainty-equivalent objective ``(a + C) min(s / (T - t), w q(a))``."""
    return (a + p.C) * np.minimum(s / (p.T - t), w_hat * p.demand(a))


def cec_price(p: PricingProblem, t: int, s):
    """Closed-form CEC price for exponential demand at the mean disturbance.

    The equal-price solution sells ``s / (T - t)`` per period; the price is the
    larger of the stock-clearing price and the unconstrained revenue maximiser
    ``1/q2 - C``, projected onto the price interval. ``s = 0`` maps to ``a_max``.
    """
    _check_epoch(p.T, t)
    q1, q2 = p.demand.q1, p.demand.q2
    s_arr = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        clearing = np.log(q1 * (p.T - t) / s_arr) / q2
    a = np.clip(np.maximum(clearing, 1.0 / q2 - p.C), p.a_min, p.a_max)
    a = np.where(s_arr > 0, a, p.a_max)
    return float(a) if a.ndim == 0 else a


def cec_price_numeric(p: PricingProblem, t: int, s: float, w_hat: float = 1.0,
                      n_grid: int = 2001, refine_iters: int = 40) -> float:
    """Argmax of ``cec_objective`` by dense scan plus golden-section refinement."""
    _check_epoch(p.T, t)
    if s <= 0:
        return p.a_max
    grid = np.linspace(p.a_min, p.a_max, n_grid)
    vals = cec_objective(p, t, s, grid, w_hat)
    j = int(np.argmax(vals >= vals.max() - 1e-12))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, n_grid - 1)]
    f = lambda x: float(cec_objective(p, t, s, x, w_hat))  # noqa: E731
    c, d = hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(refine_iters):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    g, fg = (c, fc) if fc >= fd else (d, fd)
    return float(g) if fg > vals[j] + 1e-12 else float(grid[j])


class CECPolicy(Policy):
    label = "cec"

    def __init__(self, problem: PricingProblem, w_hat: float = 1.0):
        if not w_hat > 0:
            raise ValueError(f"point forecast must be positive, got {w_hat}")
        self.problem = problem
        self.w_hat = float(w_hat)

    def price(self, t, s):
        if self.w_hat == 1.0:
            return cec_price(self.problem, t, s)
        return cec_price_numeric(self.problem, t, s, self.w_hat)

    def prices(self, t, s, path_ids):
        if self.w_hat == 1.0:
            return np.asarray(cec_price(self.problem, t, np.asarray(s, dtype=float)), dtype=float)
        return super().prices(t, s, path_ids)


# -- Open-loop feedback control ------------------------------------------------

class OLFCConvergenceError(RuntimeError):
    """Coordinate ascent hit its sweep limit; ``best`` holds the best iterate found."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class OLFCConfig:
    n_saa: int = 1000
    tol: float = 1e-4
    max_iters: int = 100
    multistart: int = 1
    seed: int = 0
    n_scan: int = 11
    chunk: int = 256

    def __post_init__(self):
        if self.n_saa < 1:
            raise ValueError(f"n_saa must be >= 1, got {self.n_saa}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1 or self.multistart < 1 or self.n_scan < 2 or self.chunk < 1:
            raise ValueError("max_iters, multistart, chunk must be >= 1 and n_scan >= 2")


def saa_objective(p: PricingProblem, s: float, a, W: np.ndarray, wts=None) -> float:
    """Empirical mean of remaining profit for open-loop prices ``a`` over sample paths ``W``.

    ``W`` has one row per sample path and one column per remaining period.
    """
    a = np.asarray(a, dtype=float)
    W = np.atleast_2d(W)
    if wts is None:
        wts = np.full(W.shape[0], 1.0 / W.shape[0])
    S = np.full(W.shape[0], float(s))
    rev = np.zeros(W.shape[0])
    for j, aj in enumerate(a):
        sold = np.minimum(S, p.demand(aj) * W[:, j])
        rev += aj * sold
        S -= sold
    return float(np.sum(wts * (rev - p.C * S)))


class OLFCPolicy(Policy):
    """Re-optimise an open-loop price vector against frozen samples each epoch."""

    label = "olfc"

    def __init__(self, problem: PricingProblem, cfg: OLFCConfig | None = None,
                 backend: str | None = None):
        self.problem = problem
        self.cfg = cfg or OLFCConfig()
        self._impl = kernels.backend(backend) if backend else kernels

    def samples(self, t: int, path_id: int):
        """Frozen disturbance paths for epoch ``t`` of path ``path_id``; also returns the stream."""
        p, cfg = self.problem, self.cfg
        H = p.T - t
        gen = rng.stream(cfg.seed, rng.OLFC_EPOCH, path_id, t)
        if p.disturbance.is_deterministic:
            W = np.asarray(p.disturbance.sample(gen, (1, H)), dtype=float)
            return W, np.ones(1), gen
        W = np.asarray(p.disturbance.sample(gen, (cfg.n_saa, H)), dtype=float)
        return W, np.full(cfg.n_saa, 1.0 / cfg.n_saa), gen

    def price(self, t, s, path_id: int = 0):
        return float(self.prices(t, np.array([float(s)]), np.array([path_id]))[0])

    def plan(self, t: int, s: np.ndarray, path_ids: np.ndarray):
        """Full open-loop price vectors (one row per query) and their SAA values."""
        p, cfg = self.problem, self.cfg
        _check_epoch(p.T, t)
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s > 1):
            raise ValueError("stock must lie in [0, 1]")
        H = p.T - t
        plans = np.full((s.size, H), p.a_max)
        vals = np.zeros(s.size)
        live = np.flatnonzero(s > 0)
        for lo in range(0, live.size, cfg.chunk):
            idx = live[lo:lo + cfg.chunk]
            Ws, starts = [], np.empty((idx.size, cfg.multistart, H))
            wts = None
            for r, i in enumerate(idx):
                W, wts, gen = self.samples(t, int(path_ids[i]))
                Ws.append(W)
                starts[r, 0, :] = cec_price(p, t, s[i])
                if cfg.multistart > 1:
                    starts[r, 1:, :] = gen.uniform(p.a_min, p.a_max, (cfg.multistart - 1, H))
            best, best_val, ok = self._impl.olfc_solve_batch(
                s[idx], np.ascontiguousarray(np.stack(Ws)), wts, starts,
                float(p.demand.q1), float(p.demand.q2), float(p.C),
                float(p.a_min), float(p.a_max), float(cfg.tol), int(cfg.max_iters),
                int(cfg.n_scan))
            plans[idx] = best
            vals[idx] = best_val
            if not np.all(ok):
                bad = idx[~ok]
                raise OLFCConvergenceError(
                    f"OLFC did not converge in {cfg.max_iters} sweeps for {bad.size} queries "
                    f"at t={t}", best=plans[bad])
        return plans, vals

    def prices(self, t, s, path_ids):
        plans, _ = self.plan(t, s, path_ids)
        return np.clip(plans[:, 0], self.problem.a_min, self.problem.a_max)


def make_policy(name: str, problem: PricingProblem, table: ValuePolicyTable | None = None,
                olfc: OLFCConfig | None = None) -> Policy:
    if name == "bellman":
        if table is None:
            raise ValueError("the Bellman policy needs a solved value/policy table")
        return BellmanPolicy(table)
    if name == "cec":
        return CECPolicy(problem)
    if name == "olfc":
        return OLFCPolicy(problem, olfc)
    raise ValueError(f"unknown policy {name!r}; expected bellman, cec or olfc")
