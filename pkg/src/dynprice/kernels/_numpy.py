"""Pure-numpy kernels. Vectorised over grid nodes (DP) and over paths (OLFC);
golden-section iterations run in lockstep across the batch."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-12


def _interp_uniform(grid, row, x):
    K = grid.shape[0]
    h = grid[1] - grid[0]
    idx = np.clip((x / h).astype(np.int64), 0, K - 2)
    up = (x >= grid[np.minimum(idx + 1, K - 1)]) & (idx < K - 2)
    idx = idx + up
    down = (x < grid[idx]) & (idx > 0)
    idx = idx - down
    frac = (x - grid[idx]) / h
    return row[idx] + frac * (row[idx + 1] - row[idx])


def _stage_values(grid, next_row, W, wts, a, q1, q2):
    """Objective at every node for per-node prices ``a`` (shape K)."""
    s = grid[:, None]
    sold = np.minimum(s, (q1 * np.exp(-q2 * a))[:, None] * W)
    return (wts * (a[:, None] * sold + _interp_uniform(grid, next_row, s - sold))).sum(axis=1)


def bellman_step(grid, next_row, W, wts, cand, q1, q2, refine_iters):
    K = grid.shape[0]
    M = cand.shape[0]
    vals = np.empty((K, M))
    for j in range(M):
        vals[:, j] = _stage_values(grid, next_row, W, wts, np.full(K, cand[j]), q1, q2)
    vmax = vals.max(axis=1)
    jbest = np.argmax(vals >= (vmax - TIE_TOL)[:, None], axis=1)
    rows = np.arange(K)
    best_a = cand[jbest]
    best_v = vals[rows, jbest]
    if refine_iters <= 0:
        return best_v, best_a

    lo = cand[np.maximum(jbest - 1, 0)]
    hi = cand[np.minimum(jbest + 1, M - 1)]
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = _stage_values(grid, next_row, W, wts, c, q1, q2)
    fd = _stage_values(grid, next_row, W, wts, d, q1, q2)
    for _ in range(refine_iters):
        left = fc >= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - INV_PHI * (hi - lo)
        new_d = lo + INV_PHI * (hi - lo)
        # the surviving interior point is reused; only one new evaluation per node
        probe = np.where(left, new_c, new_d)
        fp = _stage_values(grid, next_row, W, wts, probe, q1, q2)
        c, d, fc, fd = (
            np.where(left, new_c, d),
            np.where(left, c, new_d),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
    take_c = fc >= fd
    g_a = np.where(take_c, c, d)
    g_v = np.where(take_c, fc, fd)
    use_g = (g_v > best_v + TIE_TOL) | ((g_v >= best_v - TIE_TOL) & (g_a < best_a))
    return np.where(use_g, g_v, best_v), np.where(use_g, g_a, best_a)


def _objective(s, W, wts, a, q1, q2, C):
    """Per-path SAA objective. s: (P,); W: (P, n, H); a: (P, H)."""
    S = np.repeat(s[:, None], W.shape[1], axis=1)
    rev = np.zeros_like(S)
    qa = q1 * np.exp(-q2 * a)
    for j in range(a.shape[1]):
        sold = np.minimum(S, qa[:, j, None] * W[:, :, j])
        rev += a[:, j, None] * sold
        S -= sold
    return ((rev - C * S) * wts).sum(axis=1)


def _golden_iters(width, tol):
    with np.errstate(divide="ignore"):
        n = np.ceil(np.log(tol / np.maximum(width, 1e-300)) / math.log(INV_PHI))
    return np.where(width <= tol, 0, n).astype(np.int64)


def _line_search(s, W, wts, x, fx, d, q1, q2, C, lo_b, hi_b, n_scan, tol, radius, mask):
    """Batched box-constrained line search along per-path directions ``d`` (P, H)."""
    P, H = x.shape
    with np.errstate(divide="ignore", invalid="ignore"):
        lo_cand = np.where(d > 0, (lo_b - x) / d, np.where(d < 0, (hi_b - x) / d, -np.inf))
        hi_cand = np.where(d > 0, (hi_b - x) / d, np.where(d < 0, (lo_b - x) / d, np.inf))
    al_lo = np.maximum(lo_cand.max(axis=1), -radius)
    al_hi = np.minimum(hi_cand.min(axis=1), radius)
    ok = mask & (al_hi > al_lo)
    al_lo = np.where(ok, al_lo, 0.0)
    al_hi = np.where(ok, al_hi, 0.0)
    span = al_hi - al_lo

    def f(al):
        return _objective(s, W, wts, x + al[:, None] * d, q1, q2, C)

    best_al = np.zeros(P)
    best_v = fx.copy()
    scan_v = np.full(P, -np.inf)
    jbest = np.zeros(P, dtype=np.int64)
    for j in range(n_scan):
        al = al_lo + span * j / (n_scan - 1)
        v = f(al)
        better = v > scan_v + TIE_TOL
        scan_v = np.where(better, v, scan_v)
        jbest = np.where(better, j, jbest)
        improve = better & (v > best_v + TIE_TOL)
        best_v = np.where(improve, v, best_v)
        best_al = np.where(improve, al, best_al)
    lo = al_lo + span * np.maximum(jbest - 1, 0) / (n_scan - 1)
    hi = al_lo + span * np.minimum(jbest + 1, n_scan - 1) / (n_scan - 1)
    n_gold = _golden_iters(hi - lo, tol)
    c = hi - INV_PHI * (hi - lo)
    e = lo + INV_PHI * (hi - lo)
    fc, fe = f(c), f(e)
    for g in range(int(n_gold.max(initial=0))):
        run = g < n_gold
        left = fc >= fe
        new_hi = np.where(left, e, hi)
        new_lo = np.where(left, lo, c)
        new_c = new_hi - INV_PHI * (new_hi - new_lo)
        new_e = new_lo + INV_PHI * (new_hi - new_lo)
        fp = f(np.where(left, new_c, new_e))
        hi = np.where(run, new_hi, hi)
        lo = np.where(run, new_lo, lo)
        c, e, fc, fe = (
            np.where(run, np.where(left, new_c, e), c),
            np.where(run, np.where(left, c, new_e), e),
            np.where(run, np.where(left, fp, fe), fc),
            np.where(run, np.where(left, fc, fp), fe),
        )
    use_c = (fc >= fe) & (fc > best_v + TIE_TOL)
    use_e = (fe > fc) & (fe > best_v + TIE_TOL)
    best_al = np.where(use_c, c, np.where(use_e, e, best_al))
    best_al = np.where(ok, best_al, 0.0)
    moved_to = np.clip(x + best_al[:, None] * d, lo_b, hi_b)
    step = best_al != 0.0
    moved = np.where(step, np.abs(moved_to - x).max(axis=1), 0.0)
    x[step] = moved_to[step]
    f_new = np.where(step, _objective(s, W, wts, x, q1, q2, C), fx)
    return f_new, moved


def _coordinate_ascent(s, W, wts, a, q1, q2, C, lo_b, hi_b, tol, max_sweeps, n_scan):
    P, H = a.shape
    eye = np.eye(H)
    D = np.repeat(eye[None], P, axis=0)
    active = np.ones(P, dtype=bool)
    converged = np.zeros(P, dtype=bool)
    f = _objective(s, W, wts, a, q1, q2, C)
    radius = np.full(P, hi_b - lo_b)
    scan = n_scan
    for it in range(max_sweeps):
        if it % (H + 1) == H:
            D[:] = eye
        x0 = a.copy()
        f0 = f.copy()
        max_move = np.zeros(P)
        big_gain = np.zeros(P)
        ibig = np.zeros(P, dtype=np.int64)
        for i in range(H):
            fprev = f
            f, moved = _line_search(s, W, wts, a, f, D[:, i, :], q1, q2, C, lo_b, hi_b,
                                    scan, tol, radius, active)
            max_move = np.maximum(max_move, moved)
            gain = f - fprev
            better = gain > big_gain
            big_gain = np.where(better, gain, big_gain)
            ibig = np.where(better, i, ibig)
        done = active & (max_move <= tol)
        converged |= done
        active &= ~done
        d = a - x0
        norm = np.abs(d).max(axis=1)
        if H > 1:
            go = active & (norm > 0)
            d = np.where(go[:, None], d / np.where(norm > 0, norm, 1.0)[:, None], 0.0)
            f, _ = _line_search(s, W, wts, a, f, d, q1, q2, C, lo_b, hi_b, scan, tol,
                                np.full(P, hi_b - lo_b), go)
            upd = np.flatnonzero(go)
            D[upd, ibig[upd], :] = d[upd]
        done = active & (f - f0 <= TIE_TOL)
        converged |= done
        active &= ~done
        if not active.any():
            break
        radius = np.minimum(hi_b - lo_b, np.maximum(4.0 * max_move, 20.0 * tol))
        scan = 5
    return f, converged


def olfc_solve_batch(s, W, wts, starts, q1, q2, C, lo_b, hi_b, tol, max_sweeps, n_scan):
    P, R, H = starts.shape
    best = np.empty((P, H))
    best_val = np.full(P, -np.inf)
    converged = np.zeros(P, dtype=bool)
    for r in range(R):
        a = starts[:, r, :].copy()
        v, ok = _coordinate_ascent(s, W, wts, a, q1, q2, C, lo_b, hi_b,
                                   tol, max_sweeps, n_scan)
        better = v > best_val + TIE_TOL
        best[better] = a[better]
        best_val = np.where(better, v, best_val)
        converged = np.where(better, ok, converged)
    return best, best_val, converged
