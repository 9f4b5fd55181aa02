"""Compiled kernels. Same contracts as ``_numpy``; loops instead of broadcasting."""

import math

import numpy as np
from numba import config, njit, prange

# the bundled TBB is too old on some hosts and only produces warnings
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TIE_TOL = 1e-12


@njit(cache=True)
def _interp_uniform(grid, row, x):
    K = grid.shape[0]
    h = grid[1] - grid[0]
    idx = int(x / h)
    if idx > K - 2:
        idx = K - 2
    if idx < 0:
        idx = 0
    if x >= grid[idx + 1] and idx < K - 2:
        idx += 1
    elif x < grid[idx] and idx > 0:
        idx -= 1
    frac = (x - grid[idx]) / h
    return row[idx] + frac * (row[idx + 1] - row[idx])


@njit(cache=True)
def _stage_value(grid, next_row, s, w, wts, a, q1, q2):
    qa = q1 * math.exp(-q2 * a)
    total = 0.0
    for k in range(w.shape[0]):
        sold = qa * w[k]
        if sold > s:
            sold = s
        total += wts[k] * (a * sold + _interp_uniform(grid, next_row, s - sold))
    return total


@njit(cache=True)
def _node_max(grid, next_row, s, w, wts, cand, q1, q2, refine_iters):
    M = cand.shape[0]
    vals = np.empty(M)
    vmax = -np.inf
    for j in range(M):
        vals[j] = _stage_value(grid, next_row, s, w, wts, cand[j], q1, q2)
        if vals[j] > vmax:
            vmax = vals[j]
    jbest = 0
    for j in range(M):
        if vals[j] >= vmax - TIE_TOL:
            jbest = j
            break
    best_a = cand[jbest]
    best_v = vals[jbest]
    if refine_iters <= 0:
        return best_v, best_a

    lo = cand[max(jbest - 1, 0)]
    hi = cand[min(jbest + 1, M - 1)]
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = _stage_value(grid, next_row, s, w, wts, c, q1, q2)
    fd = _stage_value(grid, next_row, s, w, wts, d, q1, q2)
    for _ in range(refine_iters):
        if fc >= fd:
            hi = d
            d = c
            fd = fc
            c = hi - INV_PHI * (hi - lo)
            fc = _stage_value(grid, next_row, s, w, wts, c, q1, q2)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + INV_PHI * (hi - lo)
            fd = _stage_value(grid, next_row, s, w, wts, d, q1, q2)
    if fc >= fd:
        g_a, g_v = c, fc
    else:
        g_a, g_v = d, fd
    if g_v > best_v + TIE_TOL or (g_v >= best_v - TIE_TOL and g_a < best_a):
        return g_v, g_a
    return best_v, best_a


@njit(cache=True, parallel=True)
def bellman_step(grid, next_row, W, wts, cand, q1, q2, refine_iters):
    K = grid.shape[0]
    values = np.empty(K)
    policy = np.empty(K)
    for i in prange(K):
        v, a = _node_max(grid, next_row, grid[i], W[i], wts, cand, q1, q2, refine_iters)
        values[i] = v
        policy[i] = a
    return values, policy


@njit(cache=True)
def _objective(s, w, wts, a, q1, q2, C):
    H = a.shape[0]
    qa = np.empty(H)
    for j in range(H):
        qa[j] = q1 * math.exp(-q2 * a[j])
    total = 0.0
    for k in range(w.shape[0]):
        S = s
        rev = 0.0
        for j in range(H):
            sold = qa[j] * w[k, j]
            if sold > S:
                sold = S
            rev += a[j] * sold
            S -= sold
        total += wts[k] * (rev - C * S)
    return total


@njit(cache=True)
def _dir_eval(s, w, wts, x, d, alpha, trial, q1, q2, C):
    for j in range(x.shape[0]):
        trial[j] = x[j] + alpha * d[j]
    return _objective(s, w, wts, trial, q1, q2, C)


@njit(cache=True)
def _golden_iters(width, tol):
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))


@njit(cache=True)
def _line_search(s, w, wts, x, fx, d, q1, q2, C, lo_b, hi_b, n_scan, tol, radius, trial):
    """Maximise along ``x + alpha d`` (``d`` max-norm 1) inside the box.

    Scans ``n_scan`` points over ``|alpha| <= radius`` intersected with the
    feasible segment, then refines the best bracket by golden section to
    ``tol``. Updates ``x`` in place on improvement; returns the new value and
    the largest coordinate move.
    """
    H = x.shape[0]
    al_lo = -radius
    al_hi = radius
    for j in range(H):
        if d[j] > 0:
            al_lo = max(al_lo, (lo_b - x[j]) / d[j])
            al_hi = min(al_hi, (hi_b - x[j]) / d[j])
        elif d[j] < 0:
            al_lo = max(al_lo, (hi_b - x[j]) / d[j])
            al_hi = min(al_hi, (lo_b - x[j]) / d[j])
    if not (al_hi > al_lo):
        return fx, 0.0
    span = al_hi - al_lo
    best_al = 0.0
    best_v = fx
    jbest = 0
    scan_v = -np.inf
    for j in range(n_scan):
        al = al_lo + span * j / (n_scan - 1)
        v = _dir_eval(s, w, wts, x, d, al, trial, q1, q2, C)
        if v > scan_v + TIE_TOL:
            scan_v = v
            jbest = j
            if v > best_v + TIE_TOL:
                best_v = v
                best_al = al
    lo = al_lo + span * max(jbest - 1, 0) / (n_scan - 1)
    hi = al_lo + span * min(jbest + 1, n_scan - 1) / (n_scan - 1)
    c = hi - INV_PHI * (hi - lo)
    e = lo + INV_PHI * (hi - lo)
    fc = _dir_eval(s, w, wts, x, d, c, trial, q1, q2, C)
    fe = _dir_eval(s, w, wts, x, d, e, trial, q1, q2, C)
    for _g in range(_golden_iters(hi - lo, tol)):
        if fc >= fe:
            hi = e
            e = c
            fe = fc
            c = hi - INV_PHI * (hi - lo)
            fc = _dir_eval(s, w, wts, x, d, c, trial, q1, q2, C)
        else:
            lo = c
            c = e
            fc = fe
            e = lo + INV_PHI * (hi - lo)
            fe = _dir_eval(s, w, wts, x, d, e, trial, q1, q2, C)
    if fc >= fe and fc > best_v + TIE_TOL:
        best_v = fc
        best_al = c
    elif fe > fc and fe > best_v + TIE_TOL:
        best_v = fe
        best_al = e
    if best_al == 0.0:
        return fx, 0.0
    moved = 0.0
    for j in range(H):
        y = x[j] + best_al * d[j]
        if y < lo_b:
            y = lo_b
        elif y > hi_b:
            y = hi_b
        moved = max(moved, abs(y - x[j]))
        x[j] = y
    return _objective(s, w, wts, x, q1, q2, C), moved


@njit(cache=True)
def _coordinate_ascent(s, w, wts, a, q1, q2, C, lo_b, hi_b, tol, max_sweeps, n_scan):
    """Coordinate ascent with Powell direction updates.

    The first sweep searches each coordinate over the whole interval; later
    sweeps search a bracket a few times wider than the previous sweep's
    largest move. After each sweep the net displacement is searched as an
    extra direction and replaces the direction that gained most, which lets
    the search follow the ridge along which prices trade off between periods.
    Converged when a sweep moves no coordinate by more than ``tol``.
    """
    H = a.shape[0]
    D = np.eye(H)
    trial = np.empty(H)
    x0 = np.empty(H)
    d = np.empty(H)
    f = _objective(s, w, wts, a, q1, q2, C)
    radius = hi_b - lo_b
    scan = n_scan
    converged = False
    for it in range(max_sweeps):
        if it % (H + 1) == H:
            D[:, :] = np.eye(H)
        x0[:] = a
        f0 = f
        max_move = 0.0
        big_gain = 0.0
        ibig = 0
        for i in range(H):
            fprev = f
            f, moved = _line_search(s, w, wts, a, f, D[i], q1, q2, C, lo_b, hi_b,
                                    scan, tol, radius, trial)
            max_move = max(max_move, moved)
            if f - fprev > big_gain:
                big_gain = f - fprev
                ibig = i
        if max_move <= tol:
            converged = True
            break
        norm = 0.0
        for j in range(H):
            d[j] = a[j] - x0[j]
            norm = max(norm, abs(d[j]))
        if H > 1 and norm > 0.0:
            for j in range(H):
                d[j] /= norm
            f, moved = _line_search(s, w, wts, a, f, d, q1, q2, C, lo_b, hi_b,
                                    scan, tol, hi_b - lo_b, trial)
            D[ibig, :] = d
        if f - f0 <= TIE_TOL:
            converged = True
            break
        radius = min(hi_b - lo_b, max(4.0 * max_move, 20.0 * tol))
        scan = 5
    return f, converged


@njit(cache=True, parallel=True)
def olfc_solve_batch(s, W, wts, starts, q1, q2, C, lo_b, hi_b, tol, max_sweeps, n_scan):
    P = s.shape[0]
    R = starts.shape[1]
    H = starts.shape[2]
    best = np.empty((P, H))
    best_val = np.empty(P)
    converged = np.zeros(P, dtype=np.bool_)
    for p in prange(P):
        bv = -np.inf
        for r in range(R):
            a = starts[p, r].copy()
            v, ok = _coordinate_ascent(s[p], W[p], wts, a, q1, q2, C, lo_b, hi_b,
                                       tol, max_sweeps, n_scan)
            if v > bv + TIE_TOL:
                bv = v
                best[p] = a
                converged[p] = ok
        best_val[p] = bv
    return best, best_val, converged
