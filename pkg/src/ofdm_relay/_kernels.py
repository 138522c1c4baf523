"""Scalar-loop kernels behind the public solvers.

Everything here takes and returns plain ndarrays/scalars so it compiles
under ``numba.njit``; the public modules wrap these with validation and
dataclasses. Gains are always noise-normalized. Per-hop helpers work on
gains sorted in descending order together with prefix sums of their logs
and reciprocals (index ``k`` of a prefix array = sum over the top ``k``).
"""

import numpy as np

from ._accel import njit

MAX_DOUBLINGS = 100

STATUS_MAX_PASSES = 0
STATUS_CONVERGED = 1
STATUS_CYCLE = 2


@njit
def sort_hop(gains):
    order = np.argsort(-gains, kind="mergesort")
    g = gains[order]
    k_total = g.size
    logs = np.log(g)
    log_prefix = np.zeros(k_total + 1)
    inv_prefix = np.zeros(k_total + 1)
    for i in range(k_total):
        log_prefix[i + 1] = log_prefix[i] + logs[i]
        inv_prefix[i + 1] = inv_prefix[i] + 1.0 / g[i]
    return g, logs, log_prefix, inv_prefix


@njit
def sort_network(gains):
    n_hops, k_total = gains.shape
    g = np.empty((n_hops, k_total))
    logs = np.empty((n_hops, k_total))
    log_prefix = np.empty((n_hops, k_total + 1))
    inv_prefix = np.empty((n_hops, k_total + 1))
    for n in range(n_hops):
        a, b, c, d = sort_hop(gains[n])
        g[n] = a
        logs[n] = b
        log_prefix[n] = c
        inv_prefix[n] = d
    return g, logs, log_prefix, inv_prefix


@njit
def active_count_for_demand(logs, log_prefix, demand):
    """Largest k with z(1/g_(k)) <= demand, by bisection over {1..K}.

    z(1/g_(k)) = sum_{i<k} ln(g_(i) / g_(k)) is non-decreasing in k.
    Returns (k, number of comparisons).
    """
    lo = 1
    hi = logs.size
    steps = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        steps += 1
        z = log_prefix[mid - 1] - (mid - 1) * logs[mid - 1]
        if z <= demand:
            lo = mid
        else:
            hi = mid - 1
    return lo, steps


@njit
def log_level_for_demand(logs, log_prefix, demand):
    k, steps = active_count_for_demand(logs, log_prefix, demand)
    return (demand - log_prefix[k]) / k, k, steps


@njit
def hop_power_for_demand(logs, log_prefix, inv_prefix, demand):
    """Total water-filled power sum_k (lam - 1/g_k)^+ meeting ``demand`` nats."""
    log_level, k, _ = log_level_for_demand(logs, log_prefix, demand)
    return k * np.exp(log_level) - inv_prefix[k]


@njit
def waterfill_row(gains, level, out):
    for j in range(gains.size):
        p = level - 1.0 / gains[j]
        out[j] = p if p > 0.0 else 0.0


# --- optimal solver ---------------------------------------------------------


@njit
def log_rate_sum(g_sorted, level):
    """sum over active subcarriers of ln(g*level); zero when none is active."""
    acc = 0.0
    for i in range(g_sorted.size):
        x = g_sorted[i] * level
        if x <= 1.0:
            break
        acc += np.log(x)
    return acc


@njit
def beta_of_level(g_sorted, level):
    # level * sum(ln x - 1 + 1/x) over active x = g*level; equal to
    # level*(sum ln g + k ln level - k) + sum 1/g without the cancellation
    acc = 0.0
    for i in range(g_sorted.size):
        x = g_sorted[i] * level
        if x <= 1.0:
            break
        acc += np.log(x) - 1.0 + 1.0 / x
    return level * acc


@njit
def rho_of_level(g_sorted, level, target):
    d = log_rate_sum(g_sorted, level)
    if d <= 0.0:
        return np.inf
    return target / d


@njit
def invert_beta_sorted(g_sorted, beta, rel_tol):
    lo = 1.0 / g_sorted[0]
    hi = lo
    steps = 0
    while beta_of_level(g_sorted, hi) < beta:
        lo = hi
        hi *= 2.0
        steps += 1
        if steps > MAX_DOUBLINGS:
            raise ValueError("water level bracket grew beyond 2**100")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        steps += 1
        if beta_of_level(g_sorted, mid) > beta:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), steps


@njit
def bracket_beta_sorted(g_sorted, target):
    n_hops = g_sorted.shape[0]
    beta_min = -np.inf
    beta_max = -np.inf
    steps = 0
    for n in range(n_hops):
        level = 1.0 / g_sorted[n, 0]
        b = beta_of_level(g_sorted[n], level)
        if b > beta_min:
            beta_min = b
        doublings = 0
        # h(level) <= 1/N  <=>  N*R <= sum ln(g*level)
        while log_rate_sum(g_sorted[n], level) < n_hops * target:
            level *= 2.0
            doublings += 1
            if doublings > MAX_DOUBLINGS:
                raise ValueError("time-share bracket grew beyond 2**100")
        steps += doublings
        b = beta_of_level(g_sorted[n], level)
        if b > beta_max:
            beta_max = b
    return beta_min, beta_max, steps


@njit
def _fill_from_shares(gains, logs, log_prefix, rho, target, powers, log_levels, counts):
    n_hops = gains.shape[0]
    p_total = 0.0
    for n in range(n_hops):
        log_level, k, _ = log_level_for_demand(logs[n], log_prefix[n], target / rho[n])
        log_levels[n] = log_level
        counts[n] = k
        waterfill_row(gains[n], np.exp(log_level), powers[n])
        p_total += rho[n] * powers[n].sum()
    return p_total


@njit
def tbs_core(gains, target, outer_tol, inner_tol):
    """Two nested bisections: beta outside, per-hop water levels inside.

    Returns (rho, powers, log_levels, counts, beta, outer_iterations,
    inner_iterations_last_pass, total_iterations, p_min, converged).
    """
    n_hops, k_total = gains.shape
    g_sorted, logs, log_prefix, _ = sort_network(gains)
    rho = np.empty(n_hops)
    inner = np.zeros(n_hops, dtype=np.int64)
    total = 0
    beta = np.nan
    outer = 1
    if n_hops == 1:
        rho[0] = 1.0
    else:
        lo, hi, total = bracket_beta_sorted(g_sorted, target)
        width = outer_tol * hi
        outer = 0
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            outer += 1
            s = 0.0
            for n in range(n_hops):
                level, st = invert_beta_sorted(g_sorted[n], mid, inner_tol)
                inner[n] = st
                total += st
                s += rho_of_level(g_sorted[n], level, target)
            if s > 1.0:
                lo = mid
            else:
                hi = mid
        beta = 0.5 * (lo + hi)
        outer += 1
        for n in range(n_hops):
            level, st = invert_beta_sorted(g_sorted[n], beta, inner_tol)
            inner[n] = st
            total += st
            rho[n] = rho_of_level(g_sorted[n], level, target)
        rho /= rho.sum()
    total += outer
    powers = np.empty((n_hops, k_total))
    log_levels = np.empty(n_hops)
    counts = np.empty(n_hops, dtype=np.int64)
    p_min = _fill_from_shares(gains, logs, log_prefix, rho, target, powers, log_levels, counts)
    converged = np.all(np.isfinite(rho)) and np.isfinite(p_min)
    return rho, powers, log_levels, counts, beta, outer, inner, total, p_min, converged


@njit
def tbs_batch(frames, target, outer_tol, inner_tol):
    n_frames = frames.shape[0]
    p_min = np.empty(n_frames)
    outer = np.empty(n_frames, dtype=np.int64)
    total = np.empty(n_frames, dtype=np.int64)
    for f in range(n_frames):
        res = tbs_core(frames[f], target, outer_tol, inner_tol)
        p_min[f] = res[8]
        outer[f] = res[5]
        total[f] = res[7]
    return p_min, outer, total


# --- sub-optimal solver -----------------------------------------------------


@njit
def hop_stats_top(logs, log_prefix, inv_prefix, k):
    a = log_prefix[k] / k - np.log(k)
    b = inv_prefix[k]
    return a, b


@njit
def solve_mu_core(counts, a, target, mu_tol):
    """Bisection for mu with sum_n 1/(k_n (mu + a_n/R)) = 1.

    At the lower end the largest share is exactly 1; at the upper end every
    share is at most 1/N, so the root is always bracketed.
    """
    n_hops = counts.size
    lo = -np.inf
    hi = -np.inf
    for n in range(n_hops):
        lo = max(lo, 1.0 / counts[n] - a[n] / target)
        hi = max(hi, n_hops / counts[n] - a[n] / target)
    steps = 0
    if hi < lo:
        raise ValueError("mu bracket is empty")
    while hi - lo > mu_tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        steps += 1
        s = 0.0
        for n in range(n_hops):
            s += 1.0 / (counts[n] * (mid + a[n] / target))
        if s > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), steps


@njit
def ias_core(gains, target, mu_tol, max_passes):
    """Active-set iteration around the closed-form time shares.

    Returns (rho, powers, log_levels, counts, mu, passes, total_iterations,
    p_min, status, used_counts).
    """
    n_hops, k_total = gains.shape
    _, logs, log_prefix, inv_prefix = sort_network(gains)
    counts = np.full(n_hops, k_total, dtype=np.int64)
    hist_counts = np.empty((max_passes + 1, n_hops), dtype=np.int64)
    hist_counts[0] = counts
    hist_rho = np.empty((max_passes, n_hops))
    hist_mu = np.empty(max_passes)
    hist_p = np.empty(max_passes)
    a = np.empty(n_hops)
    new_counts = np.empty(n_hops, dtype=np.int64)
    total = 0
    status = STATUS_MAX_PASSES
    passes = 0
    best = -1
    for m in range(max_passes):
        passes = m + 1
        for n in range(n_hops):
            a[n], _ = hop_stats_top(logs[n], log_prefix[n], inv_prefix[n], counts[n])
        mu, st = solve_mu_core(counts, a, target, mu_tol)
        total += st
        p = 0.0
        for n in range(n_hops):
            r = 1.0 / (counts[n] * (mu + a[n] / target))
            hist_rho[m, n] = r
            demand = target / r
            k, st = active_count_for_demand(logs[n], log_prefix[n], demand)
            total += st
            new_counts[n] = k
            p += r * (k * np.exp((demand - log_prefix[n, k]) / k) - inv_prefix[n, k])
        hist_mu[m] = mu
        hist_p[m] = p
        if np.all(new_counts == counts):
            status = STATUS_CONVERGED
            best = m
            break
        cycle_start = -1
        for i in range(m):
            if np.all(hist_counts[i] == new_counts):
                cycle_start = i
                break
        if cycle_start >= 0:
            status = STATUS_CYCLE
            best = cycle_start + np.argmin(hist_p[cycle_start : m + 1])
            break
        counts[:] = new_counts
        hist_counts[m + 1] = counts
    if best < 0:
        best = np.argmin(hist_p[:passes])
    rho = hist_rho[best].copy()
    rho /= rho.sum()
    used_counts = hist_counts[best].copy()
    powers = np.empty((n_hops, k_total))
    log_levels = np.empty(n_hops)
    final_counts = np.empty(n_hops, dtype=np.int64)
    p_min = _fill_from_shares(gains, logs, log_prefix, rho, target, powers, log_levels, final_counts)
    return (rho, powers, log_levels, final_counts, hist_mu[best], passes, total, p_min, status,
            used_counts)


@njit
def ias_batch(frames, target, mu_tol, max_passes):
    n_frames = frames.shape[0]
    p_min = np.empty(n_frames)
    passes = np.empty(n_frames, dtype=np.int64)
    total = np.empty(n_frames, dtype=np.int64)
    status = np.empty(n_frames, dtype=np.int64)
    for f in range(n_frames):
        res = ias_core(frames[f], target, mu_tol, max_passes)
        p_min[f] = res[7]
        passes[f] = res[5]
        total[f] = res[6]
        status[f] = res[8]
    return p_min, passes, total, status


# --- fixed-time power adaptation -------------------------------------------


@njit
def apft_batch(frames, target):
    n_frames, n_hops, _ = frames.shape
    p_min = np.zeros(n_frames)
    for f in range(n_frames):
        for n in range(n_hops):
            _, logs, log_prefix, inv_prefix = sort_hop(frames[f, n])
            p_min[f] += hop_power_for_demand(logs, log_prefix, inv_prefix, n_hops * target) / n_hops
    return p_min


# --- grid oracle ------------------------------------------------------------


@njit
def grid_min_energy(gains, target, steps):
    """Exact minimum of sum_n rho_n P_n(R/rho_n) over rho on the grid i/steps.

    Every hop gets at least one grid step. Per-hop costs are tabulated, then
    the minimum over all compositions of ``steps`` is taken stage by stage
    (same value as enumerating every grid point).
    """
    n_hops = gains.shape[0]
    if n_hops == 1:
        _, logs, log_prefix, inv_prefix = sort_hop(gains[0])
        return hop_power_for_demand(logs, log_prefix, inv_prefix, target)
    table = np.full((n_hops, steps + 1), np.inf)
    for n in range(n_hops):
        _, logs, log_prefix, inv_prefix = sort_hop(gains[n])
        for i in range(1, steps - n_hops + 2):
            share = i / steps
            table[n, i] = share * hop_power_for_demand(logs, log_prefix, inv_prefix, target / share)
    best = table[0].copy()
    for n in range(1, n_hops - 1):
        nxt = np.full(steps + 1, np.inf)
        for used in range(1, steps + 1):
            if not np.isfinite(best[used]):
                continue
            for i in range(1, steps - used + 1):
                v = best[used] + table[n, i]
                if v < nxt[used + i]:
                    nxt[used + i] = v
        best = nxt
    out = np.inf
    last = n_hops - 1
    for used in range(1, steps):
        v = best[used] + table[last, steps - used]
        if v < out:
            out = v
    return out


# --- on-off controller ------------------------------------------------------


@njit
def threshold_loop(p_min, budget, step, s0, floor):
    n_frames = p_min.size
    on = np.empty(n_frames, dtype=np.bool_)
    s_trace = np.empty(n_frames)
    avg = np.empty(n_frames)
    s = s0
    total = 0.0
    for t in range(n_frames):
        s_trace[t] = s
        if p_min[t] <= s:
            on[t] = True
            total += p_min[t]
        else:
            on[t] = False
        a = total / (t + 1)
        avg[t] = a
        s = s * (1.0 + step * (budget - a))
        if s < floor:
            s = floor
    return on, s_trace, avg, s
