"""Pure-Python twin of the compiled simulation kernels.

This module and ``_kernels.pyx`` implement the same entry points with the
same argument conventions, the same uniform-consumption order and the same
floating-point operation order, so a fixed ``numpy.random.Generator`` seed
produces bit-identical results under either backend. Keep the two in sync:
any change here must be mirrored in the .pyx file (and vice versa), and
``tests/test_backends.py`` checks the equivalence.

Conventions shared by both backends:

* all randomness is consumed as double-precision uniforms in [0, 1) taken
  one at a time from the generator (``rng.random()`` here, the bit
  generator's ``next_double`` in the compiled version);
* exponential waiting times use the inverse transform ``-log1p(-u) / rate``,
  whose argument ``1 - u`` is always positive, so a waiting time is never
  infinite by accident;
* weight specs arrive encoded as an int64[3] / float64[8] pair (see
  ``weights.encode_weight_spec``); fitness specs as (kind, rate table,
  tail code) (see ``fitness.encode_fitness_spec``).
"""
from __future__ import annotations

import math

import numpy as np

# Exact rebuild cadence for the incremental partition function.
REBUILD_EVERY = 65536


def lambertw_m1(a: float) -> float:
    """Lambert W, branch -1, for arguments in [-1/e, 0).

    Used to invert the log-corrected Pareto survival function. Halley
    iteration from a branch-appropriate initial guess; near the branch
    point the series in p = sqrt(2(1 + e*a)) is returned directly because
    the iteration's denominator degenerates at w = -1.
    """
    ea1 = 2.718281828459045235 * a + 1.0
    if ea1 <= 0.0:
        return -1.0
    p = math.sqrt(2.0 * ea1)
    if p < 1e-5:
        return -1.0 - p - p * p / 3.0 - 11.0 * p * p * p / 72.0
    if ea1 < 0.75:
        w = -1.0 - p - p * p / 3.0
    else:
        l1 = math.log(-a)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - a
        wp1 = w + 1.0
        d = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if d == 0.0:
            break
        wn = w - f / d
        if abs(wn - w) <= 1e-15 * (1.0 + abs(wn)):
            return wn
        w = wn
    return w


def _draw_scalar(kind: int, wd, off: int, rng) -> float:
    if kind == 0:
        return float(wd[off])
    u = rng.random()
    if kind == 1:
        return -math.log1p(-u) / float(wd[off])
    if kind == 2:
        return float(wd[off]) + u * (float(wd[off + 1]) - float(wd[off]))
    if kind == 3:
        return float(wd[off + 1]) * math.exp(-math.log1p(-u) / float(wd[off]))
    # log-corrected Pareto: wd[off] = 1 + nu, wd[off+1] = c_base, wd[off+2] = 1/(1+nu)
    s = 1.0 - u
    arg = -((s * float(wd[off + 1])) ** float(wd[off + 2])) * float(wd[off + 2])
    return math.exp(-float(wd[off]) * lambertw_m1(arg))


def sample_weight(wi, wd, rng):
    """Draw one weight; returns (u, v) with u = nan for scalar specs."""
    coupling = int(wi[0])
    if coupling == -1:
        return (math.nan, _draw_scalar(int(wi[2]), wd, 4, rng))
    if coupling == 0:
        u = _draw_scalar(int(wi[1]), wd, 0, rng)
        v = _draw_scalar(int(wi[2]), wd, 4, rng)
        return (u, v)
    v = _draw_scalar(int(wi[2]), wd, 4, rng)
    if coupling == 1:
        return (v, v)
    if coupling == 2:
        return (0.0, v)
    return (1.0, v)


def _fitness_rate(fkind: int, frates, ftail: int, k: int, u: float, v: float) -> float:
    if fkind == 0:
        return u * k + v
    m = frates.shape[0]
    if k < m:
        return float(frates[k])
    if ftail == 1:
        return float(frates[m - 1])
    return 0.0


# ---------------------------------------------------------------------------
# Fenwick tree over per-node fitness (1-indexed, capacity a power of two)

def fw_update(bit, cap: int, i: int, delta: float) -> None:
    j = i + 1
    while j <= cap:
        bit[j] += delta
        j += j & (-j)


def fw_search(bit, cap: int, x: float) -> int:
    """Smallest 0-based index whose prefix sum exceeds ``x``."""
    j = 0
    mask = cap
    rem = x
    while mask > 0:
        k = j + mask
        if k <= cap and bit[k] <= rem:
            j = k
            rem -= float(bit[k])
        mask >>= 1
    return j


def fw_rebuild(bit, fit, n: int) -> float:
    """Rebuild the tree from exact per-node values; returns the exact total."""
    cap = bit.shape[0] - 1
    for i in range(cap):
        bit[i + 1] = fit[i] if i < n else 0.0
    for j in range(1, cap + 1):
        p = j + (j & (-j))
        if p <= cap:
            bit[p] += bit[j]
    z = 0.0
    for i in range(n):
        z += float(fit[i])
    return z


# ---------------------------------------------------------------------------
# Sequential tree growth

def grow_steps(parent, outdeg, wu, wv, fit, bit, n: int, steps: int,
               fkind: int, frates, ftail: int, wi, wd, zbox, rng):
    """Up to ``steps`` attachment rounds; returns (new node count, performed).

    Stops early when the partition function hits zero or node capacity is
    reached; ``zbox`` carries [z, steps-since-exact-rebuild] across calls.
    """
    cap = bit.shape[0] - 1
    z = float(zbox[0])
    since = int(zbox[1])
    performed = 0
    while performed < steps:
        if not (z > 0.0):
            break
        if n >= cap:
            break
        u = rng.random()
        j = fw_search(bit, cap, u * z)
        if j >= n:
            j = n - 1
        while j > 0 and not (fit[j] > 0.0):
            j -= 1
        kj = int(outdeg[j]) + 1
        parent[n] = j
        outdeg[j] = kj
        outdeg[n] = 0
        un, vn = sample_weight(wi, wd, rng)
        wu[n] = un
        wv[n] = vn
        fj = _fitness_rate(fkind, frates, ftail, kj, float(wu[j]), float(wv[j]))
        fn = _fitness_rate(fkind, frates, ftail, 0, un, vn)
        dj = fj - float(fit[j])
        fw_update(bit, cap, j, dj)
        fw_update(bit, cap, n, fn)
        fit[j] = fj
        fit[n] = fn
        z += dj + fn
        n += 1
        performed += 1
        since += 1
        if since >= REBUILD_EVERY:
            z = fw_rebuild(bit, fit, n)
            since = 0
    zbox[0] = z
    zbox[1] = since
    return n, performed


def grow_shape_codes(fkind: int, frates, ftail: int, wi, wd,
                     n_nodes: int, n_reps: int, out, rng) -> None:
    """Mixed-radix shape code of an ``n_nodes``-node tree, per replicate.

    The code is sum(parent[i] * (i-1)!/1!) over i >= 2; replicates that halt
    before reaching ``n_nodes`` nodes report -1.
    """
    fit = np.zeros(n_nodes, dtype=np.float64)
    odeg = np.zeros(n_nodes, dtype=np.int64)
    uw = np.zeros(n_nodes, dtype=np.float64)
    vw = np.zeros(n_nodes, dtype=np.float64)
    for rep in range(n_reps):
        u0, v0 = sample_weight(wi, wd, rng)
        uw[0] = u0
        vw[0] = v0
        odeg[0] = 0
        fit[0] = _fitness_rate(fkind, frates, ftail, 0, u0, v0)
        z = float(fit[0])
        code = 0
        radix = 1
        ok = True
        for m in range(1, n_nodes):
            if not (z > 0.0):
                ok = False
                break
            x = rng.random() * z
            acc = float(fit[0])
            j = 0
            while acc <= x and j < m - 1:
                j += 1
                acc += float(fit[j])
            kj = int(odeg[j]) + 1
            odeg[j] = kj
            odeg[m] = 0
            un, vn = sample_weight(wi, wd, rng)
            uw[m] = un
            vw[m] = vn
            fj = _fitness_rate(fkind, frates, ftail, kj, float(uw[j]), float(vw[j]))
            fn = _fitness_rate(fkind, frates, ftail, 0, un, vn)
            z += (fj - float(fit[j])) + fn
            fit[j] = fj
            fit[m] = fn
            if m >= 2:
                code += j * radix
                radix *= m
        out[rep] = code if ok else -1


# ---------------------------------------------------------------------------
# Pure-birth counting

def simulate_counts(mode: int, c1: float, c2: float, fkind: int, frates,
                    ftail: int, wi, wd, t: float, cap: int,
                    counts, sat, rng) -> None:
    """Births by time ``t`` per replicate; mode 0 = fixed linear rates
    (c1*k + c2), mode 1 = a fresh weight drawn per replicate."""
    n = counts.shape[0]
    for rep in range(n):
        uw = c1
        vw = c2
        if mode == 1:
            uw, vw = sample_weight(wi, wd, rng)
        k = 0
        cum = 0.0
        while k < cap:
            if mode == 1:
                rate = _fitness_rate(fkind, frates, ftail, k, uw, vw)
            else:
                rate = c1 * k + c2
            if not (rate > 0.0):
                break
            cum += -math.log1p(-rng.random()) / rate
            if cum > t:
                break
            k += 1
        counts[rep] = k
        sat[rep] = 1 if k >= cap else 0


# ---------------------------------------------------------------------------
# Event-driven genealogy (binary min-heap keyed by absolute birth time)

def _heap_push(ht, hidx, size: int, t: float, idx: int) -> int:
    j = size
    while j > 0:
        p = (j - 1) >> 1
        if ht[p] <= t:
            break
        ht[j] = ht[p]
        hidx[j] = hidx[p]
        j = p
    ht[j] = t
    hidx[j] = idx
    return size + 1


def _heap_pop(ht, hidx, size: int):
    t0 = float(ht[0])
    i0 = int(hidx[0])
    size -= 1
    if size > 0:
        tl = float(ht[size])
        il = int(hidx[size])
        j = 0
        while True:
            l = 2 * j + 1
            if l >= size:
                break
            c = l
            r = l + 1
            if r < size and ht[r] < ht[l]:
                c = r
            if ht[c] < tl:
                ht[j] = ht[c]
                hidx[j] = hidx[c]
                j = c
            else:
                break
        ht[j] = tl
        hidx[j] = il
    return t0, i0, size


def cmj_init(par, bt, wu, wv, nch, tau, ht, hidx,
             fkind: int, frates, ftail: int, wi, wd, rng):
    """Create the root at time 0 and arm its first clock. Returns (n, heap size)."""
    par[0] = -1
    bt[0] = 0.0
    u0, v0 = sample_weight(wi, wd, rng)
    wu[0] = u0
    wv[0] = v0
    nch[0] = 0
    tau[0] = 0.0
    hs = 0
    r0 = _fitness_rate(fkind, frates, ftail, 0, u0, v0)
    if r0 > 0.0:
        dt = -math.log1p(-rng.random()) / r0
        hs = _heap_push(ht, hidx, hs, dt, 0)
    return 1, hs


# cmj_run_chunk status codes
CMJ_NEED_CAPACITY = 0
CMJ_DONE_POPULATION = 1
CMJ_DONE_TIME = 2
CMJ_EXTINCT = 3
CMJ_POP_CAP = 4


def cmj_run_chunk(par, bt, wu, wv, nch, tau, ht, hidx, n: int, hs: int,
                  stop_k: int, stop_t: float, pop_cap: int,
                  fkind: int, frates, ftail: int, wi, wd, rng):
    """Run the event loop until a stop condition or capacity; see status codes.

    Each birth consumes draws in a fixed order: child weight, child clock,
    parent re-arm clock (clocks only when the corresponding rate is > 0).
    ``tau[k-1]`` records the time the population reached k individuals.
    """
    cap = par.shape[0]
    hcap = ht.shape[0]
    while True:
        if stop_k > 0 and n >= stop_k:
            return n, hs, CMJ_DONE_POPULATION
        if n >= pop_cap:
            return n, hs, CMJ_POP_CAP
        if hs == 0:
            return n, hs, CMJ_EXTINCT
        if stop_t >= 0.0 and ht[0] > stop_t:
            return n, hs, CMJ_DONE_TIME
        if n >= cap or hs + 2 > hcap:
            return n, hs, CMJ_NEED_CAPACITY
        tb, j, hs = _heap_pop(ht, hidx, hs)
        c = n
        par[c] = j
        bt[c] = tb
        nch[c] = 0
        uc, vc = sample_weight(wi, wd, rng)
        wu[c] = uc
        wv[c] = vc
        tau[c] = tb
        n += 1
        rc = _fitness_rate(fkind, frates, ftail, 0, uc, vc)
        if rc > 0.0:
            dt = -math.log1p(-rng.random()) / rc
            hs = _heap_push(ht, hidx, hs, tb + dt, c)
        m = int(nch[j]) + 1
        nch[j] = m
        rj = _fitness_rate(fkind, frates, ftail, m, float(wu[j]), float(wv[j]))
        if rj > 0.0:
            dt = -math.log1p(-rng.random()) / rj
            hs = _heap_push(ht, hidx, hs, tb + dt, j)


def cmj_shape_codes(fkind: int, frates, ftail: int, wi, wd,
                    n_nodes: int, n_reps: int, out, rng) -> None:
    """Shape code of the continuous-time genealogy at population ``n_nodes``.

    Individuals are numbered by birth order, so the parent array is directly
    comparable with the discrete grower's codes; -1 marks extinction before
    the target population.
    """
    par = np.zeros(n_nodes, dtype=np.int64)
    nch = np.zeros(n_nodes, dtype=np.int64)
    uw = np.zeros(n_nodes, dtype=np.float64)
    vw = np.zeros(n_nodes, dtype=np.float64)
    ht = np.zeros(n_nodes + 1, dtype=np.float64)
    hidx = np.zeros(n_nodes + 1, dtype=np.int64)
    for rep in range(n_reps):
        u0, v0 = sample_weight(wi, wd, rng)
        uw[0] = u0
        vw[0] = v0
        nch[0] = 0
        hs = 0
        r0 = _fitness_rate(fkind, frates, ftail, 0, u0, v0)
        if r0 > 0.0:
            dt = -math.log1p(-rng.random()) / r0
            hs = _heap_push(ht, hidx, hs, dt, 0)
        n = 1
        while n < n_nodes and hs > 0:
            tb, j, hs = _heap_pop(ht, hidx, hs)
            c = n
            par[c] = j
            nch[c] = 0
            uc, vc = sample_weight(wi, wd, rng)
            uw[c] = uc
            vw[c] = vc
            n += 1
            rc = _fitness_rate(fkind, frates, ftail, 0, uc, vc)
            if rc > 0.0:
                dt = -math.log1p(-rng.random()) / rc
                hs = _heap_push(ht, hidx, hs, tb + dt, c)
            m = int(nch[j]) + 1
            nch[j] = m
            rj = _fitness_rate(fkind, frates, ftail, m, float(uw[j]), float(vw[j]))
            if rj > 0.0:
                dt = -math.log1p(-rng.random()) / rj
                hs = _heap_push(ht, hidx, hs, tb + dt, j)
        if n < n_nodes:
            out[rep] = -1
            continue
        code = 0
        radix = 1
        for m in range(2, n_nodes):
            code += int(par[m]) * radix
            radix *= m
        out[rep] = code


# ---------------------------------------------------------------------------
# Nested-event witness search for an infinite path within a finite time budget

def witness_run(fkind: int, frates, ftail: int, wi, wd,
                t_seq, cand_seq, thr_seq,
                cand_log, succ_log, fanout_log, time_log, rng):
    """Greedy realization of the nested events: at level i, test up to
    ``cand_seq[i-1]`` candidate children of the current node for producing
    more than ``thr_seq[i-1]`` births within ``t_seq[i-1]``; descend into the
    first success. Returns (depth reached, total model time consumed), the
    latter summing the per-level birth spans, each bounded by its budget.
    """
    levels = t_seq.shape[0]

    # Materialize the root's first cand_seq[0] children (their birth times
    # are not budget-bounded; only their count and order matter).
    u0, v0 = sample_weight(wi, wd, rng)
    want = int(cand_seq[0])
    cnt = 0
    while cnt < want:
        rate = _fitness_rate(fkind, frates, ftail, cnt, u0, v0)
        if not (rate > 0.0):
            break
        rng.random()
        cnt += 1

    depth = 0
    elapsed = 0.0
    for level in range(1, levels + 1):
        budget = float(t_seq[level - 1])
        thr = int(thr_seq[level - 1])
        found = -1
        tested = 0
        k = 0
        cum2 = 0.0
        for ci in range(cnt):
            tested += 1
            ucand, vcand = sample_weight(wi, wd, rng)
            k = 0
            cum2 = 0.0
            while k < thr + 1:
                rate = _fitness_rate(fkind, frates, ftail, k, ucand, vcand)
                if not (rate > 0.0):
                    break
                cum2 += -math.log1p(-rng.random()) / rate
                if cum2 > budget:
                    break
                k += 1
            if k > thr:
                found = ci
                break
        cand_log[level - 1] = tested
        succ_log[level - 1] = found
        if found < 0:
            fanout_log[level - 1] = 0
            time_log[level - 1] = 0.0
            break
        # success: the candidate produced thr+1 births within cum2 <= budget;
        # its first children become the next level's candidates
        fanout_log[level - 1] = k
        time_log[level - 1] = cum2
        elapsed += cum2
        depth = level
        if level < levels:
            cnt = int(cand_seq[level])
            if cnt > k:
                cnt = k
    return depth, elapsed
