# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernels.

Exact mirror of ``_kernels_py``: same entry points, same argument
conventions, same uniform-consumption order, same floating-point operation
order. Randomness comes straight from the generator's bit-generator
(``next_double``), which is what ``Generator.random()`` consumes, so the two
backends walk the same stream. Any change here must be mirrored in
``_kernels_py.py``.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp, fabs, log, log1p, pow, sqrt
from libc.stdint cimport int64_t

from numpy.random cimport bitgen_t

import numpy as np

REBUILD_EVERY = 65536

CMJ_NEED_CAPACITY = 0
CMJ_DONE_POPULATION = 1
CMJ_DONE_TIME = 2
CMJ_EXTINCT = 3
CMJ_POP_CAP = 4

cdef const char *_CAPSULE = "BitGenerator"

cdef double NAN_D = float("nan")


cdef bitgen_t *_bg(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE):
        raise ValueError("expected a numpy Generator with a valid BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE)


cdef inline double _u01(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef double _lambertw_m1(double a) noexcept nogil:
    cdef double ea1 = 2.718281828459045235 * a + 1.0
    cdef double p, l1, l2, w, ew, f, wp1, d, wn
    cdef int it
    if ea1 <= 0.0:
        return -1.0
    p = sqrt(2.0 * ea1)
    if p < 1e-5:
        return -1.0 - p - p * p / 3.0 - 11.0 * p * p * p / 72.0
    if ea1 < 0.75:
        w = -1.0 - p - p * p / 3.0
    else:
        l1 = log(-a)
        l2 = log(-l1)
        w = l1 - l2 + l2 / l1
    for it in range(64):
        ew = exp(w)
        f = w * ew - a
        wp1 = w + 1.0
        d = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if d == 0.0:
            break
        wn = w - f / d
        if fabs(wn - w) <= 1e-15 * (1.0 + fabs(wn)):
            return wn
        w = wn
    return w


def lambertw_m1(double a):
    """Lambert W, branch -1, for arguments in [-1/e, 0)."""
    return _lambertw_m1(a)


cdef double _draw_scalar(int64_t kind, const double *wd, int off, bitgen_t *bg) noexcept nogil:
    cdef double u, s, arg
    if kind == 0:
        return wd[off]
    u = _u01(bg)
    if kind == 1:
        return -log1p(-u) / wd[off]
    if kind == 2:
        return wd[off] + u * (wd[off + 1] - wd[off])
    if kind == 3:
        return wd[off + 1] * exp(-log1p(-u) / wd[off])
    s = 1.0 - u
    arg = -pow(s * wd[off + 1], wd[off + 2]) * wd[off + 2]
    return exp(-wd[off] * _lambertw_m1(arg))


cdef inline void _draw_weight(const int64_t *wi, const double *wd, bitgen_t *bg,
                              double *u_out, double *v_out) noexcept nogil:
    cdef int64_t coupling = wi[0]
    cdef double u, v
    if coupling == -1:
        u_out[0] = NAN_D
        v_out[0] = _draw_scalar(wi[2], wd, 4, bg)
        return
    if coupling == 0:
        u = _draw_scalar(wi[1], wd, 0, bg)
        v = _draw_scalar(wi[2], wd, 4, bg)
        u_out[0] = u
        v_out[0] = v
        return
    v = _draw_scalar(wi[2], wd, 4, bg)
    if coupling == 1:
        u_out[0] = v
    elif coupling == 2:
        u_out[0] = 0.0
    else:
        u_out[0] = 1.0
    v_out[0] = v


def sample_weight(int64_t[::1] wi, double[::1] wd, object rng):
    """Draw one weight; returns (u, v) with u = nan for scalar specs."""
    cdef bitgen_t *bg = _bg(rng)
    cdef double u, v
    _draw_weight(&wi[0], &wd[0], bg, &u, &v)
    return (u, v)


cdef inline double _fitness_rate(int fkind, const double *frates, int m, int ftail,
                                 int64_t k, double u, double v) noexcept nogil:
    if fkind == 0:
        return u * k + v
    if k < m:
        return frates[k]
    if ftail == 1:
        return frates[m - 1]
    return 0.0


# ---------------------------------------------------------------------------
# Fenwick tree over per-node fitness (1-indexed, capacity a power of two)

cdef inline void _fw_update(double *bit, int64_t cap, int64_t i, double delta) noexcept nogil:
    cdef int64_t j = i + 1
    while j <= cap:
        bit[j] += delta
        j += j & (-j)


cdef inline int64_t _fw_search(const double *bit, int64_t cap, double x) noexcept nogil:
    cdef int64_t j = 0
    cdef int64_t mask = cap
    cdef int64_t k
    cdef double rem = x
    while mask > 0:
        k = j + mask
        if k <= cap and bit[k] <= rem:
            j = k
            rem -= bit[k]
        mask >>= 1
    return j


cdef double _fw_rebuild(double *bit, const double *fit, int64_t cap, int64_t n) noexcept nogil:
    cdef int64_t i, j, p
    cdef double z = 0.0
    for i in range(cap):
        bit[i + 1] = fit[i] if i < n else 0.0
    for j in range(1, cap + 1):
        p = j + (j & (-j))
        if p <= cap:
            bit[p] += bit[j]
    for i in range(n):
        z += fit[i]
    return z


def fw_update(double[::1] bit, int64_t cap, int64_t i, double delta):
    _fw_update(&bit[0], cap, i, delta)


def fw_search(double[::1] bit, int64_t cap, double x):
    """Smallest 0-based index whose prefix sum exceeds ``x``."""
    return _fw_search(&bit[0], cap, x)


def fw_rebuild(double[::1] bit, double[::1] fit, int64_t n):
    """Rebuild the tree from exact per-node values; returns the exact total."""
    return _fw_rebuild(&bit[0], &fit[0], bit.shape[0] - 1, n)


# ---------------------------------------------------------------------------
# Sequential tree growth

def grow_steps(int64_t[::1] parent, int64_t[::1] outdeg, double[::1] wu,
               double[::1] wv, double[::1] fit, double[::1] bit,
               int64_t n, int64_t steps, int fkind, double[::1] frates,
               int ftail, int64_t[::1] wi, double[::1] wd,
               double[::1] zbox, object rng):
    """Up to ``steps`` attachment rounds; returns (new node count, performed).

    Stops early when the partition function hits zero or node capacity is
    reached; ``zbox`` carries [z, steps-since-exact-rebuild] across calls.
    """
    cdef bitgen_t *bg = _bg(rng)
    cdef int64_t cap = bit.shape[0] - 1
    cdef double z = zbox[0]
    cdef int64_t since = <int64_t> zbox[1]
    cdef int64_t performed = 0
    cdef int m = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if m > 0 else NULL
    cdef double u, un, vn, fj, fn, dj
    cdef int64_t j, kj
    while performed < steps:
        if not (z > 0.0):
            break
        if n >= cap:
            break
        u = _u01(bg)
        j = _fw_search(&bit[0], cap, u * z)
        if j >= n:
            j = n - 1
        while j > 0 and not (fit[j] > 0.0):
            j -= 1
        kj = outdeg[j] + 1
        parent[n] = j
        outdeg[j] = kj
        outdeg[n] = 0
        _draw_weight(&wi[0], &wd[0], bg, &un, &vn)
        wu[n] = un
        wv[n] = vn
        fj = _fitness_rate(fkind, rp, m, ftail, kj, wu[j], wv[j])
        fn = _fitness_rate(fkind, rp, m, ftail, 0, un, vn)
        dj = fj - fit[j]
        _fw_update(&bit[0], cap, j, dj)
        _fw_update(&bit[0], cap, n, fn)
        fit[j] = fj
        fit[n] = fn
        z += dj + fn
        n += 1
        performed += 1
        since += 1
        if since >= REBUILD_EVERY:
            z = _fw_rebuild(&bit[0], &fit[0], cap, n)
            since = 0
    zbox[0] = z
    zbox[1] = <double> since
    return n, performed


def grow_shape_codes(int fkind, double[::1] frates, int ftail,
                     int64_t[::1] wi, double[::1] wd,
                     int64_t n_nodes, int64_t n_reps, int64_t[::1] out, object rng):
    """Mixed-radix shape code of an ``n_nodes``-node tree, per replicate.

    The code is sum(parent[i] * (i-1)!/1!) over i >= 2; replicates that halt
    before reaching ``n_nodes`` nodes report -1.
    """
    cdef bitgen_t *bg = _bg(rng)
    fit_a = np.zeros(n_nodes, dtype=np.float64)
    odeg_a = np.zeros(n_nodes, dtype=np.int64)
    uw_a = np.zeros(n_nodes, dtype=np.float64)
    vw_a = np.zeros(n_nodes, dtype=np.float64)
    cdef double[::1] fit = fit_a
    cdef int64_t[::1] odeg = odeg_a
    cdef double[::1] uw = uw_a
    cdef double[::1] vw = vw_a
    cdef int mr = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if mr > 0 else NULL
    cdef int64_t rep, m, j, kj, code, radix
    cdef double u0, v0, un, vn, z, x, acc, fj, fn
    cdef bint ok
    for rep in range(n_reps):
        _draw_weight(&wi[0], &wd[0], bg, &u0, &v0)
        uw[0] = u0
        vw[0] = v0
        odeg[0] = 0
        fit[0] = _fitness_rate(fkind, rp, mr, ftail, 0, u0, v0)
        z = fit[0]
        code = 0
        radix = 1
        ok = True
        for m in range(1, n_nodes):
            if not (z > 0.0):
                ok = False
                break
            x = _u01(bg) * z
            acc = fit[0]
            j = 0
            while acc <= x and j < m - 1:
                j += 1
                acc += fit[j]
            kj = odeg[j] + 1
            odeg[j] = kj
            odeg[m] = 0
            _draw_weight(&wi[0], &wd[0], bg, &un, &vn)
            uw[m] = un
            vw[m] = vn
            fj = _fitness_rate(fkind, rp, mr, ftail, kj, uw[j], vw[j])
            fn = _fitness_rate(fkind, rp, mr, ftail, 0, un, vn)
            z += (fj - fit[j]) + fn
            fit[j] = fj
            fit[m] = fn
            if m >= 2:
                code += j * radix
                radix *= m
        out[rep] = code if ok else -1


# ---------------------------------------------------------------------------
# Pure-birth counting

def simulate_counts(int mode, double c1, double c2, int fkind, double[::1] frates,
                    int ftail, int64_t[::1] wi, double[::1] wd, double t,
                    int64_t cap, int64_t[::1] counts, unsigned char[::1] sat,
                    object rng):
    """Births by time ``t`` per replicate; mode 0 = fixed linear rates
    (c1*k + c2), mode 1 = a fresh weight drawn per replicate."""
    cdef bitgen_t *bg = _bg(rng)
    cdef int64_t n = counts.shape[0]
    cdef int m = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if m > 0 else NULL
    cdef int64_t rep, k
    cdef double uw_, vw_, cum, rate
    for rep in range(n):
        uw_ = c1
        vw_ = c2
        if mode == 1:
            _draw_weight(&wi[0], &wd[0], bg, &uw_, &vw_)
        k = 0
        cum = 0.0
        while k < cap:
            if mode == 1:
                rate = _fitness_rate(fkind, rp, m, ftail, k, uw_, vw_)
            else:
                rate = c1 * k + c2
            if not (rate > 0.0):
                break
            cum += -log1p(-_u01(bg)) / rate
            if cum > t:
                break
            k += 1
        counts[rep] = k
        sat[rep] = 1 if k >= cap else 0


# ---------------------------------------------------------------------------
# Event-driven genealogy (binary min-heap keyed by absolute birth time)

cdef inline int64_t _heap_push(double *ht, int64_t *hidx, int64_t size,
                               double t, int64_t idx) noexcept nogil:
    cdef int64_t j = size
    cdef int64_t p
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


cdef inline int64_t _heap_pop(double *ht, int64_t *hidx, int64_t size,
                              double *t_out, int64_t *i_out) noexcept nogil:
    cdef double t0 = ht[0]
    cdef int64_t i0 = hidx[0]
    cdef double tl
    cdef int64_t il, j, l, r, c
    size -= 1
    if size > 0:
        tl = ht[size]
        il = hidx[size]
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
    t_out[0] = t0
    i_out[0] = i0
    return size


def cmj_init(int64_t[::1] par, double[::1] bt, double[::1] wu, double[::1] wv,
             int64_t[::1] nch, double[::1] tau, double[::1] ht, int64_t[::1] hidx,
             int fkind, double[::1] frates, int ftail,
             int64_t[::1] wi, double[::1] wd, object rng):
    """Create the root at time 0 and arm its first clock. Returns (n, heap size)."""
    cdef bitgen_t *bg = _bg(rng)
    cdef int m = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if m > 0 else NULL
    cdef double u0, v0, r0, dt
    cdef int64_t hs = 0
    par[0] = -1
    bt[0] = 0.0
    _draw_weight(&wi[0], &wd[0], bg, &u0, &v0)
    wu[0] = u0
    wv[0] = v0
    nch[0] = 0
    tau[0] = 0.0
    r0 = _fitness_rate(fkind, rp, m, ftail, 0, u0, v0)
    if r0 > 0.0:
        dt = -log1p(-_u01(bg)) / r0
        hs = _heap_push(&ht[0], &hidx[0], hs, dt, 0)
    return 1, hs


def cmj_run_chunk(int64_t[::1] par, double[::1] bt, double[::1] wu, double[::1] wv,
                  int64_t[::1] nch, double[::1] tau, double[::1] ht, int64_t[::1] hidx,
                  int64_t n, int64_t hs, int64_t stop_k, double stop_t, int64_t pop_cap,
                  int fkind, double[::1] frates, int ftail,
                  int64_t[::1] wi, double[::1] wd, object rng):
    """Run the event loop until a stop condition or capacity; see status codes.

    Each birth consumes draws in a fixed order: child weight, child clock,
    parent re-arm clock (clocks only when the corresponding rate is > 0).
    ``tau[k-1]`` records the time the population reached k individuals.
    """
    cdef bitgen_t *bg = _bg(rng)
    cdef int64_t cap = par.shape[0]
    cdef int64_t hcap = ht.shape[0]
    cdef int m = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if m > 0 else NULL
    cdef double tb, uc, vc, rc, rj, dt
    cdef int64_t j, c, nc
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
        hs = _heap_pop(&ht[0], &hidx[0], hs, &tb, &j)
        c = n
        par[c] = j
        bt[c] = tb
        nch[c] = 0
        _draw_weight(&wi[0], &wd[0], bg, &uc, &vc)
        wu[c] = uc
        wv[c] = vc
        tau[c] = tb
        n += 1
        rc = _fitness_rate(fkind, rp, m, ftail, 0, uc, vc)
        if rc > 0.0:
            dt = -log1p(-_u01(bg)) / rc
            hs = _heap_push(&ht[0], &hidx[0], hs, tb + dt, c)
        nc = nch[j] + 1
        nch[j] = nc
        rj = _fitness_rate(fkind, rp, m, ftail, nc, wu[j], wv[j])
        if rj > 0.0:
            dt = -log1p(-_u01(bg)) / rj
            hs = _heap_push(&ht[0], &hidx[0], hs, tb + dt, j)


def cmj_shape_codes(int fkind, double[::1] frates, int ftail,
                    int64_t[::1] wi, double[::1] wd,
                    int64_t n_nodes, int64_t n_reps, int64_t[::1] out, object rng):
    """Shape code of the continuous-time genealogy at population ``n_nodes``.

    Individuals are numbered by birth order, so the parent array is directly
    comparable with the discrete grower's codes; -1 marks extinction before
    the target population.
    """
    cdef bitgen_t *bg = _bg(rng)
    par_a = np.zeros(n_nodes, dtype=np.int64)
    nch_a = np.zeros(n_nodes, dtype=np.int64)
    uw_a = np.zeros(n_nodes, dtype=np.float64)
    vw_a = np.zeros(n_nodes, dtype=np.float64)
    ht_a = np.zeros(n_nodes + 1, dtype=np.float64)
    hidx_a = np.zeros(n_nodes + 1, dtype=np.int64)
    cdef int64_t[::1] par = par_a
    cdef int64_t[::1] nch = nch_a
    cdef double[::1] uw = uw_a
    cdef double[::1] vw = vw_a
    cdef double[::1] ht = ht_a
    cdef int64_t[::1] hidx = hidx_a
    cdef int mr = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if mr > 0 else NULL
    cdef int64_t rep, n, hs, j, c, nc, m, code, radix
    cdef double u0, v0, uc, vc, r0, rc, rj, dt, tb
    for rep in range(n_reps):
        _draw_weight(&wi[0], &wd[0], bg, &u0, &v0)
        uw[0] = u0
        vw[0] = v0
        nch[0] = 0
        hs = 0
        r0 = _fitness_rate(fkind, rp, mr, ftail, 0, u0, v0)
        if r0 > 0.0:
            dt = -log1p(-_u01(bg)) / r0
            hs = _heap_push(&ht[0], &hidx[0], hs, dt, 0)
        n = 1
        while n < n_nodes and hs > 0:
            hs = _heap_pop(&ht[0], &hidx[0], hs, &tb, &j)
            c = n
            par[c] = j
            nch[c] = 0
            _draw_weight(&wi[0], &wd[0], bg, &uc, &vc)
            uw[c] = uc
            vw[c] = vc
            n += 1
            rc = _fitness_rate(fkind, rp, mr, ftail, 0, uc, vc)
            if rc > 0.0:
                dt = -log1p(-_u01(bg)) / rc
                hs = _heap_push(&ht[0], &hidx[0], hs, tb + dt, c)
            nc = nch[j] + 1
            nch[j] = nc
            rj = _fitness_rate(fkind, rp, mr, ftail, nc, uw[j], vw[j])
            if rj > 0.0:
                dt = -log1p(-_u01(bg)) / rj
                hs = _heap_push(&ht[0], &hidx[0], hs, tb + dt, j)
        if n < n_nodes:
            out[rep] = -1
            continue
        code = 0
        radix = 1
        for m in range(2, n_nodes):
            code += par[m] * radix
            radix *= m
        out[rep] = code


# ---------------------------------------------------------------------------
# Nested-event witness search for an infinite path within a finite time budget

def witness_run(int fkind, double[::1] frates, int ftail,
                int64_t[::1] wi, double[::1] wd,
                double[::1] t_seq, int64_t[::1] cand_seq, int64_t[::1] thr_seq,
                int64_t[::1] cand_log, int64_t[::1] succ_log,
                int64_t[::1] fanout_log, double[::1] time_log, object rng):
    """Greedy realization of the nested events: at level i, test up to
    ``cand_seq[i-1]`` candidate children of the current node for producing
    more than ``thr_seq[i-1]`` births within ``t_seq[i-1]``; descend into the
    first success. Returns (depth reached, total model time consumed), the
    latter summing the per-level birth spans, each bounded by its budget.
    """
    cdef bitgen_t *bg = _bg(rng)
    cdef int64_t levels = t_seq.shape[0]
    cdef int m = <int> frates.shape[0]
    cdef const double *rp = &frates[0] if m > 0 else NULL
    cdef double u0, v0, ucand, vcand, rate, budget, cum2, elapsed
    cdef int64_t want, cnt, depth, level, thr, found, tested, ci, k

    _draw_weight(&wi[0], &wd[0], bg, &u0, &v0)
    want = cand_seq[0]
    cnt = 0
    while cnt < want:
        rate = _fitness_rate(fkind, rp, m, ftail, cnt, u0, v0)
        if not (rate > 0.0):
            break
        _u01(bg)
        cnt += 1

    depth = 0
    elapsed = 0.0
    for level in range(1, levels + 1):
        budget = t_seq[level - 1]
        thr = thr_seq[level - 1]
        found = -1
        tested = 0
        k = 0
        cum2 = 0.0
        for ci in range(cnt):
            tested += 1
            _draw_weight(&wi[0], &wd[0], bg, &ucand, &vcand)
            k = 0
            cum2 = 0.0
            while k < thr + 1:
                rate = _fitness_rate(fkind, rp, m, ftail, k, ucand, vcand)
                if not (rate > 0.0):
                    break
                cum2 += -log1p(-_u01(bg)) / rate
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
            cnt = cand_seq[level]
            if cnt > k:
                cnt = k
    return depth, elapsed
