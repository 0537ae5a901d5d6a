"""Numba inner loops shared by the sequential predictor and the strategies.

Every kernel takes pre-cast scalars (zero/one/wexp/zero_eps) of the run's
dtype so single-precision runs stay in float32 end to end; accumulation
order is part of each kernel's contract and must not be reordered.

NO_HIT marks "no coincident point seen". Coincident points (d2 <= zero_eps)
are never accumulated; the lowest coincident index and its z ride along and
override the normalized sum at the end.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NO_HIT = 1 << 62


def scalar_args(p: float, zero_eps: float, dt: np.dtype):
    """Kernel scalar bundle: (fast, wexp, zero_eps, zero, one) in dtype dt."""
    fast = p == 2.0
    t = dt.type
    return fast, t(-p / 2.0), t(zero_eps), t(0.0), t(1.0)


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


@njit(nogil=True, cache=True)
def predict_block(qx, qy, xs, ys, zs, fast, wexp, zero_eps, zero, one, out, q0, q1):
    """Full scan of all data points per query, strict left-to-right sums.

    Used both by the sequential oracle (one call, whole range) and by the
    naive strategy (one call per query block).
    """
    n = xs.shape[0]
    for q in range(q0, q1):
        px = qx[q]
        py = qy[q]
        sw = zero
        swz = zero
        hit = NO_HIT
        hz = zero
        for i in range(n):
            dx = px - xs[i]
            dy = py - ys[i]
            d2 = dx * dx + dy * dy
            if d2 <= zero_eps:
                if hit == NO_HIT:
                    hit = i
                    hz = zs[i]
            else:
                if fast:
                    w = one / d2
                else:
                    w = d2 ** wexp
                sw = sw + w
                swz = swz + w * zs[i]
        if hit != NO_HIT:
            out[q] = hz
        else:
            out[q] = swz / sw


@njit(nogil=True, cache=True)
def tile_accumulate(qx, qy, tx, ty, tz, tile_base, fast, wexp, zero_eps, zero, one, sw, swz, hit, hz, q0, q1):
    """Fold one staged tile into the running per-query accumulators.

    Tiles arrive in data order and each query folds tile elements in order,
    so the overall per-query sum stays left-to-right across tiles.
    """
    cnt = tx.shape[0]
    for q in range(q0, q1):
        px = qx[q]
        py = qy[q]
        s = sw[q]
        sz = swz[q]
        for i in range(cnt):
            dx = px - tx[i]
            dy = py - ty[i]
            d2 = dx * dx + dy * dy
            if d2 <= zero_eps:
                if hit[q] == NO_HIT:
                    hit[q] = tile_base + i
                    hz[q] = tz[i]
            else:
                if fast:
                    w = one / d2
                else:
                    w = d2 ** wexp
                s = s + w
                sz = sz + w * tz[i]
        sw[q] = s
        swz[q] = sz


@njit(nogil=True, cache=True)
def finalize_block(sw, swz, hit, hz, out, q0, q1):
    for q in range(q0, q1):
        if hit[q] != NO_HIT:
            out[q] = hz[q]
        else:
            out[q] = swz[q] / sw[q]


@njit(nogil=True, cache=True)
def _tree_combine(wp, wzp, hitp, hzp, width):
    """Adjacent-pairing balanced reduction, in place over [0, width).

    width is a power of two; slots past the live prefix must hold the
    identity (0, 0, NO_HIT, 0). The combined accumulator lands in slot 0.
    Level k merges slots (2j, 2j+1) -> j, i.e. ((a+b)+(c+d)) for four.
    """
    m = width
    while m > 1:
        half = m // 2
        for j in range(half):
            a = 2 * j
            b = a + 1
            wp[j] = wp[a] + wp[b]
            wzp[j] = wzp[a] + wzp[b]
            if hitp[b] < hitp[a]:
                hitp[j] = hitp[b]
                hzp[j] = hzp[b]
            else:
                hitp[j] = hitp[a]
                hzp[j] = hzp[a]
        m = half


@njit(nogil=True, cache=True)
def nested_improved_block(qx, qy, xs, ys, zs, group, fast, wexp, zero_eps, zero, one,
                          wp, wzp, hitp, hzp, out, trips, record, q0, q1):
    """One fixed worker group per query: worker t privately accumulates the
    strided points t, t+G, t+2G, ... then a single tree reduction combines
    the G private accumulators. No shared accumulator exists here.

    Scratch arrays are next_pow2(group) long with identity pads; trips[t]
    counts worker t's strided-loop slots for query 0 when record is set.
    """
    n = xs.shape[0]
    chunks = (n + group - 1) // group
    p2 = wp.shape[0]
    for q in range(q0, q1):
        px = qx[q]
        py = qy[q]
        for t in range(group):
            sw = zero
            swz = zero
            hit = NO_HIT
            hz = zero
            k = t
            for _c in range(chunks):
                if record and q == 0:
                    trips[t] += 1
                if k < n:
                    dx = px - xs[k]
                    dy = py - ys[k]
                    d2 = dx * dx + dy * dy
                    if d2 <= zero_eps:
                        if hit == NO_HIT:
                            hit = k
                            hz = zs[k]
                    else:
                        if fast:
                            w = one / d2
                        else:
                            w = d2 ** wexp
                        sw = sw + w
                        swz = swz + w * zs[k]
                k += group
            wp[t] = sw
            wzp[t] = swz
            hitp[t] = hit
            hzp[t] = hz
        _tree_combine(wp, wzp, hitp, hzp, p2)
        if hitp[0] != NO_HIT:
            out[q] = hzp[0]
        else:
            out[q] = wzp[0] / wp[0]


@njit(nogil=True, cache=True)
def nested_original_block(qx, qy, xs, ys, zs, group, fast, wexp, zero_eps, zero, one,
                          wp, wzp, hitp, hzp, out, merges, q0, q1):
    """Per query: ceil(n/G) lane groups of G single-point accumulators, each
    tree-reduced, then every group partial is merged serially into one
    shared per-query accumulator, one group after another. merges[0]
    counts those shared-accumulator merge events.
    """
    n = xs.shape[0]
    ngroups = (n + group - 1) // group
    p2 = wp.shape[0]
    nmerges = 0
    for q in range(q0, q1):
        px = qx[q]
        py = qy[q]
        ssw = zero
        sswz = zero
        shit = NO_HIT
        shz = zero
        for g in range(ngroups):
            base = g * group
            cnt = n - base
            if cnt > group:
                cnt = group
            for t in range(group):
                if t < cnt:
                    i = base + t
                    dx = px - xs[i]
                    dy = py - ys[i]
                    d2 = dx * dx + dy * dy
                    if d2 <= zero_eps:
                        wp[t] = zero
                        wzp[t] = zero
                        hitp[t] = i
                        hzp[t] = zs[i]
                    else:
                        if fast:
                            w = one / d2
                        else:
                            w = d2 ** wexp
                        wp[t] = w
                        wzp[t] = w * zs[i]
                        hitp[t] = NO_HIT
                        hzp[t] = zero
                else:
                    wp[t] = zero
                    wzp[t] = zero
                    hitp[t] = NO_HIT
                    hzp[t] = zero
            _tree_combine(wp, wzp, hitp, hzp, p2)
            ssw = ssw + wp[0]
            sswz = sswz + wzp[0]
            if hitp[0] < shit:
                shit = hitp[0]
                shz = hzp[0]
            nmerges += 1
        if shit != NO_HIT:
            out[q] = shz
        else:
            out[q] = sswz / ssw
    merges[0] += nmerges


def identity_scratch(group: int, dt: np.dtype):
    """Pow2-sized scratch (wp, wzp, hitp, hzp) pre-filled with the identity.

    The tree only ever writes the first half of each level, so pad slots
    beyond `group` keep their identity across reuses.
    """
    p2 = next_pow2(max(1, group))
    wp = np.zeros(p2, dtype=dt)
    wzp = np.zeros(p2, dtype=dt)
    hitp = np.full(p2, NO_HIT, dtype=np.int64)
    hzp = np.zeros(p2, dtype=dt)
    return wp, wzp, hitp, hzp
