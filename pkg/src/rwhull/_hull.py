"""Compiled planar hull kernels shared by :mod:`geom2d` and the simulation core.

Hulls live in caller-owned buffers ``hx, hy, hi`` (coordinates and a caller
tag, usually the time index of the walk position) plus a vertex count ``h``.
Vertices are kept strictly counter-clockwise with no collinear triples; one
and two vertex states represent a point and a segment.

Orientation is the plain double cross product; an exact zero is collinear.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def orient(ax, ay, bx, by, px, py):
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


@njit(cache=True)
def monotone_chain(xs, ys):
    """Andrew's monotone chain. Returns CCW indices into the input, starting at
    the lexicographically smallest point."""
    n = xs.shape[0]
    order = np.argsort(xs, kind="mergesort")
    # stable secondary sort on y within equal x
    i = 0
    while i < n:
        j = i + 1
        while j < n and xs[order[j]] == xs[order[i]]:
            j += 1
        if j - i > 1:
            seg = order[i:j].copy()
            sub = np.argsort(ys[seg], kind="mergesort")
            for k in range(j - i):
                order[i + k] = seg[sub[k]]
        i = j
    hull = np.empty(2 * n + 1, dtype=np.int64)
    k = 0
    for t in range(n):
        p = order[t]
        while k >= 2 and orient(xs[hull[k - 2]], ys[hull[k - 2]], xs[hull[k - 1]],
                                ys[hull[k - 1]], xs[p], ys[p]) <= 0:
            k -= 1
        hull[k] = p
        k += 1
    lower = k + 1
    for t in range(n - 2, -1, -1):
        p = order[t]
        while k >= lower and orient(xs[hull[k - 2]], ys[hull[k - 2]], xs[hull[k - 1]],
                                    ys[hull[k - 1]], xs[p], ys[p]) <= 0:
            k -= 1
        hull[k] = p
        k += 1
    # last point repeats the first
    k -= 1
    if k < 1:
        k = 1
    out = hull[:k].copy()
    # all points identical, or two distinct points: drop duplicate coordinates
    if k == 2 and xs[out[0]] == xs[out[1]] and ys[out[0]] == ys[out[1]]:
        out = out[:1].copy()
    return out


@njit(cache=True, inline="always")
def _visible_edge(hx, hy, h, px, py):
    """Index of one edge that strictly sees p, or -1 if p is in the closed hull.
    Wedge binary search around vertex 0; requires h >= 3."""
    x0 = hx[0]
    y0 = hy[0]
    if orient(x0, y0, hx[1], hy[1], px, py) < 0:
        return 0
    if orient(x0, y0, hx[h - 1], hy[h - 1], px, py) > 0:
        return h - 1
    lo = 1
    hi = h - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if orient(x0, y0, hx[mid], hy[mid], px, py) >= 0:
            lo = mid
        else:
            hi = mid
    if orient(hx[lo], hy[lo], hx[lo + 1], hy[lo + 1], px, py) < 0:
        return lo
    return -1


@njit(cache=True)
def insert(hx, hy, hi, h, px, py, tag):
    """Add point p to the hull held in the buffers; returns the new count.

    Hot loops spell this out themselves (visible-edge test first, then
    ``_splice`` / ``_insert_small``): interior points are the common case
    along a walk and a call per point costs several times the test itself."""
    if h >= 3:
        e = _visible_edge(hx, hy, h, px, py)
        if e < 0:
            return h
        return _splice(hx, hy, hi, h, px, py, tag, e)
    return _insert_small(hx, hy, hi, h, px, py, tag)


@njit(cache=True)
def _insert_small(hx, hy, hi, h, px, py, tag):
    if h == 0:
        hx[0] = px
        hy[0] = py
        hi[0] = tag
        return 1
    if h == 1:
        if px == hx[0] and py == hy[0]:
            return 1
        hx[1] = px
        hy[1] = py
        hi[1] = tag
        return 2
    if h == 2:
        ax = hx[0]
        ay = hy[0]
        bx = hx[1]
        by = hy[1]
        c = orient(ax, ay, bx, by, px, py)
        if c == 0.0:
            dx = bx - ax
            dy = by - ay
            t = (px - ax) * dx + (py - ay) * dy
            if t < 0.0:
                hx[0] = px
                hy[0] = py
                hi[0] = tag
            elif t > dx * dx + dy * dy:
                hx[1] = px
                hy[1] = py
                hi[1] = tag
            return 2
        if c > 0.0:
            hx[2] = px
            hy[2] = py
            hi[2] = tag
        else:
            hx[2] = bx
            hy[2] = by
            hi[2] = hi[1]
            hx[1] = px
            hy[1] = py
            hi[1] = tag
        return 3
    return h


@njit(cache=True)
def _splice(hx, hy, hi, h, px, py, tag, e):
    # widen to the full chain of edges that see p (collinear counts as seeing,
    # otherwise a vertex between p and its neighbour would survive)
    lo = e
    for _ in range(h - 1):
        prv = lo - 1 if lo > 0 else h - 1
        nxt = lo
        if orient(hx[prv], hy[prv], hx[nxt], hy[nxt], px, py) <= 0.0:
            lo = prv
        else:
            break
    hi_e = e
    for _ in range(h - 1):
        a = hi_e + 1 if hi_e + 1 < h else 0
        b = a + 1 if a + 1 < h else 0
        if orient(hx[a], hy[a], hx[b], hy[b], px, py) <= 0.0:
            hi_e = a
        else:
            break
    # edges lo..hi_e (cyclic) see p; vertices lo+1..hi_e are dropped
    if lo <= hi_e:
        k = hi_e - lo
        if k == 0:
            for t in range(h, lo + 1, -1):
                hx[t] = hx[t - 1]
                hy[t] = hy[t - 1]
                hi[t] = hi[t - 1]
        elif k > 1:
            src = hi_e + 1
            dst = lo + 2
            while src < h:
                hx[dst] = hx[src]
                hy[dst] = hy[src]
                hi[dst] = hi[src]
                src += 1
                dst += 1
        hx[lo + 1] = px
        hy[lo + 1] = py
        hi[lo + 1] = tag
        return h - k + 1
    # wrapped chain: keep hi_e+1..lo, move them to the front
    m = lo - hi_e
    for t in range(m):
        hx[t] = hx[hi_e + 1 + t]
        hy[t] = hy[hi_e + 1 + t]
        hi[t] = hi[hi_e + 1 + t]
    hx[m] = px
    hy[m] = py
    hi[m] = tag
    return m + 1


@njit(cache=True, inline="always")
def _dist(ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    return math.sqrt(dx * dx + dy * dy)


@njit(cache=True)
def perimeter(hx, hy, h):
    if h <= 1:
        return 0.0
    if h == 2:
        return 2.0 * _dist(hx[0], hy[0], hx[1], hy[1])
    s = 0.0
    for k in range(h):
        nk = k + 1 if k + 1 < h else 0
        s += _dist(hx[k], hy[k], hx[nk], hy[nk])
    return s


@njit(cache=True, inline="always")
def _consider(hx, hy, a, b, best, ba, bb):
    if a > b:
        a, b = b, a
    dx = hx[b] - hx[a]
    dy = hy[b] - hy[a]
    d2 = dx * dx + dy * dy
    if d2 > best or (d2 == best and (a < ba or (a == ba and b < bb))):
        return d2, a, b
    return best, ba, bb


@njit(cache=True)
def diameter(hx, hy, h):
    """Rotating calipers over a CCW hull. Returns (D, i, j) with i < j vertex
    positions; ties go to the lexicographically lowest pair."""
    if h <= 1:
        return 0.0, 0, 0
    if h == 2:
        return _dist(hx[0], hy[0], hx[1], hy[1]), 0, 1
    best = -1.0
    ba = 0
    bb = 0
    j = 1
    for i in range(h):
        ni = i + 1 if i + 1 < h else 0
        ex = hx[ni] - hx[i]
        ey = hy[ni] - hy[i]
        for _ in range(h):
            nj = j + 1 if j + 1 < h else 0
            cur = ex * (hy[j] - hy[i]) - ey * (hx[j] - hx[i])
            nxt = ex * (hy[nj] - hy[i]) - ey * (hx[nj] - hx[i])
            if nxt > cur:
                j = nj
            else:
                break
        best, ba, bb = _consider(hx, hy, i, j, best, ba, bb)
        best, ba, bb = _consider(hx, hy, ni, j, best, ba, bb)
        nj = j + 1 if j + 1 < h else 0
        cur = ex * (hy[j] - hy[i]) - ey * (hx[j] - hx[i])
        nxt = ex * (hy[nj] - hy[i]) - ey * (hx[nj] - hx[i])
        if nxt == cur:
            best, ba, bb = _consider(hx, hy, i, nj, best, ba, bb)
            best, ba, bb = _consider(hx, hy, ni, nj, best, ba, bb)
    return math.sqrt(best), ba, bb


@njit(cache=True)
def origin_inradius(hx, hy, h):
    """Distance from the origin to the complement of the hull (0 unless the
    origin is strictly interior)."""
    if h <= 2:
        return 0.0
    r = np.inf
    for k in range(h):
        nk = k + 1 if k + 1 < h else 0
        c = orient(hx[k], hy[k], hx[nk], hy[nk], 0.0, 0.0)
        if c <= 0.0:
            return 0.0
        d = c / _dist(hx[k], hy[k], hx[nk], hy[nk])
        if d < r:
            r = d
    return r


@njit(cache=True)
def support_sweep(hx, hy, h, cs, sn, out):
    """out[j] = max_k (v_k . (cs[j], sn[j])) for directions sorted by angle
    over one turn. Walks the support vertex forward, O(h + m)."""
    m = cs.shape[0]
    k = 0
    best = hx[0] * cs[0] + hy[0] * sn[0]
    for t in range(1, h):
        v = hx[t] * cs[0] + hy[t] * sn[0]
        if v > best:
            best = v
            k = t
    for j in range(m):
        c = cs[j]
        s = sn[j]
        cur = hx[k] * c + hy[k] * s
        for _ in range(h):
            nk = k + 1 if k + 1 < h else 0
            v = hx[nk] * c + hy[nk] * s
            if v > cur:
                k = nk
                cur = v
            else:
                break
        out[j] = cur


@njit(cache=True)
def max_norm(hx, hy, h):
    r = 0.0
    for k in range(h):
        v = math.sqrt(hx[k] * hx[k] + hy[k] * hy[k])
        if v > r:
            r = v
    return r


@njit(cache=True)
def build_incremental(xs, ys):
    """Incremental hull of a point sequence, tags = input positions."""
    n = xs.shape[0]
    hx = np.empty(n + 1, dtype=np.float64)
    hy = np.empty(n + 1, dtype=np.float64)
    hi = np.empty(n + 1, dtype=np.int64)
    h = 0
    for t in range(n):
        if h < 3:
            h = _insert_small(hx, hy, hi, h, xs[t], ys[t], t)
        else:
            e = _visible_edge(hx, hy, h, xs[t], ys[t])
            if e >= 0:
                h = _splice(hx, hy, hi, h, xs[t], ys[t], t, e)
    return hx[:h].copy(), hy[:h].copy(), hi[:h].copy()
