"""Hull functionals along trajectories, and the Monte Carlo drivers built on them.

The simulation core streams increments straight into an incremental hull, so a
trial never stores its path.  At each checkpoint it records perimeter,
diameter (with the time indices of the diametral pair), inradius about the
origin, the endpoint, and the running Spitzer-Widom sum ``2 sum_k |S_k| / k``.
Trial ``t`` always draws from stream ``(seed, t)``, so results do not depend on
how trials are split across workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from . import _hull
from .geom2d import DirectionGrid, Vec2, as_points
from .rng import seed_into
from .walk import BLOCK, IncrementDistribution, Path, fill_increments, refill, support_atoms

F_L, F_D, F_R, F_SX, F_SY, F_SW, F_WI, F_WJ, F_RMAX, F_QMIN, F_QMAX = range(11)
NFIELDS = 11

WANT_HULL = 1
WANT_SW = 2
WANT_SHAPE = 4
WANT_EXTREMES = 8  # running min / max of L/D over every step k >= n_start

# stream ids at or above this offset feed the inner resampling of a trial
INNER_STREAM_OFFSET = 1 << 62

_threads = os.cpu_count() or 1


def set_threads(n: Optional[int]) -> None:
    global _threads
    _threads = max(1, int(n)) if n else (os.cpu_count() or 1)


def get_threads() -> int:
    return _threads


def default_checkpoints(n: int, dense_to: int = 1024, per_octave: int = 16) -> np.ndarray:
    """Every step up to ``dense_to``, then geometric with ``per_octave`` points
    per doubling, always ending at ``n``."""
    n = int(n)
    pts = list(range(0, min(n, dense_to) + 1))
    if n > dense_to:
        j = 1
        while True:
            k = int(round(dense_to * 2.0 ** (j / per_octave)))
            if k >= n:
                break
            if k > pts[-1]:
                pts.append(k)
            j += 1
        pts.append(n)
    return np.asarray(pts, dtype=np.int64)


def _check_checkpoints(checkpoints, n: int) -> np.ndarray:
    cp = np.asarray(checkpoints, dtype=np.int64).ravel()
    if cp.size == 0:
        raise ValueError("need at least one checkpoint")
    if np.any(np.diff(cp) <= 0):
        raise ValueError("checkpoints must be strictly increasing")
    if cp[0] < 0 or cp[-1] > n:
        raise ValueError(f"checkpoints must lie in [0, {n}]")
    return cp


@njit(cache=True, inline="always")
def _record(hx, hy, hi, h, sx, sy, sw, row):
    row[F_L] = _hull.perimeter(hx, hy, h)
    d, a, b = _hull.diameter(hx, hy, h)
    row[F_D] = d
    ta = hi[a]
    tb = hi[b]
    if ta > tb:
        ta, tb = tb, ta
    row[F_WI] = ta
    row[F_WJ] = tb
    row[F_R] = _hull.origin_inradius(hx, hy, h)
    row[F_SX] = sx
    row[F_SY] = sy
    row[F_SW] = sw
    row[F_RMAX] = _hull.max_norm(hx, hy, h)


@njit(cache=True, inline="always")
def _record_shape(hx, hy, h, d, cs, sn, buf, tsup, hrow):
    if d <= 0.0:
        for t in range(tsup.shape[0]):
            hrow[t] = np.nan
        return
    _hull.support_sweep(hx, hy, h, cs, sn, buf)
    inv = 1.0 / d
    for t in range(tsup.shape[0]):
        best = 0.0
        for j in range(buf.shape[0]):
            v = abs(buf[j] * inv - tsup[t, j])
            if v > best:
                best = v
        hrow[t] = best


@njit(cache=True, nogil=True)
def _simulate(kind, params, n, cps, seed, first, count, flags, n_start, cs, sn, tsup, out, hd):
    want_hull = (flags & WANT_HULL) != 0
    want_sw = (flags & WANT_SW) != 0
    want_shape = (flags & WANT_SHAPE) != 0
    want_ext = (flags & WANT_EXTREMES) != 0
    ncp = cps.shape[0]
    cap = n + 2
    if not want_hull:
        cap = 1
    hx = np.empty(cap, dtype=np.float64)
    hy = np.empty(cap, dtype=np.float64)
    hi = np.empty(cap, dtype=np.int64)
    buf = np.empty(cs.shape[0], dtype=np.float64)
    s = np.empty(4, dtype=np.uint64)
    zbuf = np.empty((BLOCK, 2), dtype=np.float64)
    for t in range(count):
        seed_into(s, seed, np.uint64(first + t))
        zc = BLOCK
        h = 0
        if want_hull:
            h = _hull.insert(hx, hy, hi, 0, 0.0, 0.0, 0)
        sx = 0.0
        sy = 0.0
        sw = 0.0
        qmin = np.inf
        qmax = -np.inf
        changed = True
        c = 0
        k = 0
        while c < ncp:
            if want_ext and changed and k >= n_start:
                # L and D only move when the hull does
                dd, _a, _b = _hull.diameter(hx, hy, h)
                if dd > 0.0:
                    q = _hull.perimeter(hx, hy, h) / dd
                    qmin = min(qmin, q)
                    qmax = max(qmax, q)
                changed = False
            if cps[c] == k:
                row = out[t, c]
                if want_hull:
                    _record(hx, hy, hi, h, sx, sy, sw, row)
                    row[F_QMIN] = qmin
                    row[F_QMAX] = qmax
                    if want_shape:
                        _record_shape(hx, hy, h, row[F_D], cs, sn, buf, tsup, hd[t, c])
                else:
                    row[F_SX] = sx
                    row[F_SY] = sy
                    row[F_SW] = sw
                c += 1
                continue
            if zc == BLOCK:
                refill(kind, params, s, zbuf)
                zc = 0
            sx += zbuf[zc, 0]
            sy += zbuf[zc, 1]
            zc += 1
            k += 1
            if want_sw:
                sw += 2.0 * math.sqrt(sx * sx + sy * sy) / k
            if want_hull:
                if h >= 3:
                    e = _hull._visible_edge(hx, hy, h, sx, sy)
                    if e >= 0:
                        h = _hull._splice(hx, hy, hi, h, sx, sy, k, e)
                        changed = True
                else:
                    h = _hull._insert_small(hx, hy, hi, h, sx, sy, k)
                    changed = True


@njit(cache=True)
def _trace_path(xs, ys, cps, out):
    n = xs.shape[0]
    hx = np.empty(n + 1, dtype=np.float64)
    hy = np.empty(n + 1, dtype=np.float64)
    hi = np.empty(n + 1, dtype=np.int64)
    h = 0
    sw = 0.0
    c = 0
    for k in range(n):
        h = _hull.insert(hx, hy, hi, h, xs[k], ys[k], k)
        if k > 0:
            sw += 2.0 * math.sqrt(xs[k] * xs[k] + ys[k] * ys[k]) / k
        while c < cps.shape[0] and cps[c] == k:
            _record(hx, hy, hi, h, xs[k], ys[k], sw, out[c])
            c += 1


@njit(cache=True)
def _trace_shape(xs, ys, cps, cs, sn, tsup, hd):
    n = xs.shape[0]
    hx = np.empty(n + 1, dtype=np.float64)
    hy = np.empty(n + 1, dtype=np.float64)
    hi = np.empty(n + 1, dtype=np.int64)
    buf = np.empty(cs.shape[0], dtype=np.float64)
    h = 0
    c = 0
    for k in range(n):
        h = _hull.insert(hx, hy, hi, h, xs[k], ys[k], k)
        while c < cps.shape[0] and cps[c] == k:
            d, _a, _b = _hull.diameter(hx, hy, h)
            _record_shape(hx, hy, h, d, cs, sn, buf, tsup, hd[c])
            c += 1


def shape_distances(path: Path, checkpoints, targets: np.ndarray,
                    grid: DirectionGrid) -> np.ndarray:
    """Grid Hausdorff distance from ``H_k / D_k`` to each target at each
    checkpoint; ``targets`` holds support values on ``grid``.  NaN where
    ``D_k = 0``."""
    pos = path.positions
    cp = _check_checkpoints(checkpoints, path.n)
    tsup = np.ascontiguousarray(targets, dtype=np.float64)
    hd = np.zeros((cp.size, tsup.shape[0]))
    _trace_shape(pos[:, 0].copy(), pos[:, 1].copy(), cp, grid.cos, grid.sin, tsup, hd)
    return hd


@dataclass
class SimResult:
    """Per-trial checkpoint records from :func:`simulate`."""

    checkpoints: np.ndarray
    data: np.ndarray  # (trials, ncp, NFIELDS)
    shape: Optional[np.ndarray] = None  # (trials, ncp, targets)

    def field(self, f: int) -> np.ndarray:
        return self.data[:, :, f]

    def column(self, f: int, k: int) -> np.ndarray:
        return self.data[:, self.index(k), f]

    def index(self, k: int) -> int:
        pos = np.searchsorted(self.checkpoints, k)
        if pos >= self.checkpoints.size or self.checkpoints[pos] != k:
            raise KeyError(f"{k} is not a checkpoint")
        return int(pos)

    @property
    def L(self):
        return self.field(F_L)

    @property
    def D(self):
        return self.field(F_D)

    @property
    def r(self):
        return self.field(F_R)

    @property
    def s_norm(self):
        return np.hypot(self.field(F_SX), self.field(F_SY))


def simulate(dist: IncrementDistribution, n: int, checkpoints, trials: int, seed: int,
             flags: int = WANT_HULL, targets: Optional[np.ndarray] = None,
             grid: Optional[DirectionGrid] = None, first_trial: int = 0,
             threads: Optional[int] = None, n_start: int = 1) -> SimResult:
    """Run ``trials`` independent walks of ``n`` steps.

    ``targets`` holds support values (targets x m) of unit-diameter shapes on
    ``grid``; with ``WANT_SHAPE`` the Hausdorff distance from the rescaled hull
    to each target is recorded at every checkpoint.  With ``WANT_EXTREMES``
    the running minimum and maximum of ``L_k / D_k`` over every step
    ``n_start <= k`` so far are recorded as well (``inf`` / ``-inf`` before
    the first such step with ``D_k > 0``).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    cp = _check_checkpoints(checkpoints, n)
    out = np.zeros((trials, cp.size, NFIELDS), dtype=np.float64)
    if flags & WANT_EXTREMES:
        flags |= WANT_HULL
    if flags & WANT_SHAPE:
        if targets is None or grid is None:
            raise ValueError("shape recording needs targets and a grid")
        flags |= WANT_HULL
        cs, sn = grid.cos, grid.sin
        tsup = np.ascontiguousarray(targets, dtype=np.float64)
        hd = np.zeros((trials, cp.size, tsup.shape[0]), dtype=np.float64)
    else:
        cs = sn = np.zeros(0)
        tsup = np.zeros((0, 0))
        hd = np.zeros((trials, cp.size, 0))
    params = dist.params
    workers = max(1, min(threads or _threads, trials))

    def run(lo, hi):
        _simulate(dist.kind, params, int(n), cp, np.uint64(seed), first_trial + lo, hi - lo,
                  flags, int(n_start), cs, sn, tsup, out[lo:hi], hd[lo:hi])

    if workers == 1:
        run(0, trials)
    else:
        bounds = np.linspace(0, trials, workers * 4 + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, bounds[:-1], bounds[1:]))
    return SimResult(cp, out, hd if flags & WANT_SHAPE else None)


def invariant_violations(sim: SimResult, tol: float = 1e-9) -> dict:
    """Count trials breaking trace invariants: L, D, r non-decreasing across
    checkpoints, ``2 <= L/D <= pi`` when ``D > 0``, and ``|S_n| <= D``."""
    L, D, r, s = sim.L, sim.D, sim.r, sim.s_norm
    out = {}
    for name, v in (("L_monotone", L), ("D_monotone", D), ("r_monotone", r)):
        dv = np.diff(v, axis=1)
        out[name] = int(np.any(dv < -tol * np.maximum(1.0, np.abs(v[:, 1:])), axis=1).sum())
    pos = D > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        q = np.where(pos, L / np.where(pos, D, 1.0), 2.0)
    out["ratio_bounds"] = int(np.any((q < 2.0 - tol) | (q > math.pi + tol), axis=1).sum())
    out["norm_le_diameter"] = int(np.any(s > D * (1 + tol) + tol, axis=1).sum())
    return out


@dataclass
class FunctionalTrace:
    n: np.ndarray
    L: np.ndarray
    D: np.ndarray
    r: np.ndarray
    s_norm: np.ndarray
    x_proj: Optional[np.ndarray]
    ratio: np.ndarray  # NaN where D == 0
    witness: np.ndarray  # (ncp, 2) time indices of the diametral pair

    def check_invariants(self, tol: float = 1e-9) -> list[str]:
        """Violations of monotonicity, 2 <= L/D <= pi and |S_n| <= D."""
        bad = []
        for name in ("L", "D", "r"):
            v = getattr(self, name)
            if np.any(np.diff(v) < -tol * np.maximum(1.0, np.abs(v[1:]))):
                bad.append(f"{name} decreases")
        pos = self.D > 0
        ratio = self.L[pos] / self.D[pos]
        if np.any(ratio < 2.0 - tol) or np.any(ratio > math.pi + tol):
            bad.append("L/D outside [2, pi]")
        if np.any(self.s_norm > self.D * (1 + tol) + tol):
            bad.append("|S_n| exceeds D")
        return bad

    def rows(self):
        for k in range(self.n.size):
            yield (int(self.n[k]), float(self.L[k]), float(self.D[k]), float(self.r[k]),
                   float(self.s_norm[k]),
                   None if self.x_proj is None else float(self.x_proj[k]),
                   None if math.isnan(self.ratio[k]) else float(self.ratio[k]))


def _to_trace(cp, rec, mu_hat) -> FunctionalTrace:
    L, D = rec[:, F_L], rec[:, F_D]
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(D > 0, L / np.where(D > 0, D, 1.0), np.nan)
    x_proj = None
    if mu_hat is not None:
        x_proj = rec[:, F_SX] * mu_hat[0] + rec[:, F_SY] * mu_hat[1]
    return FunctionalTrace(
        n=cp.copy(), L=L.copy(), D=D.copy(), r=rec[:, F_R].copy(),
        s_norm=np.hypot(rec[:, F_SX], rec[:, F_SY]), x_proj=x_proj, ratio=ratio,
        witness=rec[:, [F_WI, F_WJ]].astype(np.int64),
    )


def trace(path: Path, checkpoints=None, mu_hat: Optional[Sequence[float]] = None) -> FunctionalTrace:
    """Functionals of the prefix hulls ``hull(S_0..S_k)`` at each checkpoint,
    maintained by point-by-point insertion."""
    pos = path.positions
    cp = default_checkpoints(path.n) if checkpoints is None else _check_checkpoints(checkpoints, path.n)
    rec = np.zeros((cp.size, NFIELDS))
    _trace_path(pos[:, 0].copy(), pos[:, 1].copy(), cp, rec)
    return _to_trace(cp, rec, mu_hat)


def trace_result(sim: SimResult, trial: int, mu_hat=None) -> FunctionalTrace:
    return _to_trace(sim.checkpoints, sim.data[trial], mu_hat)


def mean_se(x: np.ndarray, axis: int = 0):
    x = np.asarray(x, dtype=np.float64)
    m = x.shape[axis]
    mean = np.mean(x, axis=axis)
    se = np.std(x, axis=axis, ddof=1) / math.sqrt(m) if m > 1 else np.full_like(mean, np.nan)
    return mean, se


@dataclass
class SpitzerWidomPoint:
    k: int
    estimate: float
    se: float
    direct: float = math.nan
    direct_se: float = math.nan


def spitzer_widom_mean(dist: IncrementDistribution, n: int, trials: int, seed: int,
                       checkpoints=None, direct: bool = True) -> list[SpitzerWidomPoint]:
    """Estimate ``E L_k`` as ``2 sum_{j<=k} E|S_j| / j`` from shared paths.

    Each trial contributes its own running sum, so the estimate at ``k`` is a
    plain mean over trials and its standard error is the usual one.  With
    ``direct`` the perimeter of the same trajectories is reported alongside.
    """
    if n < 1:
        return []
    cp = default_checkpoints(n) if checkpoints is None else checkpoints
    cp = _check_checkpoints(cp, n)
    cp = cp[cp >= 1]
    flags = WANT_SW | (WANT_HULL if direct else 0)
    sim = simulate(dist, n, cp, trials, seed, flags)
    sw_mean, sw_se = mean_se(sim.field(F_SW))
    out = []
    if direct:
        l_mean, l_se = mean_se(sim.L)
    for c, k in enumerate(cp):
        p = SpitzerWidomPoint(int(k), float(sw_mean[c]), float(sw_se[c]))
        if direct:
            p.direct, p.direct_se = float(l_mean[c]), float(l_se[c])
        out.append(p)
    return out


# --- martingale-difference resampling -------------------------------------

@njit(cache=True, inline="always")
def _path_diameter(zs, hx, hy, hi):
    h = _hull.insert(hx, hy, hi, 0, 0.0, 0.0, 0)
    x = 0.0
    y = 0.0
    for k in range(zs.shape[0]):
        x += zs[k, 0]
        y += zs[k, 1]
        if h >= 3:
            e = _hull._visible_edge(hx, hy, h, x, y)
            if e >= 0:
                h = _hull._splice(hx, hy, hi, h, x, y, k + 1, e)
        else:
            h = _hull._insert_small(hx, hy, hi, h, x, y, k + 1)
    d, a, b = _hull.diameter(hx, hy, h)
    return d


@njit(cache=True, nogil=True)
def _resample(kind, params, n, inner, seed, first, count, d_out, dhat, dvar, worst, viol):
    z = np.empty((n, 2), dtype=np.float64)
    w = np.empty((n, 2), dtype=np.float64)
    zp = np.empty((n, 2), dtype=np.float64)
    pa = np.empty((n, 2), dtype=np.float64)
    pb = np.empty((n, 2), dtype=np.float64)
    hx = np.empty(n + 2, dtype=np.float64)
    hy = np.empty(n + 2, dtype=np.float64)
    hi = np.empty(n + 2, dtype=np.int64)
    mean = np.empty(n, dtype=np.float64)
    m2 = np.empty(n, dtype=np.float64)
    s = np.empty(4, dtype=np.uint64)
    zbuf = np.empty((BLOCK, 2), dtype=np.float64)
    for t in range(count):
        seed_into(s, seed, np.uint64(first + t))
        fill_increments(kind, params, s, zbuf, BLOCK, z)
        d_out[t] = _path_diameter(z, hx, hy, hi)
        seed_into(s, seed, np.uint64(INNER_STREAM_OFFSET + first + t))
        zc = BLOCK
        mean[:] = 0.0
        m2[:] = 0.0
        for q in range(inner):
            # fresh future steps W and fresh replacements Z', shared across i
            zc = fill_increments(kind, params, s, zbuf, zc, w)
            zc = fill_increments(kind, params, s, zbuf, zc, zp)
            for i in range(n):
                for k in range(n):
                    if k < i:
                        pa[k, 0] = z[k, 0]
                        pa[k, 1] = z[k, 1]
                        pb[k, 0] = z[k, 0]
                        pb[k, 1] = z[k, 1]
                    elif k == i:
                        pa[k, 0] = z[k, 0]
                        pa[k, 1] = z[k, 1]
                        pb[k, 0] = zp[k, 0]
                        pb[k, 1] = zp[k, 1]
                    else:
                        pa[k, 0] = w[k, 0]
                        pa[k, 1] = w[k, 1]
                        pb[k, 0] = w[k, 0]
                        pb[k, 1] = w[k, 1]
                diff = _path_diameter(pa, hx, hy, hi) - _path_diameter(pb, hx, hy, hi)
                bound = 2.0 * math.sqrt(z[i, 0] ** 2 + z[i, 1] ** 2) \
                    + 2.0 * math.sqrt(zp[i, 0] ** 2 + zp[i, 1] ** 2)
                if abs(diff) > bound:
                    viol[t] += 1
                if bound > 0.0:
                    ratio = abs(diff) / bound
                    if ratio > worst[t]:
                        worst[t] = ratio
                # Welford update of the inner mean / variance
                delta = diff - mean[i]
                mean[i] += delta / (q + 1)
                m2[i] += delta * (diff - mean[i])
        for i in range(n):
            dhat[t, i] = mean[i]
            dvar[t, i] = m2[i] / (inner - 1) if inner > 1 else 0.0


@dataclass
class ResampleReport:
    n: int
    trials: int
    inner: int
    var_direct: float
    var_direct_se: float
    var_identity: float
    var_identity_se: float
    delta_hat_sq: np.ndarray  # per index i: mean over trials of corrected delta^2
    bound_violations: int
    worst_bound_ratio: float  # max |D_n - D_n^(i)| / (2|Z_i| + 2|Z_i'|)
    mean_D: float
    bias_correction: str = "subtract inner-sample variance / inner"


def variance_se(x: np.ndarray) -> tuple[float, float]:
    """Unbiased sample variance and its large-sample standard error
    ``sqrt((m4 - s^4) / N)``."""
    x = np.asarray(x, dtype=np.float64)
    m = x.size
    v = float(np.var(x, ddof=1))
    c = x - x.mean()
    m4 = float(np.mean(c ** 4))
    return v, math.sqrt(max(m4 - v * v, 0.0) / m)


def resample_deltas(dist: IncrementDistribution, n: int, trials: int, inner: int,
                    seed: int, threads: Optional[int] = None) -> ResampleReport:
    """Martingale-difference decomposition of ``Var D_n``.

    For each trial and each step ``i`` the conditional mean
    ``Delta_i = E(D_n - D_n^(i) | Z_1..Z_i)`` is estimated from ``inner`` fresh
    draws of the replacement step and of the future steps ``i+1..n``.  The
    squared estimate overshoots by the inner-sample variance over ``inner``,
    which is subtracted.
    """
    if n < 1 or trials < 2 or inner < 2:
        raise ValueError("resampling needs n >= 1, trials >= 2, inner >= 2")
    d = np.zeros(trials)
    dhat = np.zeros((trials, n))
    dvar = np.zeros((trials, n))
    worst = np.zeros(trials)
    viol = np.zeros(trials, dtype=np.int64)
    params = dist.params
    workers = max(1, min(threads or _threads, trials))

    def run(lo, hi):
        _resample(dist.kind, params, int(n), int(inner), np.uint64(seed), lo, hi - lo,
                  d[lo:hi], dhat[lo:hi], dvar[lo:hi], worst[lo:hi], viol[lo:hi])

    if workers == 1:
        run(0, trials)
    else:
        bounds = np.linspace(0, trials, workers * 4 + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, bounds[:-1], bounds[1:]))

    corrected = dhat ** 2 - dvar / inner
    per_trial = corrected.sum(axis=1)
    vd, vd_se = variance_se(d)
    return ResampleReport(
        n=n, trials=trials, inner=inner,
        var_direct=vd, var_direct_se=vd_se,
        var_identity=float(per_trial.mean()),
        var_identity_se=float(per_trial.std(ddof=1) / math.sqrt(trials)),
        delta_hat_sq=corrected.mean(axis=0),
        bound_violations=int(viol.sum()), worst_bound_ratio=float(worst.max()),
        mean_D=float(d.mean()),
    )


@njit(cache=True)
def _enumerate(atoms, n, out_d, out_p):
    na = atoms.shape[0]
    digits = np.zeros(n, dtype=np.int64)
    z = np.empty((n, 2), dtype=np.float64)
    hx = np.empty(n + 2, dtype=np.float64)
    hy = np.empty(n + 2, dtype=np.float64)
    hi = np.empty(n + 2, dtype=np.int64)
    total = out_d.shape[0]
    for idx in range(total):
        p = 1.0
        for k in range(n):
            a = digits[k]
            z[k, 0] = atoms[a, 0]
            z[k, 1] = atoms[a, 1]
            p *= atoms[a, 2]
        out_d[idx] = _path_diameter(z, hx, hy, hi)
        out_p[idx] = p
        k = 0
        while k < n:
            digits[k] += 1
            if digits[k] < na:
                break
            digits[k] = 0
            k += 1


def exact_diameter_moments(dist: IncrementDistribution, n: int,
                           max_paths: int = 1 << 22) -> tuple[float, float]:
    """Exact ``(E D_n, Var D_n)`` by enumerating every path of a finitely
    supported walk."""
    atoms = support_atoms(dist)
    if atoms is None:
        raise ValueError("exact enumeration needs a finitely supported distribution")
    total = len(atoms) ** n
    if total > max_paths:
        raise ValueError(f"{total} paths exceed the enumeration limit {max_paths}")
    arr = np.array([[v.x, v.y, p] for v, p in atoms], dtype=np.float64)
    d = np.empty(total)
    p = np.empty(total)
    _enumerate(arr, int(n), d, p)
    mean = math.fsum(d * p)
    var = math.fsum(p * (d - mean) ** 2)
    return mean, var
