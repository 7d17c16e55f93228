"""Increment distributions, their analytic moments, and seeded trajectories.

Variate consumption per step (fixed so that streams replay exactly):

* ``degenerate_diag`` -- one bit per step, least significant first, 64 steps
  per 64-bit word; bit 1 gives (1, 1), bit 0 gives (1, -1).
* ``lattice`` -- two bits per step, 32 steps per word; values 0..3 map to
  (1,0), (-1,0), (0,1), (0,-1).
* ``finite`` -- one double ``u`` per step; the first atom whose cumulative
  probability exceeds ``u`` is taken.
* ``gaussian`` -- Marsaglia polar method: pairs of doubles ``(u, v)`` mapped
  to ``2u - 1, 2v - 1`` until ``0 < s < 1``; both normals of the accepted pair
  are used (x then y), so every step consumes whole pairs and no normal is
  carried over between steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .geom2d import Vec2
from .rng import RandomStream, next_double, next_u64

KIND_FINITE = 0
KIND_GAUSSIAN = 1
KIND_LATTICE = 2
KIND_DIAG = 3


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class DriftStats:
    mu: Vec2
    mu_norm: float
    sigma2: float
    sigma_mu2: Optional[float]
    sigma_perp2: Optional[float]
    mu_hat: Optional[Vec2]
    mu_perp_hat: Optional[Vec2]

    @property
    def has_drift(self) -> bool:
        return self.mu_hat is not None

    def to_dict(self) -> dict:
        return {
            "mu": list(self.mu), "mu_norm": self.mu_norm, "sigma2": self.sigma2,
            "sigma_mu2": self.sigma_mu2, "sigma_perp2": self.sigma_perp2,
        }


class IncrementDistribution:
    """Base class; concrete variants below. ``kind``/``params`` feed the
    compiled samplers."""

    type_tag: str = ""
    kind: int = -1

    @property
    def params(self) -> np.ndarray:
        return np.zeros((0, 3), dtype=np.float64)

    def to_dict(self) -> dict:
        raise NotImplementedError

    def moments(self) -> DriftStats:
        return moments(self)

    def sample_path(self, n: int, stream: RandomStream) -> "Path":
        return sample_path(self, n, stream)


@dataclass(frozen=True)
class FiniteSupport(IncrementDistribution):
    atoms: tuple  # ((Vec2, probability), ...)

    type_tag = "finite"
    kind = KIND_FINITE

    def __post_init__(self):
        atoms = tuple((Vec2(float(v[0]), float(v[1])), float(p)) for v, p in self.atoms)
        if not atoms:
            raise DistributionError("finite distribution needs at least one atom")
        for v, p in atoms:
            if not (p > 0 and math.isfinite(p)):
                raise DistributionError(f"atom probabilities must be positive, got {p}")
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                raise DistributionError("atom coordinates must be finite")
        total = math.fsum(p for _, p in atoms)
        if abs(total - 1.0) > 1e-12:
            raise DistributionError(f"atom probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    @property
    def params(self) -> np.ndarray:
        out = np.empty((len(self.atoms), 3), dtype=np.float64)
        acc = 0.0
        for k, (v, p) in enumerate(self.atoms):
            acc += p
            out[k] = (v.x, v.y, acc)
        out[-1, 2] = 1.0
        return out

    def to_dict(self) -> dict:
        return {"type": "finite", "atoms": [[v.x, v.y, p] for v, p in self.atoms]}


@dataclass(frozen=True)
class IsotropicGaussianShifted(IncrementDistribution):
    mu: Vec2
    sd: float

    type_tag = "gaussian"
    kind = KIND_GAUSSIAN

    def __post_init__(self):
        object.__setattr__(self, "mu", Vec2(float(self.mu[0]), float(self.mu[1])))
        if not (self.sd > 0 and math.isfinite(self.sd)):
            raise DistributionError(f"sd must be positive, got {self.sd}")

    @property
    def params(self) -> np.ndarray:
        return np.array([[self.mu.x, self.mu.y, self.sd]], dtype=np.float64)

    def to_dict(self) -> dict:
        return {"type": "gaussian", "mu": [self.mu.x, self.mu.y], "sd": self.sd}


@dataclass(frozen=True)
class LatticeSimple(IncrementDistribution):
    type_tag = "lattice"
    kind = KIND_LATTICE

    def to_dict(self) -> dict:
        return {"type": "lattice"}


@dataclass(frozen=True)
class DegenerateDiag(IncrementDistribution):
    type_tag = "degenerate_diag"
    kind = KIND_DIAG

    def to_dict(self) -> dict:
        return {"type": "degenerate_diag"}


def support_atoms(dist: IncrementDistribution):
    """Atoms of a finitely supported law, or None for the Gaussian."""
    if isinstance(dist, FiniteSupport):
        return dist.atoms
    if isinstance(dist, LatticeSimple):
        return tuple((Vec2(*v), 0.25) for v in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)))
    if isinstance(dist, DegenerateDiag):
        return ((Vec2(1.0, 1.0), 0.5), (Vec2(1.0, -1.0), 0.5))
    return None


def from_dict(spec: dict) -> IncrementDistribution:
    if not isinstance(spec, dict) or "type" not in spec:
        raise DistributionError("distribution spec must be an object with a 'type' field")
    kind = spec["type"]
    allowed = {"finite": {"atoms"}, "gaussian": {"mu", "sd"}, "lattice": set(),
               "degenerate_diag": set()}
    if kind not in allowed:
        raise DistributionError(f"unknown distribution type {kind!r}")
    extra = set(spec) - allowed[kind] - {"type"}
    if extra:
        raise DistributionError(f"unknown keys for {kind!r} distribution: {sorted(extra)}")
    missing = allowed[kind] - set(spec)
    if missing:
        raise DistributionError(f"missing keys for {kind!r} distribution: {sorted(missing)}")
    if kind == "finite":
        atoms = []
        for a in spec["atoms"]:
            if len(a) != 3:
                raise DistributionError("finite atoms are [x, y, probability] triples")
            atoms.append(((a[0], a[1]), a[2]))
        return FiniteSupport(tuple(atoms))
    if kind == "gaussian":
        mu = spec["mu"]
        if len(mu) != 2:
            raise DistributionError("gaussian mu must have two coordinates")
        return IsotropicGaussianShifted(Vec2(*mu), float(spec["sd"]))
    if kind == "lattice":
        return LatticeSimple()
    return DegenerateDiag()


def moments(dist: IncrementDistribution) -> DriftStats:
    """Exact mean and variance split along / across the drift direction."""
    atoms = support_atoms(dist)
    if atoms is not None:
        mx = math.fsum(p * v.x for v, p in atoms)
        my = math.fsum(p * v.y for v, p in atoms)
        cxx = math.fsum(p * (v.x - mx) ** 2 for v, p in atoms)
        cyy = math.fsum(p * (v.y - my) ** 2 for v, p in atoms)
        cxy = math.fsum(p * (v.x - mx) * (v.y - my) for v, p in atoms)
    else:
        mx, my = dist.mu
        cxx = cyy = dist.sd ** 2
        cxy = 0.0
    mu = Vec2(mx, my)
    norm = math.hypot(mx, my)
    sigma2 = cxx + cyy
    if norm == 0.0:
        return DriftStats(mu, 0.0, sigma2, None, None, None, None)
    ux, uy = mx / norm, my / norm
    sigma_mu2 = ux * ux * cxx + 2 * ux * uy * cxy + uy * uy * cyy
    sigma_perp2 = uy * uy * cxx - 2 * ux * uy * cxy + ux * ux * cyy
    return DriftStats(mu, norm, sigma2, sigma_mu2, sigma_perp2,
                      Vec2(ux, uy), Vec2(0.0 - uy, ux))


@dataclass(frozen=True, eq=False)
class Path:
    positions: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.positions, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 1:
            raise ValueError("path positions must be an (n + 1, 2) array")
        if p[0, 0] != 0.0 or p[0, 1] != 0.0:
            raise ValueError("a path starts at the origin")
        p.setflags(write=False)
        object.__setattr__(self, "positions", p)

    @classmethod
    def from_increments(cls, increments) -> "Path":
        z = np.asarray(increments, dtype=np.float64).reshape(-1, 2)
        pos = np.zeros((z.shape[0] + 1, 2))
        _cumulate(z, pos)
        return cls(pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.positions, axis=0)

    def __len__(self):
        return self.positions.shape[0]


@njit(cache=True)
def _cumulate(z, pos):
    x = 0.0
    y = 0.0
    for k in range(z.shape[0]):
        x += z[k, 0]
        y += z[k, 1]
        pos[k + 1, 0] = x
        pos[k + 1, 1] = y


BLOCK = 64


@njit(cache=True)
def refill(kind, params, s, buf):
    """Generate the next BLOCK increments of the stream into ``buf``."""
    if kind == KIND_DIAG:
        word = next_u64(s)
        for k in range(BLOCK):
            buf[k, 0] = 1.0
            buf[k, 1] = 1.0 if (word >> np.uint64(k)) & np.uint64(1) else -1.0
        return
    if kind == KIND_LATTICE:
        for half in range(2):
            word = next_u64(s)
            for k in range(32):
                b = (word >> np.uint64(2 * k)) & np.uint64(3)
                j = 32 * half + k
                if b == 0:
                    buf[j, 0] = 1.0
                    buf[j, 1] = 0.0
                elif b == 1:
                    buf[j, 0] = -1.0
                    buf[j, 1] = 0.0
                elif b == 2:
                    buf[j, 0] = 0.0
                    buf[j, 1] = 1.0
                else:
                    buf[j, 0] = 0.0
                    buf[j, 1] = -1.0
        return
    if kind == KIND_GAUSSIAN:
        mx = params[0, 0]
        my = params[0, 1]
        sd = params[0, 2]
        for k in range(BLOCK):
            while True:
                u = 2.0 * next_double(s) - 1.0
                v = 2.0 * next_double(s) - 1.0
                q = u * u + v * v
                if 0.0 < q < 1.0:
                    break
            f = math.sqrt(-2.0 * math.log(q) / q)
            buf[k, 0] = mx + sd * u * f
            buf[k, 1] = my + sd * v * f
        return
    last = params.shape[0] - 1
    for k in range(BLOCK):
        u = next_double(s)
        a = 0
        while a < last and u >= params[a, 2]:
            a += 1
        buf[k, 0] = params[a, 0]
        buf[k, 1] = params[a, 1]


@njit(cache=True)
def fill_increments(kind, params, s, buf, cur, out):
    """Write the next ``len(out)`` increments of the stream; returns the new
    block cursor.  Blocks are an implementation detail, the sequence of
    increments is the per-step schedule documented above."""
    for k in range(out.shape[0]):
        if cur == BLOCK:
            refill(kind, params, s, buf)
            cur = 0
        out[k, 0] = buf[cur, 0]
        out[k, 1] = buf[cur, 1]
        cur += 1
    return cur


def sample_increments(dist: IncrementDistribution, n: int, stream: RandomStream) -> np.ndarray:
    out = np.empty((n, 2), dtype=np.float64)
    buf = np.empty((BLOCK, 2), dtype=np.float64)
    fill_increments(dist.kind, dist.params, stream.state(), buf, BLOCK, out)
    return out


def sample_path(dist: IncrementDistribution, n: int, stream: RandomStream) -> Path:
    if n < 0:
        raise ValueError("path length must be non-negative")
    return Path.from_increments(sample_increments(dist, n, stream))


def constant(step: Sequence[float]) -> FiniteSupport:
    """Point mass at ``step``."""
    return FiniteSupport((((float(step[0]), float(step[1])), 1.0),))
