"""Seeded generators for the rue, netgen, morphed and tspgen instance classes.

Every generator is a pure function of its configuration: the same config
yields the same coordinates bit for bit. Coordinates are integers in
``[0, bound]^2`` and no two points coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import DistanceMode, Instance
from .errors import GenerationFailure, InvalidConfigError, InvalidInputError

MUTATION_KINDS = ("grid", "explosion", "implosion", "cluster", "linear-projection")


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    n: int
    bound: float = 1e6
    id: str | None = None

    def __post_init__(self):
        if self.n < 3:
            raise InvalidConfigError(f"n must be >= 3, got {self.n}")
        if not self.bound > 0:
            raise InvalidConfigError(f"bound must be positive, got {self.bound}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def rng(self, *stream) -> np.random.Generator:
        return np.random.default_rng([self.seed, *stream])

    def name(self, group: str) -> str:
        return self.id or f"{group}-n{self.n}-s{self.seed}"


@dataclass(frozen=True)
class ClusterSpec:
    n_clusters: int = 5
    spread: float = 0.025
    min_separation: float = 0.1

    def __post_init__(self):
        if self.n_clusters < 2:
            raise InvalidConfigError("netgen needs at least 2 clusters")
        if self.spread <= 0 or self.min_separation < 0:
            raise InvalidConfigError("spread must be positive and min_separation nonnegative")


@dataclass(frozen=True)
class MutationOp:
    """One tspgen operator with its strength parameters.

    ``rate`` is the fraction of points touched per application (at least one
    point is always touched). ``radius`` is the disc radius used by explosion
    and implosion, as a fraction of ``bound``; ``factor`` is the implosion
    contraction; ``spread`` the cluster standard deviation.
    """

    kind: str
    rate: float = 0.1
    radius: float = 0.1
    factor: float = 0.3
    spread: float = 0.025

    def __post_init__(self):
        if self.kind not in MUTATION_KINDS:
            raise InvalidConfigError(f"unknown mutation operator {self.kind!r}")
        if not 0 < self.rate <= 1:
            raise InvalidConfigError(f"rate must be in (0, 1], got {self.rate}")
        if min(self.radius, self.factor, self.spread) <= 0:
            raise InvalidConfigError("mutation strengths must be positive")


DEFAULT_OPS = tuple(MutationOp(k) for k in MUTATION_KINDS)


def _dedupe(coords: np.ndarray, rng: np.random.Generator, bound: float, movable=None) -> np.ndarray:
    """Nudge colliding points by small integer offsets until all are distinct.

    Only rows flagged in ``movable`` are moved; when two fixed rows collide
    the later one is moved anyway.
    """
    coords = coords.copy()
    n = len(coords)
    if movable is None:
        movable = np.ones(n, dtype=bool)
    for attempt in range(10_000):
        _, first, counts = np.unique(coords, axis=0, return_index=True, return_counts=True)
        if len(first) == n:
            return coords
        keys = {}
        clash = []
        # deterministic pass in index order: the first holder of a location stays unless it is movable and a fixed row wants it
        for i, key in enumerate(map(tuple, coords.tolist())):
            if key in keys:
                j = keys[key]
                if movable[i] or not movable[j]:
                    clash.append(i)
                else:
                    clash.append(j)
                    keys[key] = i
            else:
                keys[key] = i
        step = 1 + attempt // 10
        for i in clash:
            coords[i] = np.clip(coords[i] + rng.integers(-step, step + 1, size=2), 0, bound)
    raise GenerationFailure("could not resolve duplicate points")


def _finish(coords: np.ndarray, rng, bound, movable=None) -> np.ndarray:
    coords = np.clip(np.rint(coords), 0, math.floor(bound))
    return _dedupe(coords, rng, math.floor(bound), movable)


def gen_rue(cfg: GeneratorConfig, metric: DistanceMode = DistanceMode.ROUNDED) -> Instance:
    rng = cfg.rng(0)
    coords = np.rint(rng.uniform(0.0, cfg.bound, size=(cfg.n, 2)))
    # resample collisions from the same uniform law
    for _ in range(1000):
        _, first = np.unique(coords, axis=0, return_index=True)
        if len(first) == cfg.n:
            break
        dup = np.setdiff1d(np.arange(cfg.n), first)
        coords[dup] = np.rint(rng.uniform(0.0, cfg.bound, size=(len(dup), 2)))
    else:
        raise GenerationFailure("rue: could not draw distinct points")
    return Instance(cfg.name("rue"), coords, "rue", metric,
                    {"generator": "rue", "seed": cfg.seed, "n": cfg.n, "bound": cfg.bound})


def cluster_sizes(n: int, n_clusters: int) -> list[int]:
    """Split ``n`` into ``n_clusters`` sizes differing by at most one; larger ones first."""
    base, extra = divmod(n, n_clusters)
    return [base + 1 if i < extra else base for i in range(n_clusters)]


def latin_hypercube(n_samples: int, n_dims: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube design in the unit cube.

    One sample per stratum in every dimension, uniform jitter inside the
    stratum, strata paired across dimensions by independent permutations.
    """
    strata = np.stack([rng.permutation(n_samples) for _ in range(n_dims)], axis=1)
    return (strata + rng.uniform(size=(n_samples, n_dims))) / n_samples


def netgen_centers(cfg: GeneratorConfig, spec: ClusterSpec, rng, max_redraws: int = 1000) -> np.ndarray:
    lo, hi = 0.1 * cfg.bound, 0.9 * cfg.bound
    min_sep = spec.min_separation * cfg.bound
    for _ in range(max_redraws):
        centers = lo + (hi - lo) * latin_hypercube(spec.n_clusters, 2, rng)
        diff = centers[:, None, :] - centers[None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
        d[np.diag_indices_from(d)] = np.inf
        if d.min() >= min_sep:
            return centers
    raise GenerationFailure(
        f"netgen: no center layout with separation {spec.min_separation} after {max_redraws} redraws")


def gen_netgen(cfg: GeneratorConfig, spec: ClusterSpec = ClusterSpec(),
               metric: DistanceMode = DistanceMode.ROUNDED) -> Instance:
    """Clustered instance; points are emitted cluster by cluster in center order."""
    if cfg.n < spec.n_clusters:
        raise InvalidConfigError(f"n={cfg.n} smaller than n_clusters={spec.n_clusters}")
    rng = cfg.rng(1)
    centers = netgen_centers(cfg, spec, rng)
    sigma = spec.spread * cfg.bound
    blocks = []
    sizes = cluster_sizes(cfg.n, spec.n_clusters)
    for center, size in zip(centers, sizes):
        pts = rng.normal(center, sigma, size=(size, 2))
        # truncate to the window by rejection
        bad = ((pts < 0) | (pts > cfg.bound)).any(axis=1)
        while bad.any():
            pts[bad] = rng.normal(center, sigma, size=(int(bad.sum()), 2))
            bad = ((pts < 0) | (pts > cfg.bound)).any(axis=1)
        blocks.append(pts)
    coords = _finish(np.vstack(blocks), rng, cfg.bound)
    meta = {"generator": "netgen", "seed": cfg.seed, "n": cfg.n, "bound": cfg.bound,
            "n_clusters": spec.n_clusters, "cluster_sizes": sizes, "spread": spec.spread, "min_separation": spec.min_separation,
            "centers": np.round(centers, 3).tolist()}
    return Instance(cfg.name("netgen"), coords, "netgen", metric, meta)


def min_cost_matching(set_a, set_b) -> tuple[np.ndarray, float]:
    """Minimum total Euclidean cost perfect matching between two point sets.

    Returns ``(assignment, cost)`` where ``assignment[i]`` is the index in
    ``set_b`` matched to point ``i`` of ``set_a``.
    """
    a = np.asarray(set_a, dtype=np.float64)
    b = np.asarray(set_b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"point sets differ in size: {a.shape} vs {b.shape}")
    diff = a[:, None, :] - b[None, :, :]
    cost = np.hypot(diff[..., 0], diff[..., 1])
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(len(a), dtype=np.int64)
    assignment[rows] = cols
    return assignment, float(cost[rows, cols].sum())


def gen_morphed(a: Instance, b: Instance, lam: float = 0.5, seed: int = 0,
                id: str | None = None) -> Instance:
    """Convex combination ``lam * a_i + (1 - lam) * b_match(i)`` of matched points."""
    if a.n != b.n:
        raise InvalidInputError(f"morphing needs equal sizes, got {a.n} and {b.n}")
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must lie in [0, 1], got {lam}")
    assignment, cost = min_cost_matching(a.coords, b.coords)
    mixed = lam * a.coords + (1.0 - lam) * b.coords[assignment]
    bound = float(max(a.coords.max(), b.coords.max(), 1.0))
    bound = float(a.meta.get("bound", bound))
    coords = _finish(mixed, np.random.default_rng([seed, 2]), bound)
    meta = {"generator": "morphed", "seed": seed, "n": a.n, "lambda": lam,
            "parents": [a.id, b.id], "matching_cost": cost, "bound": bound}
    return Instance(id or f"morphed-{a.id}-{b.id}-l{lam:g}", coords, "morphed", a.metric, meta)


def _subset_size(op: MutationOp, n: int) -> int:
    return max(1, min(n, int(round(op.rate * n))))


def grid_positions(k: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """First ``k`` nodes of a near-square lattice spanning the box ``[lo, hi]``."""
    cols = math.ceil(math.sqrt(k))
    rows = math.ceil(k / cols)
    xs = np.linspace(lo[0], hi[0], cols) if cols > 1 else np.array([(lo[0] + hi[0]) / 2])
    ys = np.linspace(lo[1], hi[1], rows) if rows > 1 else np.array([(lo[1] + hi[1]) / 2])
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])[:k]


def apply_mutation(coords: np.ndarray, op: MutationOp, rng: np.random.Generator,
                   bound: float) -> tuple[np.ndarray, np.ndarray]:
    """Apply one operator; returns the new coordinates and the indices touched."""
    out = coords.astype(np.float64, copy=True)
    n = len(out)
    k = _subset_size(op, n)
    if op.kind in ("explosion", "implosion"):
        center = rng.uniform(0, bound, size=2)
        d = np.hypot(*(out - center).T)
        idx = np.sort(np.argsort(d, kind="stable")[:k])
    else:
        idx = np.sort(rng.choice(n, size=k, replace=False))
    pts = out[idx]

    if op.kind == "grid":
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pos = grid_positions(k, lo, hi)
        out[idx] = pos[rng.permutation(k)]
    elif op.kind == "explosion":
        r = op.radius * bound
        vec = pts - center
        norm = np.hypot(*vec.T)
        zero = norm == 0
        if zero.any():
            ang = rng.uniform(0, 2 * np.pi, size=int(zero.sum()))
            vec[zero] = np.column_stack([np.cos(ang), np.sin(ang)])
            norm[zero] = 1.0
        push = r + rng.exponential(r / 2, size=k)
        out[idx] = center + vec / norm[:, None] * np.maximum(norm, push)[:, None]
    elif op.kind == "implosion":
        out[idx] = center + (pts - center) * op.factor
    elif op.kind == "cluster":
        anchor = rng.uniform(0, bound, size=2)
        out[idx] = rng.normal(anchor, op.spread * bound, size=(k, 2))
    elif op.kind == "linear-projection":
        p0, p1 = rng.uniform(0, bound, size=(2, 2))
        direction = p1 - p0
        length2 = float(direction @ direction) or 1.0
        s = np.clip((pts - p0) @ direction / length2, 0.0, 1.0)
        out[idx] = p0 + s[:, None] * direction
    return np.clip(out, 0, bound), idx


def mutate_coords(coords: np.ndarray, ops: Sequence[MutationOp], rng, bound: float) -> np.ndarray:
    op = ops[int(rng.integers(len(ops)))]
    new, idx = apply_mutation(coords, op, rng, bound)
    movable = np.zeros(len(coords), dtype=bool)
    movable[idx] = True
    new[~movable] = coords[~movable]
    return _finish(new, rng, bound, movable)


def gen_tspgen(cfg: GeneratorConfig, ops: Sequence[MutationOp] = DEFAULT_OPS, iterations: int = 10,
               metric: DistanceMode = DistanceMode.ROUNDED) -> Instance:
    if iterations < 1:
        raise InvalidConfigError("tspgen needs at least one iteration")
    if not ops:
        raise InvalidConfigError("tspgen needs at least one mutation operator")
    base = gen_rue(cfg, metric)
    rng = cfg.rng(3)
    coords = base.coords.copy()
    for _ in range(iterations):
        coords = mutate_coords(coords, ops, rng, cfg.bound)
    meta = {"generator": "tspgen", "seed": cfg.seed, "n": cfg.n, "bound": cfg.bound,
            "iterations": iterations, "ops": [vars(op) for op in ops]}
    return Instance(cfg.name("tspgen"), coords, "tspgen", metric, meta)


@dataclass
class GeneratorJob:
    """A declarative request for ``count`` instances of one class (CLI config block)."""

    generator: str
    n: int
    count: int = 1
    seed: int = 0
    bound: float = 1e6
    params: dict = field(default_factory=dict)


def run_job(job: GeneratorJob) -> list[Instance]:
    out = []
    for i in range(job.count):
        seed = job.seed + i
        cfg = GeneratorConfig(seed=seed, n=job.n, bound=job.bound)
        p = dict(job.params)
        if job.generator == "rue":
            _no_params(p, job.generator)
            out.append(gen_rue(cfg))
        elif job.generator == "netgen":
            n_clusters = p.pop("n_clusters", 5)
            if isinstance(n_clusters, list):
                n_clusters = n_clusters[i % len(n_clusters)]
            spec = ClusterSpec(n_clusters, p.pop("spread", 0.025), p.pop("min_separation", 0.1))
            _no_params(p, job.generator)
            out.append(gen_netgen(cfg, spec))
        elif job.generator == "tspgen":
            ops = [MutationOp(**o) if isinstance(o, dict) else MutationOp(o) for o in p.pop("ops", MUTATION_KINDS)]
            iterations = p.pop("iterations", 10)
            _no_params(p, job.generator)
            out.append(gen_tspgen(cfg, ops, iterations))
        elif job.generator == "morphed":
            lam = p.pop("lambda", 0.5)
            n_clusters = p.pop("n_clusters", 5)
            _no_params(p, job.generator)
            a = gen_rue(GeneratorConfig(seed, job.n, job.bound))
            b = gen_netgen(GeneratorConfig(seed, job.n, job.bound), ClusterSpec(n_clusters))
            out.append(gen_morphed(a, b, lam, seed, id=f"morphed-n{job.n}-s{seed}"))
        else:
            raise InvalidConfigError(f"unknown generator {job.generator!r}")
    return out


def _no_params(p: dict, name: str):
    if p:
        raise InvalidConfigError(f"unknown parameters for {name}: {sorted(p)}")
