"""Porosity scans, porous-set volume bounds, and box-dimension estimates.

Porosity at (x, r) is the largest radius of a ball that fits inside
B_r(x) without touching the set, relative to r.  Sets porous down to a
scale admit an explicit volume decay through dyadic cube counting, and the
tube-volume slope over a geometric radius list estimates the upper box
dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np
from scipy.spatial import cKDTree


def tube_volume(points, r, box=None, pitch=None, cell_cap=2.0e7,
                mc_budget=2_000_000, seed=0):
    """Volume of the r-neighborhood of a point set inside a box.

    Occupancy counting on a lattice of pitch <= r/8 when the cell count
    permits; a seeded uniform sample of the box otherwise.  The box
    defaults to the sample's bounding box padded by r.
    """
    points = np.atleast_2d(points)
    if points.shape[0] == 0:
        return 0.0
    n = points.shape[1]
    if box is None:
        lo = points.min(axis=0) - r
        hi = points.max(axis=0) + r
    else:
        lo = np.asarray([b[0] for b in box], dtype=float)
        hi = np.asarray([b[1] for b in box], dtype=float)
    pitch = pitch or r / 8.0
    counts = np.maximum(np.ceil((hi - lo) / pitch).astype(int), 1)
    tree = cKDTree(points)
    total_cells = float(np.prod(counts.astype(float)))
    if total_cells <= cell_cap:
        axes = [lo[i] + (np.arange(counts[i]) + 0.5) * pitch
                for i in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        centers = np.stack([m.ravel() for m in mesh], axis=1)
        d, _ = tree.query(centers, k=1)
        return float(np.count_nonzero(d <= r) * pitch ** n)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < mc_budget:
        m = min(200_000, mc_budget - done)
        sample = rng.uniform(lo, hi, (m, n))
        d, _ = tree.query(sample, k=1)
        hits += int(np.count_nonzero(d <= r))
        done += m
    return float(np.prod(hi - lo)) * hits / mc_budget


def porosity(points, x, r, grid_density=12, refine_steps=24):
    """Largest empty-ball radius inside B_r(x), relative to r.

    Grid search over candidate centers followed by coordinate descent;
    a lower bound on the true value, off by at most the final step size.
    """
    points = np.atleast_2d(points)
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    tree = cKDTree(points)

    def value(y):
        room = r - np.linalg.norm(y - x, axis=-1)
        d, _ = tree.query(np.atleast_2d(y), k=1)
        return np.minimum(d, np.atleast_1d(room))

    axes = [np.linspace(-r, r, grid_density)] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = x + np.stack([m.ravel() for m in mesh], axis=1)
    cand = cand[np.linalg.norm(cand - x, axis=1) <= r]
    vals = value(cand)
    best = cand[int(np.argmax(vals))].copy()
    best_val = float(vals.max())
    step = r / grid_density
    for _ in range(refine_steps):
        moved = False
        for axis in range(n):
            for sgn in (1.0, -1.0):
                trial = best.copy()
                trial[axis] += sgn * step
                if np.linalg.norm(trial - x) > r:
                    continue
                tv = float(value(trial)[0])
                if tv > best_val:
                    best, best_val = trial, tv
                    moved = True
        if not moved:
            step /= 2.0
            if step < 1e-6 * r:
                break
    return max(best_val, 0.0) / r


@dataclass
class PorosityCheck:
    measured_volume: float
    bound: float
    porous_ok: bool
    worst_porosity: float
    failures: List
    k: int
    k_prime: int
    N: int


def porous_volume_bound_check(points, alpha_por, r0, box=None,
                              sample_limit=40, seed=0):
    """Measured tube volume at r0 against the dyadic-count decay bound.

    The bound (1 - 2^-(k+k'))^N uses the smallest k with 2^-k <= alpha,
    the smallest integer k' >= 2 + log2(n)/2, and N <= -log2(r0)/(k+k').
    Porosity down to scale r0 is verified on a seeded finite scan of
    centers and dyadic radii (documented surrogate for "all x, r").
    """
    points = np.atleast_2d(points)
    n = points.shape[1]
    if box is None:
        box = [(0.0, 1.0)] * n
    rng = np.random.default_rng(seed)
    idx = np.arange(points.shape[0])
    if len(idx) > sample_limit:
        idx = rng.choice(idx, sample_limit, replace=False)
    radii = []
    r = float(r0)
    while r <= 1.0 + 1e-12:
        radii.append(r)
        r *= 2.0
    failures = []
    worst = np.inf
    for i in idx:
        for r in radii:
            p = porosity(points, points[i], r)
            worst = min(worst, p)
            if p <= alpha_por:
                failures.append((i, r, p))
    k = max(1, math.ceil(-math.log2(alpha_por)))
    k_prime = math.ceil(2 + 0.5 * math.log2(n))
    N = int(math.floor(-math.log2(r0) / (k + k_prime)))
    bound = (1.0 - 2.0 ** -(k + k_prime)) ** N
    measured = tube_volume(points, r0, box=box)
    return PorosityCheck(measured, bound, not failures, float(worst),
                         failures, k, k_prime, N)


def minkowski_estimate(points, s, r_list, box=None, seed=0):
    """Content values Vol(B_r(E)) / (2r)^(n-s) on a geometric radius list."""
    r_list = np.sort(np.asarray(r_list, dtype=float))
    if len(r_list) < 4:
        raise ValueError("need at least four radii")
    points = np.atleast_2d(points)
    n = points.shape[1]
    vols = np.array([tube_volume(points, r, box=box, seed=seed)
                     for r in r_list])
    return vols / (2.0 * r_list) ** (n - s)


@dataclass
class DimensionFit:
    dimension: float
    radii: np.ndarray
    volumes: np.ndarray
    trimmed: bool
    monotone: bool


def dimension_fit(points, r_list, box=None, seed=0, curvature_tol=0.12):
    """Upper box dimension via the log-log tube-volume slope.

    Boundary effects bend the large-radius end of the curve; when the
    quadratic term in the log-log fit exceeds the tolerance the two
    largest radii are discarded before the final linear fit.
    """
    r_list = np.sort(np.asarray(r_list, dtype=float))
    if len(r_list) < 4:
        raise ValueError("need at least four radii")
    points = np.atleast_2d(points)
    n = points.shape[1]
    vols = np.array([tube_volume(points, r, box=box, seed=seed)
                     for r in r_list])
    if (vols <= 0).any():
        raise ValueError("tube volume vanished; radius list too small")
    monotone = bool((np.diff(vols) >= -1e-12).all())
    lr, lv = np.log(r_list), np.log(vols)
    quad = np.polyfit(lr, lv, 2)[0]
    trimmed = False
    if abs(quad) > curvature_tol and len(r_list) >= 6:
        lr, lv = lr[:-2], lv[:-2]
        trimmed = True
    slope = np.polyfit(lr, lv, 1)[0]
    return DimensionFit(float(n - slope), r_list, vols, trimmed, monotone)


def plane_sample(n, k, pitch, box=None, seed=None):
    """Lattice sample of a k-plane slice of the unit box (test helper)."""
    if box is None:
        box = [(0.0, 1.0)] * n
    axes = [np.arange(box[i][0], box[i][1] + pitch / 2, pitch)
            for i in range(k)]
    if k == 0:
        pts = np.zeros((1, n))
        pts[0, :] = [0.5 * (b[0] + b[1]) for b in box]
        return pts
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=1)
    pts = np.zeros((flat.shape[0], n))
    pts[:, :k] = flat
    for i in range(k, n):
        pts[:, i] = 0.5 * (box[i][0] + box[i][1])
    return pts
