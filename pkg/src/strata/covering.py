"""Good/bad tree coverings of sampled strata and the volume-scaling fit.

A ball is "good" when the frequency at the reduced scale gamma*rho*r stays
within eta' of its sup E at every sampled stratum point it contains, and
"bad" otherwise.  Good roots refine through nets of stratum points whose
bad children seed the next generation; bad roots peel stratum points away
from a best-fit (k-1)-plane into small stop balls with a certified
frequency drop.  Alternating the two constructions terminates in a cover
by stop balls whose k-th power packing sum the audits measure directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .frequency import DegenerateHeight, frequency, frequency_batch
from .minkowski import tube_volume
from .fields import DEGENERATE_NORMALIZER, DegenerateRescaling
from .harmonic import ball_rule, ball_volume, sphere_rule, surface_area
from .symmetry import _FitWorkspace, _fit_workspace, fit_order, scan_scales


@dataclass
class CoveringParams:
    """Thresholds and scales steering ball classification and the trees."""

    epsilon: float
    k: int
    E: float
    R: float
    rho: float = 1.0 / 16.0
    gamma: float = 0.25
    eta_prime: float = 1e-2
    eta0: float = 1e-2
    eta: float = 1e-5
    d_max: int = 6
    quad_order: Optional[int] = None
    max_depth: int = 60

    def __post_init__(self):
        if not (0 < self.rho < 0.1):
            raise ValueError("refinement ratio must lie in (0, 1/10)")
        if not (0 < self.eta <= self.eta0 < self.rho):
            raise ValueError("need 0 < eta <= eta0 < rho")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if not (0 < self.R <= 1):
            raise ValueError("stop scale R must lie in (0, 1]")
        for name in ("epsilon", "eta_prime"):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be positive" % name)
        if self.k < 0:
            raise ValueError("stratum dimension must be nonnegative")

    @property
    def gamma0(self):
        # the construction couples these two thresholds
        return self.eta_prime

    def to_dict(self):
        return {"epsilon": self.epsilon, "k": self.k, "E": self.E,
                "R": self.R, "rho": self.rho, "gamma": self.gamma,
                "eta_prime": self.eta_prime, "eta0": self.eta0,
                "eta": self.eta, "d_max": self.d_max}


class FrequencyCache:
    """Memoized N(scale, p, v) lookups with quantized keys."""

    def __init__(self, v, order=None):
        self.v = v
        self.order = order
        self._store = {}

    def _key(self, p, r):
        return (tuple(np.round(np.asarray(p, dtype=float), 12)),
                round(float(r), 14))

    def frequency(self, p, r):
        key = self._key(p, r)
        if key not in self._store:
            try:
                self._store[key] = frequency(self.v, p, r, order=self.order)
            except DegenerateHeight:
                self._store[key] = None
        return self._store[key]

    def __len__(self):
        return len(self._store)


@dataclass
class Plane:
    """Affine plane: point plus orthonormal direction rows (possibly none)."""

    point: np.ndarray
    dirs: np.ndarray

    def distance(self, x):
        d = np.atleast_2d(x) - self.point
        if self.dirs.shape[0]:
            d = d - (d @ self.dirs.T) @ self.dirs
        return np.linalg.norm(d, axis=1)


def fit_plane(points, dim_plane):
    """Total-least-squares plane through weighted-equal points."""
    points = np.atleast_2d(points)
    center = points.mean(axis=0)
    if dim_plane <= 0 or points.shape[0] == 1:
        return Plane(center, np.zeros((0, points.shape[1])))
    centered = points - center
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    dirs = vt[:min(dim_plane, vt.shape[0])]
    return Plane(center, dirs)


@dataclass
class BallClass:
    kind: str                      # 'good' | 'bad'
    witness: Optional[np.ndarray]  # stratum point violating the condition
    plane: Optional[Plane]         # for bad balls: (k-1)-plane fit
    vacuous: bool = False


def classify_ball(v, center, radius, params: CoveringParams, stratum_points,
                  cache: FrequencyCache = None):
    """Good iff N(gamma rho r, p, v) >= E - eta' at every sampled stratum
    point p of the ball; bad balls carry the best-fit (k-1)-plane to their
    high-frequency subset."""
    cache = cache or FrequencyCache(v, order=params.quad_order)
    center = np.asarray(center, dtype=float)
    pts = np.atleast_2d(stratum_points) if len(stratum_points) else \
        np.zeros((0, v.dim))
    if len(pts):
        inside = np.linalg.norm(pts - center, axis=1) <= radius * (1 + 1e-12)
        pts = pts[inside]
    if len(pts) == 0:
        return BallClass("good", None, None, vacuous=True)
    scale = params.gamma * params.rho * radius
    values = np.array([np.nan if cache.frequency(p, scale) is None
                       else cache.frequency(p, scale) for p in pts])
    ok = values >= params.E - params.eta_prime
    if np.isnan(values).any():
        ok = ok | np.isnan(values)   # degenerate points cannot witness
    if ok.all():
        return BallClass("good", None, None)
    witness = pts[int(np.argmin(np.where(np.isnan(values), np.inf, values)))]
    high = pts[~np.isnan(values) & (values >= params.E - params.eta0 / 2)]
    plane = fit_plane(high, params.k - 1) if params.k >= 1 and len(high) \
        else None
    return BallClass("bad", witness, plane)


def maximal_net(points, spacing):
    """Greedy first-fit net: pairwise >= spacing, every point within spacing.

    Points are visited in lexicographic order, making the result a pure
    function of the input set.
    """
    if spacing <= 0:
        raise ValueError("net spacing must be positive")
    pts = np.atleast_2d(points)
    if pts.shape[0] == 0:
        return pts.copy()
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    kept = [pts[0]]
    for x in pts[1:]:
        d = np.linalg.norm(np.asarray(kept) - x, axis=1)
        if (d >= spacing).all():
            kept.append(x)
    return np.array(kept)


@dataclass
class TreeBall:
    center: np.ndarray
    radius: float
    kind: str          # 'good' | 'bad' | 'stop'
    depth: int
    plane: Optional[Plane] = None


@dataclass
class TreeRun:
    root: TreeBall
    leaves: List[TreeBall]
    stops: List[TreeBall]
    audits: dict

    def leaf_sum(self, k):
        return sum(b.radius ** k for b in self.leaves)

    def stop_sum(self, k):
        return sum(b.radius ** k for b in self.stops)


def _points_in(points, center, radius):
    if len(points) == 0:
        return points
    d = np.linalg.norm(points - center, axis=1)
    return points[d <= radius * (1 + 1e-12)]


def _covering_misses(points, balls):
    """Stratum points not inside any listed ball."""
    points = np.atleast_2d(points)
    if points.shape[0] == 0:
        return 0
    covered = np.zeros(points.shape[0], dtype=bool)
    for b in balls:
        d = np.linalg.norm(points - b.center, axis=1)
        covered |= d <= b.radius * (1 + 1e-12)
    return int(np.count_nonzero(~covered))


def _inside_any(points, centers, radii):
    """Bool mask: point lies in some closed ball (vectorized)."""
    points = np.atleast_2d(points)
    out = np.zeros(points.shape[0], dtype=bool)
    for c, r in zip(centers, radii):
        out |= np.linalg.norm(points - c, axis=1) <= r * (1 + 1e-12)
    return out


def _shrunk_disjoint(balls):
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            gap = np.linalg.norm(balls[i].center - balls[j].center)
            if gap < (balls[i].radius + balls[j].radius) / 5 - 1e-12:
                return False
    return True


def good_tree(v, root_center, root_radius, params: CoveringParams,
              stratum_points, cache: FrequencyCache = None):
    """Refine a good ball through nets until the stop scale.

    Children are classified; bad children become the leaves, and the last
    net (first radius <= R) becomes the stop collection with radii in
    (rho R, R].
    """
    cache = cache or FrequencyCache(v, order=params.quad_order)
    root_center = np.asarray(root_center, dtype=float)
    root = TreeBall(root_center, root_radius, "good", 0)
    base = _points_in(np.atleast_2d(stratum_points), root_center, root_radius) \
        if len(stratum_points) else np.zeros((0, v.dim))
    good_centers = [(root_center, root_radius)]
    bad_balls: List[TreeBall] = []
    stops: List[TreeBall] = []
    depth = 0
    radius = root_radius
    while radius > params.R and good_centers and depth < params.max_depth:
        depth += 1
        radius = root_radius * params.rho ** depth
        if len(base):
            in_good = _inside_any(base, [g for g, _ in good_centers],
                                  [gr for _, gr in good_centers])
            in_bad = _inside_any(base, [b.center for b in bad_balls],
                                 [b.radius for b in bad_balls])
            cand = base[in_good & ~in_bad]
        else:
            cand = base
        net = maximal_net(cand if len(cand) else np.zeros((0, v.dim)),
                          0.4 * radius)
        if radius <= params.R:
            for z in net:
                stops.append(TreeBall(z, radius, "stop", depth))
            break
        new_good = []
        for z in net:
            cls = classify_ball(v, z, radius, params, base, cache)
            if cls.kind == "good":
                new_good.append((z, radius))
            else:
                bad_balls.append(TreeBall(z, radius, "bad", depth, cls.plane))
        good_centers = new_good
    if depth >= params.max_depth and radius > params.R:
        raise RuntimeError("good tree exceeded depth cap %d (radius %.3e, "
                           "stop %.3e)" % (params.max_depth, radius, params.R))
    out_balls = bad_balls + stops
    audits = {
        "leaf_packing": sum(b.radius ** params.k for b in bad_balls),
        "stop_packing": sum(b.radius ** params.k for b in stops),
        "covering_misses": _covering_misses(base, out_balls),
        "shrunk_disjoint": _shrunk_disjoint(out_balls),
        "stop_radii_ok": all(params.rho * params.R < b.radius <=
                             params.R * (1 + 1e-12) for b in stops),
        "depth": depth,
    }
    return TreeRun(root, bad_balls, stops, audits)


def _stop_drop_ok(v, ball, params, stratum_points, cache):
    """Size control alternative: either eta R <= r_s <= R or the frequency
    at doubled scale has dropped below E - eta/2 on sampled points."""
    if params.eta * params.R <= ball.radius <= params.R * (1 + 1e-12):
        return True
    pts = [ball.center]
    if len(stratum_points):
        d = np.linalg.norm(stratum_points - ball.center, axis=1)
        pts.extend(stratum_points[d <= 2 * ball.radius])
    sup = -np.inf
    for p in pts:
        val = cache.frequency(p, 2 * ball.radius)
        if val is not None:
            sup = max(sup, val)
    return sup <= params.E - params.eta / 2


def bad_tree(v, root_center, root_radius, plane: Optional[Plane],
             params: CoveringParams, stratum_points,
             cache: FrequencyCache = None):
    """Peel stratum points away from the root's (k-1)-plane.

    Points near the plane refine to the next scale and are classified;
    points off the plane become stop balls of radius eta * r whose
    frequency drop the audit verifies.
    """
    cache = cache or FrequencyCache(v, order=params.quad_order)
    root_center = np.asarray(root_center, dtype=float)
    root = TreeBall(root_center, root_radius, "bad", 0, plane)
    base = _points_in(np.atleast_2d(stratum_points), root_center, root_radius) \
        if len(stratum_points) else np.zeros((0, v.dim))
    bad_front: List[TreeBall] = [root]
    good_leaves: List[TreeBall] = []
    stops: List[TreeBall] = []
    depth = 0
    radius = root_radius
    while bad_front and depth < params.max_depth:
        depth += 1
        prev_radius = radius
        radius = root_radius * params.rho ** depth
        near_mask = np.zeros(len(base), dtype=bool)
        held_mask = np.zeros(len(base), dtype=bool)
        for b in bad_front:
            if len(base) == 0:
                break
            inside = np.linalg.norm(base - b.center, axis=1) <= \
                b.radius * (1 + 1e-12)
            held_mask |= inside
            if b.plane is not None:
                close = b.plane.distance(base) <= 2 * params.rho * prev_radius
                near_mask |= inside & close
        if radius <= params.R:
            hold = base[_inside_any(base, [b.center for b in bad_front],
                                    [radius] * len(bad_front))] \
                if len(base) else base
            net = maximal_net(hold if len(hold) else np.zeros((0, v.dim)),
                              0.4 * params.eta * prev_radius)
            for z in net:
                stops.append(TreeBall(z, params.eta * prev_radius, "stop",
                                      depth))
            break
        off = base[held_mask & ~near_mask] if len(base) else base
        near = base[near_mask] if len(base) else base
        stop_net = maximal_net(off if len(off) else np.zeros((0, v.dim)),
                               0.4 * params.eta * prev_radius)
        for z in stop_net:
            stops.append(TreeBall(z, params.eta * prev_radius, "stop", depth))
        net = maximal_net(near if len(near) else np.zeros((0, v.dim)),
                          0.4 * radius)
        new_front = []
        for z in net:
            cls = classify_ball(v, z, radius, params, base, cache)
            if cls.kind == "good":
                good_leaves.append(TreeBall(z, radius, "good", depth))
            else:
                new_front.append(TreeBall(z, radius, "bad", depth, cls.plane))
        bad_front = new_front
    if depth >= params.max_depth and bad_front:
        raise RuntimeError("bad tree exceeded depth cap %d" % params.max_depth)
    out_balls = good_leaves + stops
    audits = {
        "leaf_packing": sum(b.radius ** params.k for b in good_leaves),
        "stop_packing": sum(b.radius ** params.k for b in stops),
        "covering_misses": _covering_misses(base, out_balls),
        "shrunk_disjoint": _shrunk_disjoint(out_balls),
        "stop_condition_ok": all(_stop_drop_ok(v, b, params, base, cache)
                                 for b in stops),
        "depth": depth,
    }
    return TreeRun(root, good_leaves, stops, audits)


@dataclass
class CoverReport:
    params: CoveringParams
    balls: List[TreeBall]
    generations: int
    tree_count: int
    audits: dict
    stratum_size: int

    @property
    def packing_sum(self):
        return sum(b.radius ** self.params.k for b in self.balls)

    def to_json(self):
        return json.dumps({
            "schema": 1,
            "params": self.params.to_dict(),
            "balls": [{"x": b.center.tolist(), "r": b.radius,
                       "class": b.kind, "depth": b.depth}
                      for b in self.balls],
            "sums": {"packing": self.packing_sum},
            "generations": self.generations,
            "trees": self.tree_count,
            "audits": self.audits,
            "stratum_size": self.stratum_size,
        }, indent=1)


def _consolidate(balls, sample, R, net_fraction=0.3):
    """Lift stop radii to R and thin the centers to a net.

    Every dropped center sits within net_fraction * R of a kept one, and a
    stop ball covered its stratum points within 0.4 of its radius, so kept
    balls still cover every sample with slack at least
    (1 - 0.4 - net_fraction) R; that slack is what keeps a twice-denser
    resample covered.
    """
    if not balls:
        return []
    centers = np.array([b.center for b in balls])
    kept_centers = maximal_net(centers, net_fraction * R)
    by_key = {tuple(np.round(b.center, 12)): b for b in balls}
    kept = []
    for c in kept_centers:
        b = by_key[tuple(np.round(c, 12))]
        kept.append(TreeBall(b.center, max(R, b.radius), "stop", b.depth,
                             b.plane))
    return kept


def build_cover(v, params: CoveringParams, stratum_points,
                cache: FrequencyCache = None, consolidate=True,
                max_generations=40):
    """Alternate good and bad trees from the unit ball down to scale R."""
    cache = cache or FrequencyCache(v, order=params.quad_order)
    stratum_points = np.atleast_2d(stratum_points) if len(stratum_points) \
        else np.zeros((0, v.dim))
    origin = np.zeros(v.dim)
    cls = classify_ball(v, origin, 1.0, params, stratum_points, cache)
    frontier = [TreeBall(origin, 1.0, cls.kind, 0, cls.plane)]
    stops: List[TreeBall] = []
    all_audits = []
    generations = 0
    trees = 0
    while frontier:
        generations += 1
        if generations > max_generations:
            raise RuntimeError(
                "cover did not terminate in %d generations; %d balls live"
                % (max_generations, len(frontier)))
        next_frontier = []
        for ball in frontier:
            if ball.kind == "good":
                run = good_tree(v, ball.center, ball.radius, params,
                                stratum_points, cache)
            else:
                run = bad_tree(v, ball.center, ball.radius, ball.plane,
                               params, stratum_points, cache)
            trees += 1
            stops.extend(run.stops)
            next_frontier.extend(run.leaves)
            all_audits.append(run.audits)
        frontier = next_frontier
    final = _consolidate(stops, stratum_points, params.R) if consolidate \
        else stops
    audits = {
        "tree_covering_misses": int(sum(a["covering_misses"]
                                        for a in all_audits)),
        "tree_shrunk_disjoint": all(a["shrunk_disjoint"]
                                    for a in all_audits),
        "final_covering_misses": _covering_misses(stratum_points, final),
        "stop_condition_ok": all(
            b.radius >= params.R * (1 - 1e-12)
            or _stop_drop_ok(v, b, params, stratum_points, cache)
            for b in final),
        "raw_stop_count": len(stops),
    }
    return CoverReport(params, final, generations, trees, audits,
                       len(stratum_points))


def _linear_close_batch(v, points, s, eps, order=None, chunk=300):
    """Masks (close, degenerate) for the recentred rescalings at scale s.

    ``close`` marks points whose rescaling is within eps (ball mean-square)
    of some unit-norm plain linear model.  Linear models are invariant along
    n-1 directions, so closeness here certifies (j, eps)-symmetry for every
    j <= n-1; it is a sufficient rejection only, never a membership proof.
    """
    points = np.atleast_2d(points)
    n = v.dim
    order = order or fit_order(n)
    srule = sphere_rule(n, order)
    brule = ball_rule(n, order)
    ws_sphere = srule.weights / surface_area(n)
    wb = brule.weights / ball_volume(n)
    close = np.zeros(points.shape[0], dtype=bool)
    degen = np.zeros(points.shape[0], dtype=bool)
    lin_sq = 1.0 / (n + 2)     # ball mean of (u . y)^2 for unit u
    for start in range(0, points.shape[0], chunk):
        blk = points[start:start + chunk]
        m = blk.shape[0]
        base = v.values(blk)
        pts = (blk[:, None, :] + s * srule.nodes[None, :, :]).reshape(-1, n)
        sph = v.values(pts).reshape(m, -1) - base[:, None]
        norms = np.sqrt(np.maximum(sph ** 2 @ ws_sphere, 0.0))
        bad = norms < DEGENERATE_NORMALIZER
        degen[start:start + chunk] = bad
        norms = np.where(bad, 1.0, norms)
        pts = (blk[:, None, :] + s * brule.nodes[None, :, :]).reshape(-1, n)
        g = (v.values(pts).reshape(m, -1) - base[:, None]) / norms[:, None]
        g2 = g ** 2 @ wb
        mom = g @ (wb[:, None] * brule.nodes)      # m x n
        dist = g2 - 2.0 * math.sqrt(n) * np.linalg.norm(mom, axis=1) \
            + n * lin_sq
        close[start:start + chunk] = ~bad & (dist < eps)
    return close, degen


def sample_stratum(v, k, eps, params_or_floor, target_pitch, radius=1.0,
                   base_pitch=0.25, freq_fraction=0.25, q=2.0, d_max=6,
                   E=None, order=None, prefilter_order=4,
                   cache: FrequencyCache = None, progress=None):
    """Finite sample of the stratum by pruned dyadic refinement.

    Lattice nodes refine toward the stratum; a node survives a level when
    the frequency at a scale tied to the current pitch stays above a
    fraction of the excess E - 1 (stratum points force elevated frequency
    nearby, so the pre-filter is conservative).  Surviving nodes at the
    target pitch pass through the full symmetry scan: a stratum member
    fails (k+1)-symmetry at every scanned scale above the floor.
    """
    if isinstance(params_or_floor, CoveringParams):
        scan_floor = params_or_floor.eta * params_or_floor.R
    else:
        scan_floor = float(params_or_floor)
    n = v.dim
    if E is None:
        E = params_or_floor.E if isinstance(params_or_floor, CoveringParams) \
            else frequency(v, np.zeros(n), 2.0)
    thresh = 1.0 + freq_fraction * max(E - 1.0, 0.0)

    pitch = base_pitch
    steps = int(round(2 * radius / pitch))
    grid = np.stack(np.meshgrid(*([np.arange(steps + 1)] * n),
                                indexing="ij"), axis=-1).reshape(-1, n)
    nodes = grid
    offsets = np.stack(np.meshgrid(*([np.array([-1, 0, 1])] * n),
                                   indexing="ij"), axis=-1).reshape(-1, n)

    while True:
        pts = nodes * pitch - radius
        keep_box = np.linalg.norm(pts, axis=1) <= radius * math.sqrt(n) + pitch
        nodes, pts = nodes[keep_box], pts[keep_box]
        scale = max(4.0 * pitch, scan_floor)
        vals = frequency_batch(v, pts, scale, order=prefilter_order)
        survivors = nodes[np.isnan(vals) | (vals >= thresh)]
        if progress:
            progress("pitch %.5f: %d -> %d nodes" %
                     (pitch, len(nodes), len(survivors)))
        if pitch <= target_pitch:
            nodes = survivors
            break
        children = (2 * survivors[:, None, :] +
                    offsets[None, :, :]).reshape(-1, n)
        nodes = np.unique(children, axis=0)
        pitch /= 2.0

    scales = scan_scales(scan_floor, q)
    pts = nodes * pitch - radius
    inside = np.max(np.abs(pts), axis=1) <= radius * (1 + 1e-12)
    pts = pts[inside]
    pts = pts[np.lexsort(pts.T[::-1])]
    alive = np.ones(pts.shape[0], dtype=bool)
    total = pts.shape[0]
    for s in scales:
        if not alive.any():
            break
        sub = pts[alive]
        close, degen = _linear_close_batch(v, sub, s, eps, order=order)
        drop = close | degen
        survivors = sub[~drop]
        keep = np.ones(survivors.shape[0], dtype=bool)
        for i, x in enumerate(survivors):
            try:
                ws = _FitWorkspace(v, x, s, order=order)
                fit = _fit_workspace(ws, min(k + 1, n - 1), d_max=d_max,
                                     target=eps)
                keep[i] = fit.distance >= eps
            except (DegenerateRescaling, DegenerateHeight):
                keep[i] = False
        new_alive = np.zeros(total, dtype=bool)
        idx_alive = np.flatnonzero(alive)
        new_alive[idx_alive[~drop]] = keep
        alive = new_alive
    out = pts[alive]
    if progress:
        progress("symmetry scan: %d -> %d members" % (total, len(out)))
    return out if len(out) else np.zeros((0, n))


def tubular_volume(points, R, box=None, pitch=None, cell_cap=2.0e7,
                   mc_budget=2_000_000, seed=0):
    """Volume of the R-neighborhood of a point set (grid or Monte Carlo).

    Delegates to the shared tube-volume engine; the estimation box defaults
    to the sample's bounding box padded by R.
    """
    return tube_volume(points, R, box=box, pitch=pitch, cell_cap=cell_cap,
                       mc_budget=mc_budget, seed=seed)


@dataclass
class ScalingResult:
    radii: np.ndarray
    volumes: np.ndarray
    exponent: float
    sample_size: int
    degenerate: bool = False


def scaling_fit(v, k, eps, R_list, scan_floor=1e-4, radius=0.25,
                target_pitch=None, order=None, sample=None, seed=0, q=4.0):
    """Exponent of Vol(B_R(stratum sample)) against R by log-log slope."""
    R_list = np.sort(np.asarray(R_list, dtype=float))
    if len(R_list) < 2:
        raise ValueError("need at least two tube radii")
    if sample is None:
        pitch = target_pitch or float(R_list[0]) / 2.0
        sample = sample_stratum(v, k, eps, scan_floor, pitch, radius=radius,
                                base_pitch=radius / 2.0, order=order, q=q)
    if len(sample) == 0:
        return ScalingResult(R_list, np.zeros_like(R_list), float("nan"),
                             0, degenerate=True)
    # fixed window for every R: endcap volumes beyond the sampling box grow
    # one power faster than the tube and would bend the log-log slope
    window = [(-radius, radius)] * sample.shape[1]
    vols = np.array([tubular_volume(sample, R, box=window, seed=seed)
                     for R in R_list])
    if (vols <= 0).any():
        return ScalingResult(R_list, vols, float("nan"), len(sample),
                             degenerate=True)
    slope = np.polyfit(np.log(R_list), np.log(vols), 1)[0]
    return ScalingResult(R_list, vols, float(slope), len(sample))


def scaling_to_csv(result: ScalingResult, path):
    import csv
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["schema", "1"])
        writer.writerow(["R", "volume"])
        for r, vol in zip(result.radii, result.volumes):
            writer.writerow(["%.17g" % r, "%.17g" % vol])
        writer.writerow(["exponent", "%.17g" % result.exponent])
