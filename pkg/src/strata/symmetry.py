"""Nearest translation-invariant hinged models and the critical strata.

A k-symmetric model is c*P+ - P- for a homogeneous harmonic polynomial P
depending only on the orthogonal complement of a k-dimensional invariance
subspace V, normalized to unit mean-square on the unit sphere.  The distance
from a field at (p, r) to that class is the ball mean-square error of the
recentred rescaling T[p, r]v against the best such model.

The infimum has no closed form; the search couples an outer scan over
(degree, V) with an inner alternating least-squares fit in (coefficients,
hinge).  Oracle comparisons in the test suite bound the optimality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .fields import DegenerateRescaling, rescale
from .frequency import DegenerateHeight, frequency
from .harmonic import (ball_rule, ball_volume, harmonic_basis, sphere_rule,
                       surface_area)

MAX_ALTERNATIONS = 50
ALTERNATION_TOL = 1e-10
HINGE_FLOOR = 1e-8


@dataclass
class SymmetryFit:
    k: int
    degree: int
    coeffs: np.ndarray          # over the orthonormal harmonic basis in m vars
    c: float
    V: np.ndarray               # (k x n) invariance directions (rows)
    W: np.ndarray               # ((n-k) x n) complement directions (rows)
    distance: float

    def model_values(self, y):
        z = np.atleast_2d(y) @ self.W.T
        p = _model_columns(self.W.shape[0], self.degree, z) @ self.coeffs
        return np.where(p > 0, self.c * p, p)


@dataclass
class StratumSample:
    point: np.ndarray
    distances: Dict[int, float] = field(default_factory=dict)
    flags: Dict[int, bool] = field(default_factory=dict)
    scale_of_min: Dict[int, float] = field(default_factory=dict)
    degenerate: bool = False


def _complement(V, n):
    """Orthonormal rows spanning the orthogonal complement of rows of V."""
    if V.shape[0] == 0:
        return np.eye(n)
    q, _ = np.linalg.qr(np.vstack([V, np.eye(n)]).T)
    W = q[:, V.shape[0]:n].T
    return W


def fit_order(n):
    """Quadrature order used by symmetry fits (lighter than field defaults)."""
    return {2: 16, 3: 12}.get(n, 6)


class _FitWorkspace:
    """Quadrature data for one rescaled field, shared across candidates."""

    def __init__(self, v, p, r, order=None):
        self.n = v.dim
        order = order or fit_order(self.n)
        self.T = rescale(v, p, r, quad_order=order)
        self.ball = ball_rule(self.n, order)
        self.sphere = sphere_rule(self.n, order)
        self.g_ball = self.T.values(self.ball.nodes)
        self.vol = ball_volume(self.n)
        self.area = surface_area(self.n)
        self.wb = self.ball.weights / self.vol
        self.ws = self.sphere.weights / self.area
        self.grad_moment = None

    def gradient_moment(self):
        if self.grad_moment is None:
            g = self.T.gradient(self.ball.nodes)
            self.grad_moment = (g * self.ball.weights[:, None]).T @ g
        return self.grad_moment


def _model_columns(m, degree, z):
    """Values of the degree-d harmonic basis in m variables at points z."""
    if m == 1:
        if degree != 1:
            return None
        return z.copy()
    basis = harmonic_basis(m, degree)
    return np.stack([b(z) for b in basis], axis=1)


def _wls(B, wb, g):
    """Weighted least squares via normal equations (few columns)."""
    A = (B * wb[:, None]).T @ B
    b = (B * wb[:, None]).T @ g
    A[np.diag_indices_from(A)] += 1e-14 * (np.trace(A) + 1e-300)
    try:
        return np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(B * np.sqrt(wb)[:, None],
                               g * np.sqrt(wb), rcond=None)[0]


def _fit_hinged_line(ws, W):
    """Exact fit over models c*max(a t, 0) + min(a t, 0) of one variable.

    With supports of the two branches disjoint, the normalized distance is
    an explicit smooth function of the hinge alone (per orientation of a),
    so a log-grid plus golden-section refinement finds the optimum without
    any alternation.
    """
    zb = (ws.ball.nodes @ W.T)[:, 0]
    zs = (ws.sphere.nodes @ W.T)[:, 0]
    g = ws.g_ball
    wb, wsw = ws.wb, ws.ws
    g2 = float(wb @ g ** 2)
    best = (np.inf, None, None)
    for orient in (1.0, -1.0):
        ub = orient * zb
        us = orient * zs
        pos_b, neg_b = np.maximum(ub, 0.0), np.minimum(ub, 0.0)
        pos_s, neg_s = np.maximum(us, 0.0), np.minimum(us, 0.0)
        a_pos = float(wb @ (g * pos_b))
        a_neg = float(wb @ (g * neg_b))
        b_pos = float(wb @ pos_b ** 2)
        b_neg = float(wb @ neg_b ** 2)
        s_pos = float(wsw @ pos_s ** 2)
        s_neg = float(wsw @ neg_s ** 2)

        def dist(c):
            nrm2 = c * c * s_pos + s_neg
            if nrm2 < 1e-28:
                return np.inf
            nrm = math.sqrt(nrm2)
            return g2 - 2.0 * (c * a_pos + a_neg) / nrm \
                + (c * c * b_pos + b_neg) / nrm2

        cs = np.exp(np.linspace(math.log(1e-4), math.log(1e4), 49))
        vals = [dist(c) for c in cs]
        i = int(np.argmin(vals))
        lo = cs[max(i - 1, 0)]
        hi = cs[min(i + 1, len(cs) - 1)]
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a_, b_ = lo, hi
        c1 = b_ - phi * (b_ - a_)
        c2 = a_ + phi * (b_ - a_)
        f1, f2 = dist(c1), dist(c2)
        for _ in range(60):
            if f1 <= f2:
                b_, c2, f2 = c2, c1, f1
                c1 = b_ - phi * (b_ - a_)
                f1 = dist(c1)
            else:
                a_, c1, f1 = c1, c2, f2
                c2 = a_ + phi * (b_ - a_)
                f2 = dist(c2)
        c_opt = 0.5 * (a_ + b_)
        d_opt = dist(c_opt)
        if dist(1.0) <= d_opt + 1e-12:
            c_opt, d_opt = 1.0, dist(1.0)
        if d_opt < best[0]:
            nrm = math.sqrt(c_opt ** 2 * s_pos + s_neg)
            best = (d_opt, np.array([orient / nrm]), c_opt)
    if best[1] is None:
        return None
    return (max(best[0], 0.0), best[1], best[2])


def _fit_direction(ws, W, degree, thorough=True):
    """Best hinged model for a fixed complement frame and degree.

    Alternates sign assignment, coefficient least squares, and the hinge
    update; finishes with the unit-sphere renormalization.  Returns
    (distance, coeffs, c) or None when the basis is empty.
    """
    m = W.shape[0]
    if m == 1:
        return _fit_hinged_line(ws, W) if degree == 1 else None
    zb = ws.ball.nodes @ W.T
    zs = ws.sphere.nodes @ W.T
    Bb = _model_columns(m, degree, zb)
    if Bb is None:
        return None
    Bs = _model_columns(m, degree, zs)
    g = ws.g_ball
    wb, wsw = ws.wb, ws.ws

    def normalized_distance(a, c):
        ub = Bb @ a
        us = Bs @ a
        mb = np.where(ub > 0, c * ub, ub)
        msphere = np.where(us > 0, c * us, us)
        nrm = math.sqrt(max(wsw @ msphere ** 2, 0.0))
        if nrm < 1e-14:
            return np.inf, None
        return max(float(wb @ (g - mb / nrm) ** 2), 0.0), nrm

    a_free = _wls(Bb, wb, g)
    if np.linalg.norm(a_free) < 1e-14:
        # even data is orthogonal to every plain harmonic model of this
        # parity; only the hinge can pick it up, so start generic
        a_free = np.ones(Bb.shape[1]) / math.sqrt(Bb.shape[1])
    best = (np.inf, None, None)
    c_inits = (1.0, 2.0, 0.5) if thorough else (1.0, 2.0)
    iter_cap = MAX_ALTERNATIONS if thorough else 25
    for c0 in c_inits:
        a = a_free.copy()
        c = c0
        prev = np.inf
        for _ in range(iter_cap):
            u = Bb @ a
            kappa = np.where(u > 0, c, 1.0)
            a = _wls(Bb * kappa[:, None], wb, g)
            u = Bb @ a
            upos = np.maximum(u, 0.0)
            uneg = np.minimum(u, 0.0)
            denom = wb @ upos ** 2
            if denom > 1e-30:
                c = max(float(wb @ ((g - uneg) * upos)) / denom, HINGE_FLOOR)
            dist, _ = normalized_distance(a, c)
            if prev - dist < ALTERNATION_TOL:
                break
            prev = dist
        dist, nrm = normalized_distance(a, c)
        if nrm is not None and dist < best[0]:
            best = (dist, a / nrm, c)
    if best[1] is None:
        return None
    # hinge-free variant; preferred on ties so exact harmonics report c = 1
    dist1, nrm1 = normalized_distance(a_free, 1.0)
    if nrm1 is not None and dist1 <= best[0] + 1e-12:
        best = (dist1, a_free / nrm1, 1.0)
    return best


def _coordinate_frames(n, k):
    from itertools import combinations
    eye = np.eye(n)
    return [eye[list(rows)] for rows in combinations(range(n), k)]


def _candidate_subspaces(ws, k, seed=11, extra=None, keep=4):
    """Invariance-subspace candidates, cheapest-energy first.

    The gradient second moment ranks candidates: directions along which the
    rescaled field barely varies carry the least energy, so its bottom
    eigenvectors are the natural first guess.
    """
    n = ws.n
    if k == 0:
        return [np.zeros((0, n))]
    moment = ws.gradient_moment()
    _, vecs = np.linalg.eigh(moment)
    first = vecs[:, :k].T.copy()
    pool = list(_coordinate_frames(n, k))
    rng = np.random.default_rng(seed)
    for _ in range(6):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        pool.append(q[:, :k].T.copy())
    pool.sort(key=lambda V: float(np.einsum("in,nm,im->", V, moment, V)))
    cands = [first] + pool[:keep]
    if extra:
        cands.extend(np.asarray(V, dtype=float).reshape(-1, n)
                     for V in extra)
    return cands


def _refine_subspace(ws, V, degree_list):
    """Plane rotations between V and its complement, kept when they help."""
    n = ws.n
    best_V = V
    best = _best_over_degrees(ws, V, degree_list)
    for step in (0.3, 0.1, 0.03):
        improved = True
        sweeps = 0
        while improved and sweeps < 2:
            improved = False
            sweeps += 1
            W = _complement(best_V, n)
            for i in range(best_V.shape[0]):
                for j in range(W.shape[0]):
                    for sign in (1.0, -1.0):
                        Vt = best_V.copy()
                        Vt[i] = math.cos(sign * step) * best_V[i] + \
                            math.sin(sign * step) * W[j]
                        q, _ = np.linalg.qr(Vt.T)
                        Vt = q[:, :Vt.shape[0]].T
                        trial = _best_over_degrees(ws, Vt, degree_list)
                        if trial[0] < best[0] - 1e-13:
                            best, best_V = trial, Vt
                            improved = True
    return best_V, best


def _best_over_degrees(ws, V, degree_list, thorough=True):
    W = _complement(V, ws.n)
    best = (np.inf, None, None, None)
    for d in degree_list:
        out = _fit_direction(ws, W, d, thorough=thorough)
        if out is not None and out[0] < best[0]:
            best = (out[0], out[1], out[2], d)
        if best[0] < 1e-12:
            break
    return best


def _fit_workspace(ws, k, d_max=6, seed=11, extra_candidates=None,
                   refine=True, target=None):
    degree_list = list(range(1, d_max + 1))
    best = (np.inf, None, None, None)
    best_V = None
    for V in _candidate_subspaces(ws, k, seed=seed, extra=extra_candidates):
        out = _best_over_degrees(ws, V, degree_list, thorough=False)
        if out[0] < best[0]:
            best, best_V = out, V
        if best[0] < 1e-11:
            break
    if best[3] is not None:
        polished = _best_over_degrees(ws, best_V, [best[3]], thorough=True)
        if polished[0] < best[0]:
            best = polished
    do_refine = refine and k > 0 and best[0] > 1e-12
    if do_refine and target is not None:
        # refinement can only lower the distance, so a clear verdict on
        # either side of the threshold cannot flip
        do_refine = target <= best[0] < 4.0 * target
    if do_refine:
        near = [d for d in degree_list if abs(d - best[3]) <= 1]
        best_V, refined = _refine_subspace(ws, best_V, near)
        if refined[0] < best[0]:
            best = refined
    dist, coeffs, c, d = best
    W = _complement(best_V, ws.n)
    return SymmetryFit(k=k, degree=d, coeffs=coeffs, c=c,
                       V=best_V, W=W, distance=dist)


def nearest_k_symmetric(v, p, r, k, d_max=6, order=None, seed=11,
                        extra_candidates=None, refine=True, target=None):
    """Closest k-symmetric hinged model to T[p, r]v in ball mean-square."""
    if not (0 <= k <= v.dim - 1):
        raise ValueError("invariance dimension k must lie in [0, n-1]")
    ws = _FitWorkspace(v, p, r, order=order)
    return _fit_workspace(ws, k, d_max=d_max, seed=seed,
                          extra_candidates=extra_candidates, refine=refine,
                          target=target)


def is_symmetric(v, p, r, k, eps, d_max=6, order=None):
    """True when the distance to the k-symmetric class at (p, r) is < eps."""
    fit = nearest_k_symmetric(v, p, r, k, d_max=d_max, order=order,
                              target=eps)
    return fit.distance < eps


def scan_scales(r, q, top=1.0):
    """Geometric scale set {r q^i} intersected with [r, top]."""
    if q <= 1:
        raise ValueError("scale ratio must exceed 1")
    out = []
    s = float(r)
    while s <= top * (1 + 1e-12):
        out.append(min(s, top))
        s *= q
    return np.array(out)


def stratify(v, grid_points, eps, r, q=2.0, k_range=None, d_max=6,
             order=None, threads=1):
    """Classify lattice points into the critical strata.

    A point belongs to stratum k when the field fails (k+1)-symmetry at
    every scanned scale s in [r, 1].  Scanning the finite geometric scale
    set is the documented discretization of "all s >= r".  Points are
    independent; ``threads`` > 1 fans them out with results collected in
    input order, so the output never depends on the worker count.
    """
    grid_points = np.atleast_2d(grid_points)
    if threads and threads > 1 and len(grid_points) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = pool.map(
                lambda x: stratify(v, x[None, :], eps, r, q=q,
                                   k_range=k_range, d_max=d_max,
                                   order=order, threads=1),
                grid_points)
        return [s for chunk in chunks for s in chunk]
    n = v.dim
    if k_range is None:
        k_range = range(0, n - 1)
    k_range = list(k_range)
    sym_indices = sorted({k + 1 for k in k_range})
    scales = scan_scales(r, q)
    samples = []
    for x in grid_points:
        sample = StratumSample(point=np.asarray(x, dtype=float))
        per_index: Dict[int, float] = {}
        arg_scale: Dict[int, float] = {}
        alive = set(sym_indices)
        inherit: Dict[int, List[np.ndarray]] = {j: [] for j in sym_indices}
        try:
            for s in scales:
                ws = _FitWorkspace(v, x, s, order=order)
                for j in sorted(alive, reverse=True):
                    fit = _fit_workspace(
                        ws, j, d_max=d_max, target=eps,
                        extra_candidates=inherit[j] or None)
                    if fit.k > 0:
                        inherit[j] = [fit.V]
                        for jj in sym_indices:
                            if jj < j and fit.V.shape[0] > jj > 0:
                                inherit[jj].append(fit.V[:jj])
                    d_now = fit.distance
                    if j not in per_index or d_now < per_index[j]:
                        per_index[j] = d_now
                        arg_scale[j] = s
                    if d_now < eps:
                        alive.discard(j)
                if not alive:
                    break
        except (DegenerateRescaling, DegenerateHeight):
            sample.degenerate = True
        sample.distances = per_index
        sample.scale_of_min = arg_scale
        for k in k_range:
            if sample.degenerate:
                sample.flags[k] = False
            else:
                sample.flags[k] = per_index.get(k + 1, np.inf) >= eps
        samples.append(sample)
    return samples


def stratify_to_csv(samples, path):
    """Rows: point coords, k, min distance, scale achieving it, flag."""
    import csv
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["schema", "1"])
        writer.writerow(["point", "k", "min_distance", "scale", "in_stratum"])
        for s in samples:
            for k, flag in sorted(s.flags.items()):
                dist = s.distances.get(k + 1)
                writer.writerow([
                    " ".join("%.17g" % c for c in s.point), k,
                    "" if dist is None else "%.17g" % dist,
                    "" if s.scale_of_min.get(k + 1) is None
                    else "%.17g" % s.scale_of_min[k + 1],
                    int(flag)])


def rigidity_check(v, p, gamma, order=None, d_max=6):
    """Frequency drop over [gamma, 1] and the 0-symmetry distance at scale 1.

    Small drop should force small distance; the test harness exercises the
    trend over field families.
    """
    if not (0 < gamma < 1):
        raise ValueError("gamma must lie in (0, 1)")
    d = frequency(v, p, 1.0, order=order) - frequency(v, p, gamma, order=order)
    fit = nearest_k_symmetric(v, p, 1.0, 0, d_max=d_max, order=order)
    return d, fit.distance


def wiggle_room_check(v, p, r, eps=None, rho_count=25, order=None):
    """Min of N(rho, p, v) over rho in [r, 8r] (scanned on a fixed grid)."""
    rhos = np.linspace(r, 8 * r, rho_count)
    vals = []
    for rho in rhos:
        try:
            vals.append(frequency(v, p, rho, order=order))
        except DegenerateHeight:
            continue
    if not vals:
        raise DegenerateHeight("frequency undefined on [r, 8r]")
    return float(min(vals))


@dataclass
class ConeSplitResult:
    precondition_ok: bool
    invariant_along_x: Optional[bool]
    max_directional_derivative: Optional[float]
    reason: str = ""


def cone_splitting_check(P, V, x, tol=1e-8):
    """Check that invariance along V plus homogeneity about x off V forces
    invariance along span{x, V}.

    Verified numerically on fixed sample points; preconditions that fail are
    reported rather than raised.
    """
    n = P.dim
    x = np.asarray(x, dtype=float)
    V = np.asarray(V, dtype=float).reshape(-1, n)
    samples = sphere_rule(n, 6).nodes
    samples = np.vstack([0.5 * samples, samples, 1.5 * samples])
    scale = float(np.abs(P.gradient(samples)).max()) + 1e-30

    if V.shape[0]:
        q, _ = np.linalg.qr(V.T)
        Von = q[:, :V.shape[0]].T
        resid = x - Von.T @ (Von @ x)
    else:
        Von = V
        resid = x
    if np.linalg.norm(resid) <= tol * max(np.linalg.norm(x), 1.0):
        return ConeSplitResult(False, None, None,
                               "x lies in the invariance subspace")
    g = P.gradient(samples)
    for row in Von:
        if np.abs(g @ row).max() > tol * scale:
            return ConeSplitResult(False, None, None,
                                   "P is not invariant along V")
    d = P.degree
    for t in (0.5, 2.0):
        lhs = P(x + t * (samples - x))
        rhs = t ** d * P(samples)
        if np.abs(lhs - rhs).max() > 1e-6 * (abs(t) ** d) * \
                (np.abs(rhs).max() + 1.0):
            return ConeSplitResult(False, None, None,
                                   "P is not homogeneous about x")
    deriv = float(np.abs(g @ (x / np.linalg.norm(x))).max())
    return ConeSplitResult(True, deriv <= tol * scale, deriv)
