"""Flatness (beta) numbers of weighted atomic measures.

beta^2 at (p, r, k) is the scaled mean-square distance of the measure
restricted to the closed ball B_r(p) from the best affine k-plane:

    beta^2 = inf over planes L of (1/r^k) sum_i w_i dist(x_i, L)^2 / r^2 .

The optimal plane passes through the center of mass with directions the top
eigenvectors of the second-moment form, which turns the infimum into a sum
of trailing eigenvalues.  ``beta_bruteforce`` searches over planes directly
and serves as the independent cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .frequency import DegenerateHeight, frequency
from .symmetry import nearest_k_symmetric

BALL_MEMBERSHIP_RTOL = 1e-12


class DisjointnessError(Exception):
    """Ball family flagged disjoint has overlapping members."""


class DiscreteMeasure:
    """Atoms (x_i, tau_i) carrying weights tau_i^k for stratum dimension k."""

    def __init__(self, points, radii, k, require_disjoint=False):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.radii = np.asarray(radii, dtype=float)
        if self.radii.ndim == 0:
            self.radii = np.full(self.points.shape[0], float(radii))
        if self.points.shape[0] != self.radii.shape[0]:
            raise ValueError("points and radii must pair up")
        if (self.radii <= 0).any():
            raise ValueError("atom radii must be positive")
        if (self.radii > 1 + 1e-12).any():
            raise ValueError("atom radii must not exceed 1")
        self.k = int(k)
        self.weights = self.radii ** self.k
        if require_disjoint:
            self.check_disjoint()

    @property
    def dim(self):
        return self.points.shape[1]

    def check_disjoint(self):
        """Open balls B_tau_i(x_i) must be pairwise disjoint."""
        x = self.points
        t = self.radii
        d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
        need = t[:, None] + t[None, :]
        np.fill_diagonal(d, np.inf)
        bad = d < need * (1 - 1e-12)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise DisjointnessError(
                "balls %d and %d overlap: |x_i-x_j|=%.6g < %.6g"
                % (i, j, d[i, j], need[i, j]))
        return True

    def in_ball(self, p, r):
        """Indices of atoms in the closed ball B_r(p)."""
        p = np.asarray(p, dtype=float)
        d = np.linalg.norm(self.points - p, axis=1)
        return np.flatnonzero(d <= r * (1 + BALL_MEMBERSHIP_RTOL))

    def mass(self, p, r):
        return float(self.weights[self.in_ball(p, r)].sum())

    def restricted(self, max_radius):
        """Sub-measure of atoms with tau_i <= max_radius (same k)."""
        keep = self.radii <= max_radius * (1 + 1e-12)
        return DiscreteMeasure(self.points[keep], self.radii[keep], self.k)

    def to_json(self):
        return json.dumps({
            "k": self.k,
            "atoms": [{"x": x.tolist(), "tau": float(t)}
                      for x, t in zip(self.points, self.radii)]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        atoms = data["atoms"]
        return cls([a["x"] for a in atoms], [a["tau"] for a in atoms],
                   data["k"])


def jacobi_eigh(A, max_sweeps=100, tol=1e-15):
    """Symmetric eigendecomposition via cyclic Jacobi rotations.

    Deterministic sweep order keeps results reproducible across platforms
    for the tiny matrices used here.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(A[p, q]))
                if abs(A[p, q]) <= tol * scale:
                    continue
                theta = 0.5 * math.atan2(2.0 * A[p, q], A[q, q] - A[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                A = rot.T @ A @ rot
                V = V @ rot
        if off <= tol * scale:
            break
    vals = np.diag(A).copy()
    order = np.argsort(-vals)
    vals = vals[order]
    V = V[:, order]
    for j in range(n):
        lead = np.flatnonzero(np.abs(V[:, j]) > 1e-12)
        if len(lead) and V[lead[0], j] < 0:
            V[:, j] = -V[:, j]
    return vals, V


@dataclass
class BetaResult:
    beta_sq: float
    mass: float
    center: Optional[np.ndarray]
    eigvals: Optional[np.ndarray]
    plane_point: Optional[np.ndarray]
    plane_dirs: Optional[np.ndarray]
    empty: bool = False


def beta_number(mu: DiscreteMeasure, p, r, k=None):
    """Eigenvalue form of the flatness number on the closed ball B_r(p)."""
    k = mu.k if k is None else int(k)
    n = mu.dim
    idx = mu.in_ball(p, r)
    if len(idx) == 0:
        return BetaResult(0.0, 0.0, None, None, None, None, empty=True)
    x = mu.points[idx]
    w = mu.weights[idx]
    mass = float(w.sum())
    center = (w @ x) / mass
    centered = x - center
    Q = (centered * w[:, None]).T @ centered / mass
    vals, vecs = jacobi_eigh(Q)
    vals = np.clip(vals, 0.0, None)
    tail = float(vals[k:].sum()) if k < n else 0.0
    beta_sq = mass / r ** (k + 2) * tail
    return BetaResult(beta_sq, mass, center, vals,
                      center, vecs[:, :k].T.copy())


def _orth(U):
    q, _ = np.linalg.qr(U)
    return q[:, :U.shape[1]]


def _orth_complement(U):
    n = U.shape[0]
    q, _ = np.linalg.qr(np.hstack([U, np.eye(n)]))
    return q[:, U.shape[1]:n]


def _rotation_sweeps(M, U, sweeps=80):
    """Exact line search along plane rotations mixing U with its complement.

    For a rotation of u toward w by angle t the captured energy along that
    column is a quadratic form in (cos t, sin t), so the best angle is
    closed-form; sweeping all (column, complement) pairs until no pair
    improves maximizes the captured second moment.
    """
    U = U.copy()
    for _ in range(sweeps):
        W = _orth_complement(U)
        changed = False
        for i in range(U.shape[1]):
            for j in range(W.shape[1]):
                u = U[:, i].copy()
                w = W[:, j].copy()
                a = u @ M @ u
                b = u @ M @ w
                c = w @ M @ w
                scale = abs(a) + abs(c) + 1e-300
                if abs(b) <= 1e-18 * scale and c <= a + 1e-18 * scale:
                    continue
                th = 0.5 * math.atan2(2.0 * b, a - c)
                for cand in (th, th + 0.5 * math.pi):
                    cu, su = math.cos(cand), math.sin(cand)
                    gain = (cu * cu * a + 2 * cu * su * b + su * su * c) - a
                    if gain > 1e-18 * scale:
                        U[:, i] = cu * u + su * w
                        W[:, j] = -su * u + cu * w
                        changed = True
                        break
        if not changed:
            break
    return U


def beta_bruteforce(mu: DiscreteMeasure, p, r, k=None, grid_density=24,
                    seed=5):
    """Direct plane search for the flatness infimum (oracle path).

    Candidate direction frames come from coordinate axes plus a seeded
    grid; rotation sweeps with exact angle line search polish the best
    few.  No eigendecomposition is used anywhere.
    """
    k = mu.k if k is None else int(k)
    n = mu.dim
    idx = mu.in_ball(p, r)
    if len(idx) == 0:
        return 0.0
    x = mu.points[idx]
    w = mu.weights[idx]
    mass = float(w.sum())
    center = (w @ x) / mass
    xc = x - center
    total = float(w @ np.sum(xc * xc, axis=1))
    if k >= n:
        return 0.0
    if k == 0:
        return total / r ** 2
    M = (xc * w[:, None]).T @ xc   # raw second-moment sums, no eigensolve

    def captured(U):
        return float(np.sum((xc @ U) ** 2 * w[:, None]))

    from itertools import combinations
    eye = np.eye(n)
    starts = [eye[:, list(cols)] for cols in combinations(range(n), k)]
    rng = np.random.default_rng(seed)
    for _ in range(grid_density):
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        starts.append(q[:, :k])
    scored = sorted(starts, key=captured, reverse=True)
    best_val = max(captured(_rotation_sweeps(M, _orth(U)))
                   for U in scored[:4])
    return (total - best_val) / r ** (k + 2)


@dataclass
class BetaFrequencyResult:
    beta_sq: float
    drop_integral: float
    mass_term: float
    precondition_ok: bool
    symmetric_distance_0: float
    symmetric_distance_k1: float

    @property
    def rhs(self):
        return self.drop_integral + self.mass_term


def beta_frequency_inequality_check(v, mu: DiscreteMeasure, p, r, eps,
                                    delta=0.1, m_exponent=1.0, order=None):
    """Both sides of the flatness-versus-frequency-drop comparison.

    lhs is beta^2 of mu at (p, r); rhs combines the integrated frequency
    drop between scales r and 8r with a mass remainder r^m.  The constant
    and exponent in front are fitted by the harness over calibration
    families, never assumed.
    """
    p = np.asarray(p, dtype=float)
    k = mu.k
    fit0 = nearest_k_symmetric(v, p, 8 * r, 0, order=order)
    fitk = nearest_k_symmetric(v, p, 8 * r, min(k + 1, v.dim - 1),
                               order=order)
    pre_ok = fit0.distance < delta and fitk.distance >= eps
    lhs = beta_number(mu, p, r).beta_sq
    idx = mu.in_ball(p, r)
    drop_int = 0.0
    for i in idx:
        y = mu.points[i]
        try:
            d8 = frequency(v, y, 8 * r, order=order)
            d1 = frequency(v, y, r, order=order)
        except DegenerateHeight:
            continue
        drop_int += mu.weights[i] * max(d8 - d1, 0.0)
    drop_int /= r ** k
    mass_term = mu.weights[idx].sum() / r ** k * r ** m_exponent
    return BetaFrequencyResult(lhs, drop_int, mass_term, pre_ok,
                               fit0.distance, fitk.distance)
