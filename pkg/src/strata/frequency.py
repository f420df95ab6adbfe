"""Growth-order diagnostics: the frequency function N = r D / H.

H(r, p, v) is the squared sphere deviation of v from v(p), D(r, p, v) the
Dirichlet energy on the ball, and N their dimensionless ratio.  For a
homogeneous harmonic polynomial centered at p the frequency equals the degree
at every radius; for general harmonic fields it is nondecreasing in r.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .fields import FieldMetadata, compose_affine, default_order
from .harmonic import ball_rule, sphere_rule


class DegenerateHeight(Exception):
    """Sphere deviation too small to divide by (locally constant field)."""


def height(v, p, r, order=None):
    """H(r, p, v) = integral over the r-sphere at p of |v - v(p)|^2."""
    p = np.asarray(p, dtype=float)
    rule = sphere_rule(v.dim, order or default_order(v.dim))
    diffs = v.values(p + r * rule.nodes) - float(v.values(p[None, :])[0])
    return float(rule.weights @ diffs ** 2) * r ** (v.dim - 1)


def dirichlet(v, p, r, order=None):
    """D(r, p, v) = integral over the r-ball at p of |grad v|^2.

    Piecewise fields (hinged and their compositions) are integrated ray by
    ray with the radial interval split at interface crossings, so the jump
    in |grad v|^2 never crosses a quadrature panel.
    """
    p = np.asarray(p, dtype=float)
    order = order or default_order(v.dim)
    if v.piecewise:
        if v.vanishes_on_interfaces:
            # pieces harmonic and v = 0 on the interfaces, so the energy
            # equals the flux integral of v dv/dnu over the sphere
            rule = sphere_rule(v.dim, order)
            pts = p + r * rule.nodes
            flux = v.values(pts) * np.sum(v.gradient(pts) * rule.nodes,
                                          axis=1)
            return float(rule.weights @ flux) * r ** (v.dim - 1)
        return _split_ball_integral(
            v, p, r, lambda pts: np.sum(v.gradient(pts) ** 2, axis=1), order)
    rule = ball_rule(v.dim, order)
    g = v.gradient(p + r * rule.nodes)
    return float(rule.weights @ np.sum(g * g, axis=1)) * r ** v.dim


def _split_ball_integral(v, p, r, integrand, order, probe=64, gauss=10):
    """Ball integral with radial panels split at interface sign changes.

    Crossings are located on a per-ray probe grid and sharpened by
    vectorized bisection; tangential touches that never change sign on the
    grid stay inside one panel and contribute only locally.
    """
    n = v.dim
    srule = sphere_rule(n, order)
    omegas = srule.nodes
    m = omegas.shape[0]
    tgrid = np.linspace(r / (2.0 * probe), r * (1 - 1e-12), probe)
    flat = (p[None, None, :] +
            tgrid[None, :, None] * omegas[:, None, :]).reshape(-1, n)
    channels = v.interface_values(flat)
    cuts = [[] for _ in range(m)]
    for ci, ch in enumerate(channels):
        vals = ch.reshape(m, probe)
        rays, cols = np.nonzero(vals[:, :-1] * vals[:, 1:] < 0)
        if len(rays) == 0:
            continue
        lo = tgrid[cols].copy()
        hi = tgrid[cols + 1].copy()
        f_lo = vals[rays, cols].copy()
        for _ in range(45):
            mid = 0.5 * (lo + hi)
            f_mid = v.interface_values(p + mid[:, None] * omegas[rays])[ci]
            left = f_lo * f_mid < 0
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            f_lo = np.where(left, f_lo, f_mid)
        for ray, t in zip(rays, 0.5 * (lo + hi)):
            cuts[ray].append(float(t))
    gx, gw = np.polynomial.legendre.leggauss(gauss)
    piece_pts, piece_wts, ray_ids = [], [], []
    for j in range(m):
        edges = [0.0] + sorted(cuts[j]) + [r]
        for a, b in zip(edges[:-1], edges[1:]):
            if b - a < 1e-15 * r:
                continue
            t = a + (b - a) * (gx + 1.0) / 2.0
            piece_pts.append(p[None, :] + t[:, None] * omegas[j][None, :])
            piece_wts.append(gw * (b - a) / 2.0 * t ** (n - 1))
            ray_ids.append(np.full(gauss, j))
    all_pts = np.vstack(piece_pts)
    all_wts = np.concatenate(piece_wts)
    all_rays = np.concatenate(ray_ids)
    per_ray = np.zeros(m)
    np.add.at(per_ray, all_rays, all_wts * integrand(all_pts))
    return float(srule.weights @ per_ray)


def _height_floor(v, r):
    lip = v.lipschitz_bound()
    return 1e-14 * lip ** 2 * r ** (v.dim + 1)


def frequency_batch(v, centers, r, order=None, chunk=1500):
    """N(r, p, v) for many centers at one scale; NaN where degenerate.

    Shares one field evaluation per chunk instead of one per center, which
    is what makes lattice scans over thousands of points affordable.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    n = v.dim
    srule = sphere_rule(n, order or default_order(n))
    brule = ball_rule(n, order or default_order(n))
    floor = _height_floor(v, r)
    out = np.empty(centers.shape[0])
    for start in range(0, centers.shape[0], chunk):
        block = centers[start:start + chunk]
        m = block.shape[0]
        base = v.values(block)
        pts = (block[:, None, :] + r * srule.nodes[None, :, :]).reshape(-1, n)
        diffs = v.values(pts).reshape(m, -1) - base[:, None]
        h = (diffs ** 2 @ srule.weights) * r ** (n - 1)
        pts = (block[:, None, :] + r * brule.nodes[None, :, :]).reshape(-1, n)
        g = v.gradient(pts)
        gsq = np.sum(g * g, axis=1).reshape(m, -1)
        d = (gsq @ brule.weights) * r ** n
        vals = np.where(h > floor, r * d / np.maximum(h, 1e-300), np.nan)
        out[start:start + chunk] = vals
    return out


def frequency(v, p, r, order=None):
    """N(r, p, v) = r D / H; equals the degree for homogeneous harmonics."""
    h = height(v, p, r, order=order)
    if h <= _height_floor(v, r):
        raise DegenerateHeight("H(%g) = %.3e below tolerance" % (r, h))
    return r * dirichlet(v, p, r, order=order) / h


def lambda_coeff(v, p, r, order=None):
    """Projection coefficient: sphere integral of (v-v(p)) dv/dnu * r over H.

    Euler's relation makes it equal the degree for fields homogeneous
    about p.
    """
    p = np.asarray(p, dtype=float)
    rule = sphere_rule(v.dim, order or default_order(v.dim))
    pts = p + r * rule.nodes
    diffs = v.values(pts) - float(v.values(p[None, :])[0])
    radial = np.sum(v.gradient(pts) * rule.nodes, axis=1) * r
    h = float(rule.weights @ diffs ** 2) * r ** (v.dim - 1)
    if h <= _height_floor(v, r):
        raise DegenerateHeight("H(%g) = %.3e below tolerance" % (r, h))
    num = float(rule.weights @ (diffs * radial)) * r ** (v.dim - 1)
    return num / h


def frequency_defect(v, p, r, order=None):
    """Normalized Cauchy-Schwarz defect of the frequency derivative.

    Integrates |r dv/dnu - lambda (v - v(p))|^2 over the r-sphere, divided
    by H.  Nonnegative; zero exactly when v is homogeneous about p.
    """
    p = np.asarray(p, dtype=float)
    rule = sphere_rule(v.dim, order or default_order(v.dim))
    pts = p + r * rule.nodes
    diffs = v.values(pts) - float(v.values(p[None, :])[0])
    radial = np.sum(v.gradient(pts) * rule.nodes, axis=1) * r
    h = float(rule.weights @ diffs ** 2) * r ** (v.dim - 1)
    if h <= _height_floor(v, r):
        raise DegenerateHeight("H(%g) = %.3e below tolerance" % (r, h))
    lam = float(rule.weights @ (diffs * radial)) * r ** (v.dim - 1) / h
    resid = radial - lam * diffs
    return float(rule.weights @ resid ** 2) * r ** (v.dim - 1) / h


@dataclass
class FrequencyRecord:
    p: np.ndarray
    r: float
    H: float
    D: float
    N: Optional[float]
    lam: Optional[float] = None
    degenerate: bool = False


@dataclass
class FrequencyProfile:
    p: np.ndarray
    scales: np.ndarray
    records: List[FrequencyRecord]

    def drop(self, s, S):
        """N(S) - N(s) between two recorded scales."""
        return self.value_at(S) - self.value_at(s)

    def value_at(self, r):
        idx = int(np.argmin(np.abs(self.scales - r)))
        if not np.isclose(self.scales[idx], r, rtol=1e-9, atol=0.0):
            raise KeyError("scale %g not recorded" % r)
        rec = self.records[idx]
        if rec.N is None:
            raise DegenerateHeight("scale %g marked degenerate" % r)
        return rec.N

    def drops(self):
        """Adjacent-scale differences N(r_{i+1}) - N(r_i)."""
        vals = [rec.N for rec in self.records if rec.N is not None]
        return np.diff(vals)


def frequency_profile(v, p, r_min, r_max, q, order=None, with_lambda=False):
    """Frequency records on the geometric scale grid r_min * q^i <= r_max."""
    if not (0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    if q <= 1:
        raise ValueError("scale ratio must exceed 1")
    p = np.asarray(p, dtype=float)
    scales = []
    r = float(r_min)
    while r <= r_max * (1 + 1e-12):
        scales.append(min(r, r_max))
        r *= q
    if scales[-1] < r_max * (1 - 1e-12):
        scales.append(float(r_max))
    scales = np.array(scales)
    records = []
    for r in scales:
        h = height(v, p, r, order=order)
        d = dirichlet(v, p, r, order=order)
        if h <= _height_floor(v, r):
            records.append(FrequencyRecord(p, r, h, d, None, degenerate=True))
            continue
        lam = lambda_coeff(v, p, r, order=order) if with_lambda else None
        records.append(FrequencyRecord(p, r, h, d, r * d / h, lam))
    return FrequencyProfile(p, scales, records)


def drop(profile, s, S):
    return profile.drop(s, S)


def doubling_check(v, p, s, S, order=None):
    """Return (H(S), upper bound, lower bound) for the doubling inequalities.

    For harmonic v:  H(S) <= (S/s)^{(n-1) + 2 N(S)} H(s)  and
                     H(S) >= (S/s)^{(n-1) + 2 N(s)} H(s).
    """
    if not (0 < s < S):
        raise ValueError("need 0 < s < S")
    n = v.dim
    hs = height(v, p, s, order=order)
    hS = height(v, p, S, order=order)
    n_small = frequency(v, p, s, order=order)
    n_big = frequency(v, p, S, order=order)
    upper = (S / s) ** ((n - 1) + 2 * n_big) * hs
    lower = (S / s) ** ((n - 1) + 2 * n_small) * hs
    return hS, upper, lower


def frequency_rescaling_check(v, a, b, c0, r, order=None):
    """Frequencies of v at r and of a*v(b .)+c0 at r/|b|; equal by invariance."""
    w = compose_affine(v, a, b, c0)
    origin = np.zeros(v.dim)
    return (frequency(v, origin, r, order=order),
            frequency(w, origin, r / abs(b), order=order))


def profile_to_csv(profile, path):
    """Rows: p coordinates, r, H, D, N, lambda (fixed column order)."""
    n = len(profile.p)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["schema"] + ["1"] * (n + 5))
        writer.writerow(["p%d" % (i + 1) for i in range(n)]
                        + ["r", "H", "D", "N", "lambda"])
        for rec in profile.records:
            row = ["%.17g" % c for c in rec.p]
            row += ["%.17g" % rec.r, "%.17g" % rec.H, "%.17g" % rec.D]
            row.append("" if rec.N is None else "%.17g" % rec.N)
            row.append("" if rec.lam is None else "%.17g" % rec.lam)
            writer.writerow(row)


def measure_metadata(v, alpha=0.5):
    """Frequency bound at unit scale plus degenerate Holder data."""
    lam = frequency(v, np.zeros(v.dim), 1.0)
    return FieldMetadata(lam, holder=(alpha, 0.0))


def sup_frequency(v, radius, scale, points=None, grid=6, order=None):
    """Max of N(scale, p, v) over sampled p in the closed radius-ball.

    Finite surrogate for a supremum: a fixed lattice plus caller points.
    """
    axes = np.linspace(-radius, radius, grid)
    mesh = np.meshgrid(*([axes] * v.dim), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    pts = pts[np.linalg.norm(pts, axis=1) <= radius]
    if points is not None and len(points):
        pts = np.vstack([pts, np.asarray(points)])
    best = 0.0
    for p in pts:
        try:
            best = max(best, frequency(v, p, scale, order=order))
        except DegenerateHeight:
            continue
    return best
