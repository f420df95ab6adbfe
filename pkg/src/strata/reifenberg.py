"""Verifier for the discrete multiscale packing theorem.

For a disjoint ball family with atomic measure mu = sum tau_i^k delta_x_i,
the hypothesis bounds, at every center x and dyadic scale r_l = 2^-l with
enough local mass, the double sum

    sum_{i >= l} integral over B_{2 r_l}(x) of beta^2(z, 16 r_i) dmu(z)

by r_l^k delta^2.  The conclusion is a uniform bound on the mass in B_1.
Both the threshold delta and the mass constant are measured on constructed
families, never assumed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
import numpy as np

from .beta import DiscreteMeasure, beta_number


class BallFamily(DiscreteMeasure):
    """Disjoint ball collection with the dyadic scale convention r_l = 2^-l."""

    def __init__(self, points, radii, k):
        super().__init__(points, radii, k, require_disjoint=True)

    @staticmethod
    def scale(l):
        return 2.0 ** (-l)

    def truncation_level(self):
        """Largest level l with 16 r_l >= min tau; beta vanishes below it.

        Disjointness keeps other atoms out of B_{16 r_l}(x_i) once
        16 r_l < min tau, so deeper levels contribute exactly zero.
        """
        tau_min = float(self.radii.min())
        return int(math.floor(4 - math.log2(tau_min)))


@dataclass
class HypothesisTerm:
    total: float
    triggered: bool
    mass: float
    threshold: float
    levels: int
    in_domain: bool


def hypothesis_sum(fam: BallFamily, x, l, eps_k=1.0):
    """The multiscale beta sum at center x and level l.

    ``triggered`` records whether the local-mass trigger
    mu(B_{r_l}(x)) >= eps_k r_l^k holds; the sum is returned either way so
    scans can report near-misses.
    """
    x = np.asarray(x, dtype=float)
    r_l = fam.scale(l)
    in_domain = np.linalg.norm(x) + r_l <= 2.0 + 1e-12
    mass = fam.mass(x, r_l)
    threshold = eps_k * r_l ** fam.k
    idx = fam.in_ball(x, 2.0 * r_l)
    i_stop = fam.truncation_level()
    total = 0.0
    levels = 0
    for i in range(l, i_stop + 1):
        levels += 1
        scale_i = 16.0 * fam.scale(i)
        for a in idx:
            beta = beta_number(fam, fam.points[a], scale_i).beta_sq
            total += fam.weights[a] * beta
    return HypothesisTerm(total, mass >= threshold, mass, threshold,
                          levels, in_domain)


@dataclass
class PackingReport:
    mass_b1: float
    worst_ratio: float
    scan_size: int
    triggered_count: int

    def to_json(self):
        return json.dumps({"mass_B1": self.mass_b1,
                           "worst_ratio": self.worst_ratio,
                           "scan_size": self.scan_size,
                           "triggered": self.triggered_count})


def packing_report(fam: BallFamily, eps_k=1.0, lattice_spacing=0.5,
                   extra_centers=None):
    """Mass in B_1 plus the worst hypothesis ratio over a finite scan.

    The theorem quantifies over all centers and scales; the documented
    finite surrogate scans atom locations plus a coarse lattice, at levels
    from 0 down to the truncation scale.
    """
    centers = [fam.points]
    axes = np.arange(-2.0, 2.0 + lattice_spacing / 2, lattice_spacing)
    mesh = np.meshgrid(*([axes] * fam.dim), indexing="ij")
    lattice = np.stack([m.ravel() for m in mesh], axis=1)
    lattice = lattice[np.linalg.norm(lattice, axis=1) <= 2.0]
    centers.append(lattice)
    if extra_centers is not None:
        centers.append(np.atleast_2d(extra_centers))
    centers = np.vstack(centers)

    mass_b1 = fam.mass(np.zeros(fam.dim), 1.0)
    worst = 0.0
    scanned = 0
    triggered = 0
    for l in range(0, fam.truncation_level() + 1):
        r_l = fam.scale(l)
        for x in centers:
            if np.linalg.norm(x) + r_l > 2.0 + 1e-12:
                continue
            term = hypothesis_sum(fam, x, l, eps_k=eps_k)
            scanned += 1
            if term.triggered:
                triggered += 1
                worst = max(worst, term.total / r_l ** fam.k)
    return PackingReport(mass_b1, worst, scanned, triggered)


def segment_family(tau=2.0 ** -6, spacing_factor=3.0, start=-0.5, end=0.5,
                   k=1, dim=2, jitter=0.0, seed=0):
    """Equal balls spread along a segment on the first axis; optionally
    jittered positions (disjointness preserved for jitter << spacing)."""
    step = spacing_factor * tau
    xs = np.arange(start, end + step / 2, step)
    pts = np.zeros((len(xs), dim))
    pts[:, 0] = xs
    if jitter:
        rng = np.random.default_rng(seed)
        pts += rng.uniform(-jitter, jitter, pts.shape)
    return BallFamily(pts, np.full(len(xs), tau), k)
