"""Acceptance suite: one callable per criterion, shared by pytest and the CLI.

Each criterion returns a CriterionResult with the measured quantities in
``detail`` so failures are diagnosable from the one-line report.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import fields as fl
from . import frequency as fq
from . import symmetry as sy
from .beta import DiscreteMeasure, beta_bruteforce, beta_number
from .covering import (CoveringParams, FrequencyCache, build_cover,
                       _covering_misses, sample_stratum, scaling_fit)
from .harmonic import HarmonicPolynomial, combine, harmonic_basis, \
    monomial_exponents
from .minkowski import dimension_fit, plane_sample, porous_volume_bound_check
from .reifenberg import packing_report, segment_family


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    runtime: float


def monomial_poly(n, d, spec):
    """Harmonic polynomial from {exponent tuple: coefficient} (test helper)."""
    exps = monomial_exponents(n, d)
    coeffs = np.zeros(len(exps))
    for target, c in spec.items():
        for i, e in enumerate(exps):
            if tuple(e) == tuple(target):
                coeffs[i] = c
    return HarmonicPolynomial(n, d, coeffs)


def saddle_field(n):
    """x1^2 - x2^2 embedded in R^n (spine = {x1 = x2 = 0})."""
    return fl.PolynomialField(
        monomial_poly(n, 2, {(2,) + (0,) * (n - 1): 1.0,
                             (0, 2) + (0,) * (n - 2): -1.0}))


def coordinate_field(n, axis=0):
    spec = {tuple(1 if i == axis else 0 for i in range(n)): 1.0}
    return fl.PolynomialField(monomial_poly(n, 1, spec))


def random_mixture(n, rng, degrees=(1, 2, 3, 4)):
    parts, weights = [], []
    for d in degrees:
        basis = harmonic_basis(n, d)
        coeffs = rng.standard_normal(len(basis))
        parts.append(fl.PolynomialField(combine(basis, coeffs)))
        weights.append(float(rng.uniform(0.2, 1.5)))
    return fl.SumField(parts, weights)


def criterion_1_frequency_degree():
    """|N(r, 0, P) - d| < 1e-5 for homogeneous harmonics, d <= 5, n in 2..4."""
    worst = 0.0
    rng = np.random.default_rng(0)
    count = 0
    for n in (2, 3, 4):
        for d in range(1, 6):
            basis = harmonic_basis(n, d)
            polys = list(basis[:4])
            for _ in range(2):
                polys.append(combine(basis, rng.standard_normal(len(basis))))
            for p in polys:
                v = fl.PolynomialField(p)
                for r in (0.1, 0.5, 1.0):
                    worst = max(worst, abs(
                        fq.frequency(v, np.zeros(n), r) - d))
                    count += 1
    return worst < 1e-5, "worst |N-d| = %.2e over %d evaluations" % (worst,
                                                                    count)


def criterion_2_monotonicity():
    """Frequency profiles of 50 seeded harmonic mixtures never drop."""
    rng = np.random.default_rng(0)
    worst = np.inf
    for trial in range(50):
        n = int(rng.integers(2, 5))
        v = random_mixture(n, rng)
        p = rng.uniform(-0.125, 0.125, n)
        prof = fq.frequency_profile(v, p, 2.0 ** -16, 2.0 ** 3, 2.0)
        drops = prof.drops()
        if len(drops):
            worst = min(worst, float(drops.min()))
    return worst >= -1e-7, "smallest adjacent drop = %.2e" % worst


def criterion_3_rescaling():
    """N(r,0,v) matches N(r/b,0,a v(b.)+c) to 1e-8 on 10 seeded fields."""
    rng = np.random.default_rng(1)
    worst = 0.0
    for trial in range(10):
        n = int(rng.integers(2, 5))
        v = random_mixture(n, rng, degrees=(1, 2, 3))
        shift = float(rng.uniform(-1, 1))
        for a in (-2.0, 3.0):
            for b in (0.5, 4.0):
                nv, nw = fq.frequency_rescaling_check(v, a, b, shift, 1.0)
                worst = max(worst, abs(nv - nw))
    return worst < 1e-8, "worst rescaling mismatch = %.2e" % worst


def criterion_4_beta_identity():
    """Eigenvalue beta equals the plane-search oracle on 200 seeded measures."""
    rng = np.random.default_rng(42)
    worst = 0.0
    for trial in range(200):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 31))
        k = int(rng.integers(0, n))
        mu = DiscreteMeasure(rng.uniform(-1, 1, (m, n)),
                             rng.uniform(0.01, 1.0, m), k)
        p = rng.uniform(-0.5, 0.5, n)
        r = float(rng.uniform(0.3, 2.0))
        worst = max(worst, abs(beta_number(mu, p, r).beta_sq -
                               beta_bruteforce(mu, p, r)))
    planar_worst = 0.0
    for n in (2, 3, 4):
        for k in range(1, n):
            basis = rng.standard_normal((n, n))
            q, _ = np.linalg.qr(basis)
            coords = rng.uniform(-1, 1, (12, k))
            pts = rng.uniform(-0.2, 0.2, n) + coords @ q[:, :k].T
            mu = DiscreteMeasure(pts, np.full(12, 0.3), k)
            planar_worst = max(planar_worst,
                               beta_number(mu, np.zeros(n), 1.5).beta_sq)
    ok = worst < 1e-6 and planar_worst < 1e-12
    return ok, "worst |eigen-oracle| = %.2e; planar beta = %.2e" % \
        (worst, planar_worst)


def criterion_5_reifenberg():
    """Segment family passes the hypothesis with zero sum and small mass."""
    fam = segment_family(tau=2.0 ** -6, spacing_factor=3.0, k=1, dim=2)
    rep = packing_report(fam)
    flat_mass = rep.mass_b1
    jit = segment_family(tau=2.0 ** -6, spacing_factor=3.0, k=1, dim=2,
                         jitter=0.1 * 2.0 ** -6, seed=3)
    jit_rep = packing_report(jit)
    ok = rep.worst_ratio < 1e-12 and flat_mass <= 0.4 and \
        jit_rep.mass_b1 <= 2.0 * flat_mass
    return ok, "flat mass %.4f (sum %.1e), jittered mass %.4f" % \
        (flat_mass, rep.worst_ratio, jit_rep.mass_b1)


def criterion_6_covering():
    """Cover terminates, resample covering control holds, packing uniform."""
    v = saddle_field(3)
    sums = {}
    misses = {}
    for exp in (3, 4, 5, 6):
        R = 2.0 ** -exp
        params = CoveringParams(epsilon=0.05, k=1, E=2.0, R=R)
        sample = sample_stratum(v, 1, 0.05, params, target_pitch=R / 4,
                                radius=1.0)
        cache = FrequencyCache(v)
        rep = build_cover(v, params, sample, cache=cache)
        resample = sample_stratum(v, 1, 0.05, params, target_pitch=R / 8,
                                  radius=1.0)
        sums[exp] = rep.packing_sum
        misses[exp] = (rep.audits["final_covering_misses"],
                       _covering_misses(resample, rep.balls))
    vals = list(sums.values())
    uniform = max(vals) < 2.0 * min(vals)
    clean = all(m == (0, 0) for m in misses.values())
    return uniform and clean, \
        "packing sums %s; (sample, resample) misses %s" % (
            {k: round(s, 3) for k, s in sums.items()},
            list(misses.values()))


def criterion_7_scaling():
    """Tube-volume exponent of the sampled stratum matches n - k = 2."""
    radii = [2.0 ** -e for e in range(6, 1, -1)]
    v3 = saddle_field(3)
    res3 = scaling_fit(v3, 1, 0.05, radii, scan_floor=1e-4, radius=0.25,
                       target_pitch=2.0 ** -7)
    v4 = saddle_field(4)
    res4 = scaling_fit(v4, 2, 0.05, radii, scan_floor=1e-3, radius=0.25,
                       target_pitch=2.0 ** -6)
    ok3 = abs(res3.exponent - 2.0) <= 0.3
    ok4 = abs(res4.exponent - 2.0) <= 0.3
    return ok3 and ok4, \
        "exponents: R3 axis %.3f (sample %d), R4 plane %.3f (sample %d)" % \
        (res3.exponent, res3.sample_size, res4.exponent, res4.sample_size)


def criterion_8_spine():
    """Spine points are (n-1)-symmetric; far points leave the low strata."""
    hinged = fl.make_hinged(
        monomial_poly(4, 1, {(0, 0, 0, 1): 1.0}), 2.0)
    worst = 0.0
    grid = [np.array([a, b, c, 0.0])
            for a in (-0.2, 0.0, 0.2) for b in (-0.2, 0.1, 0.2)
            for c in (-0.15, 0.05)]
    for x in grid:
        for s in (0.01, 0.05, 0.2, 0.8):
            fit = sy.nearest_k_symmetric(hinged, x, s, 3)
            worst = max(worst, fit.distance)
    v = saddle_field(3)
    axes = np.linspace(-0.25, 0.25, 5)
    pts = np.array([[a, b, c] for a in axes for b in axes for c in axes])
    pts = pts[np.linalg.norm(pts, axis=1) <= 0.25]
    far = pts[np.linalg.norm(pts[:, :2], axis=1) > 0.05]
    samples = sy.stratify(v, far, eps=0.05, r=0.01, q=2.0, k_range=[0])
    stray = sum(1 for s in samples if s.flags.get(0, False))
    ok = worst < 1e-4 and stray == 0
    return ok, "spine distance max %.2e; far points in S^0: %d of %d" % \
        (worst, stray, len(far))


def criterion_9_porosity():
    """Porous-slab volume bound and box dimensions of plane samples."""
    E = plane_sample(3, 2, 2.0 ** -9)
    check = porous_volume_bound_check(E, 0.25, 2.0 ** -8)
    dims = {}
    ok_dims = True
    for n in (2, 3, 4):
        for k in range(0, n):
            pitch = 2.0 ** -6 if k >= 2 else 2.0 ** -7
            pts = plane_sample(n, k, pitch)
            if k == 0:
                pts = np.array([[0.5] * n])
            # interior window: the tube of a plane patch scales cleanly
            # away from the patch boundary
            box = [(0.25, 0.75)] * k + [(0.0, 1.0)] * (n - k)
            fit = dimension_fit(pts, [2.0 ** -e for e in (5, 4, 3, 2)],
                                box=box)
            dims["%d,%d" % (n, k)] = round(fit.dimension, 3)
            ok_dims &= abs(fit.dimension - k) <= 0.2
    ok = check.porous_ok and check.measured_volume <= check.bound and ok_dims
    return ok, "tube %.4f <= bound %.4f (porous_ok=%s); dims %s" % \
        (check.measured_volume, check.bound, check.porous_ok, dims)


def criterion_10_rigidity_trend():
    """Frequency drop and 0-symmetry distance both increase with the
    degree-3 admixture."""
    b1 = harmonic_basis(3, 1)
    b3 = harmonic_basis(3, 3)
    base = fl.PolynomialField(b1[0])
    bump = fl.PolynomialField(b3[0])
    drops, dists = [], []
    for t in (0.0, 1e-3, 1e-2, 1e-1, 1.0):
        v = fl.SumField([base, bump], [1.0, t])
        d, dist = sy.rigidity_check(v, np.zeros(3), 0.25)
        drops.append(d)
        dists.append(dist)
    drops_up = all(b > a for a, b in zip(drops, drops[1:]))
    dists_up = all(b > a for a, b in zip(dists, dists[1:]))
    return drops_up and dists_up, "drops %s; distances %s" % (
        ["%.2e" % d for d in drops], ["%.2e" % d for d in dists])


CRITERIA: List = [
    (1, "frequency equals degree", criterion_1_frequency_degree, 10.0),
    (2, "frequency monotonicity", criterion_2_monotonicity, 60.0),
    (3, "rescaling invariance", criterion_3_rescaling, None),
    (4, "beta eigen identity", criterion_4_beta_identity, None),
    (5, "discrete packing verifier", criterion_5_reifenberg, None),
    (6, "covering audits", criterion_6_covering, None),
    (7, "volume scaling exponent", criterion_7_scaling, 1200.0),
    (8, "spine classification", criterion_8_spine, None),
    (9, "porosity and box dimension", criterion_9_porosity, None),
    (10, "rigidity trend", criterion_10_rigidity_trend, None),
]


def run_criterion(index):
    for idx, name, func, budget in CRITERIA:
        if idx == index:
            t0 = time.time()
            passed, detail = func()
            elapsed = time.time() - t0
            if budget is not None and elapsed > budget:
                passed = False
                detail += " [exceeded %.0fs budget]" % budget
            return CriterionResult(idx, name, passed, detail, elapsed)
    raise KeyError("no criterion %r" % index)


def run_all(indices=None, report: Callable[[str], None] = print):
    results = []
    for idx, name, _, _ in CRITERIA:
        if indices and idx not in indices:
            continue
        res = run_criterion(idx)
        results.append(res)
        report("%s criterion %d: %s (%s) [%.1fs]" %
               ("PASS" if res.passed else "FAIL", res.index, res.name,
                res.detail, res.runtime))
    return results
