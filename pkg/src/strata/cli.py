"""Command-line driver: field specs in, CSV/JSON out.

Exit codes: 0 success, 1 validation error, 2 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import acceptance
from .beta import DiscreteMeasure, beta_bruteforce, beta_number
from .covering import (CoveringParams, FrequencyCache, build_cover,
                       sample_stratum, scaling_fit, scaling_to_csv)
from .fields import DegenerateRescaling, load_field
from .frequency import (DegenerateHeight, frequency, frequency_profile,
                        height, dirichlet, lambda_coeff, profile_to_csv)
from .harmonic import basis_to_json, harmonic_basis
from .minkowski import dimension_fit, porosity
from .reifenberg import BallFamily, packing_report
from .symmetry import stratify, stratify_to_csv


class ValidationError(Exception):
    pass


def _parse_point(text, dim=None):
    try:
        p = np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise ValidationError("bad point %r: %s" % (text, exc))
    if dim is not None and len(p) != dim:
        raise ValidationError("point %r has %d coordinates, field needs %d"
                              % (text, len(p), dim))
    return p


def _parse_radius_list(text):
    """'2^-2..2^-6' or comma-separated floats, returned ascending."""
    def one(tok):
        tok = tok.strip()
        if "^" in tok:
            base, exp = tok.split("^")
            return float(base) ** float(exp)
        return float(tok)

    if ".." in text:
        lo, hi = (one(t) for t in text.split(".."))
        lo, hi = min(lo, hi), max(lo, hi)
        out = []
        r = lo
        while r <= hi * (1 + 1e-12):
            out.append(r)
            r *= 2.0
        return out
    return sorted(one(t) for t in text.split(","))


def _load_field_checked(path):
    if not os.path.exists(path):
        raise ValidationError("field spec %r does not exist" % path)
    try:
        return load_field(path)
    except (KeyError, ValueError) as exc:
        raise ValidationError("malformed field spec %r: %s" % (path, exc))


def _load_measure(path, k=None):
    if not os.path.exists(path):
        raise ValidationError("measure file %r does not exist" % path)
    with open(path) as fh:
        text = fh.read()
    try:
        mu = DiscreteMeasure.from_json(text)
    except (KeyError, ValueError) as exc:
        raise ValidationError("malformed measure %r: %s" % (path, exc))
    if k is not None and k != mu.k:
        mu = DiscreteMeasure(mu.points, mu.radii, k)
    return mu


def _write_json(path, payload):
    payload = {"schema": 1, **payload}
    text = json.dumps(payload, indent=1)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_basis(args):
    basis = harmonic_basis(args.n, args.d)
    text = basis_to_json(basis)
    payload = {"schema": 1, **json.loads(text)}
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
    else:
        print(json.dumps(payload, indent=1))
    return 0


def cmd_frequency(args):
    v = _load_field_checked(args.field)
    p = _parse_point(args.p, v.dim)
    h = height(v, p, args.r, order=args.order)
    d = dirichlet(v, p, args.r, order=args.order)
    n_val = frequency(v, p, args.r, order=args.order)
    lam = lambda_coeff(v, p, args.r, order=args.order)
    rows = [["schema", "1"],
            ["p%d" % (i + 1) for i in range(v.dim)] +
            ["r", "H", "D", "N", "lambda"],
            ["%.17g" % c for c in p] +
            ["%.17g" % x for x in (args.r, h, d, n_val, lam)]]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        for row in rows:
            print(",".join(str(c) for c in row))
    return 0


def cmd_profile(args):
    v = _load_field_checked(args.field)
    p = _parse_point(args.p, v.dim)
    prof = frequency_profile(v, p, args.r_min, args.r_max, args.q,
                             order=args.order, with_lambda=True)
    profile_to_csv(prof, args.out)
    return 0


def cmd_stratify(args):
    v = _load_field_checked(args.field)
    axes = np.linspace(-args.grid_radius, args.grid_radius, args.grid_count)
    mesh = np.meshgrid(*([axes] * v.dim), indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    grid = grid[np.linalg.norm(grid, axis=1) <= args.grid_radius]
    samples = stratify(v, grid, args.eps, args.r, q=args.q,
                       d_max=args.d_max, threads=args.threads)
    stratify_to_csv(samples, args.out)
    return 0


def cmd_beta(args):
    mu = _load_measure(args.measure)
    p = _parse_point(args.p, mu.dim)
    res = beta_number(mu, p, args.r, k=args.k)
    payload = {
        "beta_sq": res.beta_sq,
        "mass": res.mass,
        "empty": res.empty,
        "center": None if res.center is None else res.center.tolist(),
        "eigvals": None if res.eigvals is None else res.eigvals.tolist(),
    }
    if args.bruteforce:
        payload["beta_sq_bruteforce"] = beta_bruteforce(mu, p, args.r,
                                                        k=args.k)
    _write_json(args.out, payload)
    return 0


def cmd_reifenberg(args):
    mu = _load_measure(args.measure)
    fam = BallFamily(mu.points, mu.radii, mu.k)
    rep = packing_report(fam, eps_k=args.eps_k)
    _write_json(args.out, json.loads(rep.to_json()))
    return 0


def cmd_cover(args):
    v = _load_field_checked(args.field)
    cache = FrequencyCache(v, order=args.order)
    E = args.E if args.E is not None else \
        frequency(v, np.zeros(v.dim), 2.0, order=args.order)
    params = CoveringParams(epsilon=args.eps, k=args.k, E=E, R=args.R,
                            rho=args.rho, gamma=args.gamma, eta=args.eta,
                            d_max=args.d_max)
    sample = sample_stratum(v, args.k, args.eps, params,
                            target_pitch=args.R / 4, radius=1.0, cache=cache)
    rep = build_cover(v, params, sample, cache=cache)
    text = rep.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_scaling(args):
    v = _load_field_checked(args.field)
    radii = _parse_radius_list(args.R)
    res = scaling_fit(v, args.k, args.eps, radii, scan_floor=args.scan_floor,
                      radius=0.25, seed=args.seed)
    scaling_to_csv(res, args.out)
    if res.degenerate:
        print("degenerate fit (empty stratum or vanishing volumes)",
              file=sys.stderr)
    else:
        print("exponent %.6f over %d radii (sample %d)" %
              (res.exponent, len(radii), res.sample_size))
    return 0


def _read_points(path):
    if not os.path.exists(path):
        raise ValidationError("point file %r does not exist" % path)
    if path.endswith(".json"):
        with open(path) as fh:
            return np.array(json.load(fh), dtype=float)
    return np.loadtxt(path, ndmin=2)


def cmd_minkowski(args):
    pts = _read_points(args.points)
    if args.porosity:
        tokens = args.porosity.rsplit(",", 1)
        x = _parse_point(tokens[0], pts.shape[1])
        r = float(tokens[1])
        _write_json(args.out, {"porosity": porosity(pts, x, r)})
        return 0
    radii = _parse_radius_list(args.r_list)
    fit = dimension_fit(pts, radii, seed=args.seed)
    n = pts.shape[1]
    s = args.s if args.s is not None else fit.dimension
    rows = [["schema", "1"], ["r", "volume", "content_s"]]
    for r, vol in zip(fit.radii, fit.volumes):
        rows.append(["%.17g" % r, "%.17g" % vol,
                     "%.17g" % (vol / (2.0 * r) ** (n - s))])
    rows.append(["dimension", "%.17g" % fit.dimension, ""])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    else:
        for row in rows:
            print(",".join(row))
    return 0


def cmd_selftest(args):
    indices = None
    if args.criteria:
        indices = {int(t) for t in args.criteria.split(",")}
    results = acceptance.run_all(indices=indices)
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="strata",
        description="Frequency-based stratification experiments on "
                    "two-phase scalar fields")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for any randomized estimator (default 0)")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("STRATA_THREADS", "1")),
                        help="worker threads for grid scans; results do not "
                             "depend on the count")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="orthonormal harmonic basis as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("frequency", help="H, D, N, lambda at one (p, r)")
    p.add_argument("--field", required=True)
    p.add_argument("--p", required=True, help="comma-separated coordinates")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_frequency)

    p = sub.add_parser("profile", help="frequency records across scales")
    p.add_argument("--field", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--order", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("stratify", help="stratum flags on a lattice")
    p.add_argument("--field", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--grid-radius", type=float, default=0.25)
    p.add_argument("--grid-count", type=int, default=5)
    p.add_argument("--d-max", type=int, default=6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("beta", help="flatness number of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--bruteforce", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("reifenberg", help="packing report of a ball family")
    p.add_argument("--measure", required=True)
    p.add_argument("--eps-k", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reifenberg)

    p = sub.add_parser("cover", help="good/bad tree cover of the stratum")
    p.add_argument("--field", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--rho", type=float, default=1.0 / 16.0)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--eta", type=float, default=1e-5)
    p.add_argument("--E", type=float)
    p.add_argument("--d-max", type=int, default=6)
    p.add_argument("--order", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("scaling", help="tube-volume exponent of the stratum")
    p.add_argument("--field", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--R", required=True,
                   help="radius list: '2^-2..2^-6' or comma floats")
    p.add_argument("--scan-floor", type=float, default=1e-4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("minkowski", help="porosity / box dimension of points")
    p.add_argument("--points", required=True,
                   help="whitespace CSV or JSON array of coordinates")
    p.add_argument("--porosity", help="x1,..,xn,r")
    p.add_argument("--r-list", default="2^-5..2^-2")
    p.add_argument("--s", type=float,
                   help="content exponent (default: fitted dimension)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_minkowski)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--criteria", help="comma-separated indices (default all)")
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    np.random.seed(args.seed)
    try:
        return args.func(args)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (ValueError,) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (DegenerateHeight, DegenerateRescaling) as exc:
        print("degenerate: %s" % exc, file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
