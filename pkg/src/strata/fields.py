"""Scalar test fields: hinged two-phase, affine-composed, sampled, mollified.

A field evaluates on point arrays and exposes a gradient wherever one exists
(piecewise fields differentiate branch-by-branch; the hinge itself is a
measure-zero set that product quadrature nodes avoid).  ``rescale`` implements
the recenter-and-normalize map used throughout the stratification machinery:

    T[x, r] v (y) = (v(x + r y) - v(x)) / rms_{|y|=1}(v(x + r y) - v(x))
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .harmonic import HarmonicPolynomial, ball_rule, sphere_rule, \
    surface_area

DEGENERATE_NORMALIZER = 1e-14


class DegenerateRescaling(Exception):
    """Raised when the rescaling normalizer vanishes (locally constant field)."""


class Frame:
    """Rigid placement: field coordinates u = rotation @ (x - origin)."""

    def __init__(self, rotation=None, origin=None, dim=None):
        if rotation is None and origin is None and dim is None:
            raise ValueError("need at least one of rotation/origin/dim")
        if rotation is not None:
            rotation = np.asarray(rotation, dtype=float)
            dim = rotation.shape[0]
        if origin is not None:
            origin = np.asarray(origin, dtype=float)
            dim = origin.shape[0] if dim is None else dim
        self.rotation = np.eye(dim) if rotation is None else rotation
        self.origin = np.zeros(dim) if origin is None else origin
        if not np.allclose(self.rotation @ self.rotation.T, np.eye(dim),
                           atol=1e-10):
            raise ValueError("frame rotation must be orthogonal")

    @classmethod
    def identity(cls, dim):
        return cls(dim=dim)

    def apply(self, x):
        return (np.atleast_2d(x) - self.origin) @ self.rotation.T

    def to_dict(self):
        return {"rotation": self.rotation.tolist(),
                "origin": self.origin.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(rotation=data["rotation"], origin=data["origin"])


class ScalarField:
    """Base class; subclasses implement values() and gradient()."""

    dim = None
    lipschitz_hint = None

    def values(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def interface_values(self, x):
        """Channel values whose sign changes mark gradient discontinuities.

        Smooth fields return []; ball quadrature splits radial rays at the
        zero crossings of every channel.
        """
        return []

    @property
    def piecewise(self):
        return len(self.interface_values(np.zeros((1, self.dim)))) > 0

    @property
    def vanishes_on_interfaces(self):
        """True when the field is zero on every interface and harmonic off
        them, which licenses the divergence identity for the Dirichlet
        energy."""
        return False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self.values(x[None, :])[0])
        return self.values(x)

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.gradient(x[None, :])[0]
        return self.gradient(x)

    def lipschitz_bound(self, radius=2.0, samples=512, seed=7):
        """Gradient-sup estimate on B_radius(0), used for tolerances."""
        if self.lipschitz_hint is not None:
            return self.lipschitz_hint
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((samples, self.dim))
        x *= (radius * rng.random(samples) ** (1.0 / self.dim)
              / np.linalg.norm(x, axis=1))[:, None]
        g = np.linalg.norm(self.gradient(x), axis=1)
        return float(max(g.max(), 1e-30))


class PolynomialField(ScalarField):
    def __init__(self, poly: HarmonicPolynomial):
        self.poly = poly
        self.dim = poly.dim

    def values(self, x):
        return self.poly(x)

    def gradient(self, x):
        return self.poly.gradient(x)


class HingedField(ScalarField):
    """Two-phase field c * P+ (F x) - P- (F x) hinging along {P o F = 0}.

    ``c = 1`` collapses to the plain polynomial.  On the hinge both branches
    vanish, so the sign tie-break is value-neutral.
    """

    def __init__(self, poly: HarmonicPolynomial, c, frame: Frame = None):
        if c <= 0:
            raise ValueError("hinge constant must be positive, got %r" % (c,))
        self.poly = poly
        self.c = float(c)
        self.frame = Frame.identity(poly.dim) if frame is None else frame
        self.dim = poly.dim

    def values(self, x):
        u = self.frame.apply(x)
        p = self.poly(u)
        return np.where(p > 0, self.c * p, p)

    def gradient(self, x):
        u = self.frame.apply(x)
        p = self.poly(u)
        g = self.poly.gradient(u) @ self.frame.rotation
        fac = np.where(p > 0, self.c, 1.0)
        return fac[:, None] * g

    def interface_values(self, x):
        return [self.poly(self.frame.apply(x))]

    @property
    def vanishes_on_interfaces(self):
        return True


class AffineComposedField(ScalarField):
    """w(x) = a * v(b x) + shift."""

    def __init__(self, base: ScalarField, a, b, shift=0.0):
        if a == 0 or b == 0:
            raise ValueError("affine composition needs a != 0 and b != 0")
        self.base = base
        self.a = float(a)
        self.b = float(b)
        self.shift = float(shift)
        self.dim = base.dim

    def values(self, x):
        return self.a * self.base.values(np.atleast_2d(x) * self.b) + self.shift

    def gradient(self, x):
        return self.a * self.b * self.base.gradient(np.atleast_2d(x) * self.b)

    def interface_values(self, x):
        return self.base.interface_values(np.atleast_2d(x) * self.b)

    @property
    def vanishes_on_interfaces(self):
        return self.shift == 0.0 and self.base.vanishes_on_interfaces


class SumField(ScalarField):
    def __init__(self, fields, weights=None):
        dims = {f.dim for f in fields}
        if len(dims) != 1:
            raise ValueError("summands must share a dimension")
        self.fields = list(fields)
        self.weights = ([1.0] * len(fields) if weights is None
                        else [float(w) for w in weights])
        self.dim = dims.pop()

    def values(self, x):
        x = np.atleast_2d(x)
        return sum(w * f.values(x) for w, f in zip(self.weights, self.fields))

    def gradient(self, x):
        x = np.atleast_2d(x)
        return sum(w * f.gradient(x) for w, f in zip(self.weights, self.fields))

    def interface_values(self, x):
        x = np.atleast_2d(x)
        out = []
        for f in self.fields:
            out.extend(f.interface_values(x))
        return out

    @property
    def vanishes_on_interfaces(self):
        return len(self.fields) == 1 and \
            self.fields[0].vanishes_on_interfaces


class SampledField(ScalarField):
    """Field interpolated from a lattice of values (multilinear by default)."""

    def __init__(self, values, spacing, origin, order=1):
        values = np.asarray(values, dtype=float)
        self.dim = values.ndim
        self.grid_values = values
        self.spacing = float(spacing)
        self.origin = np.asarray(origin, dtype=float)
        self.order = int(order)
        axes = [self.origin[k] + self.spacing * np.arange(values.shape[k])
                for k in range(self.dim)]
        method = "linear" if self.order == 1 else "cubic"
        self._interp = RegularGridInterpolator(
            axes, values, method=method, bounds_error=False, fill_value=None)

    def values(self, x):
        return self._interp(np.atleast_2d(x))

    def gradient(self, x):
        x = np.atleast_2d(x)
        h = self.spacing / 8.0
        out = np.empty_like(x)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            out[:, k] = (self._interp(x + e) - self._interp(x - e)) / (2 * h)
        return out

    @classmethod
    def from_files(cls, header_path, order=1):
        with open(header_path) as fh:
            head = json.load(fh)
        raw = np.fromfile(head["data"], dtype=np.float64)
        values = raw.reshape(head["shape"])
        return cls(values, head["spacing"], head["origin"], order=order)

    def to_files(self, header_path, data_path):
        self.grid_values.astype(np.float64).tofile(data_path)
        with open(header_path, "w") as fh:
            json.dump({"shape": list(self.grid_values.shape),
                       "spacing": self.spacing,
                       "origin": self.origin.tolist(),
                       "data": str(data_path)}, fh)


def bump_profile(r2):
    """Unnormalized smooth bump exp(-1/(1-|x|^2)) on the unit ball."""
    out = np.zeros_like(r2)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


class MollifiedField(ScalarField):
    """Convolution of a field with the smooth bump at width eps.

    The bump is normalized against the instance's own quadrature rule, so the
    rule integrates the mollifier to exactly one and constants are preserved.
    """

    def __init__(self, base: ScalarField, eps, order=32):
        if eps <= 0:
            raise ValueError("mollification width must be positive")
        self.base = base
        self.eps = float(eps)
        self.dim = base.dim
        self._rule = ball_rule(self.dim, order)
        r2 = np.sum(self._rule.nodes ** 2, axis=1)
        raw = self._rule.weights * bump_profile(r2)
        self._weights = raw / raw.sum()

    def values(self, x):
        x = np.atleast_2d(x)
        pts = x[:, None, :] - self.eps * self._rule.nodes[None, :, :]
        flat = pts.reshape(-1, self.dim)
        vals = self.base.values(flat).reshape(x.shape[0], -1)
        return vals @ self._weights

    def gradient(self, x):
        x = np.atleast_2d(x)
        h = self.eps / 100.0
        out = np.empty_like(x)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            out[:, k] = (self.values(x + e) - self.values(x - e)) / (2 * h)
        return out


class RescaledField(ScalarField):
    """T[x, r] v: recentred at x, scale r, unit sphere-L2 norm at radius 1."""

    def __init__(self, base: ScalarField, x, r, quad_order=None):
        if r <= 0:
            raise ValueError("rescaling radius must be positive")
        self.base = base
        self.center = np.asarray(x, dtype=float)
        self.r = float(r)
        self.dim = base.dim
        order = quad_order or default_order(self.dim)
        rule = sphere_rule(self.dim, order)
        base_val = float(base.values(self.center[None, :])[0])
        diffs = base.values(self.center + self.r * rule.nodes) - base_val
        mean_sq = float(rule.weights @ diffs ** 2) / surface_area(self.dim)
        scale = math.sqrt(max(mean_sq, 0.0))
        if scale < DEGENERATE_NORMALIZER:
            raise DegenerateRescaling(
                "sphere-average of |v(x + r y) - v(x)| is %.3e at r=%g" %
                (scale, r))
        self.base_value = base_val
        self.scale = scale

    def values(self, x):
        pts = self.center + self.r * np.atleast_2d(x)
        return (self.base.values(pts) - self.base_value) / self.scale

    def gradient(self, x):
        pts = self.center + self.r * np.atleast_2d(x)
        return self.base.gradient(pts) * (self.r / self.scale)

    def interface_values(self, x):
        return self.base.interface_values(self.center +
                                          self.r * np.atleast_2d(x))

    @property
    def vanishes_on_interfaces(self):
        return self.base.vanishes_on_interfaces and \
            abs(self.base_value) <= 1e-12 * max(1.0, self.scale)


def default_order(dim):
    """Default quadrature order: 24 for n <= 3, 12 above."""
    return 24 if dim <= 3 else 12


def make_hinged(poly, c, frame=None):
    """Hinged two-phase field c*P+ - P- in the given frame."""
    return HingedField(poly, c, frame)


def mollify(v, eps, order=32):
    return MollifiedField(v, eps, order=order)


def rescale(v, x, r, quad_order=None):
    return RescaledField(v, x, r, quad_order=quad_order)


def compose_affine(v, a, b, shift=0.0):
    return AffineComposedField(v, a, b, shift)


def zero_set_sample(v, box, spacing, refine_tol=1e-9):
    """Sign-change points of v on a box lattice, refined by bisection.

    box is a sequence of (lo, hi) per coordinate.  Returns an (m x n) array
    of points with |v| below refine_tol * L * spacing.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    box = [(float(lo), float(hi)) for lo, hi in box]
    axes = [np.arange(lo, hi + spacing / 2, spacing) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    vals = v(grid)
    shape = tuple(len(a) for a in axes)
    vals = vals.reshape(shape)
    lip = v.lipschitz_bound()
    tol = refine_tol * lip * spacing
    points = []

    grid_pts = grid.reshape(shape + (len(box),))
    on_grid = np.argwhere(np.abs(vals) <= tol)
    for idx in on_grid:
        points.append(grid_pts[tuple(idx)])

    for axis in range(len(box)):
        lo_sl = [slice(None)] * len(box)
        hi_sl = [slice(None)] * len(box)
        lo_sl[axis] = slice(0, -1)
        hi_sl[axis] = slice(1, None)
        a = vals[tuple(lo_sl)]
        b = vals[tuple(hi_sl)]
        cross = np.argwhere((a * b) < 0)
        for idx in cross:
            i0 = tuple(idx)
            i1 = list(idx)
            i1[axis] += 1
            x0 = grid_pts[i0].copy()
            x1 = grid_pts[tuple(i1)].copy()
            f0 = vals[i0]
            for _ in range(80):
                mid = 0.5 * (x0 + x1)
                fm = float(v(mid))
                if abs(fm) <= tol:
                    x0 = x1 = mid
                    break
                if f0 * fm < 0:
                    x1 = mid
                else:
                    x0, f0 = mid, fm
            points.append(0.5 * (x0 + x1))
    if not points:
        return np.zeros((0, len(box)))
    return np.array(points)


def save_field(v, path):
    with open(path, "w") as fh:
        json.dump(field_to_dict(v), fh, indent=1)


def field_to_dict(v):
    if isinstance(v, PolynomialField):
        return {"type": "polynomial", "n": v.dim, **v.poly.to_dict()}
    if isinstance(v, HingedField):
        return {"type": "hinged", "n": v.dim, "c": v.c,
                "frame": v.frame.to_dict(), **v.poly.to_dict()}
    if isinstance(v, AffineComposedField):
        return {"type": "affine", "n": v.dim, "a": v.a, "b": v.b,
                "shift": v.shift, "base": field_to_dict(v.base)}
    if isinstance(v, SumField):
        return {"type": "sum", "n": v.dim, "weights": v.weights,
                "terms": [field_to_dict(f) for f in v.fields]}
    if isinstance(v, SampledField):
        return {"type": "sampled", "n": v.dim, "order": v.order,
                "grid_ref": getattr(v, "grid_ref", None)}
    if isinstance(v, MollifiedField):
        return {"type": "mollified", "n": v.dim, "eps": v.eps,
                "base": field_to_dict(v.base)}
    raise ValueError("cannot serialize field of type %s" % type(v).__name__)


def field_from_dict(data):
    kind = data["type"]
    if kind == "polynomial":
        return PolynomialField(HarmonicPolynomial.from_dict(data))
    if kind == "hinged":
        frame = Frame.from_dict(data["frame"]) if data.get("frame") else None
        return HingedField(HarmonicPolynomial.from_dict(data), data["c"], frame)
    if kind == "affine":
        return AffineComposedField(field_from_dict(data["base"]),
                                   data["a"], data["b"], data.get("shift", 0.0))
    if kind == "sum":
        return SumField([field_from_dict(t) for t in data["terms"]],
                        data.get("weights"))
    if kind == "sampled":
        if not data.get("grid_ref"):
            raise ValueError("sampled field spec needs grid_ref")
        return SampledField.from_files(data["grid_ref"],
                                       order=data.get("order", 1))
    if kind == "mollified":
        return MollifiedField(field_from_dict(data["base"]), data["eps"])
    raise ValueError("unknown field type %r" % kind)


def load_field(path):
    with open(path) as fh:
        return field_from_dict(json.load(fh))


class FieldMetadata:
    """Unit-scale frequency bound plus Holder/porosity tags for a field."""

    def __init__(self, frequency_bound, holder=(0.5, 0.0), porosity_hint=None):
        if frequency_bound < 0:
            raise ValueError("frequency bound must be nonnegative")
        if holder[1] < 0:
            raise ValueError("Holder seminorm must be nonnegative")
        self.frequency_bound = float(frequency_bound)
        self.holder = (float(holder[0]), float(holder[1]))
        self.porosity_hint = porosity_hint
