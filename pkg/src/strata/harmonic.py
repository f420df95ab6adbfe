"""Homogeneous harmonic polynomials and sphere/ball quadrature rules.

Polynomials are stored as coefficient vectors over the monomials of their
degree (graded lex order, x1 > x2 > ... > xn).  ``harmonic_basis`` builds a
family that is orthonormal with respect to unit-sphere surface measure; all
other modules integrate against the rules constructed here.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import null_space
from scipy.special import roots_jacobi

# Azimuthal offset (fraction of one spacing) applied to the equispaced circle
# nodes.  Keeps trigonometric exactness while steering nodes off the
# coordinate axes, where piecewise fields hinge.
_ANGLE_OFFSET = 0.381966011250105


def surface_area(n):
    """Surface measure of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n):
    """Lebesgue measure of the unit ball in R^n."""
    return surface_area(n) / n


def monomial_exponents(n, d):
    """Exponent rows (h x n) of the degree-d monomials in graded lex order."""
    if d == 0:
        return np.zeros((1, n), dtype=int)
    rows = []
    for combo in combinations_with_replacement(range(n), d):
        e = np.zeros(n, dtype=int)
        for i in combo:
            e[i] += 1
        rows.append(tuple(e))
    rows = sorted(set(rows), reverse=True)
    return np.array(rows, dtype=int)


def harmonic_dimension(n, d):
    """Number of linearly independent degree-d harmonic polynomials in R^n."""
    if d == 0:
        return 1
    if d == 1:
        return n
    return math.comb(n + d - 1, d) - math.comb(n + d - 3, d - 2)


def _monomial_values(x, exponents):
    """Evaluate all monomials at points x (m x n) -> (m x h)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    m, n = x.shape
    dmax = int(exponents.max(initial=0))
    # per-coordinate power tables, then gather: x^a = prod_k pow_k[:, a_k]
    powers = np.ones((n, x.shape[0], dmax + 1))
    for k in range(n):
        for e in range(1, dmax + 1):
            powers[k, :, e] = powers[k, :, e - 1] * x[:, k]
    vals = np.ones((m, exponents.shape[0]))
    for k in range(n):
        vals *= powers[k][:, exponents[:, k]]
    return vals


def _laplacian_matrix(n, d):
    """Matrix of the Laplacian from degree-d to degree-(d-2) monomial coeffs."""
    top = monomial_exponents(n, d)
    bot = monomial_exponents(n, d - 2)
    index = {tuple(row): i for i, row in enumerate(bot)}
    mat = np.zeros((bot.shape[0], top.shape[0]))
    for j, alpha in enumerate(top):
        for k in range(n):
            if alpha[k] >= 2:
                beta = alpha.copy()
                beta[k] -= 2
                mat[index[tuple(beta)], j] += alpha[k] * (alpha[k] - 1)
    return mat


class HarmonicPolynomial:
    """Homogeneous harmonic polynomial given by monomial coefficients.

    ``coeffs`` (coordinates over the orthonormal basis of the same (n, d))
    is available through :meth:`coordinates`.
    """

    def __init__(self, dim, degree, monomial_coeffs):
        self.dim = int(dim)
        self.degree = int(degree)
        self.monomial_coeffs = np.asarray(monomial_coeffs, dtype=float)
        self.exponents = monomial_exponents(self.dim, self.degree)
        if self.monomial_coeffs.shape != (self.exponents.shape[0],):
            raise ValueError("coefficient vector has wrong length")
        self._grad_cache = None

    def __call__(self, x):
        vals = _monomial_values(x, self.exponents) @ self.monomial_coeffs
        return vals if np.ndim(x) > 1 else float(vals[0])

    def gradient(self, x):
        """Gradient at points x (m x n) -> (m x n)."""
        if self._grad_cache is None:
            if self.degree == 0:
                self._grad_cache = (np.zeros((1, self.dim)),
                                    np.zeros((self.dim, 1)))
            else:
                dexp = monomial_exponents(self.dim, self.degree - 1)
                index = {tuple(r): i for i, r in enumerate(dexp)}
                dcoef = np.zeros((self.dim, dexp.shape[0]))
                for j, alpha in enumerate(self.exponents):
                    c = self.monomial_coeffs[j]
                    if c == 0.0:
                        continue
                    for k in range(self.dim):
                        if alpha[k] >= 1:
                            beta = alpha.copy()
                            beta[k] -= 1
                            dcoef[k, index[tuple(beta)]] += c * alpha[k]
                self._grad_cache = (dexp, dcoef.T)
        dexp, dcoef = self._grad_cache
        x2 = np.atleast_2d(np.asarray(x, dtype=float))
        if self.degree == 0:
            out = np.zeros_like(x2)
        else:
            out = _monomial_values(x2, dexp) @ dcoef
        return out if np.ndim(x) > 1 else out[0]

    def coordinates(self, basis=None):
        """Coordinates of this polynomial over the orthonormal basis."""
        if basis is None:
            basis = harmonic_basis(self.dim, self.degree)
        rule = sphere_rule(self.dim, 2 * self.degree + 2)
        mine = self(rule.nodes)
        return np.array([rule.weights @ (mine * q(rule.nodes)) for q in basis])

    def laplacian_residual(self, x):
        """Numerical Laplacian by centered second differences (diagnostic)."""
        x = np.asarray(x, dtype=float)
        h = 1e-4
        total = -2.0 * self.dim * self(x[None, :])[0]
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = h
            total += self((x + e)[None, :])[0] + self((x - e)[None, :])[0]
        return total / h ** 2

    def to_dict(self):
        return {"n": self.dim, "d": self.degree,
                "monomial_coeffs": self.monomial_coeffs.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["n"], data["d"], data["monomial_coeffs"])


@lru_cache(maxsize=None)
def _basis_cached(n, d):
    if n < 2:
        raise ValueError("dimension must be >= 2, got %d" % n)
    if d < 0:
        raise ValueError("degree must be >= 0, got %d" % d)
    exps = monomial_exponents(n, d)
    if d < 2:
        raw = np.eye(exps.shape[0])
    else:
        raw = null_space(_laplacian_matrix(n, d))
        # svd basis vectors are orthonormal but sign-ambiguous across
        # library versions; canonicalize before Gram-Schmidt
        for j in range(raw.shape[1]):
            lead = np.flatnonzero(np.abs(raw[:, j]) > 1e-12)[0]
            if raw[lead, j] < 0:
                raw[:, j] = -raw[:, j]
    h = harmonic_dimension(n, d)
    if raw.shape[1] != h:
        raise RuntimeError("harmonic null space has unexpected dimension")
    rule = sphere_rule(n, 2 * d + 2)
    vals = _monomial_values(rule.nodes, exps) @ raw      # nodes x h
    w = rule.weights
    coeffs = raw.copy()
    # modified Gram-Schmidt in the sphere L2 inner product, two passes
    for j in range(h):
        for _ in range(2):
            for i in range(j):
                proj = w @ (vals[:, j] * vals[:, i])
                vals[:, j] -= proj * vals[:, i]
                coeffs[:, j] -= proj * coeffs[:, i]
        nrm = math.sqrt(w @ vals[:, j] ** 2)
        vals[:, j] /= nrm
        coeffs[:, j] /= nrm
        lead = np.flatnonzero(np.abs(coeffs[:, j]) > 1e-12)[0]
        if coeffs[lead, j] < 0:
            vals[:, j] = -vals[:, j]
            coeffs[:, j] = -coeffs[:, j]
    return tuple(HarmonicPolynomial(n, d, coeffs[:, j]) for j in range(h))


def harmonic_basis(n, d):
    """Orthonormal basis (unit-sphere surface measure) of degree-d harmonics."""
    return list(_basis_cached(int(n), int(d)))


def combine(basis, coords):
    """Linear combination of same-degree harmonic polynomials."""
    coords = np.asarray(coords, dtype=float)
    mono = sum(c * p.monomial_coeffs for c, p in zip(coords, basis))
    return HarmonicPolynomial(basis[0].dim, basis[0].degree, mono)


def basis_to_json(basis):
    b0 = basis[0]
    return json.dumps({"n": b0.dim, "d": b0.degree,
                       "coeffs": [p.monomial_coeffs.tolist() for p in basis]})


def basis_from_json(text):
    data = json.loads(text)
    return [HarmonicPolynomial(data["n"], data["d"], row)
            for row in data["coeffs"]]


class SphereRule:
    """Quadrature rule on the unit sphere S^{n-1}.

    ``weights`` are positive and sum to the surface area; polynomials up to
    ``order`` are integrated exactly.
    """

    def __init__(self, dim, order, nodes, weights):
        self.dim = dim
        self.order = order
        self.nodes = nodes
        self.weights = weights

    def integrate(self, f):
        return float(self.weights @ f(self.nodes))

    def average(self, f):
        return self.integrate(f) / surface_area(self.dim)


class BallRule:
    """Product (radial x sphere) quadrature on the unit ball."""

    def __init__(self, dim, order, nodes, weights):
        self.dim = dim
        self.order = order
        self.nodes = nodes
        self.weights = weights

    def integrate(self, f):
        return float(self.weights @ f(self.nodes))

    def average(self, f):
        return self.integrate(f) / ball_volume(self.dim)


@lru_cache(maxsize=None)
def _sphere_cached(n, order):
    if n < 2:
        raise ValueError("dimension must be >= 2, got %d" % n)
    if n > 5:
        raise ValueError("tensor rules support n in {2,..,5}; got n=%d "
                         "(use monte_carlo_sphere for higher dimensions)" % n)
    if order < 2:
        raise ValueError("order must be >= 2, got %d" % order)
    if n == 2:
        m = 2 * (order + 1)
        theta = 2.0 * math.pi * (np.arange(m) + _ANGLE_OFFSET) / m
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(m, 2.0 * math.pi / m)
        return nodes, weights
    sub_nodes, sub_weights = _sphere_cached(n - 1, order)
    g = order + 1
    a = (n - 3) / 2.0
    t, wt = roots_jacobi(g, a, a)
    s = np.sqrt(np.clip(1.0 - t ** 2, 0.0, None))
    nodes = np.empty((g * sub_nodes.shape[0], n))
    nodes[:, 0] = np.repeat(t, sub_nodes.shape[0])
    nodes[:, 1:] = np.repeat(s, sub_nodes.shape[0])[:, None] * \
        np.tile(sub_nodes, (g, 1))
    weights = np.repeat(wt, sub_nodes.shape[0]) * np.tile(sub_weights, g)
    return nodes, weights


def sphere_rule(n, order):
    nodes, weights = _sphere_cached(int(n), int(order))
    return SphereRule(int(n), int(order), nodes, weights)


@lru_cache(maxsize=None)
def _ball_cached(n, order):
    sphere_nodes, sphere_weights = _sphere_cached(n, order)
    g = order // 2 + 2
    # radial weight r^{n-1} on [0,1] via Jacobi weight (1+x)^{n-1} on [-1,1]
    x, wx = roots_jacobi(g, 0.0, float(n - 1))
    r = (x + 1.0) / 2.0
    wr = wx / 2.0 ** n
    nodes = np.repeat(r, sphere_nodes.shape[0])[:, None] * \
        np.tile(sphere_nodes, (g, 1))
    weights = np.repeat(wr, sphere_nodes.shape[0]) * \
        np.tile(sphere_weights, g)
    return nodes, weights


def ball_rule(n, order):
    nodes, weights = _ball_cached(int(n), int(order))
    return BallRule(int(n), int(order), nodes, weights)


def monte_carlo_sphere(n, count, seed=0):
    """Seeded uniform sphere sample as an equal-weight rule (n > 5 fallback)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    w = np.full(count, surface_area(n) / count)
    return SphereRule(n, 0, x, w)
