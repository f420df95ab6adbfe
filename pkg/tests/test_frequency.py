import math

import numpy as np
import pytest

from strata import fields as fl
from strata import frequency as fq
from strata.acceptance import monomial_poly
from strata.harmonic import surface_area


def test_linear_plane_closed_form():
    x = fl.PolynomialField(monomial_poly(2, 1, {(1, 0): 1.0}))
    r = 0.73
    assert fq.height(x, [0, 0], r) == pytest.approx(math.pi * r ** 3,
                                                    rel=1e-9)
    assert fq.dirichlet(x, [0, 0], r) == pytest.approx(math.pi * r ** 2,
                                                       rel=1e-9)


def test_saddle_closed_form(saddle2):
    r = 0.41
    assert fq.height(saddle2, [0, 0], r) == pytest.approx(math.pi * r ** 5,
                                                          rel=1e-9)
    assert fq.dirichlet(saddle2, [0, 0], r) == pytest.approx(
        2 * math.pi * r ** 4, rel=1e-9)


def test_hinged_height_against_high_order_oracle(hinged_linear4):
    # 4x-order quadrature as the independent oracle, plus the closed form
    h_default = fq.height(hinged_linear4, np.zeros(4), 1.0)
    h_oracle = fq.height(hinged_linear4, np.zeros(4), 1.0, order=48)
    closed = (0.25 + 1.0) / 2.0 * surface_area(4) / 4.0
    assert h_default == pytest.approx(h_oracle, rel=1e-9)
    assert h_default == pytest.approx(closed, rel=1e-9)
    d_default = fq.dirichlet(hinged_linear4, np.zeros(4), 1.0)
    d_oracle = fq.dirichlet(hinged_linear4, np.zeros(4), 1.0, order=48)
    assert d_default == pytest.approx(d_oracle, rel=1e-9)


def test_frequency_examples(saddle2, hinged_linear4):
    assert fq.frequency(saddle2, [0, 0], 0.7) == pytest.approx(2.0, abs=1e-6)
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    assert fq.frequency(x1, [0.2, 0.5, -0.1], 0.8) == pytest.approx(
        1.0, abs=1e-6)
    for r in (0.25, 1.0, 1.7):
        assert fq.frequency(hinged_linear4, np.zeros(4), r) == pytest.approx(
            1.0, abs=1e-4)


def test_degenerate_height():
    const = fl.compose_affine(
        fl.PolynomialField(monomial_poly(2, 0, {(0, 0): 1.0})), 3.0, 1.0, 0.0)
    with pytest.raises(fq.DegenerateHeight):
        fq.frequency(const, [0.0, 0.0], 0.5)


def test_lambda_examples(saddle2, hinged_linear4):
    assert fq.lambda_coeff(saddle2, [0, 0], 1.0) == pytest.approx(2.0,
                                                                  abs=1e-6)
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    assert fq.lambda_coeff(x1, [0.2, 0, 0], 0.5) == pytest.approx(1.0,
                                                                  abs=1e-6)
    assert fq.lambda_coeff(hinged_linear4, np.zeros(4), 1.0) == \
        pytest.approx(1.0, abs=1e-4)


def test_lambda_affine_invariance(saddle3):
    lam = fq.lambda_coeff(saddle3, [0.05, -0.1, 0.2], 0.6)
    shifted = fl.compose_affine(saddle3, 4.2, 1.0, 3.3)
    lam2 = fq.lambda_coeff(shifted, [0.05, -0.1, 0.2], 0.6)
    assert abs(lam - lam2) < 1e-10


def test_rescaling_checks(saddle2):
    nv, nw = fq.frequency_rescaling_check(saddle2, 3.0, 2.0, 5.0, 1.0)
    assert nv == pytest.approx(2.0, abs=1e-8)
    assert abs(nv - nw) < 1e-8
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    nv, nw = fq.frequency_rescaling_check(x1, -1.5, 0.5, 0.3, 0.7)
    assert (nv, nw) == (pytest.approx(1.0, abs=1e-8),
                        pytest.approx(1.0, abs=1e-8))


def test_rescaling_check_hinged_degree3():
    poly = monomial_poly(2, 3, {(3, 0): 1.0, (1, 2): -3.0})
    v = fl.make_hinged(poly, 1.7)
    nv, nw = fq.frequency_rescaling_check(v, -2.0, 0.5, 0.0, 1.0)
    assert abs(nv - nw) < 1e-8


def test_scale_invariance_of_rescaled_frequency(saddle3):
    # frequency of the normalized rescaling matches the original at the
    # corresponding scale
    p = np.array([0.1, 0.05, -0.2])
    big = fl.rescale(saddle3, p, 0.5)
    for r in (0.25, 0.5, 1.0):
        assert fq.frequency(big, np.zeros(3), r) == pytest.approx(
            fq.frequency(saddle3, p, 0.5 * r), abs=1e-8)


def test_profile_monotone_and_drop(mixed13):
    prof = fq.frequency_profile(mixed13, [0, 0], 1e-2, 1e2, 4.0)
    drops = prof.drops()
    assert (drops >= -1e-8).all()
    assert prof.value_at(prof.scales[0]) == pytest.approx(1.0, abs=1e-3)
    assert prof.value_at(prof.scales[-1]) == pytest.approx(3.0, abs=1e-3)
    assert prof.drop(prof.scales[0], prof.scales[-1]) == pytest.approx(
        2.0, abs=2e-3)


def test_profile_against_closed_form(mixed13):
    # orthonormal degree-1 + degree-3 parts: N(r) = (r^2+3r^6)/(r^2+r^6)
    prof = fq.frequency_profile(mixed13, [0, 0], 0.05, 3.0, 2.0)
    for rec in prof.records:
        r = rec.r
        expected = (r ** 2 + 3 * r ** 6) / (r ** 2 + r ** 6)
        assert rec.N == pytest.approx(expected, rel=1e-7)


def test_homogeneous_profile_flat(hinged_linear4):
    prof = fq.frequency_profile(hinged_linear4, np.zeros(4), 0.05, 1.0, 2.0)
    vals = np.array([rec.N for rec in prof.records])
    assert np.abs(vals - 1.0).max() < 1e-6


def test_profile_includes_endpoint():
    v = fl.PolynomialField(monomial_poly(2, 1, {(1, 0): 1.0}))
    prof = fq.frequency_profile(v, [0, 0], 0.1, 1.0, 3.0)
    assert prof.scales[-1] == pytest.approx(1.0)


def test_doubling_saddle(saddle2):
    lhs, upper, lower = fq.doubling_check(saddle2, [0, 0], 0.5, 1.0)
    # H(1)/H(0.5) = 2^5 exactly for the planar saddle
    assert lhs == pytest.approx(upper, rel=1e-9)
    assert lhs == pytest.approx(lower, rel=1e-9)
    assert lhs == pytest.approx(2 ** 5 * fq.height(saddle2, [0, 0], 0.5),
                                rel=1e-9)


def test_doubling_linear3(linear3):
    lhs, upper, lower = fq.doubling_check(linear3, [0, 0, 0], 1.0, 2.0)
    assert lhs == pytest.approx(2 ** 4 * fq.height(linear3, [0, 0, 0], 1.0),
                                rel=1e-9)
    assert lower <= lhs * (1 + 1e-9)
    assert lhs <= upper * (1 + 1e-9)


def test_doubling_mixed_strict(mixed13):
    lhs, upper, lower = fq.doubling_check(mixed13, [0, 0], 0.5, 1.5)
    assert lower < lhs < upper


def test_defect_surrogate(saddle2, mixed13):
    assert fq.frequency_defect(saddle2, [0, 0], 1.0) < 1e-8
    assert fq.frequency_defect(mixed13, [0, 0], 1.0) > 1e-3


def test_frequency_batch_matches_scalar(saddle3):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.4, 0.4, (17, 3))
    batch = fq.frequency_batch(saddle3, pts, 0.3)
    for i, p in enumerate(pts):
        assert batch[i] == pytest.approx(fq.frequency(saddle3, p, 0.3),
                                         rel=1e-10)


def test_profile_csv(tmp_path, saddle2):
    prof = fq.frequency_profile(saddle2, [0, 0], 0.1, 0.4, 2.0,
                                with_lambda=True)
    path = tmp_path / "profile.csv"
    fq.profile_to_csv(prof, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("schema")
    assert lines[1] == "p1,p2,r,H,D,N,lambda"
    assert len(lines) == 2 + len(prof.records)
    row = lines[2].split(",")
    assert float(row[5]) == pytest.approx(2.0, abs=1e-6)


def test_metadata(saddle3):
    meta = fq.measure_metadata(saddle3)
    assert meta.frequency_bound == pytest.approx(2.0, abs=1e-6)
    assert meta.holder[1] == 0.0


def test_sup_frequency(saddle3, axis_sample):
    sup = fq.sup_frequency(saddle3, 1.0, 2.0, points=axis_sample[:5], grid=4)
    assert sup == pytest.approx(2.0, abs=1e-6)
