import numpy as np
import pytest

from strata.minkowski import (dimension_fit, minkowski_estimate,
                              plane_sample, porosity,
                              porous_volume_bound_check, tube_volume)


def test_porosity_hyperplane():
    E = plane_sample(3, 2, 1.0 / 48.0)
    x = E[len(E) // 2]
    assert porosity(E, x, 0.2) >= 0.45


def test_porosity_dense_grid():
    D = plane_sample(3, 3, 1.0 / 16.0)
    center = np.array([0.5, 0.5, 0.5])
    # largest empty ball inside a filled box is bounded by the grid pitch
    assert porosity(D, center, 0.3) <= (1.0 / 16.0) / 0.3


def test_porosity_two_planes_oracle():
    # two parallel planes 0.1 apart, x on the lower; oracles follow the
    # empty-ball arithmetic for the implemented definition
    p1 = plane_sample(3, 2, 1.0 / 64.0)
    p1[:, 2] = 0.45
    p2 = plane_sample(3, 2, 1.0 / 64.0)
    p2[:, 2] = 0.55
    E = np.vstack([p1, p2])
    x = p1[len(p1) // 2]
    # r = 0.05: only the lower plane is visible, best ball radius r/2
    assert porosity(E, x, 0.05) == pytest.approx(0.5, abs=0.05)
    # r = 0.4: the half-ball under the lower plane wins, radius r/2,
    # while the far side of the upper plane allows only 0.15/0.4
    val = porosity(E, x, 0.4)
    assert val == pytest.approx(0.5, abs=0.06)
    assert val >= 0.15 / 0.4


def test_porous_volume_bound_slab():
    # sample pitch must resolve the tube radius 2^-8
    E = plane_sample(3, 2, 2.0 ** -9)
    check = porous_volume_bound_check(E, 0.25, 2.0 ** -8)
    assert check.porous_ok
    assert check.k == 2
    assert check.k_prime == 3
    assert check.N == 1
    assert check.measured_volume <= check.bound
    # slab tube volume is about 2 r0
    assert check.measured_volume == pytest.approx(2 * 2.0 ** -8, rel=0.3)


def test_porous_bound_empty_set_convention():
    check = porous_volume_bound_check(np.zeros((0, 3)) + 0.5, 0.25, 2.0 ** -6,
                                      sample_limit=0)
    assert check.measured_volume <= check.bound


def test_saddle_zero_set_porous(saddle2):
    from strata.fields import zero_set_sample
    pts = zero_set_sample(saddle2, [(0.0, 1.0)] * 2, 0.05)
    check = porous_volume_bound_check(pts, 0.2, 2.0 ** -6, sample_limit=20)
    assert check.porous_ok
    assert check.measured_volume <= check.bound


def test_tube_volume_monotone():
    E = plane_sample(2, 1, 1.0 / 64.0)
    box = [(-0.2, 1.2)] * 2
    vols = [tube_volume(E, r, box=box, pitch=2.0 ** -9)
            for r in (0.01, 0.02, 0.04, 0.08)]
    assert all(b >= a for a, b in zip(vols, vols[1:]))


def test_segment_content():
    E = plane_sample(2, 1, 1.0 / 128.0)
    r_list = [2.0 ** -e for e in (7, 6, 5, 4)]
    contents = minkowski_estimate(E, 1.0, r_list)
    # tube area 2r L + pi r^2 over (2r)^(n-s) = L + pi r / 2
    for r, c in zip(r_list, contents):
        assert c == pytest.approx(1.0 + np.pi * r / 2.0, rel=0.1)
    assert contents[0] == pytest.approx(1.0, rel=0.1)


def test_dimension_point():
    pts = np.array([[0.5, 0.5, 0.5]])
    fit = dimension_fit(pts, [2.0 ** -e for e in (5, 4, 3, 2)])
    assert fit.dimension == pytest.approx(0.0, abs=0.2)


def test_dimension_planes():
    # interior window suppresses patch-boundary curvature
    for n, k in [(2, 1), (3, 1), (3, 2), (4, 3)]:
        pitch = 2.0 ** -6 if k >= 2 else 2.0 ** -7
        pts = plane_sample(n, k, pitch)
        box = [(0.25, 0.75)] * k + [(0.0, 1.0)] * (n - k)
        fit = dimension_fit(pts, [2.0 ** -e for e in (5, 4, 3, 2)], box=box)
        assert fit.dimension == pytest.approx(k, abs=0.2), (n, k)
        assert fit.monotone


def test_dimension_saddle_zero_set():
    from strata.acceptance import saddle_field
    from strata.fields import zero_set_sample
    v = saddle_field(3)
    pts = zero_set_sample(v, [(0.0, 0.5), (-0.5, 0.5), (-0.3, 0.3)], 0.015)
    # window clear of the plane crossing, where tube volumes scale cleanly
    box = [(0.1, 0.45), (-0.3, 0.3), (-0.2, 0.2)]
    fit = dimension_fit(pts, [2.0 ** -e for e in (6, 5, 4, 3)], box=box)
    assert fit.dimension == pytest.approx(2.0, abs=0.2)


def test_dimension_needs_four_radii():
    with pytest.raises(ValueError):
        dimension_fit(np.zeros((1, 2)), [0.1, 0.2])
