import numpy as np
import pytest

from strata import fields as fl
from strata.acceptance import monomial_poly
from strata.harmonic import sphere_rule, surface_area


def test_hinged_example_field(hinged_linear4):
    # branch slopes 1/2 and 1: the two-phase piecewise-linear model field
    pts = np.array([[0, 0, 0, 1.0], [0, 0, 0, -1.0], [0.3, -0.2, 0.1, 0.0]])
    assert np.allclose(hinged_linear4(pts), [0.5, -1.0, 0.0])


def test_hinged_c_one_is_plain(saddle3):
    poly = monomial_poly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0})
    hinged = fl.make_hinged(poly, 1.0)
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (200, 3))
    assert np.abs(hinged(x) - saddle3(x)).max() < 1e-12


def test_hinged_saddle_signs():
    poly = monomial_poly(2, 2, {(2, 0): 1.0, (0, 2): -1.0})
    v = fl.make_hinged(poly, 3.0)
    assert v(np.array([1.0, 0.0])) == pytest.approx(3.0)
    assert v(np.array([0.0, 1.0])) == pytest.approx(-1.0)


def test_hinged_rejects_bad_constant():
    poly = monomial_poly(2, 2, {(2, 0): 1.0, (0, 2): -1.0})
    with pytest.raises(ValueError):
        fl.make_hinged(poly, 0.0)
    with pytest.raises(ValueError):
        fl.make_hinged(poly, -1.0)


def test_hinged_positive_homogeneity():
    rng = np.random.default_rng(1)
    rot = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    frame = fl.Frame(rotation=rot, origin=np.array([0.2, -0.1, 0.4]))
    poly = monomial_poly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0})
    v = fl.make_hinged(poly, 2.5, frame)
    x = rng.uniform(-0.5, 0.5, (50, 3))
    for t in (0.3, 2.0):
        scaled = frame.origin + t * (x - frame.origin)
        ref = t ** 2 * v(x)
        assert np.abs(v(scaled) - ref).max() <= 1e-10 * \
            (np.abs(ref).max() + 1.0)


def test_hinged_gradient_matches_differences(hinged_linear4):
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, (100, 4))
    lip = hinged_linear4.lipschitz_bound()
    h = 1e-5
    away = np.abs(hinged_linear4(x)) > lip * h
    x = x[away]
    g = hinged_linear4.grad(x)
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        fd = (hinged_linear4(x + e) - hinged_linear4(x - e)) / (2 * h)
        assert np.abs(g[:, k] - fd).max() < 1e-5


def test_mollify_constant():
    const = fl.compose_affine(
        fl.PolynomialField(monomial_poly(3, 0, {(0, 0, 0): 1.0})),
        5.0, 1.0, 0.0)
    smooth = fl.mollify(const, 0.3)
    x = np.array([[0.4, -0.2, 0.9], [0.0, 0.0, 0.0]])
    assert np.abs(smooth(x) - const(x)).max() < 1e-12


def test_mollify_mean_value_property():
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    smooth = fl.mollify(x1, 0.1)
    val = smooth(np.array([1.0, 0.0, 0.0]))
    assert val == pytest.approx(1.0, abs=1e-6)


def test_mollify_spine_value(hinged_linear4):
    # the spine value is pinched between the branch averages
    smooth = fl.mollify(hinged_linear4, 0.1)
    lip = hinged_linear4.lipschitz_bound()
    val = smooth(np.zeros(4))
    assert abs(val) < lip * 0.1


def test_rescale_normalization(saddle2):
    w = fl.rescale(saddle2, np.zeros(2), 2.0)
    rule = sphere_rule(2, 32)
    mean_sq = rule.weights @ w(rule.nodes) ** 2 / surface_area(2)
    assert mean_sq == pytest.approx(1.0, abs=1e-8)
    assert w(np.zeros(2)) == 0.0


def test_rescale_degenerate():
    const = fl.compose_affine(
        fl.PolynomialField(monomial_poly(2, 0, {(0, 0): 1.0})), 7.0, 1.0, 0.0)
    with pytest.raises(fl.DegenerateRescaling):
        fl.rescale(const, np.zeros(2), 1.0)


def test_rescale_linear_closed_form():
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    w = fl.rescale(x1, np.array([0.3, 0.0, 0.0]), 0.5)
    # v(x + r y) - v(x) = r y_1, normalizer r / sqrt(3): T = sqrt(3) y_1
    pts = np.array([[1.0, 0, 0], [0.2, 0.5, -0.3]])
    assert np.allclose(w(pts), np.sqrt(3.0) * pts[:, 0], atol=1e-10)
    again = fl.rescale(w, np.zeros(3), 1.0)
    assert np.abs(again(pts) - w(pts)).max() < 1e-8


def test_rescale_idempotent(saddle3):
    w = fl.rescale(saddle3, np.array([0.1, -0.2, 0.3]), 0.7)
    again = fl.rescale(w, np.zeros(3), 1.0)
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, (50, 3))
    assert np.abs(again(x) - w(x)).max() < 1e-8


def test_compose_affine_examples(saddle2):
    same = fl.compose_affine(saddle2, 1.0, 1.0, 0.0)
    rng = np.random.default_rng(4)
    x = rng.uniform(-1, 1, (20, 2))
    assert np.allclose(same(x), saddle2(x))
    w = fl.compose_affine(saddle2, 3.0, 2.0, 5.0)
    assert w(np.array([1.0, 0.0])) == pytest.approx(17.0)
    with pytest.raises(ValueError):
        fl.compose_affine(saddle2, 0.0, 1.0)
    with pytest.raises(ValueError):
        fl.compose_affine(saddle2, 1.0, 0.0)


def test_compose_affine_zero_set(saddle2):
    w = fl.compose_affine(saddle2, 2.0, 4.0, 0.0)
    # zero set of w is (1/b) times the zero set of v
    pts = np.array([[0.25, 0.25], [-0.1, 0.1]])
    assert np.abs(w(pts)).max() < 1e-12


def test_zero_set_hyperplane():
    x1 = fl.PolynomialField(monomial_poly(3, 1, {(1, 0, 0): 1.0}))
    pts = fl.zero_set_sample(x1, [(-1, 1)] * 3, 0.4)
    assert len(pts) > 0
    assert np.abs(pts[:, 0]).max() < 1e-10


def test_zero_set_saddle(saddle2):
    pts = fl.zero_set_sample(saddle2, [(-1, 1)] * 2, 0.21)
    assert len(pts) > 0
    # oracle: the zero set is |x| = |y|
    assert np.abs(np.abs(pts[:, 0]) - np.abs(pts[:, 1])).max() < 1e-7


def test_zero_set_empty(saddle2):
    shifted = fl.compose_affine(saddle2, 1.0, 1.0, 10.0)
    pts = fl.zero_set_sample(shifted, [(-0.5, 0.5)] * 2, 0.25)
    assert len(pts) == 0


def test_lipschitz_bound_sampling(saddle3):
    lip = saddle3.lipschitz_bound(radius=2.0)
    rng = np.random.default_rng(5)
    x = rng.uniform(-1, 1, (100, 3))
    y = x + rng.uniform(-0.01, 0.01, x.shape)
    num = np.abs(saddle3(x) - saddle3(y))
    assert (num <= 1.2 * lip * np.linalg.norm(x - y, axis=1) + 1e-12).all()


def test_sampled_field_roundtrip(tmp_path):
    grid = np.fromfunction(lambda i, j, k: 0.1 * i - 0.05 * j + 0.02 * k,
                           (9, 9, 9))
    f = fl.SampledField(grid, spacing=0.25, origin=[-1, -1, -1])
    header = tmp_path / "grid.json"
    data = tmp_path / "grid.bin"
    f.to_files(header, data)
    g = fl.SampledField.from_files(header)
    rng = np.random.default_rng(6)
    x = rng.uniform(-0.9, 0.9, (40, 3))
    assert np.allclose(f(x), g(x))
    # linear data is reproduced exactly by multilinear interpolation
    exact = 0.1 * (x[:, 0] + 1) / 0.25 - 0.05 * (x[:, 1] + 1) / 0.25 \
        + 0.02 * (x[:, 2] + 1) / 0.25
    assert np.abs(f(x) - exact).max() < 1e-12


def test_sampled_field_cubic():
    axes = np.linspace(-1, 1, 17)
    mesh = np.meshgrid(axes, axes, indexing="ij")
    values = np.sin(mesh[0]) * mesh[1] ** 2
    f = fl.SampledField(values, spacing=axes[1] - axes[0], origin=[-1, -1],
                        order=3)
    rng = np.random.default_rng(8)
    x = rng.uniform(-0.9, 0.9, (30, 2))
    exact = np.sin(x[:, 0]) * x[:, 1] ** 2
    assert np.abs(f(x) - exact).max() < 1e-3


def test_field_json_roundtrip(tmp_path, saddle3):
    rng = np.random.default_rng(7)
    poly = monomial_poly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0})
    hinged = fl.make_hinged(poly, 2.0, fl.Frame(origin=np.array([0.1, 0, 0]),
                                                dim=3))
    combo = fl.SumField([saddle3, fl.compose_affine(hinged, 2.0, 0.5, 1.0)],
                        [1.0, 0.25])
    path = tmp_path / "field.json"
    fl.save_field(combo, path)
    back = fl.load_field(path)
    x = rng.uniform(-1, 1, (50, 3))
    assert np.allclose(back(x), combo(x), atol=1e-14)


def test_metadata_validation():
    meta = fl.FieldMetadata(2.0, holder=(0.5, 0.0))
    assert meta.frequency_bound == 2.0
    with pytest.raises(ValueError):
        fl.FieldMetadata(-1.0)
    with pytest.raises(ValueError):
        fl.FieldMetadata(1.0, holder=(0.5, -2.0))
