import numpy as np
import pytest

from strata import fields as fl
from strata.acceptance import monomial_poly, saddle_field, coordinate_field
from strata.harmonic import harmonic_basis


@pytest.fixture(scope="session")
def saddle2():
    """x^2 - y^2 in the plane."""
    return fl.PolynomialField(monomial_poly(2, 2, {(2, 0): 1.0,
                                                   (0, 2): -1.0}))


@pytest.fixture(scope="session")
def saddle3():
    """x1^2 - x2^2 embedded in R^3; spine = the x3 axis."""
    return saddle_field(3)


@pytest.fixture(scope="session")
def linear3():
    return coordinate_field(3, 0)


@pytest.fixture(scope="session")
def hinged_linear4():
    """Piecewise-linear two-phase field in R^4 with branch slopes 1 and 2."""
    return fl.make_hinged(monomial_poly(4, 1, {(0, 0, 0, 1): 1.0}), 0.5)


@pytest.fixture(scope="session")
def mixed13():
    """Orthonormal degree-1 plus degree-3 harmonic in the plane."""
    b1 = harmonic_basis(2, 1)
    b3 = harmonic_basis(2, 3)
    return fl.SumField([fl.PolynomialField(b1[0]), fl.PolynomialField(b3[0])])


@pytest.fixture(scope="session")
def axis_sample():
    """Lattice points on the saddle3 spine inside the unit ball."""
    z = np.arange(-1.0, 1.0 + 1e-9, 2.0 ** -5)
    pts = np.zeros((len(z), 3))
    pts[:, 2] = z
    return pts
