import numpy as np
import pytest

from sbkernels.errors import InvariantError
from sbkernels.groups import (
    IDENTITY,
    MINUS_IDENTITY,
    SL2CElement,
    SU2Element,
    angle_to_su2,
    compose,
    embed,
    half_trace,
    random_sl2c,
    random_su2,
    sl2c_inverse,
    su2_inverse,
)
from sbkernels.reports import rng_stream


def test_su2_inverse_of_identity():
    assert su2_inverse(IDENTITY) == IDENTITY


def test_su2_inverse_is_conjugate_transpose():
    x = random_su2(rng_stream(3, 0))
    np.testing.assert_allclose(su2_inverse(x).matrix, x.matrix.conj().T, atol=0)
    np.testing.assert_allclose(compose(x, su2_inverse(x)).matrix, np.eye(2), atol=1e-13)


def test_sl2c_inverse_diagonal():
    g = SL2CElement([[2, 0], [0, 0.5]])
    np.testing.assert_array_equal(sl2c_inverse(g).matrix, [[0.5, 0], [0, 2]])


def test_sl2c_inverse_random():
    g = random_sl2c(rng_stream(3, 1))
    np.testing.assert_allclose(compose(g, sl2c_inverse(g)).matrix, np.eye(2), atol=1e-12)


def test_invariants_checked():
    with pytest.raises(InvariantError):
        SU2Element(1.0, 0.1)
    with pytest.raises(InvariantError):
        SL2CElement([[1, 1], [1, 1]])
    with pytest.raises(InvariantError):
        SL2CElement(np.eye(3))


def test_sl2c_is_immutable_and_hashable():
    g = SL2CElement(np.eye(2))
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 2
    assert g == embed(IDENTITY)
    assert len({g, embed(IDENTITY)}) == 1


def test_compose_types():
    x = angle_to_su2(0.7)
    assert isinstance(compose(x, x), SU2Element)
    assert isinstance(compose(embed(x), x), SL2CElement)
    assert half_trace(compose(x, x)) == pytest.approx(np.cos(0.7))


def test_random_ensembles():
    rng = rng_stream(5, 0)
    ab = random_su2(rng, 100)
    np.testing.assert_allclose(np.abs(ab[:, 0]) ** 2 + np.abs(ab[:, 1]) ** 2, 1.0, atol=1e-14)
    for _ in range(20):
        m = random_sl2c(rng).matrix
        assert abs(np.linalg.det(m) - 1) < 1e-12


def test_constants():
    assert half_trace(MINUS_IDENTITY) == -1
    assert angle_to_su2(0.0) == IDENTITY
