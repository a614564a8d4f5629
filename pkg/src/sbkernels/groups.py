"""SU(2) and SL(2, C) elements, group operations and random ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from sbkernels.errors import InvariantError

__all__ = [
    "SU2Element",
    "SL2CElement",
    "as_matrix",
    "su2_inverse",
    "sl2c_inverse",
    "compose",
    "embed",
    "half_trace",
    "random_su2",
    "random_sl2c",
    "IDENTITY",
    "MINUS_IDENTITY",
    "angle_to_su2",
]

_UNITARITY_TOL = 1e-12
_DET_TOL = 1e-12


@dataclass(frozen=True)
class SU2Element:
    """The matrix ``[[a, b], [-conj(b), conj(a)]]`` with ``|a|^2 + |b|^2 = 1``."""

    a: complex
    b: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > _UNITARITY_TOL:
            raise InvariantError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=complex)


@dataclass(frozen=True, eq=False)
class SL2CElement:
    """A 2x2 complex matrix of determinant one."""

    m: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise InvariantError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvariantError("matrix entries must be finite")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1.0) > _DET_TOL:
            raise InvariantError(f"det = {det!r}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def matrix(self) -> np.ndarray:
        return self.m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SL2CElement):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self) -> int:
        # adding 0.0 maps -0.0 to 0.0 so equal matrices hash equally
        return hash((self.m + 0.0).tobytes())


IDENTITY = SU2Element(1.0, 0.0)
MINUS_IDENTITY = SU2Element(-1.0, 0.0)


def as_matrix(x) -> np.ndarray:
    """2x2 complex array for an element or a raw matrix."""
    if isinstance(x, (SU2Element, SL2CElement)):
        return x.matrix
    m = np.asarray(x, dtype=complex)
    if m.shape != (2, 2):
        raise InvariantError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


def su2_inverse(x: SU2Element) -> SU2Element:
    """Conjugate transpose: ``[[conj(a), -b], [conj(b), a]]``."""
    return SU2Element(x.a.conjugate(), -x.b)


def sl2c_inverse(g: SL2CElement) -> SL2CElement:
    # adjugate equals the inverse when det = 1
    m = g.m
    return SL2CElement(np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]))


def embed(x: SU2Element) -> SL2CElement:
    return SL2CElement(x.matrix)


def compose(x, y):
    """Group product ``x @ y``.

    Two SU(2) elements give an SU(2) element; anything involving SL(2, C)
    gives an SL(2, C) element.
    """
    if isinstance(x, SU2Element) and isinstance(y, SU2Element):
        return SU2Element(x.a * y.a - x.b * y.b.conjugate(), x.a * y.b + x.b * y.a.conjugate())
    return SL2CElement(as_matrix(x) @ as_matrix(y))


def half_trace(x) -> complex:
    m = as_matrix(x)
    return complex((m[0, 0] + m[1, 1]) / 2.0)


def random_su2(rng: np.random.Generator, size: int | None = None):
    """Haar-distributed SU(2) element(s) from a normalized Gaussian 4-vector.

    With ``size`` given, returns an ``(size, 2)`` complex array of ``(a, b)``
    pairs instead of element objects.
    """
    n = 1 if size is None else size
    v = rng.standard_normal((n, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    ab = np.empty((n, 2), dtype=complex)
    ab[:, 0] = v[:, 0] + 1j * v[:, 1]
    ab[:, 1] = v[:, 2] + 1j * v[:, 3]
    if size is None:
        return SU2Element(ab[0, 0], ab[0, 1])
    return ab


def random_sl2c(rng: np.random.Generator, scale: float = 1.0) -> SL2CElement:
    """``exp(M)`` for a random traceless ``M`` with entries in a box of half-width ``scale``.

    Real and imaginary parts of the three free entries are uniform on
    ``[-scale, scale]``; ``det exp(M) = exp(tr M) = 1``.
    """
    p, q, r = (rng.uniform(-scale, scale) + 1j * rng.uniform(-scale, scale) for _ in range(3))
    m = np.array([[p, q], [r, -p]], dtype=complex)
    return SL2CElement(scipy.linalg.expm(m))


def angle_to_su2(tau: float) -> SU2Element:
    """Diagonal representative ``diag(e^{i tau/2}, e^{-i tau/2})``."""
    return SU2Element(complex(math.cos(tau / 2), math.sin(tau / 2)), 0.0)
