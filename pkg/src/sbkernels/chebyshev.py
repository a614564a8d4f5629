"""Chebyshev polynomials of the second kind on the complex plane.

The three-term recursion ``U_{n+1}(z) = 2 z U_n(z) - U_{n-1}(z)`` is the
evaluator used everywhere else in the package. The trigonometric form is kept
only as an independent check on the open interval (-1, 1).

Forward recursion in double precision is adequate for the degrees (n up to a
few hundred) and arguments (|z| up to about 10) met here.
"""

from __future__ import annotations

import math

import numpy as np

from sbkernels.errors import DomainError
from sbkernels.reports import BoundCheck, relative_residual

__all__ = [
    "u_eval",
    "u_sequence",
    "u_eval_trig",
    "u_bound",
    "bound_ratios",
    "growth_bound_sweep",
    "trig_agreement",
    "sample_disk",
]


def _check_degree(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


def u_sequence(n_max: int, z):
    """Return ``[U_0(z), ..., U_{n_max}(z)]`` stacked along a new leading axis.

    ``z`` may be a scalar or an array; the result has shape
    ``(n_max + 1,) + np.shape(z)`` and complex dtype.
    """
    n_max = _check_degree(n_max)
    z = np.asarray(z, dtype=complex)
    out = np.empty((n_max + 1,) + z.shape, dtype=complex)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * z
    two_z = 2.0 * z
    for k in range(1, n_max):
        out[k + 1] = two_z * out[k] - out[k - 1]
    return out


def u_eval(n: int, z):
    """Evaluate ``U_n(z)`` by the recursion seeded with ``U_0 = 1, U_1 = 2z``.

    Works for any complex ``z`` (scalar or array); no removable singularities.
    """
    n = _check_degree(n)
    z_arr = np.asarray(z, dtype=complex)
    prev = np.ones_like(z_arr)
    if n == 0:
        cur = prev
    else:
        cur = 2.0 * z_arr
        for _ in range(1, n):
            prev, cur = cur, 2.0 * z_arr * cur - prev
    if cur.ndim == 0:
        return complex(cur)
    return cur


def u_eval_trig(n: int, x: float) -> float:
    """``sin((n+1) theta) / sin(theta)`` with ``theta = arccos(x)``.

    Only defined for ``-1 < x < 1``; the endpoints are removable singularities
    of this form and are deliberately rejected.
    """
    n = _check_degree(n)
    x = float(x)
    if not -1.0 < x < 1.0:
        raise DomainError(f"trigonometric form needs -1 < x < 1, got {x}")
    theta = math.acos(x)
    return math.sin((n + 1) * theta) / math.sin(theta)


def u_bound(n: int, z) -> float:
    """Growth bound ``(3 max(1, |z|))**n`` on ``|U_n(z)|``."""
    n = _check_degree(n)
    return (3.0 * max(1.0, abs(complex(z)))) ** n


def bound_ratios(n_max: int, z) -> np.ndarray:
    """``|U_n(z)| / (3 max(1, |z|))**n`` for ``n = 0 .. n_max``; shape ``(n_max + 1,) + z.shape``.

    Computed in logs so large degrees do not overflow the bound.
    """
    z = np.asarray(z, dtype=complex)
    seq = np.abs(u_sequence(n_max, z))
    n = np.arange(n_max + 1).reshape((-1,) + (1,) * z.ndim)
    log_c = np.log(3.0 * np.maximum(1.0, np.abs(z)))
    with np.errstate(divide="ignore"):
        return np.exp(np.log(seq) - n * log_c)


def sample_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """``n`` points uniform in the closed disk ``|z| <= radius``."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, n))


def growth_bound_sweep(z, n_max: int = 60) -> BoundCheck:
    """Largest ``|U_n(z)| / (3 max(1, |z|))**n`` over ``n <= n_max`` and the given points."""
    z = np.asarray(z, dtype=complex).ravel()
    ratios = bound_ratios(n_max, z)
    n, k = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
    return BoundCheck(
        "chebyshev_growth",
        float(ratios[n, k]),
        1.0,
        {"n": int(n), "z": z[k]},
        {"violations": int(np.sum(ratios > 1.0)), "samples": int(z.size), "n_max": n_max},
    )


def trig_agreement(n_max: int = 60, points: int = 201, edge: float = 0.999, tol: float = 1e-10) -> BoundCheck:
    """Recursion against the trigonometric form on ``[-edge, edge]`` (relative residual)."""
    xs = np.linspace(-edge, edge, points)
    worst, where = 0.0, {}
    for deg in range(n_max + 1):
        rec = np.real(u_eval(deg, xs))
        trig = np.array([u_eval_trig(deg, x) for x in xs])
        res = relative_residual(rec, trig)
        j = int(np.argmax(res))
        if res[j] > worst:
            worst, where = float(res[j]), {"n": deg, "x": float(xs[j])}
    return BoundCheck("chebyshev_trig_agreement", worst, tol, where)
