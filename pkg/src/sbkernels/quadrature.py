"""Quadrature rules for the Dunkl weights on R^N and Haar measure on SU(2).

Measure conventions
-------------------
``omega(mu, t)``
    ``c |q|^{2 mu} dq`` on the line, with ``c`` fixed by
    ``int exp(-q^2 / 2t) d omega = 1``. For ``mu = 0`` and ``N > 1`` the same
    normalization is applied per coordinate (tensor product).
``m(mu, t)``
    ``exp(-q^2 / t) d omega(q)``, i.e. the square of ``sigma(q) = exp(-q^2/2t)``
    times ``omega``.
``haar``
    Normalized Haar measure on SU(2).

The line rules are generalized Gauss-Hermite rules for ``|x|^{2 mu} exp(-x^2)``
built from the Jacobi matrix of the monic recurrence
``p_{k+1} = x p_k - beta_k p_{k-1}`` with ``beta_k = k/2 + mu [k odd]``, then
mapped by ``q = sqrt(2t) x``. Nodes come from the tridiagonal eigenproblem;
weights are recomputed from the Christoffel function
``1 / sum_k ptilde_k(x)^2`` (orthonormal ``ptilde``), which keeps full relative
accuracy in the far tails where eigenvector components underflow. Evaluating
``ptilde_k(x) exp(-x^2/2)`` instead of ``ptilde_k(x)`` yields the weight
already divided by the Gaussian factor, which is what the ``omega`` weights
need, without any overflow.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.special

from sbkernels.errors import ConvergenceError, DomainError, MeasureMismatchError
from sbkernels.groups import SU2Element

__all__ = [
    "MeasureTag",
    "QuadratureRule",
    "generalized_hermite",
    "omega_rule",
    "m_rule",
    "haar_rule",
    "haar_invariance_check",
    "left_translate",
    "DEFAULT_ORDER",
    "DEFAULT_HAAR_RESOLUTION",
]

DEFAULT_ORDER = 64
DEFAULT_HAAR_RESOLUTION = 16
_MAX_ORDER = 400


@dataclass(frozen=True)
class MeasureTag:
    kind: str  # "omega", "m" or "haar"
    mu: float | None = None
    t: float | None = None

    def __str__(self) -> str:
        if self.kind == "haar":
            return "haar"
        return f"{self.kind}(mu={self.mu:g}, t={self.t:g})"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights for one measure.

    Line rules store ``nodes`` with shape ``(M, N)`` (real). The Haar rule stores
    ``(M, 2)`` complex ``(a, b)`` pairs; :meth:`elements` turns them into
    :class:`SU2Element` objects.
    """

    nodes: np.ndarray
    weights: np.ndarray
    measure: MeasureTag
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.nodes) != len(self.weights):
            raise ValueError("nodes and weights differ in length")
        if not np.all(self.weights > 0):
            raise ValueError("quadrature weights must be positive")
        if self.measure.kind == "haar" and abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("Haar weights must sum to one")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1] if self.measure.kind != "haar" else 3

    def integrate(self, values) -> complex:
        """``sum_i w_i values_i``; ``values`` evaluated at :attr:`nodes` in order."""
        v = np.asarray(values)
        if v.shape[0] != len(self):
            raise ValueError(f"expected {len(self)} values, got {v.shape[0]}")
        return complex(np.dot(self.weights, v))

    def elements(self) -> list[SU2Element]:
        if self.measure.kind != "haar":
            raise MeasureMismatchError("only the Haar rule has group-element nodes")
        return [SU2Element(a, b) for a, b in self.nodes]

    def require(self, kind: str, mu: float | None = None, t: float | None = None) -> None:
        """Raise unless the rule integrates against the named measure."""
        m = self.measure
        ok = m.kind == kind
        if ok and mu is not None:
            ok = m.mu is not None and math.isclose(m.mu, mu, rel_tol=0, abs_tol=1e-15)
        if ok and t is not None:
            ok = m.t is not None and math.isclose(m.t, t, rel_tol=1e-15)
        if not ok:
            wanted = MeasureTag(kind, mu, t) if kind != "haar" else MeasureTag("haar")
            raise MeasureMismatchError(f"rule integrates against {m}, need {wanted}")

    def to_csv(self) -> str:
        """One row per node: node coordinates then weight, 17 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.measure.kind == "haar":
            writer.writerow(["a_re", "a_im", "b_re", "b_im", "weight"])
            for (a, b), w in zip(self.nodes, self.weights):
                writer.writerow([f"{v:.17g}" for v in (a.real, a.imag, b.real, b.imag, w)])
        else:
            writer.writerow([f"q{i}" for i in range(self.dim)] + ["weight"])
            for q, w in zip(self.nodes, self.weights):
                writer.writerow([f"{v:.17g}" for v in (*q, w)])
        return buf.getvalue()


def _check_mu_t(mu: float, t: float) -> None:
    if not mu >= 0:
        raise DomainError(f"multiplicity must be >= 0, got {mu}")
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")


def generalized_hermite(order: int, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for ``|x|^{2 mu} exp(-x^2)`` on the real line.

    Returns ``(x, v)`` where ``v_i = lambda_i exp(x_i^2)``: the Gauss weights
    with the Gaussian factor divided out. The ordinary Gauss weights are
    ``v * exp(-x**2)``.
    """
    if order < 2 or order % 2:
        raise DomainError(f"order must be an even integer >= 2, got {order}")
    if order > _MAX_ORDER:
        raise DomainError(f"order above {_MAX_ORDER} is not supported")
    if mu < 0:
        raise DomainError(f"multiplicity must be >= 0, got {mu}")
    k = np.arange(1, order)
    beta = k / 2.0 + mu * (k % 2)
    if np.any(beta <= 0):
        raise ConvergenceError("recurrence breakdown: non-positive beta")
    off = np.sqrt(beta)
    x = scipy.linalg.eigh_tridiagonal(np.zeros(order), off, eigvals_only=True)
    # even order: the spectrum is symmetric and never contains 0; symmetrize round-off
    x = 0.5 * (x - x[::-1])

    beta0 = math.gamma(mu + 0.5)
    h_prev = np.zeros_like(x)
    h = np.exp(-0.5 * x * x) / math.sqrt(beta0)
    total = h * h
    for j in range(order - 1):
        h_next = (x * h - (off[j - 1] if j > 0 else 0.0) * h_prev) / off[j]
        h_prev, h = h, h_next
        total += h * h
    return x, 1.0 / total


def _line_rule(mu: float, t: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, v = generalized_hermite(order, mu)
    q = math.sqrt(2.0 * t) * x
    w = v / math.gamma(mu + 0.5)
    # exact in exact arithmetic; pin the normalization to the last bit
    w = w / np.dot(w, np.exp(-q * q / (2.0 * t)))
    return q, w


def _tensor(q: np.ndarray, w: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    grids = np.meshgrid(*([q] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrid = np.meshgrid(*([w] * dim), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    return nodes, weights


def omega_rule(mu: float, t: float, order: int = DEFAULT_ORDER, dim: int = 1) -> QuadratureRule:
    """Rule for ``omega(mu, t)``, exact on ``p(q) |q|^{2mu} exp(-q^2/2t)`` up to degree ``2 order - 1``.

    ``dim > 1`` is only available for ``mu = 0`` and uses a tensor product of
    ``order`` points per axis.
    """
    _check_mu_t(mu, t)
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    if dim > 1 and mu != 0:
        raise DomainError("positive multiplicity is only supported on the line")
    q, w = _line_rule(mu, t, order)
    nodes, weights = _tensor(q, w, dim)
    return QuadratureRule(nodes, weights, MeasureTag("omega", float(mu), float(t)), {"order": order})


def m_rule(mu: float, t: float, order: int = DEFAULT_ORDER, dim: int = 1) -> QuadratureRule:
    """Rule for ``m(mu, t) = exp(-q^2/t) omega(mu, t)``."""
    base = omega_rule(mu, t, order, dim)
    q2 = np.sum(base.nodes**2, axis=1)
    weights = base.weights * np.exp(-q2 / t)
    return QuadratureRule(
        np.array(base.nodes), weights, MeasureTag("m", float(mu), float(t)), {"order": order}
    )


def haar_rule(resolution: int = DEFAULT_HAAR_RESOLUTION) -> QuadratureRule:
    """Product rule for normalized Haar measure on SU(2).

    Euler-type coordinates ``a = cos(beta/2) e^{i xi1}``, ``b = sin(beta/2) e^{i xi2}``
    with ``xi1 = (alpha + gamma)/2`` and ``xi2 = (alpha - gamma)/2`` modulo 2 pi.
    The invariant density ``sin(beta) d beta d alpha d gamma`` becomes uniform in
    ``(cos beta, xi1, xi2)``. ``resolution`` Gauss-Legendre points in
    ``cos beta`` and ``2 * resolution`` trapezoid points in each periodic angle:
    polynomials in the matrix entries of degree below ``2 * resolution`` are
    integrated exactly.
    """
    if resolution < 4:
        raise DomainError(f"resolution must be >= 4, got {resolution}")
    c, wc = np.polynomial.legendre.leggauss(resolution)
    n_ang = 2 * resolution
    xi = 2.0 * np.pi * np.arange(n_ang) / n_ang
    cc, x1, x2 = np.meshgrid(c, xi, xi, indexing="ij")
    wgrid = np.broadcast_to((wc / 2.0)[:, None, None], cc.shape) / (n_ang * n_ang)
    cos_half = np.sqrt((1.0 + cc) / 2.0)
    sin_half = np.sqrt((1.0 - cc) / 2.0)
    nodes = np.stack(
        [(cos_half * np.exp(1j * x1)).ravel(), (sin_half * np.exp(1j * x2)).ravel()], axis=1
    )
    weights = np.array(wgrid).ravel()
    weights = weights / weights.sum()
    return QuadratureRule(nodes, weights, MeasureTag("haar"), {"resolution": resolution})


def left_translate(c: SU2Element, nodes: np.ndarray) -> np.ndarray:
    """``(a, b)`` pairs of ``c x`` for every node ``x`` of a Haar rule."""
    a, b = nodes[:, 0], nodes[:, 1]
    out = np.empty_like(nodes)
    out[:, 0] = c.a * a - c.b * np.conj(b)
    out[:, 1] = c.a * b + c.b * np.conj(a)
    return out


def haar_invariance_check(
    rule: QuadratureRule, c: SU2Element, f: Callable[[np.ndarray], np.ndarray]
) -> float:
    """``|sum w f(x_i) - sum w f(c x_i)|`` for a vectorized ``f`` on ``(a, b)`` arrays."""
    rule.require("haar")
    base = rule.integrate(f(rule.nodes))
    moved = rule.integrate(f(left_translate(c, rule.nodes)))
    return abs(base - moved)


def gaussian_moment(k: int, mu: float, t: float) -> float:
    """``int q^{2k} exp(-q^2/2t) d omega(mu, t)`` in closed form."""
    return (2.0 * t) ** k * math.exp(scipy.special.gammaln(k + mu + 0.5) - scipy.special.gammaln(mu + 0.5))
