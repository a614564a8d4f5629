"""Dunkl kernel, Dunkl heat kernel and the Coxeter-side Segal-Bargmann kernels.

Points of C^N are numpy arrays whose *last* axis holds the coordinates, so a
batch of M points in C^N has shape ``(M, N)`` and a scalar is a point of C^1.
Squares such as ``z^2`` are bilinear (``sum z_i^2``), never Hermitian.

Only two cases have a tractable Dunkl kernel and both are supported:

* ``mu = 0`` in any dimension: ``E(z, w) = exp(z . w)``.
* rank one (``N = 1``, group Z_2) with ``mu >= 0``::

      E_mu(z, w) = sum_n (z w)^n / gamma_mu(n)
      gamma_mu(2m)   = 2^{2m}   m! (mu + 1/2)_m
      gamma_mu(2m+1) = 2^{2m+1} m! (mu + 1/2)_{m+1}

  so ``gamma_mu(n+1) / gamma_mu(n) = n + 1 + 2 mu [n even]``. This is the
  eigenfunction of ``T f(x) = f'(x) + mu (f(x) - f(-x)) / x`` with eigenvalue
  ``w`` and ``E(., 0) = 1``; :func:`dunkl_operator_apply` checks that.

In rank one ``E_mu(z/sqrt(t), w/sqrt(t))`` depends only on ``z w / t``; the
kernels below evaluate it from that product so that equal arguments give
bit-identical kernel values regardless of how ``t`` was split.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Callable

import numpy as np
import scipy.linalg

from sbkernels.errors import ConvergenceError, DomainError, MeasureMismatchError, RankError
from sbkernels.quadrature import QuadratureRule, omega_rule
from sbkernels.reports import (
    BoundCheck,
    IdentityReport,
    ResidualAccumulator,
    SampleSpec,
    relative_residual,
    rng_stream,
)
from sbkernels.truncation import TruncatedSum

__all__ = [
    "KernelVersion",
    "as_point",
    "dunkl_series",
    "dunkl_kernel",
    "dunkl_operator_apply",
    "heat_kernel_rho",
    "sigma",
    "kernel",
    "transform_apply",
    "factorization_check",
    "factorization_sweep",
    "FACTORIZATION_TEST_FUNCTIONS",
    "gram_kernel",
    "gram_matrix",
    "gram_constant",
    "contraction_check",
    "pointwise_bound_check",
    "verify_coxeter_identities",
    "COXETER_IDENTITIES",
]

TERM_CAP = 10_000
_TERM_RTOL = 1e-15
_TAIL_RTOL = 1e-14


class KernelVersion(str, Enum):
    A = "A"
    B = "B"
    C = "C"


def _version(v) -> KernelVersion:
    try:
        return KernelVersion(v.value if isinstance(v, KernelVersion) else str(v).upper())
    except ValueError:
        raise DomainError(f"unknown kernel version {v!r}; expected A, B or C") from None


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not mu >= 0:
        raise DomainError(f"multiplicity must be >= 0, got {mu}")
    return mu


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    return t


def as_point(z) -> np.ndarray:
    """Complex array with at least one axis; the last axis is the coordinate axis."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] < 1:
        raise DomainError("points need at least one coordinate")
    return arr


def _real_point(q) -> np.ndarray:
    arr = as_point(q)
    if np.any(arr.imag != 0):
        raise DomainError("expected a real point")
    return arr


def _dot(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.sum(z * w, axis=-1)


def _sq(z: np.ndarray) -> np.ndarray:
    return np.sum(z * z, axis=-1)


def _dunkl_series_arrays(x, mu: float, cap: int = TERM_CAP):
    """Sum the rank-one series at every entry of ``x``.

    Returns ``(values, tail_bounds, terms_used)``. Stops once, for every entry,
    the last added term is below ``1e-15`` of the partial sum and the
    geometric tail bound is below ``1e-14`` of it (or below the rounding floor
    ``1e-16 * max |term|`` when the partial sum has cancelled).
    """
    x = np.asarray(x, dtype=complex)
    ax = np.abs(x)
    total = np.ones_like(x)
    term = np.ones_like(x)
    biggest = np.ones(x.shape)
    n = 0
    while True:
        term = term * x / (n + 1 + (2.0 * mu if n % 2 == 0 else 0.0))
        # term is now the (n+1)-th term, the first omitted one
        ratio = ax / (n + 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = np.where(ratio < 1.0, np.abs(term) / (1.0 - ratio), np.inf)
        ref = np.maximum(np.abs(total), 1e-16 * biggest)
        last_ok = np.abs(term) <= _TERM_RTOL * ref
        if np.all(last_ok & (tail <= _TAIL_RTOL * ref)):
            return total, tail, n + 1
        n += 1
        if n >= cap:
            raise ConvergenceError(f"Dunkl series did not converge within {cap} terms")
        total = total + term
        biggest = np.maximum(biggest, np.abs(term))


def dunkl_series(x: complex, mu: float, cap: int = TERM_CAP) -> TruncatedSum:
    """Rank-one ``E_mu`` as a function of the product ``x = z w``, with its tail bound."""
    mu = _check_mu(mu)
    v, tail, n = _dunkl_series_arrays(np.asarray(x, dtype=complex), mu, cap)
    return TruncatedSum(complex(v), float(tail), n)


def _e_of_product(p: np.ndarray, mu: float, force_series: bool = False) -> np.ndarray:
    if mu == 0 and not force_series:
        return np.exp(p)
    return _dunkl_series_arrays(p, mu)[0]


def _rank_guard(n: int, mu: float) -> None:
    if mu > 0 and n != 1:
        raise RankError(f"positive multiplicity needs N = 1, got N = {n}")


def dunkl_kernel(z, w, mu: float, *, force_series: bool = False):
    """``E_mu(z, w)``; ``exp(z . w)`` for ``mu = 0`` unless ``force_series``."""
    mu = _check_mu(mu)
    z, w = as_point(z), as_point(w)
    if z.shape[-1] != w.shape[-1]:
        raise DomainError("z and w live in different dimensions")
    _rank_guard(z.shape[-1], mu)
    if force_series and z.shape[-1] != 1:
        raise RankError("the series form is rank one only")
    out = _e_of_product(_dot(z, w), mu, force_series)
    return complex(out) if np.ndim(out) == 0 else out


def _kernel_from_logs(log_pref: np.ndarray, p: np.ndarray, mu: float) -> np.ndarray:
    """``exp(log_pref) * E_mu`` at product ``p``, merging exponents when ``mu = 0``."""
    if mu == 0:
        return np.exp(log_pref + p)
    return np.exp(log_pref) * _e_of_product(p, mu)


def _prepare(z, w, mu: float, t: float):
    mu, t = _check_mu(mu), _check_t(t)
    z, w = as_point(z), as_point(w)
    if z.shape[-1] != w.shape[-1]:
        raise DomainError("points live in different dimensions")
    _rank_guard(z.shape[-1], mu)
    return z, w, mu, t


def _scalarize(out):
    return complex(out) if np.ndim(out) == 0 else out


def heat_kernel_rho(z, w, mu: float, t: float):
    """``exp(-(z^2 + w^2)/2t) E_mu(z/sqrt t, w/sqrt t)``."""
    z, w, mu, t = _prepare(z, w, mu, t)
    log_pref = -(_sq(z) + _sq(w)) / (2.0 * t)
    return _scalarize(_kernel_from_logs(log_pref, _dot(z, w) / t, mu))


def sigma(q, t: float):
    """``exp(-q^2 / 2t)`` for real ``q``; independent of the multiplicity."""
    t = _check_t(t)
    q = _real_point(q)
    out = np.exp(-_sq(q).real / (2.0 * t))
    return float(out) if np.ndim(out) == 0 else out


def kernel(version, z, q, mu: float, t: float):
    """Version A, B or C Segal-Bargmann kernel at ``z`` in C^N and real ``q``.

    * A: ``exp(-z^2/2t - q^2/4t) E_mu(z/sqrt t, q/sqrt t)``
    * B: ``rho(z, q) / rho(0, q)``, evaluated literally as that quotient
    * C: ``rho(z, q)``
    """
    version = _version(version)
    q = _real_point(q)
    z, q, mu, t = _prepare(z, q, mu, t)
    if version is KernelVersion.A:
        log_pref = -_sq(z) / (2.0 * t) - _sq(q) / (4.0 * t)
        return _scalarize(_kernel_from_logs(log_pref, _dot(z, q) / t, mu))
    rho = heat_kernel_rho(z, q, mu, t)
    if version is KernelVersion.C:
        return rho
    rho0 = heat_kernel_rho(np.zeros_like(z), q, mu, t)
    return _scalarize(np.asarray(rho) / np.asarray(rho0))


def dunkl_operator_apply(f: Callable[[float], complex], mu: float, x: float, h: float):
    """Rank-one Dunkl operator ``f'(x) + mu (f(x) - f(-x)) / x``.

    The derivative is a central difference with step ``h`` (error ``O(h^2)``);
    the reflection term is exact.
    """
    mu = _check_mu(mu)
    if x == 0:
        raise DomainError("the Dunkl operator's difference term is singular at x = 0")
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    deriv = (f(x + h) - f(x - h)) / (2.0 * h)
    return deriv + mu * (f(x) - f(-x)) / x


# ---------------------------------------------------------------- identities

COXETER_IDENTITIES = (
    ("B_from_A", "B_t(z,q) = A_t(z,q) / A_t(0,q)"),
    ("C_from_A", "rho_t(z,q) = C_t(z,q) = A_t(0,q) A_t(z,q)"),
    ("sigma_from_A", "sigma_t(q) = rho_t(0,q) = A_t(0,q)^2"),
    ("C_doubling", "C_t(2z,q) = A_{2t}(2z,0) A_{t/2}(z,q)"),
    ("A_from_C", "A_t(z,q) = C_t(z,q) / C_t(0,q)^(1/2)"),
    ("B_from_C", "B_t(z,q) = C_t(z,q) / C_t(0,q)"),
    ("sigma_from_C", "sigma_t(q) = rho_t(0,q) = C_t(0,q)"),
)


def coxeter_residuals(z: np.ndarray, q: np.ndarray, mu: float, t: float) -> dict[str, np.ndarray]:
    """Residual arrays for every Coxeter identity at the sample points ``(z, q)``."""
    zero = np.zeros_like(z)
    A = kernel("A", z, q, mu, t)
    A0 = kernel("A", zero, q, mu, t)
    B = kernel("B", z, q, mu, t)
    C = kernel("C", z, q, mu, t)
    C0 = kernel("C", zero, q, mu, t)
    rho = heat_kernel_rho(z, q, mu, t)
    rho0 = heat_kernel_rho(zero, q, mu, t)
    sig = sigma(q, t)

    C2 = kernel("C", 2.0 * z, q, mu, t)
    A2t = kernel("A", 2.0 * z, np.zeros(q.shape), mu, 2.0 * t)
    Ahalf = kernel("A", z, q, mu, t / 2.0)

    def worst(*pairs):
        return np.maximum.reduce([relative_residual(a, b) for a, b in pairs])

    return {
        "B_from_A": relative_residual(B, A / A0),
        "C_from_A": worst((rho, C), (C, A0 * A)),
        "sigma_from_A": worst((sig, rho0), (rho0, A0 * A0)),
        "C_doubling": relative_residual(C2, A2t * Ahalf),
        "A_from_C": relative_residual(A, C / np.sqrt(C0)),
        "B_from_C": relative_residual(B, C / C0),
        "sigma_from_C": worst((sig, rho0), (rho0, C0)),
    }


def _sample_points(spec: SampleSpec, stream: int, dim: int):
    rng = rng_stream(spec.seed, stream)
    n = spec.samples
    z = rng.uniform(-spec.z_box, spec.z_box, (n, dim)) + 1j * rng.uniform(-spec.z_box, spec.z_box, (n, dim))
    q = rng.uniform(-spec.q_box, spec.q_box, (n, dim))
    return z, q


def verify_coxeter_identities(spec: SampleSpec, tol: float = 1e-11) -> IdentityReport:
    """Residuals of all seven Coxeter identities over the sample grid of ``spec``.

    Positive multiplicities are only combined with ``dim = 1``; ``mu = 0`` runs
    in every requested dimension. Each ``(mu, t, dim)`` group draws from its own
    seeded sub-stream.
    """
    acc = ResidualAccumulator(COXETER_IDENTITIES)
    stream = 0
    for dim in spec.dims:
        for mu in spec.mu_list:
            if mu > 0 and dim != 1:
                continue
            for t in spec.t_list:
                stream += 1
                z, q = _sample_points(spec, stream, dim)
                res = coxeter_residuals(z, q, mu, t)
                params = {"mu": mu, "t": t, "dim": dim}

                def point_of(k, z=z, q=q):
                    return {"z": z[k], "q": q[k]}

                for ident, _ in COXETER_IDENTITIES:
                    acc.add(ident, res[ident], params, point_of)
    return IdentityReport("coxeter-identities", acc.results(), tol, config=spec.to_dict())


# ---------------------------------------------------------------- transforms


def _rule_for(version: KernelVersion, rule: QuadratureRule, mu: float, t: float) -> None:
    kind = "m" if version is KernelVersion.B else "omega"
    rule.require(kind, mu, t)


def _psi_values(psi, nodes: np.ndarray) -> np.ndarray:
    if callable(psi):
        return np.asarray(psi(nodes), dtype=complex).reshape(len(nodes))
    vals = np.asarray(psi, dtype=complex)
    if vals.shape != (len(nodes),):
        raise DomainError("sampled psi must have one value per quadrature node")
    return vals


def _kernel_table(version, z: np.ndarray, nodes: np.ndarray, mu: float, t: float) -> np.ndarray:
    """``K[j, i] = kernel(z_j, q_i)`` for a batch of points ``z`` of shape ``(K, N)``."""
    return np.asarray(kernel(version, z[:, None, :], nodes[None, :, :], mu, t))


def transform_apply(version, psi, z, mu: float, t: float, rule: QuadratureRule):
    """Quadrature value of ``int K(z, q) psi(q) d nu(q)``.

    ``nu`` is ``omega(mu, t)`` for versions A and C and ``m(mu, t)`` for B; a
    rule for any other measure raises :class:`MeasureMismatchError`. ``psi`` is
    either a vectorized callable on the ``(M, N)`` node array or the sampled
    values. ``z`` may be one point or a batch ``(K, N)``.
    """
    version = _version(version)
    mu, t = _check_mu(mu), _check_t(t)
    _rule_for(version, rule, mu, t)
    z = as_point(z)
    single = z.ndim == 1
    zb = z.reshape(1, -1) if single else z
    if zb.shape[-1] != rule.nodes.shape[1]:
        raise MeasureMismatchError("point dimension differs from the rule's dimension")
    vals = _psi_values(psi, rule.nodes)
    table = _kernel_table(version, zb, rule.nodes, mu, t)
    out = table @ (rule.weights * vals)
    return complex(out[0]) if single else out


def _factorization_residuals(psi, z_grid, mu: float, t: float, rule: QuadratureRule):
    z_grid = as_point(z_grid)
    if z_grid.ndim == 1:
        z_grid = z_grid.reshape(-1, rule.nodes.shape[1])
    vals = _psi_values(psi, rule.nodes)
    m_vals = np.exp(-np.sum(rule.nodes**2, axis=1) / (4.0 * t)) * vals
    lhs = transform_apply("C", vals, z_grid, mu, t, rule)
    rhs = transform_apply("A", m_vals, z_grid, mu, t, rule)
    return z_grid, lhs, rhs


_FACTORIZATION_ID = ("C_equals_A_after_M", "C_t psi = A_t (M_t psi)")


def factorization_check(psi, z_grid, mu: float, t: float, rule: QuadratureRule, tol: float = 1e-11) -> IdentityReport:
    """Compare ``C psi`` with ``A (M psi)`` where ``M`` multiplies by ``exp(-q^2/4t)``."""
    z_grid, lhs, rhs = _factorization_residuals(psi, z_grid, mu, t, rule)
    acc = ResidualAccumulator([_FACTORIZATION_ID])
    acc.add(
        _FACTORIZATION_ID[0],
        relative_residual(lhs, rhs),
        {"mu": mu, "t": t, "dim": z_grid.shape[1]},
        lambda k: {"z": z_grid[k], "C_psi": lhs[k], "A_M_psi": rhs[k]},
    )
    return IdentityReport("factorization", acc.results(), tol)


FACTORIZATION_TEST_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "polynomial": lambda q: 1.0 + np.sum(q, axis=1) + np.sum(q * q, axis=1),
    "cosine": lambda q: np.cos(np.sum(q, axis=1)),
    "shifted_gaussian": lambda q: np.exp(-np.sum((q - 0.3) ** 2, axis=1)),
}


def factorization_sweep(
    spec: SampleSpec, order: int = 64, tol: float = 1e-11, grid_points: int = 20, stream_offset: int = 500
) -> IdentityReport:
    """:func:`factorization_check` for every test function over the grid of ``spec``.

    Rules in dimension ``N > 1`` use ``order // 2**(N-1)`` points per axis
    (at least 8) to keep the tensor grid small; the factorization holds node
    by node, so the residual does not depend on the order.
    """
    acc = ResidualAccumulator([_FACTORIZATION_ID])
    stream = stream_offset
    for dim in spec.dims:
        dim_order = order if dim == 1 else max(8, order // 2 ** (dim - 1))
        for mu in spec.mu_list:
            if mu > 0 and dim != 1:
                continue
            for t in spec.t_list:
                stream += 1
                rng = rng_stream(spec.seed, stream)
                shape = (grid_points, dim)
                z = rng.uniform(-spec.z_box, spec.z_box, shape) + 1j * rng.uniform(-spec.z_box, spec.z_box, shape)
                rule = omega_rule(mu, t, dim_order, dim)
                for name, psi in FACTORIZATION_TEST_FUNCTIONS.items():
                    _, lhs, rhs = _factorization_residuals(psi, z, mu, t, rule)

                    def point_of(k, z=z, lhs=lhs, rhs=rhs):
                        return {"z": z[k], "C_psi": lhs[k], "A_M_psi": rhs[k]}

                    params = {"mu": mu, "t": t, "dim": dim, "psi": name}
                    acc.add(_FACTORIZATION_ID[0], relative_residual(lhs, rhs), params, point_of)
    return IdentityReport("factorization", acc.results(), tol, config={**spec.to_dict(), "order": order, "grid_points": grid_points})


def gram_matrix(version, points, mu: float, t: float, rule: QuadratureRule) -> np.ndarray:
    """``G[i, j] = int conj(K(z_i, q)) K(z_j, q) d omega(q)`` for versions A, C."""
    version = _version(version)
    if version is KernelVersion.B:
        raise DomainError("Gram kernels are defined for versions A and C")
    mu, t = _check_mu(mu), _check_t(t)
    rule.require("omega", mu, t)
    pts = as_point(points)
    if pts.ndim == 1:
        pts = pts.reshape(-1, rule.nodes.shape[1])
    table = _kernel_table(version, pts, rule.nodes, mu, t)
    return (table.conj() * rule.weights) @ table.T


def gram_kernel(version, z, w, mu: float, t: float, rule: QuadratureRule) -> complex:
    """Reproducing kernel of the range of version A or C, by quadrature.

    ``L(z, w) = int conj(K(z, q)) K(w, q) d omega(q)``: anti-holomorphic in
    ``z``, holomorphic in ``w``. For C it is a constant multiple of
    ``rho_{2t}(conj z, w)``; for A a constant multiple of
    ``E_mu(conj z / sqrt t, w / sqrt t)``.
    """
    z, w = as_point(z), as_point(w)
    g = gram_matrix(version, np.stack([z, w]), mu, t, rule)
    return complex(g[0, 1])


def gram_constant(points, mu: float, t: float, rule: QuadratureRule) -> tuple[float, np.ndarray]:
    """Measured constant ``c`` in ``L_C(z, w) = c rho_{2t}(conj z, w)``.

    Returns the median ratio over all pairs of ``points`` and the array of
    individual ratios (whose spread measures how constant it is).
    """
    pts = as_point(points)
    if pts.ndim == 1:
        pts = pts.reshape(-1, rule.nodes.shape[1])
    g = gram_matrix("C", pts, mu, t, rule)
    ref = np.asarray(heat_kernel_rho(pts.conj()[:, None, :], pts[None, :, :], mu, 2.0 * t))
    ratios = (g / ref).ravel()
    return float(np.median(ratios.real)), ratios


def contraction_check(points, mu: float, t: float, rule: QuadratureRule) -> float:
    """Smallest ``kappa`` with ``G_C <= kappa G_A`` on ``points`` (Loewner order).

    The C-space sits inside the A-space with a contractive inclusion exactly
    when ``L_A - L_C`` is a positive kernel; on a finite set that is
    ``G_C <= G_A``. Returns the largest generalized eigenvalue of
    ``G_C v = kappa G_A v``; contraction means it is at most one.
    """
    ga = gram_matrix("A", points, mu, t, rule)
    gc = gram_matrix("C", points, mu, t, rule)
    ga = 0.5 * (ga + ga.conj().T)
    gc = 0.5 * (gc + gc.conj().T)
    kappas = scipy.linalg.eigh(gc, ga, eigvals_only=True)
    return float(np.max(kappas))


def pointwise_bound_check(z_grid, w_points, mu: float, t: float, rule: QuadratureRule, limit: float = 1 + 1e-8) -> BoundCheck:
    """Check ``|f(z)| <= c^{1/2} exp(y^2/2t) ||f||`` on C-space kernel sections.

    ``f_w = rho_{2t}(conj w, .)`` with ``||f_w||^2 = L_C(w, w) / c^2`` taken
    from the quadrature Gram kernel; ``c`` is the measured Gram constant.
    """
    mu, t = _check_mu(mu), _check_t(t)
    z_grid = as_point(z_grid)
    w_points = as_point(w_points)
    n = rule.nodes.shape[1]
    z_grid = z_grid.reshape(-1, n)
    w_points = w_points.reshape(-1, n)
    _rank_guard(n, mu)
    c, _ = gram_constant(w_points, mu, t, rule)
    norms = np.sqrt(np.real(np.diag(gram_matrix("C", w_points, mu, t, rule)))) / c
    f = np.asarray(heat_kernel_rho(w_points.conj()[:, None, :], z_grid[None, :, :], mu, 2.0 * t))
    y2 = np.sum(z_grid.imag**2, axis=1)
    bound = math.sqrt(c) * np.exp(y2 / (2.0 * t))[None, :] * norms[:, None]
    ratio = np.abs(f) / bound
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return BoundCheck(
        "c_space_pointwise_bound",
        float(ratio[i, j]),
        limit,
        {"mu": mu, "t": t, "w": w_points[i], "z": z_grid[j]},
        {"gram_constant": c},
    )
