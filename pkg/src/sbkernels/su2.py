"""SU(2) heat kernel, characters and the Lie-side Segal-Bargmann kernels.

Everything is a function of the half-trace ``s = Tr(A)/2``. The heat kernel is
the character series::

    rho_t(A) = sum_{n>=0} (n+1) exp(-n(n+2) t/8) U_n(s)

truncated once the tail bound ``sum_{m>n} (m+1) exp(-m(m+2) t/8) C^m`` with
``C = 3 max(1, |s|)`` drops below the requested tolerance. Successive ratios of
those bound terms decrease, so the tail is at most the first omitted bound
term divided by ``1 - ratio`` as soon as the ratio is below one.

Near ``-I`` the series cancels catastrophically (at t = 1/4 the value is about
1e-30 against terms of order 100). When the summed absolute terms exceed the
result by more than ``_COND_LIMIT``, the value is re-evaluated from the
Poisson-summed form, which with ``theta = arccos(s)`` and ``delta = pi - theta``
reads::

    rho_t = K_t / sin(delta) * sum_{m>=0} [(c_m - delta) exp(-2 (c_m - delta)^2 / t)
                                          - (c_m + delta) exp(-2 (c_m + delta)^2 / t)]
    c_m = (2m + 1) pi,   K_t = exp(t/8) sqrt(8 pi / t) * 2 / t

Arguments where both forms lose accuracy fall back to the partial sum in
extended precision (mpmath). The reported ``tail_bound`` is always the one of
the character series.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from sbkernels.chebyshev import u_eval
from sbkernels.dunkl import KernelVersion, _version
from sbkernels.errors import ConvergenceError, DomainError, InvariantError
from sbkernels.groups import (
    IDENTITY,
    MINUS_IDENTITY,
    SL2CElement,
    SU2Element,
    as_matrix,
    half_trace,
    random_sl2c,
    random_su2,
)
from sbkernels.quadrature import QuadratureRule
from sbkernels.reports import (
    IdentityReport,
    ResidualAccumulator,
    SampleSpec,
    dump_json,
    jsonable,
    relative_residual,
    rng_stream,
)
from sbkernels.truncation import TruncatedSum

__all__ = [
    "HalfInteger",
    "Enclosure",
    "CounterexampleReport",
    "LIE_IDENTITIES",
    "conjugacy_angle",
    "character",
    "heat_kernel_su2",
    "heat_kernel_su2_batch",
    "heat_kernel_su2_interval",
    "kernel_lie",
    "lie_kernel_batch",
    "verify_lie_identities",
    "doubling_residual",
    "counterexample_report",
    "transform_apply_lie",
]

TERM_CAP = 5000
_COND_LIMIT = 1e3
_ANGLE_GUARD = 1e-12
_IMAG_GUARD = 1e-12
_LIE_TAIL_TOL = 1e-13


@dataclass(frozen=True)
class HalfInteger:
    """``u = twice_u / 2``; labels the irreducible representation of dimension ``2u + 1``."""

    twice_u: int

    def __post_init__(self) -> None:
        if isinstance(self.twice_u, bool) or int(self.twice_u) != self.twice_u or self.twice_u < 0:
            raise DomainError(f"twice_u must be a non-negative integer, got {self.twice_u!r}")
        object.__setattr__(self, "twice_u", int(self.twice_u))

    @classmethod
    def of(cls, u) -> "HalfInteger":
        if isinstance(u, HalfInteger):
            return u
        two_u = 2 * float(u)
        if two_u != round(two_u):
            raise DomainError(f"{u!r} is not a half-integer")
        return cls(int(round(two_u)))

    @property
    def value(self) -> float:
        return self.twice_u / 2

    @property
    def casimir(self) -> float:
        """``u (u + 1)``."""
        u = self.value
        return u * (u + 1)


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t}")
    return t


def _check_tol(tol: float) -> float:
    tol = float(tol)
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    return tol


def conjugacy_angle(x: SU2Element) -> float:
    """``2 arccos(Re a)`` in ``[0, 2 pi]``."""
    re = x.a.real
    if abs(re) > 1.0 + _ANGLE_GUARD:
        raise InvariantError(f"|Re a| = {abs(re)!r} exceeds 1")
    return 2.0 * math.acos(min(1.0, max(-1.0, re)))


def character(u, A) -> complex:
    """``chi_u(A) = U_{2u}(Tr(A)/2)``, defined on every 2x2 complex matrix."""
    return u_eval(HalfInteger.of(u).twice_u, half_trace(A))


def character_of_nodes(u, nodes: np.ndarray) -> np.ndarray:
    """Characters of SU(2) elements stored as ``(a, b)`` rows (half-trace ``Re a``)."""
    return np.real(u_eval(HalfInteger.of(u).twice_u, np.asarray(nodes)[:, 0].real))


# ------------------------------------------------------------- heat kernel


def _log_bound_term(m, log_c, t: float):
    return np.log(m + 1.0) - m * (m + 2.0) * t / 8.0 + m * log_c


def _log_tail(n: int, log_c, t: float):
    """Log of the bound on ``sum_{m>n} (m+1) exp(-m(m+2)t/8) C^m``; ``inf`` while ratios are >= 1."""
    first = _log_bound_term(n + 1, log_c, t)
    log_ratio = _log_bound_term(n + 2, log_c, t) - first
    with np.errstate(divide="ignore", invalid="ignore"):
        out = first - np.log(-np.expm1(np.minimum(log_ratio, 0.0)))
    return np.where(log_ratio < 0, out, np.inf)


def _terms_needed(log_c: float, t: float, log_tol: float) -> int:
    """Smallest ``n`` whose tail bound after ``U_0 .. U_n`` is at most ``exp(log_tol)``."""
    n = 0
    while _log_tail(n, log_c, t) > log_tol:
        n += 1
        if n > TERM_CAP:
            raise ConvergenceError(f"tail bound not reached within {TERM_CAP} terms")
    return n


def _log_c(s: np.ndarray) -> np.ndarray:
    return np.log(3.0 * np.maximum(1.0, np.abs(s)))


def _direct_sum(s: np.ndarray, t: float, n: int):
    """Partial sum through ``U_n`` and the sum of absolute terms."""
    prev = np.ones_like(s)
    cur = 2.0 * s
    total = np.ones_like(s)
    abs_total = np.ones(s.shape)
    for m in range(1, n + 1):
        term = (m + 1) * math.exp(-m * (m + 2) * t / 8.0) * cur
        total = total + term
        abs_total = abs_total + np.abs(term)
        prev, cur = cur, 2.0 * s * cur - prev
    return total, abs_total


def _x_over_sin(x: np.ndarray) -> np.ndarray:
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, safe / np.sin(safe))


def _sinhc(x: np.ndarray) -> np.ndarray:
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(safe) / safe)


def _theta_form(s: np.ndarray, t: float):
    """Poisson-summed heat kernel and its condition estimate."""
    delta = np.pi - np.arccos(s)
    n_pairs = int(math.ceil(0.8 * math.sqrt(t))) + 3
    c = (2.0 * np.arange(n_pairs) + 1.0)[:, None] * np.pi
    d = delta[None, :]
    x = 4.0 * c * d / t
    near = np.abs(x) < 1.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sin_d = np.sin(d)
        # small x: exp(-2(c^2+d^2)/t) (d/sin d) [8c^2/t sinh(x)/x - 2 cosh(x)]
        pre = np.exp(-2.0 * (c * c + d * d) / t) * _x_over_sin(d)
        xs = np.where(near, x, 0.0)
        a1 = pre * (8.0 * c * c / t) * _sinhc(xs)
        a2 = pre * 2.0 * np.cosh(xs)
        # otherwise the two Gaussians separately
        b1 = (c - d) * np.exp(-2.0 * (c - d) ** 2 / t) / sin_d
        b2 = (c + d) * np.exp(-2.0 * (c + d) ** 2 / t) / sin_d
        p1 = np.where(near, a1, b1)
        p2 = np.where(near, a2, b2)
        k = math.exp(t / 8.0) * math.sqrt(8.0 * math.pi / t) * 2.0 / t
        value = k * np.sum(p1 - p2, axis=0)
        cond = k * np.sum(np.abs(p1) + np.abs(p2), axis=0) / np.abs(value)
    cond = np.where(np.isfinite(cond) & np.isfinite(value), cond, np.inf)
    return value, cond


def _partial_sum_mp(s: complex, t: float, n: int) -> complex:
    """Partial sum through ``U_n`` in enough working precision to survive cancellation."""
    dps = 30
    while True:
        with mpmath.workdps(dps):
            z = mpmath.mpc(s)
            prev, cur = mpmath.mpf(1), 2 * z
            total, abs_total = mpmath.mpf(1), mpmath.mpf(1)
            tq = mpmath.mpf(t) / 8
            for m in range(1, n + 1):
                term = (m + 1) * mpmath.exp(-m * (m + 2) * tq) * cur
                total += term
                abs_total += abs(term)
                prev, cur = cur, 2 * z * cur - prev
            if total != 0:
                lost = float(mpmath.log10(abs_total / abs(total)))
                if dps - lost >= 20:
                    return complex(total)
            else:
                lost = dps
        dps = int(lost) + 40
        if dps > 20000:
            raise ConvergenceError("extended-precision heat kernel did not settle")


def heat_kernel_su2_batch(s, t: float, tol: float = 1e-14):
    """Heat kernel at an array of half-traces.

    Returns ``(values, tail_bounds, terms_used)``. All entries share the term
    count needed by the largest ``|s|``; each tail bound uses its own ``C``.
    Real half-traces (SU(2) arguments) give real values.
    """
    t, tol = _check_t(t), _check_tol(tol)
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    if s.size == 0:
        return np.zeros(shape, complex), np.zeros(shape), 1
    if not np.all(np.isfinite(s)):
        raise DomainError("half-traces must be finite")
    log_c = _log_c(s)
    n = _terms_needed(float(log_c.max()), t, math.log(tol))
    tails = np.exp(_log_tail(n, log_c, t))
    with np.errstate(over="ignore", invalid="ignore"):
        values, abs_total = _direct_sum(s, t, n)
    if not np.all(np.isfinite(values)):
        raise ConvergenceError("heat-kernel series overflowed; half-trace too large")
    bad = np.flatnonzero(abs_total > _COND_LIMIT * np.abs(values))
    if bad.size:
        th, cond = _theta_form(s[bad], t)
        ok = cond <= _COND_LIMIT
        values[bad[ok]] = th[ok]
        for k in bad[~ok]:
            values[k] = _partial_sum_mp(complex(s[k]), t, n)
    real = s.imag == 0
    values[real] = values[real].real
    return values.reshape(shape), tails.reshape(shape), n + 1


def heat_kernel_su2(A, t: float, tol: float = 1e-14) -> TruncatedSum:
    """``rho_t(A)`` for any 2x2 complex matrix (SU(2), SL(2, C) or M(2, C))."""
    v, tail, terms = heat_kernel_su2_batch(np.array([half_trace(A)]), t, tol)
    return TruncatedSum(complex(v[0]), float(tail[0]), terms)


def _directed_decimal(x: mpmath.mpf, digits: int, rounding: str) -> str:
    """Decimal string of ``x`` rounded in a fixed direction, so enclosures stay enclosures."""
    man, exp = x.man_exp
    with decimal.localcontext() as ctx:
        ctx.prec = abs(exp) + max(int(man).bit_length(), 1) + 10
        exact = decimal.Decimal(int(man)) * decimal.Decimal(2) ** int(exp)
        ctx.prec = digits
        ctx.rounding = rounding
        return str(+exact)


@dataclass(frozen=True)
class Enclosure:
    """Rigorous interval ``[lo, hi]`` containing a real heat-kernel value."""

    lo: mpmath.mpf
    hi: mpmath.mpf
    terms_used: int
    tail_bound: mpmath.mpf
    dps: int

    @property
    def mid(self) -> float:
        with mpmath.workdps(self.dps + 10):
            return float((self.lo + self.hi) / 2)

    @property
    def positive(self) -> bool:
        return self.lo > 0

    def to_dict(self) -> dict:
        return {
            "value": self.mid,
            "lo": _directed_decimal(self.lo, 20, decimal.ROUND_FLOOR),
            "hi": _directed_decimal(self.hi, 20, decimal.ROUND_CEILING),
            "tail_bound": float(self.tail_bound),
            "terms_used": self.terms_used,
            "working_dps": self.dps,
        }


def _iv_bound_term(m: int, c, tq):
    iv = mpmath.iv
    return (m + 1) * iv.exp(-m * (m + 2) * tq) * c**m


def heat_kernel_su2_interval(s: float, t: float, rel_width: float = 1e-9, max_dps: int = 5000) -> Enclosure:
    """Interval-arithmetic enclosure of ``rho_t`` at a real half-trace ``s``.

    The partial sum is evaluated with outward rounding and widened by the
    (also interval-evaluated) tail bound. Precision and truncation depth are
    doubled until the sign is decided and the relative width is at most
    ``rel_width``.
    """
    t = _check_t(t)
    s = float(s)
    iv = mpmath.iv
    log_c = math.log(3.0 * max(1.0, abs(s)))
    log_tol, dps = -46.0, 30
    while dps <= max_dps:
        n = _terms_needed(log_c, t, log_tol)
        old = iv.dps
        iv.dps = dps
        try:
            z = iv.mpf(s)
            tq = iv.mpf(t) / 8
            c = iv.mpf(3) * max(1, abs(s))
            prev, cur = iv.mpf(1), 2 * z
            total = iv.mpf(1)
            for m in range(1, n + 1):
                total += (m + 1) * iv.exp(-m * (m + 2) * tq) * cur
                prev, cur = cur, 2 * z * cur - prev
            first = _iv_bound_term(n + 1, c, tq)
            ratio = _iv_bound_term(n + 2, c, tq) / first
            if ratio.b < 1:
                tail = (first / (1 - ratio)).b
                total += iv.mpf([-tail, tail])
                lo, hi = total.a, total.b
                width = hi - lo
                decided = lo > 0 or hi < 0
                if decided and width <= rel_width * min(abs(lo), abs(hi)):
                    with mpmath.workdps(dps + 10):
                        # exact copies of the endpoints; the default context would round them
                        return Enclosure(mpmath.mpf(lo), mpmath.mpf(hi), n + 1, mpmath.mpf(tail), dps)
        finally:
            iv.dps = old
        dps *= 2
        log_tol *= 2
    raise ConvergenceError(f"could not enclose rho_{t}({s}) within {max_dps} digits")


# ------------------------------------------------------------ Lie kernels


def _mixed_half_trace(ab: np.ndarray, gm: np.ndarray) -> np.ndarray:
    """Half-trace of ``x^{-1} g`` for ``x = (a, b)`` rows and matrices ``g`` (broadcast)."""
    a, b = ab[..., 0], ab[..., 1]
    tr = np.conj(a) * gm[..., 0, 0] - b * gm[..., 1, 0] + np.conj(b) * gm[..., 0, 1] + a * gm[..., 1, 1]
    return tr / 2.0


def _rho_on_group(ab: np.ndarray, t: float, tol: float):
    """Heat kernel at SU(2) points; must come out real and positive."""
    s = (ab[..., 0] + np.conj(ab[..., 0])) / 2.0
    vals, tails, _ = heat_kernel_su2_batch(s, t, tol)
    if np.any(np.abs(vals.imag) > _IMAG_GUARD) or np.any(~(vals.real > 0)):
        k = int(np.flatnonzero((np.abs(vals.imag) > _IMAG_GUARD) | ~(vals.real > 0))[0])
        raise InvariantError(f"heat kernel on SU(2) not positive: rho_t = {vals.ravel()[k]!r}")
    return vals.real, tails


def lie_kernel_batch(version, gm: np.ndarray, ab: np.ndarray, t: float, tol: float = _LIE_TAIL_TOL):
    """Kernel values for matrices ``gm`` (..., 2, 2) against ``(a, b)`` rows ``ab`` (..., 2).

    Returns ``(values, max_tail_bound)``.
    """
    version = _version(version)
    t = _check_t(t)
    c_vals, c_tails, _ = heat_kernel_su2_batch(_mixed_half_trace(ab, gm), t, tol)
    max_tail = float(np.max(c_tails, initial=0.0))
    if version is KernelVersion.C:
        return c_vals, max_tail
    rho_x, x_tails = _rho_on_group(ab, t, tol)
    max_tail = max(max_tail, float(np.max(x_tails, initial=0.0)))
    if version is KernelVersion.A:
        return c_vals / np.sqrt(rho_x), max_tail
    return c_vals / rho_x, max_tail


def _ab(x: SU2Element) -> np.ndarray:
    return np.array([x.a, x.b], dtype=complex)


def _group_matrix(g) -> np.ndarray:
    m = as_matrix(g)
    if not isinstance(g, (SU2Element, SL2CElement)):
        SL2CElement(m)  # validates the determinant
    return m


def kernel_lie(version, g, x: SU2Element, t: float, tol: float = _LIE_TAIL_TOL) -> complex:
    """``A_t(g, x)``, ``B_t(g, x)`` or ``C_t(g, x)`` with ``x^{-1} g`` formed in SL(2, C)."""
    vals, _ = lie_kernel_batch(version, _group_matrix(g), _ab(x), t, tol)
    return complex(vals)


LIE_IDENTITIES = (
    ("B_from_A", "B_t(g,x) = A_t(g,x) / A_t(e,x)"),
    ("C_from_A", "C_t(g,x) = A_t(e,x) A_t(g,x)"),
    ("rho_from_A", "rho_t(x) = A_t(e,x)^2"),
    ("A_from_C", "A_t(g,x) = C_t(g,x) / C_t(e,x)^(1/2)"),
    ("B_from_C", "B_t(g,x) = C_t(g,x) / C_t(e,x)"),
    ("rho_from_C", "rho_t(x) = C_t(e,x)"),
)

_EYE = np.eye(2, dtype=complex)


def _random_group_batch(rng: np.random.Generator, n: int, scale: float) -> np.ndarray:
    return np.stack([random_sl2c(rng, scale).matrix for _ in range(n)])


def lie_residuals(gm: np.ndarray, ab: np.ndarray, t: float, tol: float = _LIE_TAIL_TOL):
    """Residual arrays of the six Lie identities and the largest tail bound used."""
    tails = []

    def k(version, mats):
        v, tail = lie_kernel_batch(version, mats, ab, t, tol)
        tails.append(tail)
        return v

    A_g, B_g, C_g = k("A", gm), k("B", gm), k("C", gm)
    A_e, C_e = k("A", _EYE), k("C", _EYE)
    rho_x, x_tails = _rho_on_group(ab, t, tol)
    tails.append(float(np.max(x_tails)))
    res = {
        "B_from_A": relative_residual(B_g, A_g / A_e),
        "C_from_A": relative_residual(C_g, A_e * A_g),
        "rho_from_A": relative_residual(rho_x, A_e * A_e),
        "A_from_C": relative_residual(A_g, C_g / np.sqrt(C_e.real)),
        "B_from_C": relative_residual(B_g, C_g / C_e),
        "rho_from_C": relative_residual(rho_x, C_e),
    }
    return res, max(tails)


def verify_lie_identities(
    spec: SampleSpec, tol: float = 1e-10, truncation_tol: float = _LIE_TAIL_TOL, stream_offset: int = 1000
) -> IdentityReport:
    """Residuals of the six Lie-side identities with Haar ``x`` and random SL(2, C) ``g``.

    The report's ``max_tail_bound`` field is the largest heat-kernel tail
    bound used anywhere in the sweep.
    """
    acc = ResidualAccumulator(LIE_IDENTITIES)
    worst_tail = 0.0
    for i, t in enumerate(spec.t_list):
        rng = rng_stream(spec.seed, stream_offset + i)
        ab = random_su2(rng, spec.samples)
        gm = _random_group_batch(rng, spec.samples, spec.g_scale)
        res, tail = lie_residuals(gm, ab, t, truncation_tol)
        worst_tail = max(worst_tail, tail)

        def point_of(k, ab=ab, gm=gm):
            return {"x": ab[k], "g": gm[k]}

        for ident, _ in LIE_IDENTITIES:
            acc.add(ident, res[ident], {"t": t}, point_of)
    extra = {"max_tail_bound": worst_tail, "truncation_tol": truncation_tol}
    return IdentityReport("lie-identities", acc.results(), tol, config=spec.to_dict(), extra=extra)


def transform_apply_lie(version, psi, g, t: float, rule: QuadratureRule, tol: float = _LIE_TAIL_TOL) -> complex:
    """Quadrature value of the Lie-side transform of ``psi`` at ``g``.

    Versions A and C integrate against Haar measure; version B against
    ``rho_t(x) d_H x``, realized by scaling the Haar weights. ``psi`` is a
    vectorized callable on the ``(M, 2)`` array of ``(a, b)`` nodes or the
    sampled values.
    """
    version = _version(version)
    rule.require("haar")
    nodes = rule.nodes
    vals = np.asarray(psi(nodes) if callable(psi) else psi, dtype=complex).reshape(-1)
    if vals.shape != (len(nodes),):
        raise DomainError("sampled psi must have one value per quadrature node")
    kern, _ = lie_kernel_batch(version, _group_matrix(g), nodes, t, tol)
    weights = rule.weights
    if version is KernelVersion.B:
        weights = weights * _rho_on_group(nodes, t, tol)[0]
    return complex(np.dot(weights, kern * vals))


# ---------------------------------------------------------- counterexample


def doubling_residual(gm: np.ndarray, ab: np.ndarray, t: float, tol: float = 1e-14) -> np.ndarray:
    """Residual of ``C_t(G^2, X) = A_{2t}(G^2, I) A_{t/2}(G, X)`` (not an identity)."""
    gm = np.asarray(gm, dtype=complex)
    g2 = gm @ gm
    lhs, _ = lie_kernel_batch("C", g2, ab, t, tol)
    a_big, _ = lie_kernel_batch("A", g2, np.array([1.0, 0.0], dtype=complex), 2.0 * t, tol)
    a_half, _ = lie_kernel_batch("A", gm, ab, t / 2.0, tol)
    return relative_residual(lhs, a_big * a_half)


@dataclass
class CounterexampleReport:
    """Certified heat-kernel values at ``I`` and ``-I`` and the doubling-relation residuals."""

    t: float
    values: dict
    proof_quantity_minus: Enclosure
    proof_quantity_identity: Enclosure
    gap_lo: float
    combined_tail_bound: float
    residual_identity: float
    residual_minus_identity: float
    sweep: dict = field(default_factory=dict)
    lie_contrast: dict = field(default_factory=dict)

    @property
    def positivity_certified(self) -> bool:
        return self.values["rho_t(-I)"].positive

    @property
    def ordering_certified(self) -> bool:
        return self.values["rho_t(-I)"].hi < self.values["rho_t(I)"].lo

    @property
    def gap_certified(self) -> bool:
        return self.gap_lo > self.combined_tail_bound

    @property
    def reproduced(self) -> bool:
        return self.positivity_certified and self.ordering_certified and self.gap_certified

    def to_dict(self) -> dict:
        return jsonable(
            {
                "kind": "counterexample",
                "t": self.t,
                "values": {k: v.to_dict() for k, v in self.values.items()},
                "rho_I": self.values["rho_t(I)"].mid,
                "rho_negI": self.values["rho_t(-I)"].mid,
                "proof_quantity_minus": self.proof_quantity_minus.to_dict(),
                "proof_quantity_identity": self.proof_quantity_identity.to_dict(),
                "gap_lower_bound": self.gap_lo,
                "combined_tail_bound": self.combined_tail_bound,
                "positivity_certified": self.positivity_certified,
                "ordering_certified": self.ordering_certified,
                "gap_certified": self.gap_certified,
                "residual_at_identity": self.residual_identity,
                "residual_at_minus_identity": self.residual_minus_identity,
                "random_sweep": self.sweep,
                "lie_identity_contrast": self.lie_contrast,
                "reproduced": self.reproduced,
            }
        )

    def to_json(self, timestamp: bool = True) -> str:
        return dump_json(self.to_dict(), timestamp=timestamp)


def _enclosure_of(iv_value, terms: int, tail, dps: int) -> Enclosure:
    with mpmath.workdps(dps + 10):
        return Enclosure(mpmath.mpf(iv_value.a), mpmath.mpf(iv_value.b), terms, mpmath.mpf(tail), dps)


def _float_below(x, dps: int) -> float:
    """Largest double not exceeding the interval endpoint ``x``."""
    with mpmath.workdps(dps + 10):
        exact = mpmath.mpf(x)
        out = float(exact)
        return math.nextafter(out, -math.inf) if out > exact else out


def counterexample_report(
    t: float,
    *,
    seed: int = 20240611,
    sweep_samples: int = 200,
    contrast_samples: int = 200,
    lie_tol: float = 1e-10,
    g_scale: float = 1.0,
) -> CounterexampleReport:
    """Show that the doubling relation ``C_t(G^2, X) = A_{2t}(G^2, I) A_{t/2}(G, X)`` fails.

    ``rho_t(I)``, ``rho_t(-I)``, ``rho_{t/2}(I)`` and ``rho_{t/2}(-I)`` are
    enclosed in intervals. If the relation held, ``X = G = -I`` would force
    ``rho_t(-I) rho_{t/2}(-I)^{1/2} = rho_t(I) rho_{t/2}(I)^{1/2}``, which
    contradicts ``0 < rho_t(-I) < rho_t(I)``. The report also evaluates the
    relation's residual at ``(I, I)``, ``(-I, -I)`` and random ``(X, G)``, next
    to the residuals of the six exact identities at the same ``t``.
    """
    t = _check_t(t)
    vals = {
        "rho_t(I)": heat_kernel_su2_interval(1.0, t),
        "rho_t(-I)": heat_kernel_su2_interval(-1.0, t),
        "rho_t/2(I)": heat_kernel_su2_interval(1.0, t / 2),
        "rho_t/2(-I)": heat_kernel_su2_interval(-1.0, t / 2),
    }
    iv = mpmath.iv
    dps = max(v.dps for v in vals.values())
    old = iv.dps
    iv.dps = dps
    try:

        def box(name):
            return iv.mpf([vals[name].lo, vals[name].hi])

        q_minus = box("rho_t(-I)") * iv.sqrt(box("rho_t/2(-I)"))
        q_id = box("rho_t(I)") * iv.sqrt(box("rho_t/2(I)"))
        gap = q_id - q_minus
        tail_total = sum(v.tail_bound for v in vals.values())
        terms = max(v.terms_used for v in vals.values())
        enc_minus = _enclosure_of(q_minus, terms, tail_total, dps)
        enc_id = _enclosure_of(q_id, terms, tail_total, dps)
        gap_lo = _float_below(gap.a, dps)
    finally:
        iv.dps = old

    e_ab = np.array([[1.0, 0.0]], dtype=complex)
    m_ab = np.array([[-1.0, 0.0]], dtype=complex)
    res_id = float(doubling_residual(IDENTITY.matrix[None], e_ab, t)[0])
    res_minus = float(doubling_residual(MINUS_IDENTITY.matrix[None], m_ab, t)[0])

    rng = rng_stream(seed, 2000)
    ab = random_su2(rng, sweep_samples)
    gm = _random_group_batch(rng, sweep_samples, g_scale)
    sweep_res = doubling_residual(gm, ab, t)
    k = int(np.argmax(sweep_res))
    sweep = {
        "samples": sweep_samples,
        "max_residual": float(sweep_res.max()),
        "median_residual": float(np.median(sweep_res)),
        "min_residual": float(sweep_res.min()),
        "fraction_above_1e-3": float(np.mean(sweep_res > 1e-3)),
        "worst_point": {"x": ab[k], "g": gm[k]},
    }
    contrast = {}
    if contrast_samples:
        lie = verify_lie_identities(SampleSpec(seed=seed, samples=contrast_samples, t_list=(t,), g_scale=g_scale), tol=lie_tol)
        contrast = {
            "tol": lie_tol,
            "max_residual": lie.max_residual,
            "max_tail_bound": lie.extra["max_tail_bound"],
            "per_identity": {r.id: r.max_residual for r in lie.results},
            "verdict": lie.verdict,
        }
    return CounterexampleReport(
        t=t,
        values=vals,
        proof_quantity_minus=enc_minus,
        proof_quantity_identity=enc_id,
        gap_lo=gap_lo,
        combined_tail_bound=float(tail_total),
        residual_identity=res_id,
        residual_minus_identity=res_minus,
        sweep=sweep,
        lie_contrast=contrast,
    )
