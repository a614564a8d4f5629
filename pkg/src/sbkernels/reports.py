"""Sample settings, residual bookkeeping and report serialization.

JSON layout of an identity report::

    {
      "kind": "coxeter-identities",
      "config": {...},
      "per_identity": [
        {"id": ..., "eq_ref": ..., "max_residual": ..., "mean_residual": ...,
         "count": ..., "worst_point": {...}, "by_params": [{...}, ...]},
        ...
      ],
      "tol": 1e-11,
      "verdict": "pass" | "fail",
      "generated_at": "..."          # omitted when timestamps are disabled
    }

Complex numbers are written as ``[re, im]`` pairs. Floats keep full double
precision (``json`` uses the shortest round-tripping repr; CSV uses 17
significant digits).
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "SampleSpec",
    "IdentityResult",
    "IdentityReport",
    "ResidualAccumulator",
    "BoundCheck",
    "relative_residual",
    "jsonable",
    "dump_json",
    "rng_stream",
]


def relative_residual(lhs, rhs):
    """``|lhs - rhs| / (1 + max(|lhs|, |rhs|))``, elementwise."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    return np.abs(lhs - rhs) / (1.0 + np.maximum(np.abs(lhs), np.abs(rhs)))


def rng_stream(seed: int, stream: int) -> np.random.Generator:
    """Independent counter-based generator for sub-stream ``stream`` of ``seed``.

    Streams are keyed by ``(seed, stream)`` so results do not depend on the
    order in which streams are consumed.
    """
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(stream)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class SampleSpec:
    """What to sample for an identity sweep.

    ``z_box`` is the half-width of the square ``|Re z|, |Im z| <= z_box`` per
    coordinate, ``q_box`` the half-width for real points. ``g_scale`` is the
    entry box for the random traceless generators of SL(2, C) samples.
    """

    seed: int = 20240611
    samples: int = 500
    mu_list: Sequence[float] = (0.0,)
    t_list: Sequence[float] = (1.0,)
    dims: Sequence[int] = (1,)
    z_box: float = 1.5
    q_box: float = 2.5
    g_scale: float = 1.0

    def __post_init__(self) -> None:
        self.mu_list = tuple(float(m) for m in self.mu_list)
        self.t_list = tuple(float(t) for t in self.t_list)
        self.dims = tuple(int(d) for d in self.dims)
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if any(m < 0 for m in self.mu_list):
            raise ValueError("multiplicities must be >= 0")
        if any(not t > 0 for t in self.t_list):
            raise ValueError("t values must be > 0")
        if any(d < 1 for d in self.dims):
            raise ValueError("dimensions must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("mu_list", "t_list", "dims"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SampleSpec":
        return cls(**d)


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and complex numbers to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(payload: dict, timestamp: bool = True) -> str:
    payload = dict(payload)
    if timestamp:
        payload["generated_at"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return json.dumps(jsonable(payload), indent=2, sort_keys=False) + "\n"


@dataclass
class IdentityResult:
    id: str
    eq_ref: str
    max_residual: float = 0.0
    mean_residual: float = 0.0
    count: int = 0
    worst_point: dict = field(default_factory=dict)
    by_params: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "eq_ref": self.eq_ref,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "count": self.count,
            "worst_point": self.worst_point,
            "by_params": self.by_params,
        }


@dataclass
class IdentityReport:
    kind: str
    results: list[IdentityResult]
    tol: float
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((r.max_residual for r in self.results), default=0.0)

    @property
    def passed(self) -> bool:
        return all(r.max_residual <= self.tol for r in self.results)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def result(self, ident: str) -> IdentityResult:
        for r in self.results:
            if r.id == ident:
                return r
        raise KeyError(ident)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "config": self.config,
            "per_identity": [r.to_dict() for r in self.results],
            "tol": self.tol,
            "verdict": self.verdict,
        }
        d.update(self.extra)
        return jsonable(d)

    def to_json(self, timestamp: bool = True) -> str:
        return dump_json(self.to_dict(), timestamp=timestamp)

    def to_csv(self) -> str:
        """One row per identity and parameter group."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["id", "eq_ref", "params", "max_residual", "mean_residual", "count"])
        for r in self.results:
            for p in r.by_params:
                params = ";".join(f"{k}={v}" for k, v in p["params"].items())
                writer.writerow(
                    [r.id, r.eq_ref, params, f"{p['max_residual']:.17g}", f"{p['mean_residual']:.17g}", p["count"]]
                )
        return buf.getvalue()


class ResidualAccumulator:
    """Collects residual arrays per identity and parameter group.

    Reductions are max / count-weighted mean, so the merged report does not
    depend on the order groups are added in, as long as ties in the maximum
    are resolved consistently (first occurrence wins).
    """

    def __init__(self, identities: Sequence[tuple[str, str]]):
        self._results = {i: IdentityResult(i, ref) for i, ref in identities}
        self._order = [i for i, _ in identities]
        self._sums = {i: 0.0 for i in self._order}

    def add(self, ident: str, residuals, params: dict, point_of) -> None:
        """Record ``residuals`` (1-D) for ``ident``; ``point_of(k)`` describes sample ``k``."""
        res = np.atleast_1d(np.asarray(residuals, dtype=float))
        if not np.all(np.isfinite(res)):
            bad = int(np.flatnonzero(~np.isfinite(res))[0])
            worst, kmax = np.inf, bad
        else:
            kmax = int(np.argmax(res))
            worst = float(res[kmax])
        r = self._results[ident]
        group = {
            "params": dict(params),
            "max_residual": worst,
            "mean_residual": float(np.mean(res)) if np.all(np.isfinite(res)) else np.inf,
            "count": int(res.size),
        }
        r.by_params.append(group)
        self._sums[ident] += float(np.sum(res))
        r.count += int(res.size)
        r.mean_residual = self._sums[ident] / r.count
        if worst > r.max_residual or not r.worst_point:
            r.max_residual = worst
            r.worst_point = {**params, **point_of(kmax)}

    def results(self) -> list[IdentityResult]:
        return [self._results[i] for i in self._order]


@dataclass
class BoundCheck:
    """Largest observed ratio of a quantity to its proven upper bound."""

    id: str
    max_ratio: float
    limit: float
    worst_point: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.limit

    def to_dict(self) -> dict:
        return jsonable(
            {
                "id": self.id,
                "max_ratio": self.max_ratio,
                "limit": self.limit,
                "passed": self.passed,
                "worst_point": self.worst_point,
                **self.extra,
            }
        )
