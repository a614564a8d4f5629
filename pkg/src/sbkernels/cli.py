"""Command-line front end.

Every subcommand writes one report (JSON or CSV) and exits with 0 when all
checks pass, 1 when a residual or bound exceeds its tolerance and 2 on a bad
configuration. Reports go to ``--output``, else to
``$SBKERNELS_OUTPUT_DIR/<command>.<format>``, else to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from sbkernels import dunkl, su2
from sbkernels.chebyshev import growth_bound_sweep, sample_disk, trig_agreement
from sbkernels.errors import DomainError, MeasureMismatchError, RankError
from sbkernels.groups import IDENTITY, MINUS_IDENTITY, random_sl2c
from sbkernels.quadrature import DEFAULT_HAAR_RESOLUTION, DEFAULT_ORDER, haar_rule, m_rule, omega_rule
from sbkernels.reports import SampleSpec, dump_json, jsonable, rng_stream

ENV_OUTPUT_DIR = "SBKERNELS_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _complexes(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(v.replace(" ", "")) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None


def _matrix(text: str) -> np.ndarray:
    if text == "identity":
        return IDENTITY.matrix
    if text == "minus-identity":
        return MINUS_IDENTITY.matrix
    entries = _complexes(text)
    if len(entries) != 4:
        raise argparse.ArgumentTypeError("a matrix needs four entries a11,a12,a21,a22")
    return np.array(entries, dtype=complex).reshape(2, 2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=20240611)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--truncation-tol", type=float, default=1e-13)
    common.add_argument("--quad-order", type=int, default=DEFAULT_ORDER)
    common.add_argument("--haar-resolution", type=int, default=DEFAULT_HAAR_RESOLUTION)
    common.add_argument("--output", default=None, help="report path (default: stdout or $%s)" % ENV_OUTPUT_DIR)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--no-timestamp", action="store_true", help="omit generated_at for byte-stable reports")

    parser = argparse.ArgumentParser(prog="sbkernels", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coxeter-identities", parents=[common], help="Coxeter-side identity sweep")
    p.add_argument("--mu", type=_floats, default=(0.0, 0.5, 1.0, 2.3))
    p.add_argument("--t", type=_floats, default=(0.25, 1.0, 4.0))
    p.add_argument("--dims", type=_ints, default=(1, 2, 3))

    p = sub.add_parser("lie-identities", parents=[common], help="SU(2)/SL(2,C) identity sweep")
    p.add_argument("--t", type=_floats, default=(0.5, 1.0, 2.0))
    p.add_argument("--g-scale", type=float, default=1.0)

    p = sub.add_parser("counterexample", parents=[common], help="certify failure of the doubling relation")
    p.add_argument("--t", type=_floats, default=(0.25, 1.0, 4.0))

    p = sub.add_parser("heat-kernel", parents=[common], help="table of heat-kernel values")
    p.add_argument("--flavor", choices=("su2", "coxeter"), default="su2")
    p.add_argument("--matrix", type=_matrix, default=IDENTITY.matrix, help="identity, minus-identity or a11,a12,a21,a22")
    p.add_argument("--t", type=_floats, default=(1.0,))
    p.add_argument("--mu", type=_floats, default=(0.0,))
    p.add_argument("--z", type=_complexes, default=(1.0,), help="first point (coordinates)")
    p.add_argument("--w", type=_complexes, default=(1.0,), help="second point (coordinates)")

    p = sub.add_parser("transform", parents=[common], help="evaluate a transform of a test function")
    p.add_argument("--flavor", choices=("coxeter", "su2"), default="coxeter")
    p.add_argument("--version", choices=("A", "B", "C"), default="C")
    p.add_argument(
        "--function",
        default="shifted_gaussian",
        help="coxeter: one, %s; su2: one, character" % ", ".join(dunkl.FACTORIZATION_TEST_FUNCTIONS),
    )
    p.add_argument("--u", type=float, default=1.0, help="half-integer label for --function character")
    p.add_argument("--points", type=_complexes, default=(-1.0, 0.0, 1.0, 1j, 1 + 1j))
    p.add_argument("--mu", type=_floats, default=(0.0,))
    p.add_argument("--t", type=_floats, default=(1.0,))

    p = sub.add_parser("factorization", parents=[common], help="C = A after multiplication, per test function")
    p.add_argument("--mu", type=_floats, default=(0.0, 0.5, 1.0, 2.3))
    p.add_argument("--t", type=_floats, default=(0.25, 1.0, 4.0))
    p.add_argument("--dims", type=_ints, default=(1, 2, 3))
    p.add_argument("--grid-points", type=int, default=20)

    p = sub.add_parser("bounds", parents=[common], help="Chebyshev growth bound and C-space pointwise bound")
    p.add_argument("--mu", type=_floats, default=(0.0, 0.5, 1.0, 2.3))
    p.add_argument("--t", type=_floats, default=(0.25, 1.0, 4.0))
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--z-radius", type=float, default=5.0)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--w-count", type=int, default=5)
    return parser


def _check_config(args) -> None:
    if args.samples is not None and args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be > 0")
    if not args.truncation_tol > 0:
        raise ConfigError("--truncation-tol must be > 0")
    if args.quad_order < 2 or args.quad_order % 2:
        raise ConfigError("--quad-order must be an even integer >= 2")
    if args.haar_resolution < 4:
        raise ConfigError("--haar-resolution must be >= 4")
    for name in ("t", "mu"):
        vals = getattr(args, name, None)
        if vals is None:
            continue
        if name == "t" and any(not v > 0 for v in vals):
            raise ConfigError("--t values must be > 0")
        if name == "mu" and any(v < 0 for v in vals):
            raise ConfigError("--mu values must be >= 0")
    for name in ("grid_points", "n_max", "grid", "w_count"):
        if getattr(args, name, 1) < 1:
            raise ConfigError(f"--{name.replace('_', '-')} must be >= 1")
    if getattr(args, "z_radius", 1.0) <= 0:
        raise ConfigError("--z-radius must be > 0")


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _render(args, payload: dict, rows: list[dict] | None = None) -> str:
    if args.format == "csv":
        return _csv(rows if rows is not None else [])
    return dump_json(payload, timestamp=not args.no_timestamp)


# ------------------------------------------------------------ subcommands


def _cmd_coxeter(args):
    spec = SampleSpec(seed=args.seed, samples=args.samples or 500, mu_list=args.mu, t_list=args.t, dims=args.dims)
    report = dunkl.verify_coxeter_identities(spec, tol=args.tol or 1e-11)
    text = report.to_csv() if args.format == "csv" else report.to_json(timestamp=not args.no_timestamp)
    return text, report.passed


def _cmd_lie(args):
    spec = SampleSpec(seed=args.seed, samples=args.samples or 200, t_list=args.t, g_scale=args.g_scale)
    report = su2.verify_lie_identities(spec, tol=args.tol or 1e-10, truncation_tol=args.truncation_tol)
    ok = report.passed and report.extra["max_tail_bound"] <= args.truncation_tol
    text = report.to_csv() if args.format == "csv" else report.to_json(timestamp=not args.no_timestamp)
    return text, ok


def _cmd_counterexample(args):
    reports = [
        su2.counterexample_report(t, seed=args.seed, sweep_samples=args.samples or 200, lie_tol=args.tol or 1e-10)
        for t in args.t
    ]
    ok = all(r.reproduced for r in reports)
    payload = {
        "kind": "counterexample",
        "config": {"t_list": list(args.t), "seed": args.seed, "sweep_samples": args.samples or 200},
        "reports": [r.to_dict() for r in reports],
        "verdict": "pass" if ok else "fail",
    }
    rows = [
        {
            "t": r.t,
            "rho_t_I": r.values["rho_t(I)"].mid,
            "rho_t_minus_I": r.values["rho_t(-I)"].mid,
            "rho_half_t_I": r.values["rho_t/2(I)"].mid,
            "rho_half_t_minus_I": r.values["rho_t/2(-I)"].mid,
            "proof_quantity_minus": r.proof_quantity_minus.mid,
            "proof_quantity_identity": r.proof_quantity_identity.mid,
            "gap_lower_bound": r.gap_lo,
            "combined_tail_bound": r.combined_tail_bound,
            "residual_at_identity": r.residual_identity,
            "residual_at_minus_identity": r.residual_minus_identity,
            "sweep_max_residual": r.sweep["max_residual"],
            "lie_max_residual": r.lie_contrast.get("max_residual", float("nan")),
            "reproduced": r.reproduced,
        }
        for r in reports
    ]
    return _render(args, payload, rows), ok


def _cmd_heat_kernel(args):
    rows = []
    if args.flavor == "su2":
        for t in args.t:
            ts = su2.heat_kernel_su2(args.matrix, t, tol=args.tol or 1e-14)
            rows.append(
                {"flavor": "su2", "t": t, "value_re": ts.value.real, "value_im": ts.value.imag,
                 "tail_bound": ts.tail_bound, "terms_used": ts.terms_used}
            )
    else:
        z, w = np.array(args.z), np.array(args.w)
        if z.shape != w.shape:
            raise ConfigError("--z and --w need the same number of coordinates")
        for mu in args.mu:
            for t in args.t:
                v = complex(dunkl.heat_kernel_rho(z, w, mu, t))
                rows.append({"flavor": "coxeter", "mu": mu, "t": t, "value_re": v.real, "value_im": v.imag})
    payload = {"kind": "heat-kernel", "rows": rows}
    if args.format is None:
        args.format = "csv"
    return _render(args, payload, rows), True


def _coxeter_function(name: str):
    if name == "one":
        return lambda q: np.ones(len(q))
    try:
        return dunkl.FACTORIZATION_TEST_FUNCTIONS[name]
    except KeyError:
        raise ConfigError(f"unknown test function {name!r}") from None


def _cmd_transform(args):
    rows = []
    if args.flavor == "coxeter":
        psi = _coxeter_function(args.function)
        z = np.array(args.points, dtype=complex).reshape(-1, 1)
        for mu in args.mu:
            for t in args.t:
                make = m_rule if args.version == "B" else omega_rule
                rule = make(mu, t, args.quad_order)
                vals = dunkl.transform_apply(args.version, psi, z, mu, t, rule)
                for zk, v in zip(z[:, 0], vals):
                    rows.append({"mu": mu, "t": t, "z_re": zk.real, "z_im": zk.imag,
                                 "value_re": v.real, "value_im": v.imag})
    else:
        if args.function not in ("one", "character"):
            raise ConfigError("su2 transforms support --function one or character")
        u = su2.HalfInteger.of(args.u if args.function == "character" else 0)
        rule = haar_rule(args.haar_resolution)
        rng = rng_stream(args.seed, 3000)
        gs = [IDENTITY.matrix, MINUS_IDENTITY.matrix] + [random_sl2c(rng).matrix for _ in range(args.samples or 5)]
        for t in args.t:
            for k, g in enumerate(gs):
                v = su2.transform_apply_lie(args.version, lambda n: su2.character_of_nodes(u, n), g, t, rule)
                row = {"t": t, "g_index": k, "half_trace_re": (np.trace(g) / 2).real,
                       "half_trace_im": (np.trace(g) / 2).imag, "value_re": v.real, "value_im": v.imag}
                if args.version == "C":
                    expected = np.exp(-u.casimir * t / 2) * su2.character(u, g)
                    row["expected_re"], row["expected_im"] = expected.real, expected.imag
                rows.append(row)
    payload = {"kind": "transform", "flavor": args.flavor, "version": args.version, "function": args.function, "rows": rows}
    if args.format is None:
        args.format = "csv"
    return _render(args, payload, rows), True


def _cmd_factorization(args):
    spec = SampleSpec(seed=args.seed, mu_list=args.mu, t_list=args.t, dims=args.dims)
    report = dunkl.factorization_sweep(spec, order=args.quad_order, tol=args.tol or 1e-11, grid_points=args.grid_points)
    text = report.to_csv() if args.format == "csv" else report.to_json(timestamp=not args.no_timestamp)
    return text, report.passed


def _cmd_bounds(args):
    rng = rng_stream(args.seed, 4000)
    z = sample_disk(rng, args.samples or 200, args.z_radius)
    checks = [growth_bound_sweep(z, args.n_max), trig_agreement(args.n_max)]
    for i, mu in enumerate(args.mu):
        for j, t in enumerate(args.t):
            rng = rng_stream(args.seed, 5000 + 100 * i + j)
            shape = (args.grid, 1)
            z = rng.uniform(-2, 2, shape) + 1j * rng.uniform(-2, 2, shape)
            w = rng.uniform(-1.5, 1.5, (args.w_count, 1)) + 1j * rng.uniform(-1.5, 1.5, (args.w_count, 1))
            rule = omega_rule(mu, t, args.quad_order)
            checks.append(dunkl.pointwise_bound_check(z, w, mu, t, rule))
    ok = all(c.passed for c in checks)
    payload = {"kind": "bounds", "checks": [c.to_dict() for c in checks], "verdict": "pass" if ok else "fail"}
    rows = [
        {"id": c.id, "params": json.dumps(jsonable({k: v for k, v in c.worst_point.items() if k in ("mu", "t")})),
         "max_ratio": c.max_ratio, "limit": c.limit, "passed": c.passed}
        for c in checks
    ]
    return _render(args, payload, rows), ok


_COMMANDS = {
    "coxeter-identities": _cmd_coxeter,
    "lie-identities": _cmd_lie,
    "counterexample": _cmd_counterexample,
    "heat-kernel": _cmd_heat_kernel,
    "transform": _cmd_transform,
    "factorization": _cmd_factorization,
    "bounds": _cmd_bounds,
}


def _write(args, text: str) -> None:
    path = args.output
    if path is None and os.environ.get(ENV_OUTPUT_DIR):
        directory = os.environ[ENV_OUTPUT_DIR]
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, f"{args.command}.{args.format or 'json'}")
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_config(args)
        text, ok = _COMMANDS[args.command](args)
    except (ConfigError, DomainError, RankError, MeasureMismatchError) as exc:
        print(f"sbkernels: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write(args, text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
