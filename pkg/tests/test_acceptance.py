"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines, or
``python3 tests/test_acceptance.py`` to run every check and print a summary.
Reference values come from the independent oracles in ``oracles.py``.
"""

from __future__ import annotations

import cmath
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import heat_kernel_su2_oracle, squared_dimension_series  # noqa: E402

from sbkernels import dunkl, su2  # noqa: E402
from sbkernels.chebyshev import growth_bound_sweep, sample_disk, trig_agreement  # noqa: E402
from sbkernels.groups import SU2Element, random_sl2c, random_su2  # noqa: E402
from sbkernels.quadrature import haar_invariance_check, haar_rule, omega_rule  # noqa: E402
from sbkernels.reports import SampleSpec, rng_stream  # noqa: E402

SEED = 20240611
MU_GRID = (0.0, 0.5, 1.0, 2.3)
T_GRID = (0.25, 1.0, 4.0)


def report(number: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def check_criterion_1():
    """Coxeter identities over 500 samples per (mu, t, dim)."""
    spec = SampleSpec(seed=SEED, samples=500, mu_list=MU_GRID, t_list=T_GRID, dims=(1, 2, 3))
    start = time.perf_counter()
    rep = dunkl.verify_coxeter_identities(spec, tol=1e-11)
    elapsed = time.perf_counter() - start
    groups = {tuple(g["params"].items()) for r in rep.results for g in r.by_params}
    ok = rep.passed and len(rep.results) == 7 and len(groups) == 18 and elapsed <= 30
    return ok, f"7 identities, 18 groups, max residual {rep.max_residual:.2e} <= 1e-11, {elapsed:.1f} s <= 30 s"


def check_criterion_2():
    """Lie identities over 200 samples per t with tails at most 1e-13."""
    spec = SampleSpec(seed=SEED, samples=200, t_list=(0.5, 1.0, 2.0))
    start = time.perf_counter()
    rep = su2.verify_lie_identities(spec, tol=1e-10, truncation_tol=1e-13)
    elapsed = time.perf_counter() - start
    tail = rep.extra["max_tail_bound"]
    ok = rep.passed and len(rep.results) == 6 and tail <= 1e-13 and elapsed <= 60
    return ok, (
        f"6 identities, max residual {rep.max_residual:.2e} <= 1e-10, max tail {tail:.2e} <= 1e-13, "
        f"{elapsed:.1f} s <= 60 s"
    )


def check_criterion_3():
    """The doubling relation fails at (-I, -I) while the Lie identities hold."""
    lines, ok = [], True
    for t in T_GRID:
        rep = su2.counterexample_report(t, seed=SEED, sweep_samples=200, contrast_samples=200)
        oracle = {
            "rho_t(I)": heat_kernel_su2_oracle(1.0, t).real,
            "rho_t(-I)": heat_kernel_su2_oracle(-1.0, t).real,
            "rho_t/2(I)": heat_kernel_su2_oracle(1.0, t / 2).real,
            "rho_t/2(-I)": heat_kernel_su2_oracle(-1.0, t / 2).real,
        }
        # the center values also have a closed series in squared dimensions
        assert abs(oracle["rho_t(I)"] - squared_dimension_series(1, t)) <= 1e-14 * oracle["rho_t(I)"]
        assert abs(oracle["rho_t(-I)"] - squared_dimension_series(-1, t)) <= 1e-14 * oracle["rho_t(-I)"]
        matches = all(
            rep.values[k].lo <= v <= rep.values[k].hi or abs(rep.values[k].mid - v) <= 1e-13 * abs(v)
            for k, v in oracle.items()
        )
        oracle_gap = oracle["rho_t(I)"] * math.sqrt(oracle["rho_t/2(I)"]) - oracle["rho_t(-I)"] * math.sqrt(
            oracle["rho_t/2(-I)"]
        )
        contrast = rep.lie_contrast["max_residual"]
        this = (
            matches
            and rep.positivity_certified
            and rep.ordering_certified
            and 0 < oracle["rho_t(-I)"] < oracle["rho_t(I)"]
            and rep.gap_lo > 1e-6
            and oracle_gap > 1e-6
            and rep.residual_minus_identity > 1e-3
            and contrast <= 1e-10
        )
        ok &= this
        lines.append(
            f"t={t}: rho(-I)={oracle['rho_t(-I)']:.3e} < rho(I)={oracle['rho_t(I)']:.3e}, gap>={rep.gap_lo:.3g}, "
            f"residual(-I,-I)={rep.residual_minus_identity:.3g}, Lie contrast {contrast:.1e}"
        )
    return ok, "; ".join(lines)


def check_criterion_4():
    """Chebyshev growth bound and recursion versus trig form."""
    z = sample_disk(rng_stream(SEED, 4), 200, 5.0)
    growth = growth_bound_sweep(z, n_max=60)
    trig = trig_agreement(n_max=60, points=201, edge=0.999, tol=1e-10)
    violations = growth.extra["violations"]
    ok = violations == 0 and growth.passed and np.max(np.abs(z)) <= 5 and trig.passed
    return ok, f"{violations} growth violations over 200 z, n<=60; trig disagreement {trig.max_ratio:.1e} <= 1e-10"


def check_criterion_5():
    """Dunkl eigenrelation with Richardson ratio and the mu -> 0 limit."""
    rng = rng_stream(SEED, 5)
    xs = rng.uniform(0.3, 1.5, 50)
    ys = rng.uniform(0.5, 1.5, 50)
    worst, ratios = 0.0, []
    for mu in (0.5, 1.0, 2.3):
        for x, y in zip(xs, ys):
            f = lambda s, y=y: dunkl.dunkl_kernel(s, y, mu)  # noqa: E731
            target = y * f(x)
            err3 = abs(dunkl.dunkl_operator_apply(f, mu, x, 1e-3) - target)
            err4 = abs(dunkl.dunkl_operator_apply(f, mu, x, 1e-4) - target)
            worst = max(worst, err4)
            ratios.append(err3 / err4)
    limit_err = max(
        abs(dunkl.dunkl_kernel(x, y, mu) - cmath.exp(x * y)) / abs(cmath.exp(x * y))
        for mu in (1e-12, 1e-14)
        for x, y in zip(xs, ys)
    )
    ok = worst <= 1e-6 and 50 <= min(ratios) and max(ratios) <= 200 and limit_err <= 1e-10
    return ok, (
        f"eigenrelation residual {worst:.2e} <= 1e-6 over 150 cases, Richardson ratios in "
        f"[{min(ratios):.1f}, {max(ratios):.1f}], mu->0 error {limit_err:.1e} <= 1e-10"
    )


def check_criterion_6():
    """Operator factorization for 3 functions x 20 points x all groups."""
    spec = SampleSpec(seed=SEED, mu_list=MU_GRID, t_list=T_GRID, dims=(1, 2, 3))
    rep = dunkl.factorization_sweep(spec, tol=1e-11, grid_points=20)
    res = rep.results[0]
    ok = rep.passed and res.count == 3 * 20 * 18
    return ok, f"max residual {rep.max_residual:.2e} <= 1e-11 over {res.count} evaluations"


def check_criterion_7():
    """Gram kernel proportional to rho_2t and the pointwise C-space bound."""
    worst_spread, worst_ratio = 0.0, 0.0
    for i, (mu, t) in enumerate((m, t) for m in MU_GRID for t in T_GRID):
        rule = omega_rule(mu, t)
        rng = rng_stream(SEED, 700 + i)
        z = rng.uniform(-1.5, 1.5, 30) + 1j * rng.uniform(-1.5, 1.5, 30)
        w = rng.uniform(-1.5, 1.5, 30) + 1j * rng.uniform(-1.5, 1.5, 30)
        ratios = np.array(
            [dunkl.gram_kernel("C", a, b, mu, t, rule) / dunkl.heat_kernel_rho(np.conj(a), b, mu, 2 * t) for a, b in zip(z, w)]
        )
        center = np.median(ratios.real)
        worst_spread = max(worst_spread, float(np.max(np.abs(ratios - center)) / abs(center)))
        grid = rng.uniform(-2, 2, 100) + 1j * rng.uniform(-2, 2, 100)
        check = dunkl.pointwise_bound_check(grid, w[:5], mu, t, rule, limit=1 + 1e-8)
        worst_ratio = max(worst_ratio, check.max_ratio)
    ok = worst_spread <= 1e-7 and worst_ratio <= 1 + 1e-8
    return ok, f"Gram ratio spread {worst_spread:.1e} <= 1e-7 over 30 pairs; pointwise bound ratio {worst_ratio:.6f} <= 1+1e-8"


def check_criterion_8():
    """Truncated heat kernel within its reported tail bound of the oracle."""
    rng = rng_stream(SEED, 8)
    worst, violations = 0.0, 0
    for k in range(100):
        g = random_sl2c(rng).matrix
        t = (0.5, 1.0, 2.0)[k % 3]
        got = su2.heat_kernel_su2(g, t, tol=1e-8)
        err = abs(got.value - heat_kernel_su2_oracle(complex(np.trace(g) / 2), t))
        violations += err > got.tail_bound
        worst = max(worst, err / got.tail_bound)
    return violations == 0, f"{violations} violations over 100 SL(2,C) samples; worst error/tail_bound {worst:.2e}"


def check_criterion_9():
    """Haar mass, invariance, character orthonormality and convolution eigenvalues."""
    rule = haar_rule()
    mass_err = abs(rule.weights.sum() - 1.0)
    rng = rng_stream(SEED, 9)
    shifts = [SU2Element(*row) for row in random_su2(rng, 5)]
    invariance = max(
        haar_invariance_check(rule, c, f)
        for c in shifts
        for f in (lambda n: n[:, 0].real ** 2, lambda n: np.abs(n[:, 1]) ** 4, lambda n: su2.character_of_nodes(1.5, n))
    )
    chars = np.array([su2.character_of_nodes(k / 2, rule.nodes) for k in range(6)])
    gram = (chars.conj() * rule.weights) @ chars.T
    ortho = float(np.max(np.abs(gram - np.eye(6))))
    conv = 0.0
    for t in (0.5, 1.0, 2.0):
        for g in (random_sl2c(rng).matrix for _ in range(3)):
            for k in range(5):
                u = k / 2
                got = su2.transform_apply_lie("C", lambda n, u=u: su2.character_of_nodes(u, n), g, t, rule)
                expected = math.exp(-u * (u + 1) * t / 2) * su2.character(u, g)
                conv = max(conv, abs(got - expected) / (1 + abs(expected)))
    ok = mass_err <= 1e-14 and invariance <= 1e-7 and ortho <= 1e-8 and conv <= 1e-7
    return ok, (
        f"mass error {mass_err:.1e}, invariance {invariance:.1e}, orthonormality {ortho:.1e} (u,v<=5/2), "
        f"convolution {conv:.1e} (u<=2)"
    )


CHECKS = {k: globals()[f"check_criterion_{k}"] for k in range(1, 10)}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, capsys):
    ok, detail = CHECKS[number]()
    with capsys.disabled():
        print()
        report(number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, check in CHECKS.items():
        ok, detail = check()
        report(number, ok, detail)
        failures += not ok
    sys.exit(1 if failures else 0)
