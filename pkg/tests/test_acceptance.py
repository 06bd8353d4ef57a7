"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the lines
interleaved with pytest's own output; they are printed either way).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from polyharm import cli
from polyharm.decomposition import CutoffFamily, partition_residual, phi, psi_j
from polyharm.expansion import LambdaSchedule, maximal_function, partial_integral
from polyharm.experiments import (
    KINDS,
    HypothesisViolation,
    SupportViolation,
    TestFunctionSpec,
    generate_test_function,
    localization_trace,
    theorem12_audit,
    theorem12_stability,
    two_resolution_check,
)
from polyharm.field_core import GridSpec, SpatialField, forward_transform
from polyharm.multiplier_lab import (
    FiniteDifferenceError,
    lemma21_check,
    lemma22_decay_fit,
    lemma23_derivative_check,
    table_for,
)
from polyharm.oracles import OracleBudget, breakpoint_maximum, direct_dft
from polyharm.symbols import SymbolParams

DEMO_CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


@pytest.fixture
def report(capsys):
    start = time.monotonic()

    def emit(number, title, passed, detail, limit_s=None):
        elapsed = time.monotonic() - start
        within = limit_s is None or elapsed <= limit_s
        ok = passed and within
        budget = f" (limit {limit_s:g} s)" if limit_s is not None else ""
        with capsys.disabled():
            print(f"\nCRITERION {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}; "
                  f"runtime {elapsed:.1f} s{budget}")
        assert passed, detail
        assert within, f"runtime {elapsed:.1f} s exceeds {limit_s} s"

    return emit


def unit_random_field(rng, spec):
    f = SpatialField(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
    return f * (1 / f.norm())


def test_criterion_01_transform(report):
    rng = np.random.default_rng(1)
    budget = OracleBudget(max_points=128**2)
    pars = direct = gauss = 0.0
    for dims in (1, 2):
        for n in (8, 16, 32, 64, 128):
            spec = GridSpec(dims, n, 10.0)
            for _ in range(5):
                f = SpatialField(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
                g = forward_transform(f)
                pars = max(pars, abs(g.norm() ** 2 - f.norm() ** 2) / f.norm() ** 2)
                direct = max(direct, float(np.max(np.abs(g.coeffs - direct_dft(f, budget)))))
            if n >= 32:
                gspec = GridSpec(dims, n, math.sqrt(2 * math.pi * n))
                ghat = forward_transform(SpatialField(gspec, np.exp(-gspec.radius_sq() / 2))).continuum_values()
                gauss = max(gauss, float(np.max(np.abs(ghat - np.exp(-gspec.freq_sq() / 2)))))
    passed = pars <= 1e-10 and direct <= 1e-8 and gauss <= 1e-6
    report(1, "transform", passed,
           f"parseval {pars:.2e} (<= 1e-10), direct {direct:.2e} (<= 1e-8), gaussian {gauss:.2e} (<= 1e-6)", 60)


def test_criterion_02_projection_laws(report):
    rng = np.random.default_rng(2)
    idem = final = 0.0
    monotone = True
    for trial in range(50):
        spec = GridSpec(1, 128, 12.0) if trial % 2 == 0 else GridSpec(2, 32, 12.0)
        f = unit_random_field(rng, spec)
        sched = LambdaSchedule.exact(spec, 1)
        for lam in sched.values[:: max(1, len(sched) // 12)]:
            p = SymbolParams(1, lam)
            once = partial_integral(f, p)
            idem = max(idem, (partial_integral(once, p) - once).norm())
        errs = np.array([(partial_integral(f, SymbolParams(1, lam)) - f).norm() for lam in sched.values])
        monotone &= bool(np.all(np.diff(errs) <= 1e-13))
        final = max(final, errs[-1])
    passed = idem <= 1e-12 and monotone and final <= 1e-10
    report(2, "projection laws", passed,
           f"idempotence {idem:.2e} (<= 1e-12), monotone {monotone}, full-band error {final:.2e} (<= 1e-10)", 60)


def test_criterion_03_partition(report):
    rng = np.random.default_rng(3)
    fam = CutoffFamily()
    worst, squeeze, support = 0.0, True, True
    for dims in (1, 2, 3):
        count = 10_000 // 3 + 1
        J = rng.integers(1, 21, count)
        radius = np.exp(rng.uniform(math.log(1e-3), math.log(fam.b * 2.0**21), count))
        d = rng.standard_normal((count, dims))
        x = d / np.linalg.norm(d, axis=1, keepdims=True) * radius[:, None]
        for jj in np.unique(J):
            sel = J == jj
            worst = max(worst, float(np.max(np.abs(partition_residual(fam, x[sel], int(jj))))))
            pj = psi_j(fam, int(jj), x[sel])
            r = radius[sel]
            outside = (r < fam.a * 2.0 ** (jj - 1)) | (r > fam.b * 2.0**jj)
            support &= bool(np.all(pj[outside] == 0))
            squeeze &= bool(np.all((pj >= 0) & (pj <= 1)))
        squeeze &= bool(np.all(phi(fam, radius) >= phi(fam, 2 * radius)))
    passed = worst <= 1e-12 and squeeze and support
    report(3, "partition of unity", passed,
           f"residual {worst:.2e} (<= 1e-12) over 10^4 samples, squeeze {squeeze}, support {support}", 10)


def test_criterion_04_exact_maximal(report):
    rng = np.random.default_rng(4)
    spec = GridSpec(1, 64, 10.0)
    worst_oracle, worst_dom = 0.0, -np.inf
    for _ in range(3):
        f = unit_random_field(rng, spec)
        exact = LambdaSchedule.exact(spec, 1)
        mf = maximal_function(f, exact).samples.real
        worst_oracle = max(worst_oracle, float(np.max(np.abs(mf - breakpoint_maximum(f, 1)))))
        subs = [LambdaSchedule.geometric_for(spec, 1, p) for p in (8, 64, 512, 4096)]
        for size in (3, 10, 25):
            pick = np.sort(rng.choice(len(exact), size, replace=False))
            subs.append(LambdaSchedule.explicit(exact.values[pick]))
        for sub in subs:
            worst_dom = max(worst_dom, float(np.max(maximal_function(f, sub).samples.real - mf)))
    passed = worst_oracle <= 1e-12 and worst_dom <= 1e-14
    report(4, "exact maximal operator", passed,
           f"oracle diff {worst_oracle:.2e} (<= 1e-12), max excess of subsampled {worst_dom:.2e} (<= 0)", 120)


def test_criterion_05_envelope_bound(report):
    tables = {1: table_for(CutoffFamily(), 1), 2: table_for(CutoffFamily(), 2)}
    count, worst = 0, 0.0
    for dims in (1, 2):
        for j in (1, 2, 3):
            for t in (0.5, 1.0, 2.0, 4.0):
                for xi in np.concatenate([np.linspace(0, 2 * t, 7), [t + 0.05, 2 * t + 3, 3 * t + 10]]):
                    lhs, rhs = lemma21_check(j, t, xi, dims=dims, table=tables[dims])
                    worst = max(worst, lhs / (rhs * (1 + 1e-3)))
                    count += 1
    passed = count >= 200 and worst <= 1
    report(5, "envelope bound", passed, f"{count} triples, max lhs/(rhs(1+1e-3)) {worst:.4f} (<= 1)", 300)


def test_criterion_06_decay(report):
    worst_n, worst_res, lines = np.inf, 0.0, []
    for j in (1, 2, 3):
        for tau in (0.0, 1.0, 5.0):
            fit = lemma22_decay_fit(j, tau)
            worst_n = min(worst_n, fit.fitted_n)
            worst_res = max(worst_res, fit.residual)
            lines.append(f"j{j}/tau{tau:g}: n {fit.fitted_n:.2f} res {fit.residual:.2f}")
    passed = worst_n >= 4 and worst_res <= 0.5
    report(6, "decay fit", passed,
           f"min fitted n {worst_n:.2f} (>= 4), max log-residual {worst_res:.2f} (<= 0.5) [{'; '.join(lines)}]", 600)


def test_criterion_07_derivative_scaling(report):
    table = table_for(CutoffFamily(), 1)
    offsets = np.linspace(-1.0, 1.0, 21)
    ratios, fd_worst, fd_fail = [], 0.0, 0
    for tau in (0.0, 1.0, 5.0):
        for t in (2.0, 4.0):
            peaks = []
            for j in (1, 2, 3):
                best = 0.0
                for c in offsets:
                    try:
                        d = lemma23_derivative_check(j, tau, 1, None, t, t + c / 2.0**j, table=table)
                    except FiniteDifferenceError:
                        fd_fail += 1
                        continue
                    best = max(best, d.lhs)
                    if d.lhs > 1e-8:
                        fd_worst = max(fd_worst, abs(d.lhs - d.lhs_half_step) / d.lhs)
                peaks.append(best)
            for j in (1, 2):
                ratios.append((j, tau, t, peaks[j] / peaks[j - 1]))
    bad = [f"j{j}->{j + 1} tau{tau:g} t{t:g}: {r:.3f}" for j, tau, t, r in ratios if not 1.6 <= r <= 2.4]
    passed = not bad and fd_fail == 0 and fd_worst < 0.01
    detail = (f"{len(ratios) - len(bad)}/{len(ratios)} ratios in [1.6, 2.4], dt-halving change "
              f"{fd_worst:.2e} (< 1e-2), {fd_fail} unconverged")
    if bad:
        detail += f" [outside: {'; '.join(bad)}]"
    report(7, "derivative scaling", passed, detail, 300)


def test_criterion_08_stability(report):
    family = [
        TestFunctionSpec("gaussian_shell", center=4.0, width=0.3),
        TestFunctionSpec("gaussian_shell", center=5.0, width=0.5),
        TestFunctionSpec("smoothed_annulus_indicator", width=0.4),
        TestFunctionSpec("random_bandlimited_masked", seed=1),
        TestFunctionSpec("random_bandlimited_masked", seed=2, max_frequency=8.0),
        TestFunctionSpec("narrow_bump", center=4.5, width=0.4),
    ]
    ladder = ((256, 8), (512, 16), (1024, 32))
    stab = {tau: theorem12_stability(family, 1.0, tau, ladder=ladder).metrics["stability"] for tau in (0.0, 1.0)}
    grid = GridSpec(1, 256, 16.0)
    x = grid.coords()[0]
    rejected = 0
    bad_inputs = [
        (SpatialField(grid, np.where(np.abs(np.abs(x) - 2.0) < 0.1, 1.0, 0.0)), 1.0, SupportViolation),
        (generate_test_function(family[0], grid), 3.0, HypothesisViolation),
        (generate_test_function(family[0], grid), 0.0, HypothesisViolation),
    ]
    for f, r, err in bad_inputs:
        try:
            theorem12_audit(f, r, LambdaSchedule.exact(grid, 1))
        except err:
            rejected += 1
    passed = all(v <= 1.5 for v in stab.values()) and rejected == len(bad_inputs)
    report(8, "refinement stability", passed,
           f"last/first tau0 {stab[0.0]:.4f}, tau1 {stab[1.0]:.4f} (<= 1.5); "
           f"{rejected}/{len(bad_inputs)} invalid inputs rejected", 600)


def test_criterion_09_localization(report):
    terminal = 0.0
    cases = 0
    for dims, n in ((1, 512), (2, 64)):
        grid = GridSpec(dims, n, 16.0)
        sched = LambdaSchedule.exact(grid, 1)
        for kind in KINDS:
            for seed in (0, 1):
                ts = TestFunctionSpec(kind, seed=seed, width=0.8 if kind == "narrow_bump" and dims == 2 else 0.3)
                res, _ = localization_trace(generate_test_function(ts, grid), 1.0, sched)
                terminal = max(terminal, res.metrics["terminal_l2"])
                cases += 1
    two_res = {kind: two_resolution_check(TestFunctionSpec(kind), 256)[0].metrics["max_rel_diff"] for kind in KINDS}
    worst = max(two_res.values())
    passed = terminal <= 1e-10 and worst <= 0.05
    report(9, "localization proxy", passed,
           f"terminal restricted L2 {terminal:.2e} over {cases} inputs (<= 1e-10), "
           f"two-resolution max rel diff {worst:.4f} (<= 0.05)", 300)


def test_criterion_10_determinism(report, tmp_path, monkeypatch):
    monkeypatch.setenv("POLYHARM_THREADS", "2")
    text = (DEMO_CONFIGS / "maximal_audit.cfg").read_text()
    outs = [tmp_path / "first", tmp_path / "second"]
    codes = [cli.run("maximal-audit", text, out, seed=12345)[0] for out in outs]
    names = sorted(p.name for p in outs[0].iterdir())
    same = names == sorted(p.name for p in outs[1].iterdir()) and all(
        (outs[0] / nm).read_bytes() == (outs[1] / nm).read_bytes() for nm in names)
    passed = codes == [0, 0] and same and "maximal_audit.csv" in names
    report(10, "determinism", passed, f"exit codes {codes}, {len(names)} files byte-identical: {same}")
