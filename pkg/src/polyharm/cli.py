"""Config-driven command line front end.

Usage::

    polyharm <subcommand> [--config PATH] [--out DIR] [--seed N]

Config files hold one ``section.key = value`` per line; ``#`` starts a
comment.  Exit codes: 0 all assertions passed, 2 an assertion failed, 3 bad
config, 4 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import platform
import shutil
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .decomposition import CutoffFamily, partition_residual, phi, psi_j
from .expansion import LambdaSchedule, maximal_function
from .experiments import (
    HypothesisViolation,
    TestFunctionSpec,
    generate_test_function,
    localization_trace,
    theorem12_audit,
    theorem12_stability,
    write_audit_csv,
)
from .field_core import MAX_POINTS, FieldError, GridSpec, SpatialField, fft_workers, forward_transform
from .multiplier_lab import (
    DecaySweep,
    FiniteDifferenceError,
    ResolutionError,
    lemma21_check,
    lemma22_decay_fit,
    lemma23_scaling,
    table_for,
)
from .oracles import BudgetExceeded, OracleBudget, direct_dft

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_RESOURCE = 0, 2, 3, 4
SUBCOMMANDS = ("transform-check", "partition-check", "multiplier-audit", "maximal-audit", "localization-run")


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def _words(text):
    return tuple(text.replace(",", " ").split())


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _ladder(text):
    rungs = []
    for item in text.replace(",", " ").split():
        n, _, d = item.partition(":")
        rungs.append((int(n), int(d)))
    return tuple(rungs)


def _tag(x):
    """Render a number for use inside a metric name (``[a-z0-9_]`` only)."""
    return f"{x:g}".replace("-", "m").replace(".", "p").replace("+", "")


def _fmt_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return " ".join(f"{a}:{b}" for a, b in v)
        return ", ".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# key -> (parser, default)
SCHEMA = {
    "grid.dims": (int, 1),
    "grid.n": (int, 512),
    "grid.L": (float, 16.0),
    "symbol.m": (int, 1),
    "symbol.tau": (float, 0.0),
    "schedule.mode": (str, "exact_breakpoints"),
    "schedule.points": (int, 4096),
    "schedule.refinement": (int, 8),
    "cutoff.r": (float, 1.0),
    "cutoff.profile": (str, "exp"),
    "function.kind": (str, "gaussian_shell"),
    "function.family": (_words, ()),
    "function.inner_radius": (float, 3.0),
    "function.outer_radius": (float, 6.0),
    "function.center": (float, 4.0),
    "function.width": (float, 0.3),
    "function.amplitude": (float, 1.0),
    "function.seed": (int, 0),
    "function.modes": (int, 8),
    "function.max_frequency": (float, 4.0),
    "audit.name": (str, ""),
    "audit.r": (float, 1.0),
    "audit.ladder": (_ladder, ((256, 8), (512, 16), (1024, 32))),
    "audit.threshold": (float, 1.5),
    "audit.terminal_tolerance": (float, 1e-10),
    "transform.trials": (int, 20),
    "transform.dims": (_ints, (1, 2)),
    "transform.sizes": (_ints, (16, 32, 64, 128)),
    "partition.samples": (int, 10000),
    "partition.max_J": (int, 20),
    "multiplier.checks": (_words, ("lemma21", "lemma22", "lemma23")),
    "multiplier.dims": (_ints, (1, 2)),
    "multiplier.j": (_ints, (1, 2, 3)),
    "multiplier.tau": (_floats, (0.0, 1.0, 5.0)),
    "multiplier.t": (_floats, (0.5, 1.0, 2.0, 4.0)),
    "multiplier.xi_count": (int, 25),
    "multiplier.derivative_t": (_floats, (2.0, 4.0)),
    "output.dir": (str, "."),
    "output.heatmap": (_bool, False),
    "run.seed": (int, 0),
    "limits.max_points": (int, MAX_POINTS),
    "limits.max_lambdas": (int, 1_000_000),
}

# each entry lists alternatives; at least one key of every group must be given
REQUIRED = {
    "maximal-audit": (("function.kind", "function.family"), ("audit.r",)),
    "localization-run": (("function.kind", "function.family"), ("audit.r",)),
}


class ConfigError(ValueError):
    pass


class ResourceCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved configuration: every schema key with a typed value."""

    values: dict
    explicit: frozenset = frozenset()

    def __getitem__(self, key):
        return self.values[key]

    def echo(self):
        return "".join(f"{k} = {_fmt_value(v)}\n" for k, v in self.values.items())

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.values == other.values


def parse_config(text, subcommand=None):
    """Parse ``section.key = value`` lines; unknown or duplicated keys are errors."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or "." not in key:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    for group in REQUIRED.get(subcommand, ()):
        if not any(key in raw for key in group):
            raise ConfigError(f"{subcommand} requires {' or '.join(group)}")
    values = {}
    for key, (conv, default) in SCHEMA.items():
        if key in raw:
            try:
                values[key] = conv(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        else:
            values[key] = default
    cfg = ExperimentConfig(values, frozenset(raw))
    _validate(cfg)
    return cfg


def _validate(cfg):
    r = cfg["audit.r"]
    if not 0 < r < 3:
        raise ConfigError(f"audit.r = {r} violates the precondition 0 < r < 3")
    if cfg["schedule.mode"] not in ("exact_breakpoints", "geometric"):
        raise ConfigError("schedule.mode must be exact_breakpoints or geometric")
    if cfg["schedule.refinement"] < 1 or cfg["schedule.points"] < 2:
        raise ConfigError("schedule.refinement must be >= 1 and schedule.points >= 2")
    if cfg["symbol.m"] < 1:
        raise ConfigError("symbol.m must be >= 1")
    if not 1 <= cfg["grid.dims"] <= 3:
        raise ConfigError("grid.dims must be 1, 2 or 3")
    if cfg["grid.n"] < 4 or cfg["grid.n"] % 2 or cfg["grid.L"] <= 0:
        raise ConfigError("grid.n must be even and >= 4, grid.L positive")
    if cfg["run.seed"] < 0 or cfg["run.seed"] >= 2**64:
        raise ConfigError("run.seed must be an unsigned 64-bit integer")
    try:
        CutoffFamily(cfg["cutoff.r"], cfg["cutoff.profile"])
        _family(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _family(cfg):
    kinds = cfg["function.family"] or (cfg["function.kind"],)
    common = dict(
        inner_radius=cfg["function.inner_radius"],
        outer_radius=cfg["function.outer_radius"],
        center=cfg["function.center"],
        width=cfg["function.width"],
        amplitude=cfg["function.amplitude"],
        modes=cfg["function.modes"],
        max_frequency=cfg["function.max_frequency"],
    )
    return [TestFunctionSpec(kind, seed=(cfg["function.seed"] + i) % 2**63, **common)
            for i, kind in enumerate(kinds)]


def _grid(cfg):
    dims, n = cfg["grid.dims"], cfg["grid.n"]
    if n**dims > cfg["limits.max_points"]:
        raise ResourceCapError(f"grid of {n ** dims} points exceeds limits.max_points = {cfg['limits.max_points']}")
    return GridSpec(dims, n, cfg["grid.L"], max(cfg["limits.max_points"], n**dims))


def _schedule(cfg, grid):
    m = cfg["symbol.m"]
    if cfg["schedule.mode"] == "geometric":
        sched = LambdaSchedule.geometric_for(grid, m, cfg["schedule.points"])
    else:
        refine = 1 if cfg["symbol.tau"] == 0 else cfg["schedule.refinement"]
        sched = LambdaSchedule.exact(grid, m, refinement=refine)
    if len(sched) > cfg["limits.max_lambdas"]:
        raise ResourceCapError(f"schedule of {len(sched)} levels exceeds limits.max_lambdas")
    return sched


# ---------------------------------------------------------------- heatmaps

def emit_heatmap(f, path, axis_index=None, component="abs"):
    """Write a P5 (8-bit binary graymap) image of a 2D slice of ``f``.

    ``N = 1`` gives a ``1 x n`` image; for ``N = 3`` the slice is taken at
    ``axis_index`` (default: the middle plane) of the last axis.
    ``component`` is ``"abs"`` or ``"real"``.  Scaling is linear from the
    slice minimum (black) to maximum (white); a constant slice is black.
    Returns ``(vmin, vmax)``.
    """
    if component not in ("abs", "real"):
        raise ValueError("component must be 'abs' or 'real'")
    vals = np.abs(f.samples) if component == "abs" else f.samples.real
    if f.spec.dims == 1:
        img = vals[None, :]
    elif f.spec.dims == 2:
        img = vals
    else:
        img = vals[..., f.spec.n // 2 if axis_index is None else axis_index]
    vmin, vmax = float(img.min()), float(img.max())
    if vmax > vmin:
        pix = np.round((img - vmin) / (vmax - vmin) * 255)
    else:
        pix = np.zeros(img.shape)
    rows, cols = img.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pix.astype(np.uint8).tobytes())
    return vmin, vmax


def read_pgm(path):
    """Inverse of :func:`emit_heatmap` for the files it writes."""
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary graymap")
    cols, rows = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(rows, cols)


# ---------------------------------------------------------------- subcommands

class Run:
    """Collects output files and assertion outcomes of one subcommand."""

    def __init__(self, workdir):
        self.workdir = Path(workdir)
        self.failures = []
        self.notes = []

    def path(self, name):
        return self.workdir / name

    def check(self, metric, ok, detail=""):
        if not ok:
            self.failures.append(f"{metric}: {detail}" if detail else metric)

    def write_rows(self, name, header, rows):
        with open(self.path(name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt_value(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _transform_check(cfg, run):
    rng = np.random.default_rng(cfg["run.seed"])
    rows = []
    worst = {"parseval": 0.0, "direct": 0.0, "gaussian": 0.0}
    budget = OracleBudget(max_points=max(4096, 128**2))
    for dims in cfg["transform.dims"]:
        for n in cfg["transform.sizes"]:
            if n**dims > cfg["limits.max_points"]:
                raise ResourceCapError(f"transform suite grid {n}^{dims} exceeds limits.max_points")
            spec = GridSpec(dims, n, cfg["grid.L"], max(MAX_POINTS, n**dims))
            for trial in range(cfg["transform.trials"]):
                f = SpatialField(spec, rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape))
                g = forward_transform(f)
                pars = abs(g.norm() ** 2 - f.norm() ** 2) / f.norm() ** 2
                ref = direct_dft(f, budget=budget)
                direct = float(np.max(np.abs(g.coeffs - ref)))
                rows.append((dims, n, trial, pars, direct, ""))
                worst["parseval"] = max(worst["parseval"], pars)
                worst["direct"] = max(worst["direct"], direct)
            if n < 32:
                continue
            # period sqrt(2 pi n) balances spatial truncation and aliasing at exp(-pi n / 4)
            gspec = GridSpec(dims, n, math.sqrt(2 * math.pi * n), max(MAX_POINTS, n**dims))
            gauss = SpatialField(gspec, np.exp(-gspec.radius_sq() / 2))
            err = float(np.max(np.abs(forward_transform(gauss).continuum_values() - np.exp(-gspec.freq_sq() / 2))))
            worst["gaussian"] = max(worst["gaussian"], err)
            rows.append((dims, n, "gaussian", "", "", err))
    run.write_rows("transform_check.csv", ["dims", "n", "trial", "parseval_rel_err", "direct_max_err",
                                           "gaussian_max_err"], rows)
    run.check("parseval_rel_err", worst["parseval"] <= 1e-10, f"{worst['parseval']:.3e} > 1e-10")
    run.check("direct_max_err", worst["direct"] <= 1e-8, f"{worst['direct']:.3e} > 1e-8")
    run.check("gaussian_max_err", worst["gaussian"] <= 1e-6, f"{worst['gaussian']:.3e} > 1e-6")


def _partition_check(cfg, run):
    fam = CutoffFamily(cfg["cutoff.r"], cfg["cutoff.profile"])
    rng = np.random.default_rng(cfg["run.seed"])
    count, max_J, dims = cfg["partition.samples"], cfg["partition.max_J"], cfg["grid.dims"]
    rows = []
    for J in range(1, max_J + 1):
        # radii spread log-uniformly over the range the J-term sum covers
        radius = np.exp(rng.uniform(math.log(1e-3), math.log(fam.b * 2.0 ** (J + 1)), count))
        direction = rng.standard_normal((count, dims))
        x = direction / np.linalg.norm(direction, axis=1, keepdims=True) * radius[:, None]
        res = float(np.max(np.abs(partition_residual(fam, x, J))))
        lo, hi = fam.a * 2.0 ** (J - 1), fam.b * 2.0**J
        pj = psi_j(fam, J, x)
        support_ok = bool(np.all(pj[(radius < lo) | (radius > hi)] == 0))
        rho = radius
        squeeze_ok = bool(np.all(phi(fam, rho) >= phi(fam, 2 * rho)) and np.all((pj >= 0) & (pj <= 1)))
        rows.append((J, res, count, int(support_ok), int(squeeze_ok)))
        run.check(f"max_abs_residual_J{J}", res <= 1e-12, f"{res:.3e} > 1e-12")
        run.check(f"support_J{J}", support_ok, "psi_j nonzero outside its annulus")
        run.check(f"squeeze_J{J}", squeeze_ok, "phi(|x|) >= phi(2|x|) or 0 <= psi_j <= 1 violated")
    run.write_rows("partition_check.csv", ["J", "max_abs_residual", "samples", "support_ok", "squeeze_ok"], rows)


def _multiplier_audit(cfg, run):
    fam = CutoffFamily(cfg["cutoff.r"], cfg["cutoff.profile"])
    checks = set(cfg["multiplier.checks"])
    unknown = checks - {"lemma21", "lemma22", "lemma23"}
    if unknown:
        raise ConfigError(f"multiplier.checks: unknown entries {sorted(unknown)}")
    summary = []
    if "lemma21" in checks:
        rows, worst = [], 0.0
        for dims in cfg["multiplier.dims"]:
            table = table_for(fam, dims)
            for j in cfg["multiplier.j"]:
                for t in cfg["multiplier.t"]:
                    for xi in np.linspace(0.0, 2 * t + 2.0, cfg["multiplier.xi_count"]):
                        lhs, rhs = lemma21_check(j, t, float(xi), dims=dims, table=table)
                        excess = lhs / rhs - 1 if rhs > 0 else (math.inf if lhs > 1e-15 else 0.0)
                        worst = max(worst, excess)
                        rows.append((dims, j, t, float(xi), lhs, rhs))
        run.write_rows("lemma21.csv", ["dims", "j", "t", "xi_radius", "lhs", "rhs"], rows)
        summary.append(("lemma21_max_excess", worst, 1e-3, worst <= 1e-3))
    if "lemma22" in checks:
        rows = []
        sweep = DecaySweep()
        for j in cfg["multiplier.j"]:
            for tau in cfg["multiplier.tau"]:
                fit = lemma22_decay_fit(j, tau, cfg["symbol.m"], fam, sweep)
                rows.append((j, tau, fit.fitted_C, fit.fitted_n, fit.residual))
                summary.append((f"lemma22_fitted_n_j{j}_tau{_tag(tau)}", fit.fitted_n, 4.0, fit.fitted_n >= 4))
                summary.append((f"lemma22_residual_j{j}_tau{_tag(tau)}", fit.residual, 0.5, fit.residual <= 0.5))
        run.write_rows("lemma22.csv", ["j", "tau", "fitted_C", "fitted_n", "residual"], rows)
    if "lemma23" in checks:
        rows = []
        table = table_for(fam, 1)
        js = cfg["multiplier.j"]
        for tau in cfg["multiplier.tau"]:
            for t in cfg["multiplier.derivative_t"]:
                peaks, ratios = lemma23_scaling(js, tau, cfg["symbol.m"], t, table=table)
                for j, peak in zip(js, peaks):
                    rows.append((j, tau, t, peak, ""))
                for j, ratio in zip(js[1:], ratios):
                    rows.append((j, tau, t, "", ratio))
                    summary.append((f"lemma23_ratio_j{j}_tau{_tag(tau)}_t{_tag(t)}", ratio, 2.0,
                                    1.6 <= ratio <= 2.4))
        run.write_rows("lemma23.csv", ["j", "tau", "t", "peak_derivative", "ratio_to_previous_j"], rows)
    run.write_rows("multiplier_audit.csv", ["metric", "value", "target", "passed"],
                   [(name, val, tgt, int(ok)) for name, val, tgt, ok in summary])
    for name, val, tgt, ok in summary:
        run.check(name, ok, f"value {val:.6g}, target {tgt:g}")


def _maximal_audit(cfg, run):
    grid = _grid(cfg)
    family = _family(cfg)
    name = cfg["audit.name"] or ("theorem12_stability" if len(family) > 1 else "theorem12_audit")
    if name == "theorem12_audit":
        sched = _schedule(cfg, grid)
        results = []
        for ts in family:
            f = generate_test_function(ts, grid)
            res = theorem12_audit(f, cfg["audit.r"], sched, cfg["symbol.tau"], cfg["symbol.m"])
            results.append(res)
            run.check("ratio", math.isfinite(res.metrics["ratio"]), "non-finite ratio")
        if cfg["output.heatmap"]:
            mf = maximal_function(generate_test_function(family[0], grid), sched, cfg["symbol.tau"], cfg["symbol.m"])
            lo, hi = emit_heatmap(mf, run.path("maximal_function.pgm"))
            run.notes.append(f"heatmap maximal_function.pgm abs min={lo!r} max={hi!r}")
    elif name == "theorem12_stability":
        for n, _ in cfg["audit.ladder"]:
            if n ** cfg["grid.dims"] > cfg["limits.max_points"]:
                raise ResourceCapError(f"ladder rung n={n} exceeds limits.max_points")
        res = theorem12_stability(family, cfg["audit.r"], cfg["symbol.tau"], cfg["symbol.m"],
                                  ladder=cfg["audit.ladder"], dims=cfg["grid.dims"], L=cfg["grid.L"],
                                  schedule_mode=cfg["schedule.mode"], threshold=cfg["audit.threshold"])
        results = [res]
        run.check("stability", res.metrics["passed"] == 1.0,
                  f"{res.metrics['stability']:.6g} > threshold {cfg['audit.threshold']:g}")
    else:
        raise ConfigError(f"audit.name must be theorem12_audit or theorem12_stability, not {name!r}")
    write_audit_csv(results, run.path("maximal_audit.csv"))


def _localization_run(cfg, run):
    grid = _grid(cfg)
    family = _family(cfg)
    sched = _schedule(cfg, grid)
    results = []
    for i, ts in enumerate(family):
        f = generate_test_function(ts, grid)
        res, prof = localization_trace(f, cfg["audit.r"], sched, cfg["symbol.tau"], cfg["symbol.m"])
        results.append(res)
        prof.to_csv(run.path("localization_profile.csv" if len(family) == 1 else f"localization_profile_{i}.csv"))
        if cfg["symbol.tau"] == 0 and sched.mode == "exact_breakpoints":
            tol = cfg["audit.terminal_tolerance"]
            run.check("terminal_l2", res.metrics["terminal_l2"] <= tol,
                      f"{res.metrics['terminal_l2']:.3e} > {tol:g}")
        if cfg["output.heatmap"] and i == 0:
            lo, hi = emit_heatmap(f, run.path("test_function.pgm"))
            run.notes.append(f"heatmap test_function.pgm abs min={lo!r} max={hi!r}")
    write_audit_csv(results, run.path("localization_run.csv"))


HANDLERS = {
    "transform-check": _transform_check,
    "partition-check": _partition_check,
    "multiplier-audit": _multiplier_audit,
    "maximal-audit": _maximal_audit,
    "localization-run": _localization_run,
}


def _manifest(cfg, subcommand, notes):
    lines = [
        f"# subcommand {subcommand}",
        f"# polyharm {__version__}",
        f"# python {platform.python_version()}",
        f"# numpy {np.__version__}",
        f"# scipy {scipy.__version__}",
        f"# seed {cfg['run.seed']}",
        f"# threads {os.environ.get('POLYHARM_THREADS', '0')} (fft workers {fft_workers()})",
    ]
    lines += [f"# {n}" for n in notes]
    return "\n".join(lines) + "\n" + cfg.echo()


def run(subcommand, config_text="", out=None, seed=None):
    """Execute ``subcommand`` and return ``(exit_code, messages)``.

    Files are first written to a scratch directory inside the output
    directory and moved into place only once the subcommand has finished,
    so an error exit never leaves partial files behind.
    """
    if subcommand not in HANDLERS:
        return EXIT_CONFIG, [f"unknown subcommand {subcommand!r}"]
    try:
        cfg = parse_config(config_text, subcommand)
        if seed is not None:
            vals = dict(cfg.values)
            vals["run.seed"] = int(seed)
            vals["function.seed"] = int(seed) % 2**63
            cfg = ExperimentConfig(vals, cfg.explicit)
            _validate(cfg)
    except ConfigError as exc:
        return EXIT_CONFIG, [f"config error: {exc}"]
    outdir = Path(out if out is not None else cfg["output.dir"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        scratch = Path(tempfile.mkdtemp(prefix=".polyharm-", dir=outdir))
    except OSError as exc:
        return EXIT_CONFIG, [f"cannot write output directory {outdir}: {exc}"]
    runner = Run(scratch)
    try:
        HANDLERS[subcommand](cfg, runner)
        runner.path("manifest.txt").write_text(_manifest(cfg, subcommand, runner.notes))
        for item in sorted(scratch.iterdir()):
            os.replace(item, outdir / item.name)
    except ConfigError as exc:
        return EXIT_CONFIG, [f"config error: {exc}"]
    except HypothesisViolation as exc:
        return EXIT_CONFIG, [f"hypothesis violation: {exc}"]
    except (ResourceCapError, BudgetExceeded, MemoryError) as exc:
        return EXIT_RESOURCE, [f"resource cap exceeded: {exc}"]
    except (FieldError, ResolutionError, FiniteDifferenceError, ValueError) as exc:
        return EXIT_CONFIG, [f"invalid parameters: {exc}"]
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    if runner.failures:
        return EXIT_ASSERT, [f"assertion failed: {f}" for f in runner.failures]
    return EXIT_OK, []


def build_parser():
    p = argparse.ArgumentParser(prog="polyharm", description="Spectral expansion audits on periodic grids.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="config file of 'section.key = value' lines (default: built-in defaults)")
    p.add_argument("--out", help="output directory (default: output.dir from the config)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed; overrides run.seed and function.seed")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    code, messages = run(args.subcommand, text, args.out, args.seed)
    for msg in messages:
        print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
