"""Test-function generation and end-to-end audits of the localized maximal bound.

Every admissible test function vanishes exactly on ``|x| < inner_radius``
(``inner_radius >= 3`` for the audits) and lives inside ``|x| <= outer_radius``
with at least one unit of margin to the period boundary.  Audits report the
ratio of the maximal function's energy on ``|x| <= r`` to the energy of ``f``
and check that it does not blow up under grid and schedule refinement.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .decomposition import smooth_step, sphere_area
from .expansion import LambdaSchedule, convergence_profile, lattice_levels, maximal_sweep
from .field_core import GridSpec, SpatialField, forward_transform, restricted_l2_norm

__all__ = [
    "HypothesisViolation",
    "SupportViolation",
    "TestFunctionSpec",
    "AuditResult",
    "generate_test_function",
    "theorem12_audit",
    "theorem12_stability",
    "localization_trace",
    "two_resolution_check",
    "canonical_frame",
    "write_audit_csv",
    "SUPPORT_RADIUS",
]

SUPPORT_RADIUS = 3.0
KINDS = ("gaussian_shell", "smoothed_annulus_indicator", "random_bandlimited_masked", "narrow_bump")


class HypothesisViolation(ValueError):
    """Input outside the class the audits are defined for."""


class SupportViolation(HypothesisViolation):
    """A nonzero sample inside ``|x| < 3``."""


@dataclass(frozen=True)
class TestFunctionSpec:
    """Recipe for an admissible test function.

    ``center`` and ``width`` set the shell radius and thickness
    (``gaussian_shell``), the edge ramp (``smoothed_annulus_indicator``), or
    the bump center ``center * e_1`` and radius (``narrow_bump``).
    ``random_bandlimited_masked`` draws ``modes`` plane waves with wave
    vectors in ``[-max_frequency, max_frequency]^N`` from ``seed``.
    """

    __test__ = False  # keep pytest from collecting this class

    kind: str
    inner_radius: float = 3.0
    outer_radius: float = 6.0
    center: float = 4.0
    width: float = 0.3
    amplitude: float = 1.0
    seed: int = 0
    modes: int = 8
    max_frequency: float = 4.0
    margin: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}; expected one of {KINDS}")
        if not 0 <= self.inner_radius < self.outer_radius:
            raise ValueError("need 0 <= inner_radius < outer_radius")
        if self.width <= 0 or self.margin < 1:
            raise ValueError("width must be positive and margin at least 1")
        if self.kind == "narrow_bump" and not (
            self.center - self.width >= self.inner_radius and self.center + self.width <= self.outer_radius
        ):
            raise ValueError("narrow_bump must fit inside [inner_radius, outer_radius]")

    def check_geometry(self, grid):
        if self.outer_radius + self.margin > grid.L / 2:
            raise HypothesisViolation(
                f"outer_radius {self.outer_radius} + margin {self.margin} exceeds half period {grid.L / 2}"
            )


def _window(rho, inner, outer, ramp):
    """Exactly 0 outside ``[inner, outer]``, 1 on ``[inner + ramp, outer - ramp]``."""
    up = smooth_step((rho - inner) / ramp)
    down = smooth_step((outer - rho) / ramp)
    return np.where((rho < inner) | (rho > outer), 0.0, up * down)


def _bump_mass(dims):
    radial = integrate.quad(lambda s: math.exp(-1.0 / (1.0 - s * s)) * s ** (dims - 1), 0, 1,
                            epsabs=1e-15, epsrel=1e-13)[0]
    return sphere_area(dims) * radial


def generate_test_function(tspec, grid):
    """Sample ``tspec`` on ``grid``; values at ``|x| < inner_radius`` are exact zeros."""
    tspec.check_geometry(grid)
    rho = grid.radius()
    ramp = min(0.5, (tspec.outer_radius - tspec.inner_radius) / 4)
    win = _window(rho, tspec.inner_radius, tspec.outer_radius, ramp)
    if tspec.kind == "gaussian_shell":
        vals = np.exp(-((rho - tspec.center) ** 2) / (2 * tspec.width**2)) * win
    elif tspec.kind == "smoothed_annulus_indicator":
        vals = _window(rho, tspec.inner_radius, tspec.outer_radius, min(tspec.width, ramp))
    elif tspec.kind == "random_bandlimited_masked":
        rng = np.random.default_rng(tspec.seed)
        omega = rng.uniform(-tspec.max_frequency, tspec.max_frequency, size=(tspec.modes, grid.dims))
        coef = rng.standard_normal(tspec.modes) + 1j * rng.standard_normal(tspec.modes)
        coords = grid.coords()
        vals = np.zeros(grid.shape, dtype=complex)
        for w, c in zip(omega, coef):
            phase = sum(wi * xi for wi, xi in zip(w, coords))
            vals = vals + c * np.exp(1j * phase)
        vals = vals * win / math.sqrt(tspec.modes)
    else:
        coords = grid.coords()
        shifted = [coords[0] - tspec.center] + list(coords[1:])
        s2 = sum(c * c for c in shifted) / tspec.width**2
        with np.errstate(divide="ignore", over="ignore"):
            bump = np.where(s2 < 1, np.exp(-1.0 / np.where(s2 < 1, 1 - s2, 1.0)), 0.0)
        vals = bump / (_bump_mass(grid.dims) * tspec.width**grid.dims)
    vals = tspec.amplitude * np.broadcast_to(vals, grid.shape)
    vals = np.where(rho < tspec.inner_radius, 0.0, vals)
    return SpatialField(grid, vals)


@dataclass(frozen=True, eq=False)
class AuditResult:
    name: str
    params: dict
    metrics: dict
    grid: dict
    schedule: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, val in self.metrics.items():
            if not math.isfinite(val):
                raise ValueError(f"metric {key} is not finite: {val}")
        missing = {"dims", "n", "L"} - set(self.grid)
        if missing:
            raise ValueError(f"grid provenance missing {sorted(missing)}")

    def row(self):
        out = {"name": self.name}
        out.update({f"grid_{k}": v for k, v in self.grid.items()})
        out.update({f"schedule_{k}": v for k, v in self.schedule.items()})
        out.update(self.params)
        out.update(self.metrics)
        return out


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_audit_csv(results, path):
    """One row per result; columns are the union of keys in first-seen order."""
    rows = [r.row() for r in results]
    cols = []
    for row in rows:
        cols.extend(k for k in row if k not in cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in cols])


def _grid_info(spec):
    return {"dims": spec.dims, "n": spec.n, "L": spec.L}


def _schedule_info(sched):
    return {"mode": sched.mode, "points": len(sched), "refinement": sched.per_interval_refinement}


def _check_hypotheses(f, r):
    if not 0 < r < SUPPORT_RADIUS:
        raise HypothesisViolation(f"audit radius must satisfy 0 < r < 3, got r = {r}")
    inside = f.spec.radius_sq() < SUPPORT_RADIUS**2
    bad = inside & (f.samples != 0)
    if bad.any():
        worst = float(np.sqrt(f.spec.radius_sq()[bad].min()))
        raise SupportViolation(f"f is nonzero at |x| = {worst:.6g} < 3 ({int(bad.sum())} samples)")


def theorem12_audit(f, r, sched, tau=0.0, m_order=1, name="theorem12_audit"):
    """Energy of the maximal function on ``|x| <= r`` against the energy of ``f``.

    ``lhs = ||sup_lam |E_lam f| ||^2`` on the ball, ``rhs = ||f||^2`` on
    ``|x| >= 3``, ``ratio = lhs / rhs`` (0 when both vanish).
    """
    _check_hypotheses(f, r)
    sweep = maximal_sweep(f, sched, tau, m_order)
    lhs = restricted_l2_norm(sweep.field, r) ** 2
    rhs = restricted_l2_norm(f, SUPPORT_RADIUS, inside=False) ** 2
    ratio = 0.0 if rhs == 0 and lhs == 0 else lhs / rhs
    mask = f.spec.radius_sq() <= r * r
    variation = float(sweep.variation[mask].max()) if mask.any() else 0.0
    return AuditResult(
        name,
        {"r": r, "tau": tau, "m": m_order},
        {"lhs": lhs, "rhs": rhs, "ratio": ratio, "sweep_variation": variation},
        _grid_info(f.spec),
        _schedule_info(sched),
    )


DEFAULT_LADDER = ((256, 8), (512, 16), (1024, 32))


def _rung_schedule(grid, m, mode, density):
    if mode == "exact_breakpoints":
        return LambdaSchedule.exact(grid, m, refinement=density)
    if mode == "geometric":
        return LambdaSchedule.geometric_for(grid, m, density)
    raise ValueError(f"ladder schedules must be exact_breakpoints or geometric, not {mode!r}")


def theorem12_stability(family, r=1.0, tau=0.0, m_order=1, ladder=DEFAULT_LADDER, dims=1, L=16.0,
                        schedule_mode="exact_breakpoints", threshold=1.5, workers=1):
    """Max ratio over ``family`` on each ``(n, density)`` rung of ``ladder``.

    ``density`` is the per-gap refinement for exact schedules and the point
    count for geometric ones.  ``stability = last / first`` must stay at or
    below ``threshold``; a zero first rung with a zero last rung gives 0.
    """
    ladder = [tuple(rung) for rung in ladder]
    if len(ladder) < 3:
        raise ValueError("need a ladder of at least 3 rungs")
    if len({n for n, _ in ladder}) < 3 or len({d for _, d in ladder}) < 3:
        raise ValueError("ladder needs 3 distinct resolutions and 3 distinct schedule densities")
    if not family:
        raise ValueError("empty function family")
    if not 0 < r < SUPPORT_RADIUS:
        raise HypothesisViolation(f"audit radius must satisfy 0 < r < 3, got r = {r}")
    metrics, maxima = {}, []
    for i, (n, density) in enumerate(ladder):
        grid = GridSpec(dims, n, L)
        sched = _rung_schedule(grid, m_order, schedule_mode, density)

        def one(ts, grid=grid, sched=sched):
            return theorem12_audit(generate_test_function(ts, grid), r, sched, tau, m_order).metrics["ratio"]

        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                ratios = list(pool.map(one, family))
        else:
            ratios = [one(ts) for ts in family]
        maxima.append(max(ratios))
        metrics[f"max_ratio_rung{i}"] = maxima[-1]
    first, last = maxima[0], maxima[-1]
    if first == 0:
        if last != 0:
            raise ValueError("ratio is zero on the first rung but not the last; family is degenerate")
        stability = 0.0
    else:
        stability = last / first
    metrics["stability"] = stability
    metrics["threshold"] = threshold
    metrics["passed"] = float(stability <= threshold)
    return AuditResult(
        "theorem12_stability",
        {"r": r, "tau": tau, "m": m_order, "family_size": len(family)},
        metrics,
        {"dims": dims, "n": ladder[-1][0], "L": L},
        {"mode": schedule_mode, "ladder": " ".join(f"{n}:{d}" for n, d in ladder)},
    )


def localization_trace(f, r, sched, tau=0.0, m_order=1, onset_fraction=0.1):
    """Restricted norms of ``E_lam f`` on ``|x| <= r`` along the schedule.

    Returns ``(AuditResult, ConvergenceProfile)``.  ``terminal_l2`` is the
    last profile value; ``onset_lambda`` is the largest ``lam`` at which the
    restricted L2 norm still exceeds ``onset_fraction`` of its peak.
    """
    _check_hypotheses(f, r)
    prof = convergence_profile(f, sched, tau, m_order, rho=r, inside=True)
    peak = float(prof.l2.max())
    above = np.nonzero(prof.l2 > onset_fraction * peak)[0] if peak > 0 else np.array([], dtype=int)
    onset = float(prof.lam[above[-1]]) if above.size else 0.0
    metrics = {
        "terminal_l2": float(prof.l2[-1]),
        "terminal_sup": float(prof.sup[-1]),
        "peak_l2": peak,
        "onset_lambda": onset,
    }
    res = AuditResult("localization_trace", {"r": r, "tau": tau, "m": m_order}, metrics,
                      _grid_info(f.spec), _schedule_info(sched))
    return res, prof


def two_resolution_check(tspec, n, r=1.0, tau=0.0, m_order=1, dims=1, L=16.0, floor_factor=10.0):
    """Compare localization profiles on grids ``n`` and ``2n`` at common levels.

    The levels are the coarse grid's exact schedule below its top lattice
    level, where both grids carry the same lattice frequencies.  The coarse
    coefficients are contaminated by aliasing of the energy that ``f`` has
    beyond the coarse band; relative differences are taken only where the fine
    profile exceeds ``floor_factor`` times that aliased energy.
    Returns ``(AuditResult, coarse_profile, fine_profile)``.
    """
    coarse, fine = GridSpec(dims, n, L), GridSpec(dims, 2 * n, L)
    top = lattice_levels(coarse, m_order)[-1]
    base = LambdaSchedule.exact(coarse, m_order)
    sched = LambdaSchedule.explicit(base.values[base.values < top])
    f_fine = generate_test_function(tspec, fine)
    pc = localization_trace(generate_test_function(tspec, coarse), r, sched, tau, m_order)[1]
    pf = localization_trace(f_fine, r, sched, tau, m_order)[1]
    beyond = np.max(np.abs(np.stack(np.broadcast_arrays(*np.meshgrid(
        *([fine.indices()] * dims), indexing="ij", sparse=True)))), axis=0) >= n // 2
    alias = math.sqrt(fine.h**dims) * float(np.linalg.norm(forward_transform(f_fine).coeffs[beyond]))
    keep = (pf.l2 > 0) & (pf.l2 >= floor_factor * alias)
    rel = np.abs(pc.l2[keep] - pf.l2[keep]) / pf.l2[keep]
    metrics = {
        "max_rel_diff": float(rel.max()) if rel.size else 0.0,
        "compared": float(keep.sum()),
        "alias_floor": alias,
    }
    res = AuditResult("two_resolution_check", {"r": r, "tau": tau, "m": m_order, "kind": tspec.kind},
                      metrics, {"dims": dims, "n": n, "L": L}, _schedule_info(sched))
    return res, pc, pf


def canonical_frame(f, center_index, r0):
    """Move the ball ``B(x0, r0)`` to ``B(0, 3)`` by a lattice roll and a dilation.

    ``center_index`` is the centered integer index of ``x0``.  The samples are
    only rolled; the dilation by ``s = r0 / 3`` maps the grid to period
    ``L / s``, and a level ``lam`` on the original grid corresponds to
    ``lam * s**(2m)`` on the new one.  Returns ``(field, scale)``.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    shift = -np.broadcast_to(np.asarray(center_index, dtype=int), (f.spec.dims,))
    moved = f.roll(shift)
    s = r0 / SUPPORT_RADIUS
    spec = GridSpec(f.spec.dims, f.spec.n, f.spec.L / s, f.spec.max_points)
    return SpatialField(spec, moved.samples), s
