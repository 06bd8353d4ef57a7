"""Partial integrals, imaginary-order means, maximal functions and lambda sweeps.

On the periodized grid ``E_lam f`` only changes when ``lam`` crosses a lattice
level ``|xi_k|**(2m)``.  For ``tau = 0`` the supremum over all ``lam > 0`` is
therefore a finite maximum over one representative ``lam`` per gap between
consecutive levels, which is what ``LambdaSchedule.exact`` enumerates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .field_core import FieldError, SpatialField, fft_workers, forward_transform, inverse_transform, region_mask
from .symbols import SymbolParams, apply_multiplier, spectral_level, symbol_of_norm_sq

__all__ = [
    "LambdaSchedule",
    "MaximalResult",
    "ConvergenceProfile",
    "partial_integral",
    "iter_partial_integrals",
    "maximal_function",
    "maximal_sweep",
    "convergence_profile",
    "lattice_levels",
]

MODES = ("exact_breakpoints", "geometric", "explicit")
_BATCH_POINTS = 2**21


def lattice_levels(spec, m):
    """Sorted distinct lattice levels ``|xi_k|**(2m)`` (0 included)."""
    k2 = np.unique(spec.index_sq())
    return spectral_level(spec.dxi**2 * k2, m)


@dataclass(frozen=True, eq=False)
class LambdaSchedule:
    """Strictly increasing spectral levels at which ``E_lam`` is evaluated.

    For ``mode == "exact_breakpoints"`` the attribute ``breakpoints`` holds the
    distinct lattice levels and ``values`` the evaluation levels derived from
    them: ``per_interval_refinement`` points inside every gap
    ``(b_i, b_{i+1})`` at fractions ``2**-1, ..., 2**-R`` of the gap measured
    from ``b_i``, plus a tail above the last level.  With ``R = 1`` and
    ``tau = 0`` this is exactly one representative per constancy interval.
    """

    mode: str
    values: np.ndarray
    per_interval_refinement: int = 1
    breakpoints: np.ndarray | None = None
    m: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        vals = np.array(self.values, dtype=float, copy=True).ravel()
        if vals.size == 0:
            raise ValueError("schedule is empty")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("schedule values must be positive and finite")
        if np.any(np.diff(vals) <= 0):
            raise ValueError("schedule values must be strictly increasing")
        if self.per_interval_refinement < 1:
            raise ValueError("per_interval_refinement must be >= 1")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @classmethod
    def explicit(cls, values):
        return cls("explicit", np.sort(np.asarray(values, dtype=float)))

    @classmethod
    def geometric(cls, lam_min, lam_max, points):
        if not 0 < lam_min < lam_max or points < 2:
            raise ValueError("need 0 < lam_min < lam_max and points >= 2")
        return cls("geometric", np.geomspace(lam_min, lam_max, int(points)))

    @classmethod
    def geometric_for(cls, spec, m, points):
        """Geometric schedule spanning half the first level to twice the last."""
        levels = lattice_levels(spec, m)
        return cls.geometric(levels[1] / 2, 2 * levels[-1], points)

    @classmethod
    def exact(cls, spec, m, refinement=1, tail_decades=8.0):
        """Breakpoint-derived schedule for the lattice of ``spec``.

        ``refinement > 1`` is meant for ``tau != 0``, where the multiplier
        moves continuously between breakpoints; the tail then doubles the
        distance above the last level until it exceeds ``10**tail_decades``
        times that level, where every phase is below roughly that ratio.
        """
        levels = lattice_levels(spec, m)
        R = int(refinement)
        frac = 0.5 ** np.arange(R, 0, -1)  # ascending: 2**-R ... 2**-1
        gaps = np.diff(levels)
        inner = (levels[:-1, None] + gaps[:, None] * frac[None, :]).ravel()
        last, step = levels[-1], gaps[-1]
        if R == 1:
            tail = np.array([last + step / 2])
        else:
            low = last + step * frac
            k = np.arange(1, 200)
            high = last + step * 2.0**k
            high = high[: np.searchsorted(high, last * 10**tail_decades) + 1]
            tail = np.concatenate([low, high])
        values = np.unique(np.concatenate([inner, tail]))
        return cls("exact_breakpoints", values, R, breakpoints=levels, m=int(m))

    def check_compatible(self, spec, m):
        if self.mode == "exact_breakpoints" and self.m != m:
            raise ValueError(f"schedule built for m={self.m}, used with m={m}")


def partial_integral(f, p):
    """``E_lam^{i tau} f``: transform, multiply by the symbol, transform back."""
    return inverse_transform(apply_multiplier(p, forward_transform(f)))


def iter_partial_integrals(f, lams, tau, m, batch=None):
    """Yield ``(lam_batch, values)`` with ``values[b]`` = ``E_lam f`` in FFT order.

    ``values`` has shape ``(len(lam_batch),) + grid shape`` and uses unshifted
    (FFT) index order; callers needing centered order apply ``fftshift``.
    """
    spec = f.spec
    axes = tuple(range(1, spec.dims + 1))
    coeffs = scipy.fft.ifftshift(forward_transform(f).coeffs)
    freq_sq = scipy.fft.ifftshift(spec.freq_sq())
    if batch is None:
        batch = max(1, _BATCH_POINTS // spec.size)
    lams = np.asarray(lams, dtype=float)
    workers = fft_workers()
    for start in range(0, lams.size, batch):
        chunk = lams[start:start + batch]
        sym = np.stack([symbol_of_norm_sq(SymbolParams(m, lam, tau), freq_sq) for lam in chunk])
        vals = scipy.fft.ifftn(sym * coeffs, axes=axes, norm="ortho", workers=workers)
        yield chunk, vals


@dataclass(frozen=True, eq=False)
class MaximalResult:
    """Pointwise maximum of ``|E_lam f|`` over a schedule.

    ``variation`` bounds how much ``|E_lam f(x)|`` moved between consecutive
    schedule points; for ``tau != 0`` the true supremum over the sampled range
    is at most ``field + variation / 2`` if ``E_lam f(x)`` is monotone between
    samples, so ``field`` is a lower bound and ``variation`` its error scale.
    """

    field: SpatialField
    variation: np.ndarray
    argmax_lam: np.ndarray


def maximal_sweep(f, sched, tau=0.0, m=1):
    sched.check_compatible(f.spec, m)
    best = np.full(f.spec.shape, -1.0)
    arg = np.zeros(f.spec.shape)
    var = np.zeros(f.spec.shape)
    prev = None
    for chunk, vals in iter_partial_integrals(f, sched.values, tau, m):
        mags = np.abs(vals)
        k = np.argmax(mags, axis=0)
        top = np.take_along_axis(mags, k[None], axis=0)[0]
        better = top > best
        best = np.where(better, top, best)
        arg = np.where(better, chunk[k], arg)
        stacked = vals if prev is None else np.concatenate([prev[None], vals])
        if stacked.shape[0] > 1:
            var = np.maximum(var, np.max(np.abs(np.diff(stacked, axis=0)), axis=0))
        prev = vals[-1]
    shift = scipy.fft.fftshift
    return MaximalResult(
        SpatialField(f.spec, shift(best)),
        shift(var),
        shift(arg),
    )


def maximal_function(f, sched, tau=0.0, m=1):
    """``max_lam |E_lam^{i tau} f(x)|`` over the schedule, as a real field."""
    return maximal_sweep(f, sched, tau, m).field


@dataclass(frozen=True, eq=False)
class ConvergenceProfile:
    lam: np.ndarray
    l2: np.ndarray
    sup: np.ndarray

    def rows(self):
        return list(zip(self.lam.tolist(), self.l2.tolist(), self.sup.tolist()))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["lambda", "l2_restricted", "sup_restricted"])
            for row in self.rows():
                w.writerow([repr(v) for v in row])


def convergence_profile(f, sched, tau=0.0, m=1, rho=1.0, inside=True, strict=False):
    """Restricted L2 and sup norms of ``E_lam^{i tau} f`` along the schedule."""
    sched.check_compatible(f.spec, m)
    mask = scipy.fft.ifftshift(region_mask(f.spec, rho, inside=inside, strict=strict))
    if not mask.any():
        raise FieldError("region contains no grid points")
    weight = f.spec.h**f.spec.dims
    l2, sup = [], []
    for _, vals in iter_partial_integrals(f, sched.values, tau, m):
        sel = np.abs(vals[:, mask])
        l2.append(np.sqrt(np.sum(sel**2, axis=1) * weight))
        sup.append(sel.max(axis=1))
    return ConvergenceProfile(sched.values.copy(), np.concatenate(l2), np.concatenate(sup))
