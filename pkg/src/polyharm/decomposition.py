"""Smooth radial cutoff, dyadic annular bumps and the transform of the bump.

The cutoff ``phi`` equals 1 on ``[0, a]`` and 0 on ``[b, inf)`` with
``a = (3 - r)/3`` and ``b = 2a``; on ``[a, b]`` it follows a smooth monotone
step.  The annular bump is ``psi(x) = phi(|x|) - phi(2|x|)``, supported in
``a/2 <= |x| <= b``, and ``psi_j(x) = psi(x / 2**j)``.  Summing the bumps
telescopes: ``phi(|x|) + sum_{j<=J} psi_j(x) = phi(|x| / 2**J)``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import make_interp_spline

__all__ = [
    "CutoffFamily",
    "DyadicBump",
    "PsiHatTable",
    "smooth_step",
    "phi",
    "psi",
    "psi_j",
    "psi_radial",
    "psi_j_radial",
    "partition_residual",
    "psi_hat_profile",
    "hankel_transform",
    "sphere_area",
]


def _exp_bump(u):
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _poly_step(order):
    # C^order polynomial smoothstep of degree 2*order + 1
    coef = [math.comb(order + i, i) * math.comb(2 * order + 1, order - i) * (-1) ** i for i in range(order + 1)]

    def half(u):
        acc = np.zeros_like(u)
        for c in reversed(coef):
            acc = acc * u + c
        return acc * u ** (order + 1)

    def step(u):
        # s(u) = 1 - s(1 - u); evaluating near 0 only avoids cancellation at u -> 1
        return np.where(u <= 0.5, half(u), 1.0 - half(1.0 - u))

    return step


def smooth_step(u, profile="exp"):
    """Monotone step on ``[0, 1]`` with ``s(0) = 0``, ``s(1) = 1``, ``s(1/2) = 1/2``.

    ``"exp"`` is ``B(u) / (B(u) + B(1-u))`` with ``B(u) = exp(-1/u)``, which
    is C-infinity with all derivatives vanishing at both ends.  ``"polyK"``
    (K = 1..8) is the C^K polynomial smoothstep, kept for comparisons.
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    if profile == "exp":
        num = _exp_bump(u)
        return num / (num + _exp_bump(1.0 - u))
    if profile.startswith("poly") and profile[4:].isdigit() and 1 <= int(profile[4:]) <= 8:
        return _poly_step(int(profile[4:]))(u)
    raise ValueError(f"unknown transition profile {profile!r}")


@dataclass(frozen=True)
class CutoffFamily:
    """Cutoff geometry for localization radius ``r`` in (0, 3)."""

    r: float = 1.0
    transition_profile: str = "exp"

    def __post_init__(self):
        if not 0 < self.r < 3:
            raise ValueError(f"r must lie in (0, 3), got {self.r!r}")
        smooth_step(0.5, self.transition_profile)
        object.__setattr__(self, "r", float(self.r))

    @property
    def a(self):
        return (3.0 - self.r) / 3.0

    @property
    def b(self):
        return 2.0 * (3.0 - self.r) / 3.0


@dataclass(frozen=True)
class DyadicBump:
    family: CutoffFamily
    j: int

    def __post_init__(self):
        if self.j < 1:
            raise ValueError("j must be >= 1")

    def __call__(self, x):
        return psi_j(self.family, self.j, x)

    def radial(self, rho):
        return psi_j_radial(self.family, self.j, rho)

    @property
    def support(self):
        """Closed annulus ``(inner, outer)`` outside of which the bump vanishes."""
        return self.family.a * 2.0 ** (self.j - 1), self.family.b * 2.0**self.j


def phi(fam, t):
    """Smooth cutoff: 1 for ``t <= a``, 0 for ``t >= b``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("phi is defined for t >= 0 only")
    a, b = fam.a, fam.b
    out = smooth_step((b - t) / (b - a), fam.transition_profile)
    out = np.where(t <= a, 1.0, np.where(t >= b, 0.0, out))
    return out[()] if out.ndim == 0 else out


def _norm(x):
    # scalars are one-dimensional points
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return np.abs(x)
    return np.sqrt(np.sum(x * x, axis=-1))


def psi_radial(fam, rho):
    """``phi(rho) - phi(2 rho)`` for radii ``rho >= 0``."""
    rho = np.asarray(rho, dtype=float)
    return phi(fam, rho) - phi(fam, 2.0 * rho)


def psi_j_radial(fam, j, rho):
    """``phi(rho / 2**j) - phi(rho / 2**(j-1))`` for radii ``rho >= 0``."""
    if j < 1:
        raise ValueError("j must be >= 1")
    rho = np.asarray(rho, dtype=float)
    return phi(fam, rho / 2.0**j) - phi(fam, rho / 2.0 ** (j - 1))


def psi(fam, x):
    """``phi(|x|) - phi(2|x|)`` at points ``x`` (components on the last axis)."""
    return psi_radial(fam, _norm(x))


def psi_j(fam, j, x):
    """``psi(x / 2**j)`` at points ``x`` (components on the last axis)."""
    return psi_j_radial(fam, j, _norm(x))


def partition_residual(fam, x, J):
    """``phi(|x|) + sum_{j=1..J} psi_j(x) - phi(|x| / 2**J)``; zero up to rounding."""
    if J < 1:
        raise ValueError("J must be >= 1")
    rho = _norm(x)
    total = phi(fam, rho)
    for j in range(1, J + 1):
        total = total + psi_j_radial(fam, j, rho)
    return total - phi(fam, rho / 2.0**J)


def sphere_area(dims):
    """Surface measure of the unit sphere in R^dims (2 for dims = 1)."""
    return 2.0 * math.pi ** (dims / 2) / math.gamma(dims / 2)


def hankel_transform(func, support, dims, rho, ds):
    """Unitary Fourier transform of a radial function at radii ``rho``.

    ``(2 pi)^(-N/2) int f(|x|) exp(-i x.xi) dx`` reduces to
    ``rho^(1 - N/2) int f(s) s^(N/2) J_{N/2-1}(s rho) ds``.  The s-integral is
    a trapezoid sum with step ``ds`` over ``support = (lo, hi)``; for smooth
    ``f`` vanishing to all orders at both ends this converges spectrally.
    """
    lo, hi = support
    count = int(np.ceil((hi - lo) / ds))
    s = np.linspace(lo, hi, count + 1)
    w = np.full(s.size, (hi - lo) / count)
    w[[0, -1]] *= 0.5
    fw = func(s) * w
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.empty(rho.size)
    step = max(1, 2**22 // s.size)
    for start in range(0, rho.size, step):
        q = rho[start:start + step, None]
        z = q * s[None, :]
        if dims == 1:
            kern = math.sqrt(2 / math.pi) * np.cos(z)
        elif dims == 3:
            kern = math.sqrt(2 / math.pi) * s**2 * np.sinc(z / math.pi)
        elif dims == 2:
            kern = s * special.j0(z)
        else:
            nu = dims / 2 - 1
            with np.errstate(invalid="ignore", divide="ignore"):
                kern = np.where(z > 0, s ** (dims / 2) * special.jv(nu, z) * q ** (1 - dims / 2),
                                s ** (dims - 1) / (2**nu * math.gamma(nu + 1)))
        out[start:start + step] = kern @ fw
    return out


@dataclass(frozen=True, eq=False)
class PsiHatTable:
    """Radial samples of the bump transform with a quintic-spline evaluator.

    ``rho`` is uniform with spacing ``drho`` on ``[0, rho_max]``; ``values``
    are real (``psi`` is real and radial).  Beyond ``rho_max`` the transform
    is treated as zero.
    """

    family: CutoffFamily
    dims: int
    rho: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_spline", make_interp_spline(self.rho, self.values, k=5))
        abs_cum = _cumtrapz(np.abs(self.values) * self.rho ** (self.dims - 1), self.rho)
        object.__setattr__(self, "_abs_cum", abs_cum)

    @property
    def rho_max(self):
        return float(self.rho[-1])

    @property
    def drho(self):
        return float(self.rho[1] - self.rho[0])

    def __call__(self, rho):
        rho = np.abs(np.asarray(rho, dtype=float))
        out = self._spline(np.minimum(rho, self.rho_max))
        return np.where(rho <= self.rho_max, out, 0.0)

    def psi_hat_j(self, j, zeta):
        """Transform of ``psi_j`` via dilation: ``2**(jN) psi_hat(2**j zeta)``."""
        return 2.0 ** (j * self.dims) * self(2.0**j * np.asarray(zeta, dtype=float))

    def abs_integral_outside(self, y0):
        """``int_{|y| > y0} |psi_hat(y)| dy`` over R^N (trapezoid on the table)."""
        y0 = np.asarray(y0, dtype=float)
        total = self._abs_cum[-1]
        inner = np.interp(np.clip(y0, 0, self.rho_max), self.rho, self._abs_cum)
        return sphere_area(self.dims) * (total - inner)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rho", "psi_hat_real"])
            for q, v in zip(self.rho.tolist(), self.values.tolist()):
                w.writerow([repr(q), repr(v)])


def _cumtrapz(y, x):
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


MAX_TABLE_POINTS = 200_000


def psi_hat_profile(fam, dims, rho_max=1200.0, samples_per_unit=32, alias_guard=None):
    """Tabulate the transform of ``psi`` on ``[0, rho_max]``.

    The radial integral uses a trapezoid rule in ``s`` whose step keeps the
    aliased image at ``2 pi / ds - rho`` beyond ``alias_guard`` (default
    ``1500 / a``), where the transform of the default profile is below
    double-precision roundoff.
    """
    if dims not in (1, 2, 3):
        raise ValueError("dims must be 1, 2 or 3")
    if samples_per_unit < 16:
        raise ValueError("need at least 16 samples per unit of rho")
    count = int(np.ceil(rho_max * samples_per_unit))
    if count + 1 > MAX_TABLE_POINTS:
        raise ValueError(f"table of {count + 1} points exceeds cap {MAX_TABLE_POINTS}")
    return _cached_table(fam, int(dims), float(rho_max), int(samples_per_unit),
                         None if alias_guard is None else float(alias_guard))


@functools.lru_cache(maxsize=32)
def _cached_table(fam, dims, rho_max, samples_per_unit, alias_guard):
    count = int(np.ceil(rho_max * samples_per_unit))
    rho = np.linspace(0.0, count / samples_per_unit, count + 1)
    guard = alias_guard if alias_guard is not None else 1500.0 / fam.a
    ds = 2 * np.pi / (rho[-1] + guard)
    vals = hankel_transform(lambda s: psi_radial(fam, s), (fam.a / 2, fam.b), dims, rho, ds)
    rho.flags.writeable = False
    vals.flags.writeable = False
    return PsiHatTable(fam, dims, rho, vals)
