"""Localized multipliers ``m_t^{tau,j}`` and numerical audits of their bounds.

The lab uses the *radius* parametrization: ``t`` is the radius of the
spectral ball, so the truncated symbol is
``sigma_t(eta) = (1 - (|eta|/t)**(2m))**(i tau)`` for ``|eta| < t`` and the
spectral level of the expansion module is ``lam = t**(2m)``.  The multiplier
of the localized kernel ``Theta_t * psi_j`` is the frequency-side convolution

    m(xi) = (2 pi)^(-N/2) int sigma_t(eta) psi_hat_j(xi - eta) d eta,

which is radial in ``xi``.  ``dist`` always means ``| |xi| - t |`` and the
decay variable is ``u = 1 + dist * 2**j``.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import _quadrature as quad
from .decomposition import CutoffFamily, psi_hat_profile, sphere_area
from .symbols import SymbolParams, symbol_of_norm_sq

__all__ = [
    "ResolutionError",
    "FiniteDifferenceError",
    "MultiplierSample",
    "DecaySweep",
    "DecayFit",
    "DerivativeCheck",
    "table_for",
    "compute_multiplier",
    "sample_multiplier",
    "lemma21_check",
    "lemma22_decay_fit",
    "lemma23_derivative_check",
    "lemma23_scaling",
    "fit_eps0",
    "decay_envelope",
]

DEFAULT_RHO_MAX = 1200.0
# psi_hat tail level (relative to its peak) that may be dropped beyond the table
TAIL_TOLERANCE = 1e-12


class ResolutionError(ValueError):
    """The radial table cannot resolve the requested multiplier evaluation."""


class FiniteDifferenceError(ValueError):
    """Central differences did not converge under step halving."""


def table_for(fam, dims=1, rho_max=DEFAULT_RHO_MAX):
    return psi_hat_profile(fam, dims, rho_max=rho_max)


def _sigma(eta_abs, t, tau, m):
    return symbol_of_norm_sq(SymbolParams.from_radius(m, t, tau), np.asarray(eta_abs) ** 2)


def _check_table(table, j, t, xi):
    if table.drho * 2.0**j > 2.0**j / 16:
        raise ResolutionError(f"table spacing {table.drho} gives < 16 samples per unit of u")
    hi = 2.0**j * (xi + t)
    if hi > table.rho_max:
        tail = np.abs(table.values[-max(2, table.values.size // 20):]).max()
        if tail > TAIL_TOLERANCE * np.abs(table.values).max():
            raise ResolutionError(
                f"need psi_hat up to {hi:.4g}, table stops at {table.rho_max:.4g} "
                f"with tail {tail:.2e}; enlarge rho_max"
            )


def _multiplier_1d(table, j, tau, m, t, xi):
    breaks = [-t, t] + ([xi] if -t < xi < t else [])
    # the symbol has a (t - |eta|)**(i tau) branch point at the ends; grade at
    # xi too so a break just inside the end is resolved from both sides
    singular = (-t, t, xi) if tau != 0 else ()
    nodes, w = quad.piecewise_rule(breaks, 2.0**-j, singular)
    vals = _sigma(np.abs(nodes), t, tau, m) * table.psi_hat_j(j, xi - nodes)
    return complex(np.dot(w, vals)) / math.sqrt(2 * math.pi)


def _angular_weight(rho, xi, t, tau, m, dims):
    """Integral of ``sigma_t(xi - rho * omega)`` over unit vectors ``omega``."""
    area = sphere_area(dims)
    if xi == 0:
        return area * _sigma(rho, t, tau, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        c0 = (xi * xi + rho * rho - t * t) / (2 * xi * rho)
    c0 = np.clip(np.nan_to_num(c0, nan=-1.0), -1.0, 1.0)
    if tau == 0:
        if dims == 2:
            return 2.0 * np.arccos(c0) + 0j
        return 2 * math.pi * (1.0 - c0) + 0j
    theta0 = np.arccos(c0)
    v, wv = quad.rule(quad.panel_edges(0.0, 1.0, 0.125, grade_hi=True))
    theta = theta0[:, None] * v[None, :]
    q = xi * xi + rho[:, None] ** 2 - 2 * xi * rho[:, None] * np.cos(theta)
    s = _sigma(np.sqrt(np.maximum(q, 0.0)), t, tau, m)
    jac = 2.0 if dims == 2 else 2 * math.pi * np.sin(theta)
    return theta0 * np.sum(wv[None, :] * jac * s, axis=1)


def _multiplier_nd(table, j, tau, m, t, xi, dims):
    scale = 2.0**j
    lo, hi = scale * max(xi - t, 0.0), scale * (xi + t)
    kinks = [scale * abs(xi - t), hi]
    nodes, w = quad.piecewise_rule([lo, hi] + kinks, 1.0, kinks)
    W = _angular_weight(nodes / scale, xi, t, tau, m, dims)
    vals = table(nodes) * nodes ** (dims - 1) * W
    return complex(np.dot(w, vals)) / (2 * math.pi) ** (dims / 2)


def compute_multiplier(j, tau, m_order, t, xi_radius, fam=None, dims=1, table=None):
    """``m_t^{tau,j}(xi)`` for ``|xi| = xi_radius`` by radial-table quadrature.

    Parameters
    ----------
    j : int
        Dyadic index, ``j >= 1``.
    tau : float
        Imaginary Riesz order.
    m_order : int
        Polyharmonic order ``m`` (enters only through the symbol's shape).
    t : float
        Ball radius, ``t > 0``.
    xi_radius : float
        ``|xi| >= 0``.
    fam : CutoffFamily, optional
        Defaults to ``CutoffFamily()`` (``r = 1``, exp profile).
    dims : int
        Ambient dimension (1, 2 or 3).
    table : PsiHatTable, optional
        Precomputed transform table of ``psi`` for ``dims``.
    """
    if j < 1 or t <= 0 or xi_radius < 0:
        raise ValueError("need j >= 1, t > 0, xi_radius >= 0")
    if table is None:
        table = table_for(fam or CutoffFamily(), dims)
    if table.dims != dims:
        raise ValueError(f"table built for dims={table.dims}, requested dims={dims}")
    _check_table(table, j, t, xi_radius)
    if dims == 1:
        return _multiplier_1d(table, j, float(tau), int(m_order), float(t), float(xi_radius))
    return _multiplier_nd(table, j, float(tau), int(m_order), float(t), float(xi_radius), dims)


@dataclass(frozen=True, eq=False)
class MultiplierSample:
    j: int
    tau: float
    m_order: int
    t_values: np.ndarray
    xi_radii: np.ndarray
    values: np.ndarray  # shape (len(t_values), len(xi_radii))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "tau", "t", "xi_radius", "re", "im"])
            for a, t in enumerate(self.t_values):
                for b, xi in enumerate(self.xi_radii):
                    v = self.values[a, b]
                    w.writerow([self.j, repr(self.tau), repr(float(t)), repr(float(xi)),
                                repr(float(v.real)), repr(float(v.imag))])


def sample_multiplier(j, tau, m_order, t_values, xi_radii, fam=None, dims=1, table=None, workers=1):
    """Fill the ``(t, |xi|)`` matrix of multiplier values.

    Entries are independent; ``workers > 1`` evaluates them on a thread pool.
    The result does not depend on ``workers``.
    """
    if table is None:
        table = table_for(fam or CutoffFamily(), dims)
    t_values = np.sort(np.asarray(t_values, dtype=float))
    xi_radii = np.sort(np.asarray(xi_radii, dtype=float))
    pairs = [(t, xi) for t in t_values for xi in xi_radii]

    def one(pair):
        return compute_multiplier(j, tau, m_order, pair[0], pair[1], dims=dims, table=table)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            flat = list(pool.map(one, pairs))
    else:
        flat = [one(pair) for pair in pairs]
    vals = np.array(flat, dtype=complex).reshape(t_values.size, xi_radii.size)
    return MultiplierSample(j, float(tau), int(m_order), t_values, xi_radii, vals)


def lemma21_check(j, t, xi_radius, fam=None, dims=1, table=None):
    """Return ``(|m_t^j(xi)|, int_{|y| > dist 2^j} |psi_hat(y)| dy)`` at ``tau = 0``."""
    if table is None:
        table = table_for(fam or CutoffFamily(), dims)
    lhs = abs(compute_multiplier(j, 0.0, 1, t, xi_radius, dims=dims, table=table))
    rhs = float(table.abs_integral_outside(abs(xi_radius - t) * 2.0**j))
    return lhs, rhs


@dataclass(frozen=True)
class DecaySweep:
    """Sampling plan for the decay audit.

    For each ball radius in ``t_values`` the frequency radius runs on both
    sides of the sphere with ``u`` stepping by ``du`` up to ``u_max`` (the
    inner side stops at ``|xi| = 0``).
    """

    t_values: tuple = (2.0, 4.0)
    u_max: float = 1200.0
    du: float = 0.5
    fit_range: tuple = (10.0, 1000.0)
    bins_per_decade: int = 8


@dataclass(frozen=True, eq=False)
class DecayFit:
    """Power-law summary ``envelope(u) ~ C / u**n`` of the multiplier decay.

    ``fitted_C`` is the envelope at the normalization bin ``u ~ 1``;
    ``fitted_n`` and ``intercept`` come from a least-squares line through
    ``(log u, log envelope)`` over ``range``; ``residual`` is the largest
    absolute deviation from that line in natural-log units.
    """

    fitted_C: float
    fitted_n: float
    residual: float
    range: tuple
    intercept: float = 0.0
    points: int = 0
    j: int = 0
    tau: float = 0.0
    u: np.ndarray = field(default=None, repr=False)
    envelope: np.ndarray = field(default=None, repr=False)

    def bound_constant(self, n):
        """Smallest ``C`` with ``envelope(u) <= C / u**n`` at every bin."""
        return float(np.max(self.envelope * self.u**n))

    def csv_row(self):
        return [self.j, repr(self.tau), repr(self.fitted_C), repr(self.fitted_n), repr(self.residual)]


def decay_envelope(u, values, bins_per_decade, u_max):
    """Binned, right-to-left running maximum of ``|values|`` against ``u``."""
    decades = math.log10(u_max)
    nb = int(math.ceil(decades * bins_per_decade))
    edges = 10.0 ** (np.arange(nb + 1) / bins_per_decade)
    idx = np.searchsorted(edges, u, side="right") - 1
    env = np.zeros(nb)
    np.maximum.at(env, idx[(idx >= 0) & (idx < nb)], np.abs(values)[(idx >= 0) & (idx < nb)])
    centers = np.sqrt(edges[:-1] * edges[1:])
    filled = env > 0
    centers, env = centers[filled], env[filled]
    env = np.maximum.accumulate(env[::-1])[::-1]
    return centers, env


def lemma22_decay_fit(j, tau, m_order=1, fam=None, sweep=None, dims=1, table=None):
    """Fit the decay of ``|m_t^{tau,j}|`` in ``u = 1 + dist * 2**j``."""
    sweep = sweep or DecaySweep()
    if table is None:
        table = table_for(fam or CutoffFamily(), dims,
                          rho_max=max(DEFAULT_RHO_MAX, sweep.u_max + 2.0 ** (j + 1) * max(sweep.t_values) + 8))
    lo, hi = sweep.fit_range
    if sweep.u_max < hi:
        raise ValueError(f"sweep reaches u = {sweep.u_max}, fit needs {hi}")
    us, vals = [], []
    steps = np.arange(0.0, sweep.u_max - 1 + 1e-9, sweep.du)
    for t in sweep.t_values:
        outer = t + steps / 2.0**j
        inner = t - steps[1:] / 2.0**j
        inner = inner[inner >= 0]
        for xi in np.concatenate([outer, inner]):
            us.append(1 + abs(xi - t) * 2.0**j)
            vals.append(compute_multiplier(j, tau, m_order, t, xi, dims=dims, table=table))
    us, vals = np.array(us), np.array(vals)
    centers, env = decay_envelope(us, vals, sweep.bins_per_decade, sweep.u_max)
    sel = (centers >= lo) & (centers <= hi)
    if sel.sum() < 12:
        raise ValueError("fewer than 12 envelope points in the fit range")
    X, Y = np.log(centers[sel]), np.log(env[sel])
    slope, intercept = np.polyfit(X, Y, 1)
    residual = float(np.max(np.abs(Y - (intercept + slope * X))))
    return DecayFit(float(env[0]), float(-slope), residual, (lo, hi), float(intercept),
                    int(sel.sum()), int(j), float(tau), centers, env)


@dataclass(frozen=True)
class DerivativeCheck:
    lhs: float
    rhs_shape: float
    lhs_half_step: float
    dt: float


def lemma23_derivative_check(j, tau, m_order, fam, t, xi_radius, dt=None, n=4.0, eps0=1.0,
                             dims=1, table=None, floor=1e-9):
    """Central-difference ``|d/dt m_t^{tau,j}(xi)|`` against ``2**j / (1 + eps0 dist 2**j)**n``.

    The difference is repeated with ``dt / 2``; if the two disagree by more
    than 1 % (relative to ``max(lhs, floor * 2**j)``) the step is rejected.
    """
    if t <= 1:
        raise ValueError("the derivative audit is stated for t > 1")
    if table is None:
        table = table_for(fam or CutoffFamily(), dims)
    dt = 1e-4 * t if dt is None else float(dt)

    def diff(h):
        up = compute_multiplier(j, tau, m_order, t + h, xi_radius, dims=dims, table=table)
        down = compute_multiplier(j, tau, m_order, t - h, xi_radius, dims=dims, table=table)
        return abs(up - down) / (2 * h)

    lhs, half = diff(dt), diff(dt / 2)
    if abs(lhs - half) > 0.01 * max(lhs, floor * 2.0**j):
        raise FiniteDifferenceError(f"dt={dt:g}: {lhs:.6e} vs {half:.6e} after halving")
    shape = 2.0**j / (1 + eps0 * abs(xi_radius - t) * 2.0**j) ** n
    return DerivativeCheck(lhs, shape, half, dt)


def fit_eps0(samples, n):
    """Fit ``lhs ~ C 2**j / (1 + eps0 * dist 2**j)**n`` with ``eps0`` in (0, 1].

    ``samples`` is an iterable of ``(j, dist_times_2j, lhs)``; returns
    ``(eps0, C)`` from a log-domain least-squares fit.
    """
    s = np.array([row for row in samples if row[2] > 0], dtype=float)
    if s.shape[0] < 2:
        raise ValueError("need at least two positive samples")
    jj, y, lhs = s[:, 0], s[:, 1], s[:, 2]

    def resid(p):
        logc, eps = p
        return logc + jj * math.log(2) - n * np.log1p(eps * y) - np.log(lhs)

    sol = least_squares(resid, x0=[0.0, 0.5], bounds=([-np.inf, 1e-6], [np.inf, 1.0]))
    return float(sol.x[1]), float(math.exp(sol.x[0]))


def lemma23_scaling(j_values, tau, m_order, t, offsets=None, fam=None, dims=1, table=None):
    """Peak t-derivative per ``j`` at matched rescaled distance, and consecutive ratios.

    For each ``j`` the frequency radius runs over ``t + c / 2**j`` for the
    signed offsets ``c`` (default 21 points in ``[-1, 1]``), so every ``j``
    sees the same values of ``(|xi| - t) * 2**j``.  Returns ``(peaks,
    ratios)`` with ``peaks[k] = max_c |d_t m^{j_k}|`` and
    ``ratios[k] = peaks[k+1] / peaks[k]``; a ``2**j`` law gives ratios near 2
    for consecutive ``j``.  A single offset gives the pointwise ratio.
    """
    if table is None:
        table = table_for(fam or CutoffFamily(), dims)
    offsets = np.linspace(-1.0, 1.0, 21) if offsets is None else np.atleast_1d(np.asarray(offsets, float))
    peaks = np.array([
        max(lemma23_derivative_check(j, tau, m_order, None, t, t + c / 2.0**j, dims=dims, table=table).lhs
            for c in offsets)
        for j in j_values
    ])
    return peaks, peaks[1:] / peaks[:-1]
