"""Brute-force reference computations.

Nothing here calls the transform, symbol, sweep or quadrature code it is used
to check: every oracle rebuilds its lattice, symbol and integration rule from
scratch with plain numpy loops and sums.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "OracleBudget",
    "BudgetExceeded",
    "OracleResolutionError",
    "direct_partial_sum",
    "breakpoint_maximum",
    "kernel_profile",
    "spaceside_localized_kernel",
    "lattice_integral",
    "direct_dft",
]


class BudgetExceeded(RuntimeError):
    pass


class OracleResolutionError(ValueError):
    pass


def _check_resolution(h, band, scale):
    # trapezoid sums of smooth compact integrands need a few points per oscillation
    if h * band > math.pi / 2:
        raise OracleResolutionError(f"step {h:g} cannot resolve frequencies up to {band:g}; use h <= {math.pi / (2 * band):g}")
    if h > scale / 16:
        raise OracleResolutionError(f"step {h:g} is coarse against the bump scale {scale:g}")


@dataclass(frozen=True)
class OracleBudget:
    max_points: int = 4096
    max_seconds: float = 120.0

    def __post_init__(self):
        if self.max_points <= 0 or self.max_seconds <= 0:
            raise ValueError("budget limits must be positive")

    def check_points(self, count, what):
        if count > self.max_points:
            raise BudgetExceeded(f"{what}: {count} points exceeds budget of {self.max_points}")

    def clock(self):
        start = time.monotonic()

        def check(what):
            if time.monotonic() - start > self.max_seconds:
                raise BudgetExceeded(f"{what}: exceeded {self.max_seconds} s")

        return check


def _lattice(spec):
    ks = np.arange(spec.n) - spec.n // 2
    grids = np.meshgrid(*([ks] * spec.dims), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _own_symbol(k_sq, dxi, lam, tau, m):
    level = (dxi * dxi * k_sq) ** m
    out = np.zeros(k_sq.shape, dtype=complex)
    inside = level < lam
    frac = level[inside] / lam
    out[inside] = np.cos(tau * np.log(1 - frac)) + 1j * np.sin(tau * np.log(1 - frac))
    return out


def direct_partial_sum(f, p, budget=None):
    """``E_lam^{i tau} f`` by explicit analysis and synthesis sums."""
    budget = budget or OracleBudget()
    spec = f.spec
    budget.check_points(spec.size, "direct_partial_sum")
    check = budget.clock()
    k = _lattice(spec)
    vals = f.samples.ravel()
    n, N = spec.n, spec.dims
    sym = _own_symbol(np.sum(k * k, axis=1).astype(float), 2 * math.pi / spec.L, p.lam, p.tau, p.m)
    keep = np.nonzero(sym)[0]
    coeffs = np.zeros(keep.size, dtype=complex)
    for a, idx in enumerate(keep):
        phase = 2 * math.pi * ((k @ k[idx]) % n) / n
        coeffs[a] = np.sum(vals * np.exp(-1j * phase)) / n ** (N / 2) * sym[idx]
        if a % 256 == 0:
            check("direct_partial_sum")
    out = np.zeros(spec.size, dtype=complex)
    for a, idx in enumerate(keep):
        phase = 2 * math.pi * ((k @ k[idx]) % n) / n
        out += coeffs[a] * np.exp(1j * phase)
    out /= n ** (N / 2)
    return type(f)(spec, out.reshape(spec.shape))


def breakpoint_maximum(f, m, budget=None):
    """``max_lam |E_lam f|`` at ``tau = 0`` from one direct sum per lattice shell.

    Shells are the distinct values of ``sum k**2``; ``E_lam f`` for ``lam``
    just above a shell's level keeps every shell up to and including it.
    """
    budget = budget or OracleBudget()
    spec = f.spec
    budget.check_points(spec.size, "breakpoint_maximum")
    check = budget.clock()
    k = _lattice(spec)
    n, N = spec.n, spec.dims
    vals = f.samples.ravel()
    k_sq = np.sum(k * k, axis=1)
    current = np.zeros(spec.size, dtype=complex)
    best = np.zeros(spec.size)
    for shell in np.unique(k_sq):
        for idx in np.nonzero(k_sq == shell)[0]:
            phase = 2 * math.pi * ((k @ k[idx]) % n) / n
            c = np.sum(vals * np.exp(-1j * phase))
            current = current + c * np.exp(1j * phase) / n**N
        best = np.maximum(best, np.abs(current))
        check("breakpoint_maximum")
    return best.reshape(spec.shape)


def _sigma_w(w, tau, m):
    # symbol along eta = t (1 - exp(-w)):  (1 - (1 - e^-w)^(2m))^(i tau)
    with np.errstate(divide="ignore"):
        base = -np.expm1(2 * m * np.log1p(-np.exp(-w)))
        logb = np.log(base)
    return np.exp(1j * tau * logb)


def kernel_profile(r, t, tau, m, dims, w_max=40.0, w_step=2e-3):
    """Radial kernel ``Theta(|x|) = (2 pi)^-N int_{|eta|<t} sigma(eta) e^{i x.eta} d eta``.

    ``tau = 0`` uses the closed forms ``sin(t r)/(pi r)`` (N = 1) and
    ``t J1(t r)/(2 pi r)`` (N = 2).  Otherwise the radial integral is mapped by
    ``eta = t (1 - e^-w)`` and summed with Simpson's rule on ``[0, w_max]``.
    """
    r = np.asarray(r, dtype=float)
    if tau == 0:
        if dims == 1:
            return t / math.pi * np.sinc(t * r / math.pi)
        if dims == 2:
            safe = np.where(r > 0, r, 1.0)
            return np.where(r > 0, t * special.j1(t * safe) / (2 * math.pi * safe), t * t / (4 * math.pi))
        raise ValueError("closed-form kernels exist for dims 1 and 2 only")
    count = int(math.ceil(w_max / w_step))
    count += count % 2
    w = np.linspace(0.0, w_max, count + 1)
    simpson = np.ones(count + 1)
    simpson[1:-1:2], simpson[2:-1:2] = 4.0, 2.0
    simpson *= (w[1] - w[0]) / 3
    eta = t * -np.expm1(-w)
    jac = t * np.exp(-w)
    weight = simpson * jac * _sigma_w(w, tau, m)
    out = np.empty(r.shape, dtype=complex)
    flat_r, flat_out = r.ravel(), out.ravel()
    for start in range(0, flat_r.size, 256):
        rr = flat_r[start:start + 256, None]
        if dims == 1:
            kern = np.cos(rr * eta[None, :]) / math.pi
        elif dims == 2:
            kern = special.j0(rr * eta[None, :]) * eta[None, :] / (2 * math.pi)
        else:
            raise ValueError("dims must be 1 or 2")
        flat_out[start:start + 256] = kern @ weight
    return flat_out.reshape(r.shape)


def _psi_j_own(fam, j, rho):
    a, b = fam.a, fam.b

    def step(u):
        u = np.clip(u, 0.0, 1.0)
        with np.errstate(divide="ignore"):
            p = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
            q = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1 - u, 1.0)), 0.0)
        return p / (p + q)

    def cut(s):
        return np.where(s <= a, 1.0, np.where(s >= b, 0.0, step((b - s) / (b - a))))

    if fam.transition_profile != "exp":
        raise ValueError("the space-side oracle implements the exp profile only")
    return cut(rho / 2.0**j) - cut(rho / 2.0 ** (j - 1))


def spaceside_localized_kernel(j, tau, m_order, t, fam, xi_points, dims=1, h=None, budget=None):
    """Multiplier of ``Theta_t^{i tau} psi_j`` by transforming the spatial product.

    Parameters
    ----------
    xi_points : array_like
        Frequencies; shape ``(K,)`` for ``dims = 1`` or ``(K, 2)`` for ``dims = 2``.
    h : float, optional
        Spatial step of the trapezoid grid over the support of ``psi_j``.

    Returns
    -------
    values : ndarray of complex, shape (K,)
        ``m(xi) = (2 pi)^(N/2) FT[Theta psi_j](xi) = int Theta psi_j e^{-i x.xi} dx``.
    grid_r, theta : ndarray
        Radii at which the kernel was tabulated and the kernel values there.
    """
    budget = budget or OracleBudget(max_points=4_000_000)
    check = budget.clock()
    outer = fam.b * 2.0**j
    inner = fam.a * 2.0 ** (j - 1)
    xi_points = np.asarray(xi_points, dtype=float)
    if dims == 1:
        h = h or min(0.01, math.pi / (8 * (t + np.max(np.abs(xi_points)) + 1)))
        _check_resolution(h, t + np.max(np.abs(xi_points)) + 1, outer - inner)
        x = np.arange(inner, outer + h, h)
        budget.check_points(x.size, "spaceside kernel")
        theta = kernel_profile(x, t, tau, m_order, 1)
        prod = theta * _psi_j_own(fam, j, x) * h
        vals = 2 * np.array([np.sum(prod * np.cos(x * xi)) for xi in np.ravel(xi_points)])
        check("spaceside kernel")
        return vals, x, theta
    if dims == 2:
        h = h or min(0.02, math.pi / (4 * (t + np.max(np.linalg.norm(xi_points, axis=-1)) + 1)))
        _check_resolution(h, t + np.max(np.linalg.norm(xi_points, axis=-1)) + 1, outer - inner)
        ax = np.arange(-math.ceil(outer / h), math.ceil(outer / h) + 1) * h
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        R = np.hypot(X, Y)
        sel = (R > inner) & (R < outer)
        budget.check_points(int(sel.sum()), "spaceside kernel")
        rs = R[sel]
        theta = kernel_profile(rs, t, tau, m_order, 2)
        prod = theta * _psi_j_own(fam, j, rs) * h * h
        xs, ys = X[sel], Y[sel]
        vals = np.array([np.sum(prod * np.exp(-1j * (xs * q[0] + ys * q[1]))) for q in xi_points])
        check("spaceside kernel")
        return vals, rs, theta
    raise ValueError("dims must be 1 or 2")


def lattice_integral(func, dims, h, half_width):
    """Cartesian lattice sum ``h**N sum func(|x_k|)`` over ``[-half_width, half_width]^N``."""
    ax = np.arange(-math.ceil(half_width / h), math.ceil(half_width / h) + 1) * h
    grids = np.meshgrid(*([ax] * dims), indexing="ij", sparse=True)
    rho = np.sqrt(sum(g * g for g in grids))
    return float(np.sum(func(rho)) * h**dims)


def direct_dft(f, budget=None):
    """Unitary forward coefficients by explicit DFT matrices applied axis by axis.

    ``W[a, b] = exp(-2 pi i k_a k_b / n) / sqrt(n)`` with centered indices;
    the cost is ``O(n**(N+1))`` and no fast transform is involved.
    """
    budget = budget or OracleBudget()
    spec = f.spec
    budget.check_points(spec.size, "direct_dft")
    n = spec.n
    ks = np.arange(n) - n // 2
    W = np.exp(-2j * math.pi * (np.outer(ks, ks) % n) / n) / math.sqrt(n)
    out = np.asarray(f.samples, dtype=complex)
    for axis in range(spec.dims):
        out = np.moveaxis(np.tensordot(W, out, axes=([1], [axis])), 0, axis)
    return out
