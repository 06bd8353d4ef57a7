"""Truncated imaginary-order Riesz multipliers of the polyharmonic operator.

For ``m >= 1``, spectral level ``lam > 0`` and real ``tau`` the multiplier is

    sigma(xi) = (1 - |xi|**(2m) / lam) ** (i tau)   if |xi|**(2m) < lam
              = 0                                   otherwise,

computed as ``exp(i tau log(1 - u))`` with the real logarithm.  ``tau = 0``
gives the indicator of the open ball of radius ``R = lam ** (1/(2m))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field_core import SpectralField

__all__ = [
    "SymbolParams",
    "spectral_level",
    "evaluate_symbol",
    "symbol_of_norm_sq",
    "apply_multiplier",
]


@dataclass(frozen=True)
class SymbolParams:
    """Polyharmonic order ``m``, spectral level ``lam`` and imaginary order ``tau``."""

    m: int
    lam: float
    tau: float = 0.0

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ValueError(f"lam must be positive and finite, got {self.lam!r}")
        if not np.isfinite(self.tau):
            raise ValueError("tau must be finite")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "tau", float(self.tau))

    @classmethod
    def from_radius(cls, m, radius, tau=0.0):
        """Build from the ball radius ``R``; the level is ``R ** (2m)``."""
        return cls(m, float(radius) ** (2 * m), tau)

    @property
    def radius(self):
        return self.lam ** (1.0 / (2 * self.m))


def spectral_level(xi_sq, m):
    """``|xi| ** (2m)`` given ``|xi| ** 2``.

    Every caller that compares a frequency against ``lam`` goes through this
    function so lattice levels and schedule breakpoints round identically.
    """
    return np.asarray(xi_sq, dtype=float) ** m


def symbol_of_norm_sq(p, xi_sq):
    """Multiplier values for an array of squared frequency norms."""
    u = spectral_level(xi_sq, p.m) / p.lam
    inside = u < 1.0
    out = np.zeros(np.shape(u), dtype=np.complex128)
    if p.tau == 0.0:
        out[inside] = 1.0
    else:
        out[inside] = np.exp(1j * p.tau * np.log1p(-u[inside]))
    return out


def evaluate_symbol(p, xi):
    """Multiplier at frequency vector(s) ``xi`` (last axis = components)."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi[None]
    out = symbol_of_norm_sq(p, np.sum(xi * xi, axis=-1))
    return out[()] if out.ndim == 0 else out


def apply_multiplier(p, g):
    """Pointwise product of ``g``'s coefficients with the multiplier."""
    return SpectralField(g.spec, g.coeffs * symbol_of_norm_sq(p, g.spec.freq_sq()))
