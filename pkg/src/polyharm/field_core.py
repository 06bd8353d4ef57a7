"""Sampled fields on periodized N-dimensional cubes and their unitary transforms.

Conventions
-----------
A :class:`GridSpec` with ``dims=N``, ``n`` samples per axis and period ``L``
models the cube ``[-L/2, L/2)^N``.  Along every axis the sample with array
index ``i`` (``0 <= i < n``) sits at ``x = (i - n/2) * h`` with ``h = L/n``,
and the frequency with array index ``i`` is ``xi = 2*pi*(i - n/2)/L``.  Both
spatial and spectral arrays are therefore stored in *centered* order, the
index-to-lattice map being ``k = i - n/2`` for ``k in [-n/2, n/2)``.

The forward transform is the unitary DFT

    coeffs[k] = n**(-N/2) * sum_x f(x) exp(-i <x, xi_k>)

so ``||coeffs||_2 == ||samples||_2`` exactly in exact arithmetic.  For ``f``
supported inside the cube the continuum transform
``(2 pi)^(-N/2) int f(x) exp(-i <x, xi>) dx`` at ``xi_k`` equals
``lattice_weight * coeffs[k]`` up to quadrature error, where

    lattice_weight = (L * h / (2 pi)) ** (N/2).

The inverse transform ``f(x) = n**(-N/2) * sum_k coeffs[k] exp(i <x, xi_k>)``
is the exact inverse.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft

__all__ = [
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "FieldError",
    "forward_transform",
    "inverse_transform",
    "direct_transform_reference",
    "restricted_l2_norm",
    "save_field",
    "load_field",
    "fft_workers",
]

MAX_DIMS = 3
MAX_POINTS = 2**24
DIRECT_TRANSFORM_CAP = 4096

_MAGIC = b"PHFIELD1"
_HEADER = struct.Struct("<8sIId8x")  # 32 bytes


class FieldError(ValueError):
    """Raised for malformed grids or fields."""


def fft_workers():
    """Thread count for scipy.fft, read from ``POLYHARM_THREADS`` (0 = auto)."""
    raw = os.environ.get("POLYHARM_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise FieldError(f"POLYHARM_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise FieldError("POLYHARM_THREADS must be >= 0")
    return -1 if value == 0 else value


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[-L/2, L/2)^dims`` with ``n`` points per axis."""

    dims: int
    n: int
    L: float
    max_points: int = field(default=MAX_POINTS, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.dims, (int, np.integer)) or not 1 <= self.dims <= MAX_DIMS:
            raise FieldError(f"dims must be an integer in [1, {MAX_DIMS}], got {self.dims!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 4 or self.n % 2:
            raise FieldError(f"n must be an even integer >= 4, got {self.n!r}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise FieldError(f"L must be positive and finite, got {self.L!r}")
        if self.n**self.dims > self.max_points:
            raise FieldError(
                f"grid has {self.n ** self.dims} points, cap is {self.max_points}"
            )
        object.__setattr__(self, "dims", int(self.dims))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self):
        return self.L / self.n

    @property
    def shape(self):
        return (self.n,) * self.dims

    @property
    def size(self):
        return self.n**self.dims

    @property
    def dxi(self):
        """Frequency lattice spacing ``2 pi / L``."""
        return 2 * np.pi / self.L

    @property
    def lattice_weight(self):
        """Factor mapping unitary DFT coefficients to continuum transform values."""
        return (self.L * self.h / (2 * np.pi)) ** (self.dims / 2)

    def indices(self):
        """Integer lattice indices ``k = i - n/2`` along one axis."""
        return np.arange(self.n) - self.n // 2

    def axis(self):
        return self.indices() * self.h

    def freq_axis(self):
        return self.indices() * self.dxi

    def coords(self):
        """Tuple of ``dims`` broadcastable coordinate arrays (sparse mesh)."""
        return np.meshgrid(*([self.axis()] * self.dims), indexing="ij", sparse=True)

    def radius(self):
        """``|x|`` at every grid point."""
        return np.sqrt(self.radius_sq())

    def radius_sq(self):
        return sum(c**2 for c in self.coords()) + np.zeros(self.shape)

    def index_sq(self):
        """Exact integer ``sum_i k_i**2`` for every frequency lattice point."""
        k = np.meshgrid(*([self.indices()] * self.dims), indexing="ij", sparse=True)
        return sum(ki.astype(np.int64) ** 2 for ki in k) + np.zeros(self.shape, dtype=np.int64)

    def freq_sq(self):
        """``|xi_k|**2`` at every frequency lattice point."""
        return self.dxi**2 * self.index_sq()

    def nyquist_index_sq(self):
        """Smallest ``sum k**2`` that is *not* symmetric on the grid (``(n/2)**2``)."""
        return (self.n // 2) ** 2


def _as_field_array(spec, values, what):
    arr = np.array(values, dtype=np.complex128, copy=True)
    if arr.size != spec.size:
        raise FieldError(f"{what} has {arr.size} values, grid needs {spec.size}")
    arr = arr.reshape(spec.shape)
    if not np.all(np.isfinite(arr)):
        raise FieldError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpatialField:
    """Complex samples ``f(x_k)`` on a :class:`GridSpec`, centered order."""

    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_field_array(self.spec, self.samples, "samples"))

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(spec.shape))

    @classmethod
    def from_function(cls, spec, func):
        """Sample ``func(*coords)`` on the grid; ``func`` receives sparse meshes."""
        return cls(spec, np.broadcast_to(func(*spec.coords()), spec.shape))

    def norm(self):
        """Plain Euclidean norm of the sample vector (no quadrature weight)."""
        return float(np.linalg.norm(self.samples))

    def __add__(self, other):
        _check_same_grid(self.spec, other.spec)
        return SpatialField(self.spec, self.samples + other.samples)

    def __sub__(self, other):
        _check_same_grid(self.spec, other.spec)
        return SpatialField(self.spec, self.samples - other.samples)

    def __mul__(self, scalar):
        return SpatialField(self.spec, self.samples * scalar)

    __rmul__ = __mul__

    def roll(self, shift):
        """Translate by an integer lattice vector (periodic)."""
        shift = tuple(int(s) for s in np.broadcast_to(shift, (self.spec.dims,)))
        return SpatialField(self.spec, np.roll(self.samples, shift, axis=tuple(range(self.spec.dims))))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Unitary DFT coefficients indexed by the centered frequency lattice."""

    spec: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_field_array(self.spec, self.coeffs, "coeffs"))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def continuum_values(self):
        """Approximate ``(2 pi)^(-N/2) int f exp(-i x.xi) dx`` at lattice frequencies."""
        return self.coeffs * self.spec.lattice_weight


def _check_same_grid(a, b):
    if a != b:
        raise FieldError(f"grid mismatch: {a} vs {b}")


def _axes(spec):
    return tuple(range(spec.dims))


def forward_transform(f):
    """Unitary forward DFT of a spatial field (centered order in and out)."""
    axes = _axes(f.spec)
    x = scipy.fft.ifftshift(f.samples, axes=axes)
    c = scipy.fft.fftn(x, axes=axes, norm="ortho", workers=fft_workers())
    return SpectralField(f.spec, scipy.fft.fftshift(c, axes=axes))


def inverse_transform(g):
    """Exact inverse of :func:`forward_transform`."""
    axes = _axes(g.spec)
    c = scipy.fft.ifftshift(g.coeffs, axes=axes)
    x = scipy.fft.ifftn(c, axes=axes, norm="ortho", workers=fft_workers())
    return SpatialField(g.spec, scipy.fft.fftshift(x, axes=axes))


def direct_transform_reference(f, cap=DIRECT_TRANSFORM_CAP):
    """Forward transform by explicit summation over all (x, xi) pairs.

    Costs ``O(n**(2N))`` and is refused above ``cap`` grid points.  Shares the
    normalization of :func:`forward_transform` and exists to check it.
    """
    spec = f.spec
    if spec.size > cap:
        raise FieldError(f"direct transform refused: {spec.size} points exceeds cap {cap}")
    k = np.stack([c.ravel() for c in np.meshgrid(*([spec.indices()] * spec.dims), indexing="ij")], axis=1)
    values = f.samples.ravel()
    coeffs = np.empty(spec.size, dtype=np.complex128)
    for start in range(0, spec.size, 256):
        rows = k[start:start + 256]
        # <x_a, xi_b> = 2 pi (k_a . k_b) / n ; reduce the integer product mod n first
        phase = np.mod(rows @ k.T, spec.n) * (2 * np.pi / spec.n)
        coeffs[start:start + 256] = np.exp(-1j * phase) @ values
    return SpectralField(spec, coeffs * spec.n ** (-spec.dims / 2))


def restricted_l2_norm(f, rho, inside=True, strict=False):
    """Riemann-sum L2 norm of ``f`` over a centered ball or its complement.

    ``inside=True`` selects ``|x| <= rho`` (``|x| < rho`` when ``strict``);
    ``inside=False`` selects ``|x| >= rho`` (``|x| > rho`` when ``strict``).
    Returns ``(sum |f(x_k)|**2 h**N)**0.5`` over the selected points.
    """
    if rho < 0:
        raise FieldError("rho must be >= 0")
    mask = region_mask(f.spec, rho, inside=inside, strict=strict)
    total = np.sum(np.abs(f.samples[mask]) ** 2) * f.spec.h**f.spec.dims
    return float(np.sqrt(total))


def region_mask(spec, rho, inside=True, strict=False):
    """Boolean grid mask of the radial region used by :func:`restricted_l2_norm`."""
    r2 = spec.radius_sq()
    rho2 = rho * rho
    if inside:
        return r2 < rho2 if strict else r2 <= rho2
    return r2 > rho2 if strict else r2 >= rho2


def save_field(path, f):
    """Write a field as a 32-byte header followed by little-endian complex64 pairs."""
    header = _HEADER.pack(_MAGIC, f.spec.dims, f.spec.n, f.spec.L)
    body = np.ascontiguousarray(f.samples.ravel(), dtype="<c8").tobytes()
    Path(path).write_bytes(header + body)


def load_field(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FieldError("file too short for field header")
    magic, dims, n, L = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise FieldError(f"bad magic {magic!r}")
    spec = GridSpec(dims, n, L)
    body = np.frombuffer(raw, dtype="<c8", offset=_HEADER.size)
    if body.size != spec.size:
        raise FieldError(f"expected {spec.size} samples, found {body.size}")
    return SpatialField(spec, body.astype(np.complex128))
