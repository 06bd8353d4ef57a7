"""Unitary transforms and spectral projections on a periodic grid.

A Gaussian is its own continuum transform; the grid transform reproduces
that to near machine precision once the period is large enough.  The
partial integral E_lam then acts as an orthogonal projection whose error
shrinks monotonically as lam grows, reaching zero once the ball holds the
whole lattice.
"""

import math

import numpy as np

from polyharm import GridSpec, LambdaSchedule, SpatialField, SymbolParams, forward_transform, partial_integral


def main():
    n = 128
    grid = GridSpec(1, n, math.sqrt(2 * math.pi * n))
    gauss = SpatialField(grid, np.exp(-grid.radius_sq() / 2))
    err = np.max(np.abs(forward_transform(gauss).continuum_values() - np.exp(-grid.freq_sq() / 2)))
    print(f"Gaussian on n={n}: max deviation from its continuum transform {err:.2e}")

    rng = np.random.default_rng(0)
    grid = GridSpec(2, 32, 12.0)
    f = SpatialField(grid, rng.standard_normal(grid.shape))
    sched = LambdaSchedule.exact(grid, m=1)
    print(f"\n{len(sched)} exact levels on a 32x32 grid; projection error ||E_lam f - f|| / ||f||:")
    for lam in sched.values[:: len(sched) // 8]:
        err = (partial_integral(f, SymbolParams(1, lam)) - f).norm() / f.norm()
        print(f"  lam = {lam:10.4g}   {err:.3e}")
    last = partial_integral(f, SymbolParams(1, sched.values[-1]))
    print(f"  top of schedule: {(last - f).norm() / f.norm():.1e}")


if __name__ == "__main__":
    main()
