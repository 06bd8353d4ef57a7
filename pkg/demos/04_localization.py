"""Partial integrals of a function that vanishes near the origin.

f is supported in 3 <= |x| <= 6.  The restricted norm of E_lam f on
|x| <= 1 is largest at the lowest levels, where the truncation smears f
across the whole period, and falls to zero as the ball covers the lattice.  The same profile computed on a grid twice as
fine agrees wherever the coarse grid can resolve f.
"""

from polyharm import GridSpec, LambdaSchedule
from polyharm.experiments import TestFunctionSpec, generate_test_function, localization_trace, two_resolution_check


def main():
    ts = TestFunctionSpec("gaussian_shell", center=4.0, width=0.3)
    grid = GridSpec(1, 512, 16.0)
    res, prof = localization_trace(generate_test_function(ts, grid), 1.0, LambdaSchedule.exact(grid, 1))
    print("restricted L2 norm of E_lam f on |x| <= 1:")
    for lam, l2 in list(zip(prof.lam, prof.l2))[:: len(prof.lam) // 10]:
        print(f"  lam = {lam:10.4g}   {l2:.3e}")
    print(f"peak {res.metrics['peak_l2']:.3e}, terminal {res.metrics['terminal_l2']:.1e}, "
          f"last level above 10% of peak {res.metrics['onset_lambda']:.4g}")

    check, _, _ = two_resolution_check(ts, 256)
    print(f"\nn = 256 against n = 512: max relative difference {check.metrics['max_rel_diff']:.2%} "
          f"over {int(check.metrics['compared'])} compared levels")


if __name__ == "__main__":
    main()
