"""Energy of the maximal function near the origin for functions that vanish there.

Each test function is supported in the shell 3 <= |x| <= 6.  The audit
compares the energy of sup_lam |E_lam f| on |x| <= 1 with the energy of f,
then repeats the comparison on finer grids and denser schedules: a ratio
that settles instead of growing is what a uniform bound looks like at
desk scale.
"""

from polyharm import GridSpec, LambdaSchedule
from polyharm.experiments import TestFunctionSpec, generate_test_function, theorem12_audit, theorem12_stability

FAMILY = [
    TestFunctionSpec("gaussian_shell", center=4.0, width=0.3),
    TestFunctionSpec("smoothed_annulus_indicator", width=0.4),
    TestFunctionSpec("random_bandlimited_masked", seed=3),
    TestFunctionSpec("narrow_bump", center=4.5, width=0.4),
]


def main():
    grid = GridSpec(1, 512, 16.0)
    sched = LambdaSchedule.exact(grid, m=1)
    print(f"single audits on n={grid.n}, {len(sched)} exact levels, r = 1")
    for ts in FAMILY:
        res = theorem12_audit(generate_test_function(ts, grid), 1.0, sched)
        print(f"  {ts.kind:28s} ratio {res.metrics['ratio']:.4e}")

    for tau in (0.0, 1.0):
        res = theorem12_stability(FAMILY, r=1.0, tau=tau)
        rungs = [res.metrics[f"max_ratio_rung{i}"] for i in range(3)]
        print(f"\ntau = {tau:g}: max ratio per rung " + ", ".join(f"{v:.4e}" for v in rungs))
        print(f"  last / first = {res.metrics['stability']:.4f}")


if __name__ == "__main__":
    main()
