"""How the localized multiplier falls off away from the sphere |xi| = t.

The bound by the tail integral of |psi_hat| holds everywhere; the envelope
decays faster than any fixed power, so a power-law fit gives a large
exponent but a poor log-linear fit.  The t-derivative grows by about a factor
2 per dyadic step once t * 2**j is large.
"""

import numpy as np

from polyharm.decomposition import CutoffFamily
from polyharm.multiplier_lab import lemma21_check, lemma22_decay_fit, lemma23_scaling, table_for


def main():
    table = table_for(CutoffFamily(), 1)
    print("envelope bound at t = 2, j = 2:")
    for xi in (0.0, 1.5, 2.0, 2.5, 4.0, 8.0):
        lhs, rhs = lemma21_check(2, 2.0, xi, table=table)
        print(f"  |xi| = {xi:4.1f}   |m| = {lhs:.3e}   bound = {rhs:.3e}")

    fit = lemma22_decay_fit(2, 1.0)
    print(f"\npower-law fit of the envelope (j = 2, tau = 1): n = {fit.fitted_n:.2f}, "
          f"log-residual {fit.residual:.2f}")
    for u, e in list(zip(fit.u, fit.envelope))[:: max(1, len(fit.u) // 8)]:
        print(f"  u = {u:8.2f}   envelope {e:.3e}")

    for t in (2.0, 8.0):
        peaks, ratios = lemma23_scaling([1, 2, 3], 0.0, 1, t, table=table)
        print(f"\npeak |d_t m| at t = {t:g}: " + ", ".join(f"{p:.3e}" for p in peaks))
        print("  ratios between consecutive j: " + ", ".join(f"{r:.3f}" for r in np.atleast_1d(ratios)))


if __name__ == "__main__":
    main()
