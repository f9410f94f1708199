"""Three regimes of the indicator as the probing level crosses an inclusion.

For a disk of radius 0.3 at (0.2, 0.1) inside the unit square, the
support value in direction rho = e1 is exactly 0.5.  Sweeping the growth
rate tau at level offsets beyond, at, and inside that value shows the
indicator decaying exponentially, staying O(1), and growing
exponentially; the fitted slope of log|I| against tau divided by p
recovers the offset to the support.
"""

import math

from penclose import geometry, indicator, wolff

P = 3.0
TAUS = (4.0, 6.0, 8.0, 10.0, 12.0)


def main():
    domain = geometry.square((0.0, 0.0), 1.0)
    disk = geometry.Disk(center=(0.2, 0.1), radius=0.3)
    h_d = geometry.support_function(disk, (1.0, 0.0))
    profile = wolff.integrate_profile(P)
    print(f"inclusion support in direction e1: h_D = {h_d}")

    for label, t in (("beyond (t = h_D + 0.2)", h_d + 0.2),
                     ("at     (t = h_D)      ", h_d),
                     ("inside (t = h_D - 0.2)", h_d - 0.2)):
        sw = indicator.sweep(domain, disk, 1.0, profile, (1.0, 0.0), t, P, TAUS)
        print(f"\nlevel {label}:")
        print(f"  {'tau':>5} {'indicator':>14}")
        for s in sw.samples:
            print(f"  {s.tau:5.1f} {s.value:14.6e}")
        est = indicator.estimate_support(sw, t, P)
        print(f"  slope of log|I| = {sw.slope:+.4f}  ->  h_hat = t + slope/p = {est.h_hat:.4f}")


if __name__ == "__main__":
    main()
