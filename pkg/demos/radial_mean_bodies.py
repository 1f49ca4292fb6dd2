"""Radial mean bodies of the indicator of [0, 1] and the monotone ratio zeta.

For the indicator rho_{R_a} = (1 / (a + 1))^(1 / a), with the limit 1/e at
a = 0. Dividing by Gamma(a + 1)^(1 / a) gives a nonincreasing function of a.
"""

import math

import numpy as np

from affine_hls.bodies import r_zero_body, radial_mean_body
from affine_hls.grid import GridFunction
from affine_hls.specfun import EULER_GAMMA


def main():
    chi = GridFunction.from_callable(lambda x: ((x[..., 0] > 0) & (x[..., 0] < 1)).astype(float), 1, 2.0, 256)
    gauss = GridFunction.from_callable(lambda x: np.exp(-x[..., 0] ** 2), 1, 6.0, 256)
    print(f"{'alpha':>6s} {'rho chi':>10s} {'closed':>10s} {'zeta chi':>10s} {'zeta gauss':>11s}")
    for a in (-0.4, -0.25, -0.1, 0.0, 0.25, 0.5, 1.0, 2.0):
        if a == 0:
            rc, rg, closed, norm = r_zero_body(chi).rho[0], r_zero_body(gauss).rho[0], 1 / math.e, math.exp(-EULER_GAMMA)
        else:
            rc, rg = radial_mean_body(chi, a).rho[0], radial_mean_body(gauss, a).rho[0]
            closed, norm = (1 / (a + 1)) ** (1 / a), math.gamma(a + 1) ** (1 / a)
        print(f"{a:6.2f} {rc:10.6f} {closed:10.6f} {rc / norm:10.6f} {rg / norm:11.6f}")


if __name__ == "__main__":
    main()
