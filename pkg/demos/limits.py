"""The alpha -> 0 limits of the HLS and fractional chains.

alpha times each HLS term and (-alpha) times the seminorm tend to
n w_n ||f||_2^2. For exp(-c x^2) the seminorm ratio is (2/c)^alpha Gamma(1 + alpha),
which is not monotone in alpha for c = 1.
"""

import math

import numpy as np

from affine_hls.grid import GridFunction
from affine_hls.harness import limit_sweep_frac, limit_sweep_hls, normalized


def main():
    f = normalized(GridFunction.from_callable(lambda x: np.exp(-x[..., 0] ** 2), 1, 6.0, 256), 2.0)
    print("HLS side: deviations of alpha * (left, middle, right)")
    for r in limit_sweep_hls(f, [0.5, 0.2, 0.1, 0.05]):
        print(f"  alpha {r['alpha']:5.2f}  " + "  ".join(f"{d:7.3%}" for d in r["deviations"]))
    print("fractional side: (-alpha) seminorm against the closed form")
    for r in limit_sweep_frac(f, [-0.2, -0.1, -0.05]):
        closed = 2 ** r["alpha"] * math.gamma(1 + r["alpha"])
        print(f"  alpha {r['alpha']:5.2f}  ratio {r['scaled'] / r['target']:.5f}  closed {closed:.5f}  deviation {r['deviation']:.3%}")


if __name__ == "__main__":
    main()
