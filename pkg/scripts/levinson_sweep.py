"""Levinson residuals over random Generic boundary conditions, one CSV row per draw."""

import argparse
import csv
import sys

import numpy as np

from quartic_scatter.halfline import positive_eigenvalue
from quartic_scatter.quartic_core import BoundaryConditionSpec
from quartic_scatter.ssf import levinson_check


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scale", type=float, default=1.0, help="standard deviation of the parameters")
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    writer = csv.writer(sys.stdout)
    writer.writerow(["alpha_re", "alpha_im", "alpha1", "alpha2", "n_eigen", "embedded", "gamma0", "gamma1",
                     "lhs", "rhs", "residual"])
    worst = 0.0
    for _ in range(args.count):
        re, im, a1, a2 = args.scale * rng.normal(size=4)
        bc = BoundaryConditionSpec.generic(complex(re, im), a1, a2)
        res = levinson_check(bc)
        worst = max(worst, res.residual)
        writer.writerow([f"{v:.10g}" for v in (re, im, a1, a2)]
                        + [res.n_eigen, positive_eigenvalue(bc) is not None, res.gamma0, res.gamma1,
                           f"{res.lhs:.10g}", f"{res.rhs:.10g}", f"{res.residual:.3e}"])
    print(f"# worst residual {worst:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
