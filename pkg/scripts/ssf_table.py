"""Spectral shift function of the standard boundary conditions on a log energy grid."""

import argparse
import csv
import sys

import numpy as np

from quartic_scatter.quartic_core import BoundaryConditionSpec, Family
from quartic_scatter.ssf import levinson_check, ssf, threshold_jump

CASES = {
    "clamped": BoundaryConditionSpec(Family.CLAMPED),
    "navier": BoundaryConditionSpec(Family.NAVIER),
    "free": BoundaryConditionSpec(Family.FREE),
    "all_zero": BoundaryConditionSpec.generic(),
    "generic": BoundaryConditionSpec.generic(0.3 + 0.4j, -2.0, 0.7),
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=13)
    parser.add_argument("--summary", action="store_true", help="print threshold jump and Levinson data instead")
    args = parser.parse_args(argv)

    writer = csv.writer(sys.stdout)
    if args.summary:
        writer.writerow(["case", "threshold_jump", "n_eigen", "gamma0", "levinson_residual"])
        for name, bc in CASES.items():
            res = levinson_check(bc)
            writer.writerow([name, threshold_jump(bc), res.n_eigen, res.gamma0, f"{res.residual:.3e}"])
        return
    grid = np.geomspace(1e-3, 1e3, args.count)
    curves = {name: ssf(bc, grid).xi for name, bc in CASES.items()}
    writer.writerow(["lambda", *curves])
    for i, lam in enumerate(grid):
        writer.writerow([f"{lam:.6g}"] + [f"{curves[name][i]:.10g}" for name in curves])


if __name__ == "__main__":
    main()
