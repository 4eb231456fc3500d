"""Full-line scattering data and diagnostics for one potential over an energy grid."""

import argparse
import csv
import sys

import numpy as np

from quartic_scatter.fullline import b_relation_residual, flux_invariant, lippmann_schwinger_residual, solve_waves
from quartic_scatter.potentials import parse_potential


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("potential", help="e.g. 'gaussian:amp=1,width=0.7;v1=box:amp=0.2,lo=-1,hi=1'")
    parser.add_argument("--lambda-min", type=float, default=0.1)
    parser.add_argument("--lambda-max", type=float, default=10.0)
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--ls", action="store_true", help="also compute the Lippmann-Schwinger residual")
    args = parser.parse_args(argv)

    pot = parse_potential(args.potential)
    a = pot.support_radius
    writer = csv.writer(sys.stdout)
    header = ["lambda", "abs_s11", "abs_s21", "arg_s11", "abs_b11", "abs_b21", "unitarity", "b_relation", "flux"]
    writer.writerow(header + (["lippmann_schwinger"] if args.ls else []))
    for lam in np.geomspace(args.lambda_min, args.lambda_max, args.count):
        sol = solve_waves(lam, pot)
        S, B = sol.matrices.S, sol.matrices.B
        fl = max(abs(flux_invariant((sol.wave_state(l, a), sol.wave_state(l, -a)))) for l in (1, 2))
        row = [lam, abs(S[0, 0]), abs(S[1, 0]), np.angle(S[0, 0]), abs(B[0, 0]), abs(B[1, 0]),
               sol.matrices.unitarity_residual, b_relation_residual(sol.matrices), fl]
        if args.ls:
            row.append(lippmann_schwinger_residual(lam, pot, np.linspace(-0.8 * a, 0.8 * a, 5), solution=sol))
        writer.writerow([f"{v:.10g}" for v in row])


if __name__ == "__main__":
    main()
