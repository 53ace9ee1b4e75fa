#!/usr/bin/env python3
"""Check the square-root scaling of the collapse time against the gradient.

For each field gradient beta_z the analytic crossing tau_c =
sqrt(delta_z m / (mu_B beta_z)) is compared with the numeric crossing of the
inter-branch position gap over its critical value, as located by linear
interpolation on a sampled trace.
"""

import argparse
import sys

import numpy as np

from decolab.collapse import order_parameter_trace
from decolab.scenarios.sterngerlach import SGConfig, sg_branch_trajectories, sg_critical_time


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--beta-min", type=float, default=1e2, help="T/m")
    parser.add_argument("--beta-max", type=float, default=1e4, help="T/m")
    parser.add_argument("--points", type=int, default=9)
    parser.add_argument("--n-steps", type=int, default=4000)
    args = parser.parse_args(argv)

    print(f"{'beta_z [T/m]':>13}  {'tau_c analytic':>15}  {'tau_c numeric':>15}  {'rel error':>10}")
    worst = 0.0
    for beta in np.geomspace(args.beta_min, args.beta_max, args.points):
        tau = sg_critical_time(SGConfig(beta_z=float(beta)))
        config = SGConfig(beta_z=float(beta), t_max=3.0 * tau, n_steps=args.n_steps)
        times = np.linspace(0.0, config.t_max, config.n_steps + 1)
        trace = order_parameter_trace(sg_branch_trajectories(config), "position", times)
        error = abs(trace.tau - tau) / tau
        worst = max(worst, error)
        print(f"{beta:13.4e}  {tau:15.6e}  {trace.tau:15.6e}  {error:10.2e}")
    print(f"worst relative error: {worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
