#!/usr/bin/env python3
"""Instability sweep: negative-energy inhomogeneous data on the self-similar star.

Each seed builds smooth data with E(phi0, phi1) < 0 at the requested
amplitude and evolves until the growth event fires; the script reports the
event clock per seed.
"""

import argparse
import math

import numpy as np

import starlab.functionals as F
from starlab import classify_expansion, solve_isentropic_profile
from starlab.acceptance import negative_energy_data
from starlab.lagrangian import SolverSpec, evolve_self_similar


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=-1e-3)
    ap.add_argument("--amplitude", type=float, default=1e-3)
    ap.add_argument("--seeds", type=int, nargs="+", default=[7, 11, 13])
    ap.add_argument("--n-cells", type=int, default=192)
    args = ap.parse_args()

    prof = solve_isentropic_profile(args.delta)
    params = classify_expansion(args.delta, 1.0, math.sqrt(2 * abs(args.delta)))
    x = np.linspace(0.0, prof.R0, args.n_cells + 1)
    xm = 0.5 * (x[:-1] + x[1:])
    rho4 = x**4 * prof.rho_at(x)
    rho43 = xm**2 * prof.rho43_at(xm)
    for seed in args.seeds:
        phi0, phi1 = negative_energy_data(prof, args.delta, x, args.amplitude, seed)
        E0, D0 = F.perturbation_energy_ss(x, phi0, phi1, rho4, rho43,
                                          params.a0, args.delta, 0.0)
        spec = SolverSpec(n_cells=args.n_cells, n_emit=40, growth_threshold=0.1)
        run = evolve_self_similar(prof, params, (phi0, phi1), 600.0, spec)
        growth = [e for e in run.events if e.kind == "growth"]
        when = f"s = {growth[0].clock:.3f}" if growth else "never (increase s_end)"
        print(f"seed {seed:3d}: E0 = {E0:+.3e}  D0 = {D0:.3e}  growth at {when}")


if __name__ == "__main__":
    main()
