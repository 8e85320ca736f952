"""Sweep the switch-on time and print how the Phi1 -> Phi1 lines move.

For each |delta tau| the state evolved from psi1 is fitted after the switch,
and the three line moduli are printed next to the sudden and adiabatic
predictions. Output is CSV on stdout.

    python scripts/switching_sweep.py --alpha 1 --delta -1
"""
import argparse
import sys

import numpy as np

from dressed_radiation.dipoles import element_amplitudes
from dressed_radiation.dressed import SystemConfig, derive_params
from dressed_radiation.oracle import (
    SwitchingProfile,
    analytic_partner,
    default_window,
    extract_components,
    propagate,
)
from dressed_radiation.output import to_csv

LINES = ((0, "omega"), (-1, "omega-Omega"), (1, "omega+Omega"))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--delta", type=float, default=1.0)
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--points", type=int, default=13)
    parser.add_argument("--min", dest="lo", type=float, default=1e-3)
    parser.add_argument("--max", dest="hi", type=float, default=200.0)
    args = parser.parse_args(argv)

    cfg = SystemConfig.from_alpha(args.alpha, delta=args.delta)
    p = derive_params(cfg)
    # psi1 evolves into the analytic partner labelled 11 in both limits
    sudden = element_amplitudes(analytic_partner(p, "sudden"), "11")
    adiabatic = element_amplitudes(analytic_partner(p, "adiabatic"), "11")

    rows = []
    for delta_tau in np.geomspace(args.lo, args.hi, args.points):
        prof = SwitchingProfile.from_delta_tau(float(delta_tau), p.delta)
        window = default_window(p, prof)
        traj = propagate(cfg, prof, "psi1", t_end=window[1], tol=args.tol)
        fit = extract_components(traj, p, window)
        row = {"delta_tau": float(delta_tau), "norm_drift": traj.max_norm_drift}
        for shift, label in LINES:
            row[label] = abs(fit.amp_at[label])
            row[f"{label}_sudden"] = abs(sudden.get((-1, shift), 0j))
            row[f"{label}_adiabatic"] = abs(adiabatic.get((-1, shift), 0j))
        rows.append(row)

    columns = ["delta_tau", "norm_drift"]
    for _, label in LINES:
        columns += [label, f"{label}_sudden", f"{label}_adiabatic"]
    sys.stdout.write(to_csv(rows, columns))


if __name__ == "__main__":
    main()
