"""Print the fitted convergence order of every truncated coefficient.

Each line shows the check name, the relative errors on the alpha grid, the
least-squares order and the local order between the last two grid points.
Checks below the required order are marked.

    python scripts/convergence_orders.py [--failing]
"""
import argparse
import math

from dressed_radiation.audit import (
    LARGE_GRID,
    ORDER_TOLERANCE,
    REQUIRED_ORDER,
    SMALL_GRID,
    convergence_checks,
)


def local_order(check):
    a0, a1 = check.alphas[-2:]
    e0, e1 = check.rel_errors[-2:]
    if e0 <= 0 or e1 <= 0:
        return math.nan
    slope = math.log(e1 / e0) / math.log(a1 / a0)
    return slope if check.regime == "small" else -slope


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--failing", action="store_true", help="only show checks below the required order")
    args = parser.parse_args(argv)

    checks = convergence_checks()
    threshold = REQUIRED_ORDER - ORDER_TOLERANCE
    shown = [c for c in checks if not (args.failing and c.passed)]
    width = max(len(c.name) for c in shown) if shown else 0
    for c in shown:
        mark = "" if c.passed else "  < %.1f" % threshold
        if c.exact_match:
            desc = "exact"
        else:
            errs = " ".join(f"{e:.2e}" for e in c.rel_errors)
            desc = f"order {c.order:6.3f}  last-pair {local_order(c):6.3f}  errors {errs}"
        print(f"{c.name:<{width}}  {desc}{mark}")
    n_fail = sum(not c.passed for c in checks)
    print(f"\n{len(checks) - n_fail}/{len(checks)} checks at order >= {threshold} "
          f"(alpha grids: small {SMALL_GRID}, large {LARGE_GRID})")


if __name__ == "__main__":
    main()
