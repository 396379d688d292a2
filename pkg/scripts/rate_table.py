#!/usr/bin/env python3
"""Print the interpolation rate suite for a scenario as a deviation table.

Each row is one verified quantity; columns are the deviations over the
epsilon ladder, the fitted log-log slope and its expected behaviour.
"""

import argparse
import sys

from gluecert.scenarios import load_scenario, resolve_scenario_path
from gluecert.verifier import rate_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scenario", help="scenario file path or shipped scenario name")
    parser.add_argument(
        "--eps", type=float, nargs="*", default=None, help="override the epsilon ladder"
    )
    args = parser.parse_args()

    sc = load_scenario(resolve_scenario_path(args.scenario))
    h1, h2 = sc.build_collars()
    eps_list = tuple(args.eps) if args.eps else sc.eps_list
    reports = rate_suite(h1, h2, eps_list, cfg=sc.fd)

    header = f"{'quantity':<24} {'class':<7} " + " ".join(f"{e:>10.4g}" for e in eps_list)
    print(header + f" {'slope':>7} {'ok':>4}")
    for r in reports:
        devs = " ".join(f"{d:>10.3e}" for d in r.deviations)
        note = f"  ({r.note})" if r.note else ""
        print(f"{r.name:<24} {r.classification:<7} {devs} {r.slope:>7.3f} {str(r.passed):>4}{note}")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
