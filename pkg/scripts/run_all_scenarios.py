#!/usr/bin/env python3
"""Run every shipped scenario and summarize pass/fail/inconclusive counts.

Reports land under GLUECERT_OUTPUT_ROOT (default ./reports). The process
exits with the worst exit code seen across scenarios (1 > 2 > 0).
"""

import argparse
import sys
import time

from gluecert.cli import run_scenario
from gluecert.scenarios import list_shipped, resolve_scenario_path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--only", nargs="*", default=None, help="subset of shipped scenario names"
    )
    args = parser.parse_args()

    names = args.only if args.only else list_shipped()
    results = {}
    for name in names:
        start = time.perf_counter()
        code = run_scenario(resolve_scenario_path(name))
        results[name] = (code, time.perf_counter() - start)

    print()
    print(f"{'scenario':<28} {'exit':>4} {'seconds':>8}")
    for name, (code, secs) in results.items():
        print(f"{name:<28} {code:>4} {secs:>8.1f}")

    codes = [code for code, _ in results.values()]
    if 1 in codes or 3 in codes:
        return 1
    if 2 in codes:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
