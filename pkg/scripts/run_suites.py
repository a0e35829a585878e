#!/usr/bin/env python3
"""Run every verification suite over the bundled fixtures.

Thin driver over the CLI: each line below is a (subcommand, bundle, extra
args, expected exit code) tuple.  Prints one PASS/FAIL line per suite and
exits nonzero if any suite deviates from its expectation.
"""

import argparse
import sys

from rcwb.cli import main as cli_main

SUITES = [
    # positive fixtures
    (["check-laws", "finset_p_2"], 0),
    (["check-laws", "finset_p_1"], 0),
    (["build-par", "finset_inj_2"], 0),
    (["karoubi", "finset_p_2"], 0),
    (["geometric", "finset_inj_2"], 0),
    (["topology", "finset_inj_2"], 0),
    (["sheaf-check", "finset_inj_2", "yset2"], 0),
    (["sheafify", "finset_inj_2", "yset1"], 0),
    (["transfer", "finset_inj_2", "yset2", "--direction", "to-jrp"], 0),
    (["transfer", "finset_inj_2", "yset2", "--direction", "to-sheaf"], 0),
    (["roundtrip", "finset_inj_2", "yset1"], 0),
    (["unit", "finset_p_2"], 0),
    # negative controls: these are supposed to fail with exit code 1
    (["check-laws", "nojoin"], 1),
    (["geometric", "finset_iso_2"], 1),
]


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-family", type=int, default=3,
                        help="cap on family sizes in the join/cover scans")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    failures = 0
    for cmd, expected in SUITES:
        full = cmd + ["--max-family", str(args.max_family),
                      "--seed", str(args.seed)]
        code = cli_main(full)
        ok = code == expected
        failures += not ok
        verdict = "PASS" if ok else "FAIL"
        note = f"(exit {code}, expected {expected})"
        print(f"{verdict}\t{' '.join(cmd)}\t{note}")
    print(f"{len(SUITES) - failures}/{len(SUITES)} suites as expected")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(run())
