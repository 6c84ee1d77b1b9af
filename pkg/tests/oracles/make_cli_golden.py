"""Regenerate the frozen CLI golden files.

The golden files pin the exact bytes the CLI produces for fixed arguments;
the test suite re-runs the same invocations and compares bytes, then
cross-checks the numbers against the closed-form magnitude/phase route.
Run from the repository root:

    python tests/oracles/make_cli_golden.py
"""

import pathlib

from gef.cli import main

HERE = pathlib.Path(__file__).parent

CASES = {
    "bode_golden.csv": ["bode", "--Ap", "0.1", "--Bu", "5/2",
                        "--beta-min", "0.1", "--beta-max", "3.0", "-n", "64"],
    "chars_golden.csv": ["chars", "--Ap", "0.1", "--Bu-start", "2",
                         "--Bu-stop", "3", "--Bu-step", "0.5"],
}


def make():
    for name, args in CASES.items():
        target = HERE / name
        code = main(args + ["--out", str(target)])
        assert code == 0, (name, code)
        print("wrote", target)


if __name__ == "__main__":
    make()
