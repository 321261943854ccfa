#!/usr/bin/env python3
"""Solve an LP-format 0-1 model with HiGHS and print the optimal objective.

Exit status 0 with the objective on stdout when HiGHS proves optimality,
3 when highspy is not installed, 1 on any other outcome.
"""

import sys


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: lp_highs.py MODEL.lp", file=sys.stderr)
        return 2
    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("threads", 1)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print("HiGHS could not read " + sys.argv[1], file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print("HiGHS status: " + h.modelStatusToString(status), file=sys.stderr)
        return 1
    print(repr(h.getInfo().objective_function_value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
