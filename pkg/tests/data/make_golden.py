"""Regenerate the Example 3 reference slice used by the acceptance tests.

Only rerun after a deliberate change to the scheme; the stored file is the
output of the first verified run.

    python tests/data/make_golden.py
"""
from pathlib import Path

import numpy as np

from padeadi import builtin_example, run_simulation

OUT = Path(__file__).with_name("example3_midx_t0.2.npz")


def main():
    case = builtin_example(3)
    kept = {}

    def grab(state):
        if state.step == 200:
            kept["plane"] = state.u_curr[64].copy()
            kept["t"] = state.t

    run_simulation(case, case.h, case.tau, callback=grab)
    np.savez_compressed(OUT, plane=kept["plane"], t=kept["t"], x_index=65)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
