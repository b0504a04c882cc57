"""Compare the numba and numpy kernel backends.

The backend is fixed at import time by PADEADI_BACKEND, so each backend is
timed in its own subprocess.  Usage::

    python benchmarks/bench_kernels.py [--n 65] [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
import padeadi
from padeadi.tridiag import solve_lines
from padeadi.problems import builtin_example
from padeadi.grid import Grid3D, build_velocity_field
from padeadi.adi import ADIStepper, first_step

n, repeat = int(sys.argv[1]), int(sys.argv[2])
rng = np.random.default_rng(0)
lines = (n - 2) * (n - 2)
sub = rng.uniform(-1, 0, (lines, n - 1)) / 12
sup = rng.uniform(-1, 0, (lines, n - 1)) / 12
sub = np.concatenate([np.zeros((lines, 1)), sub], axis=1)
sup = np.concatenate([sup, np.zeros((lines, 1))], axis=1)
diag = 1.0 + np.abs(sub) + np.abs(sup)
rhs = rng.standard_normal((lines, n))
solve_lines(sub, diag, sup, rhs)  # compile

case = builtin_example(2)
h = np.pi / (n - 1)
grid = Grid3D.from_box(*case.domain, h)
model = build_velocity_field(case.nu, grid)
tau = 0.25 * h
state = first_step(case.f1, case.f2, model, case.source, case.bc, tau)
stepper = ADIStepper(model, case.source, case.bc, tau)
stepper.advance(state)

out = {
    "backend": padeadi.BACKEND,
    "thomas_s": min(timeit.repeat(lambda: solve_lines(sub, diag, sup, rhs), number=1, repeat=repeat)),
    "step_s": min(timeit.repeat(lambda: stepper.advance(state), number=1, repeat=repeat)),
}
print(json.dumps(out))
"""


def run(backend, n, repeat):
    env = dict(os.environ, PADEADI_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=65, help="nodes per axis")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    res = {b: run(b, args.n, args.repeat) for b in ("numba", "numpy")}
    print(f"grid {args.n}^3, {(args.n - 2) ** 2} lines of length {args.n}; best of {args.repeat}")
    print(f"{'kernel':<26}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for key, label in (("thomas_s", "batched Thomas solve"), ("step_s", "full ADI step")):
        a, b = res["numba"][key], res["numpy"][key]
        print(f"{label:<26}{a:>12.5f}{b:>12.5f}{b / a:>10.2f}")
    if res["numba"]["backend"] != "numba":
        print("note: numba is not importable here; both columns used the numpy kernels")


if __name__ == "__main__":
    main()
