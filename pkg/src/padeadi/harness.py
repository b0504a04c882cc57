"""Running problems to a final time and measuring errors and convergence."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .adi import ADIStepper, cfl_check, first_step
from .diagnostics import explicit2_step
from .errors import ConfigurationError, NumericalDivergence
from .grid import Grid3D, WaveState, build_velocity_field, sample
from .problems import ProblemCase
from .tridiag import SingularSystemError

SCHEMES = ("adi4", "explicit2")
BLOWUP_GUARD = 1e3


@dataclass
class RunResult:
    state: WaveState
    steps: int
    wall_time: float
    cfl_ratio: float
    scheme: str
    diverged: bool = False
    error: float | None = None
    note: str = ""


def make_grid(case: ProblemCase, h: float) -> Grid3D:
    try:
        return Grid3D.from_box(*case.domain, h)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def step_count(T: float, tau: float, tol: float = 1e-9) -> int:
    n = T / tau
    if not tau > 0 or abs(n - round(n)) > tol * max(1.0, n):
        raise ConfigurationError(f"time step {tau} does not divide T = {T}")
    return int(round(n))


def run_simulation(case: ProblemCase, h: float, tau: float, scheme: str = "adi4",
                   override: bool = False, callback: Callable | None = None,
                   closure: str = "wide", guard: float = BLOWUP_GUARD) -> RunResult:
    """Integrate ``case`` from t = 0 to ``case.T`` on a mesh of spacing ``h``.

    ``callback(state)`` is called after every completed step.  Without
    ``override`` a CFL violation raises ``ConfigurationError`` and a
    non-finite or runaway solution raises ``NumericalDivergence``.  With
    ``override`` the run is allowed, stops at the first step whose values are
    non-finite or exceed ``guard`` times the initial amplitude, and returns
    with ``diverged=True`` and ``error=inf``.
    """
    if scheme not in SCHEMES:
        raise ConfigurationError(f"scheme must be one of {SCHEMES}")
    grid = make_grid(case, h)
    nsteps = step_count(case.T, tau)
    try:
        model = build_velocity_field(case.nu, grid)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc
    if grid.is_uniform:
        ratio, stable = cfl_check(model, tau)
        if scheme == "explicit2":
            stable = ratio < 1.0 / 3.0
    else:
        ratio, stable = model.nu_max * tau / min(grid.spacing), override
    if not stable and not override:
        raise ConfigurationError(
            f"CFL condition violated: max nu tau/h = {ratio:.6f}")

    t0 = time.perf_counter()
    state = first_step(case.f1, case.f2, model, case.source, case.bc, tau)
    scale = max(1.0, float(np.abs(state.u_curr).max()), float(np.abs(state.u_prev).max()))
    if scheme == "adi4":
        stepper = ADIStepper(model, case.source, case.bc, tau, closure)
        advance = stepper.advance
    else:
        def advance(s):
            return explicit2_step(s, model, case.source, case.bc, check_cfl=not override)
    if callback is not None:
        callback(state)
    diverged = False
    while state.step < nsteps:
        try:
            nxt = advance(state)
        except (SingularSystemError, ArithmeticError) as exc:
            if not override:
                raise
            diverged, note = True, f"step {state.step + 1}: {exc}"
            break
        peak = float(np.abs(nxt.u_curr).max())
        if not math.isfinite(peak) or peak > guard * scale:
            if not override:
                raise NumericalDivergence(
                    f"solution blew up at step {nxt.step} (max |u| = {peak:.3e})")
            diverged, note = True, f"diverged at step {nxt.step} (max |u| = {peak:.3e})"
            state = nxt
            break
        state = nxt
        if callback is not None:
            callback(state)
    wall = time.perf_counter() - t0
    res = RunResult(state, state.step, wall, ratio, scheme, diverged)
    if diverged:
        res.error, res.note = math.inf, note
    elif case.exact is not None:
        res.error = max_norm_error(state, case.exact, state.t)
    return res


def max_norm_error(state: WaveState, exact: Callable, t: float | None = None) -> float:
    """Largest nodal ``|exact - u|`` over the whole grid, boundary included."""
    t = state.t if t is None else t
    return float(np.abs(sample(exact, state.grid, t) - state.u_curr).max())


def convergence_order(E1: float, E2: float, h1: float, h2: float) -> float:
    """``log(E1/E2) / log(h1/h2)``."""
    if min(E1, E2, h1, h2) <= 0:
        raise ValueError("errors and mesh sizes must be positive")
    if h1 == h2:
        raise ValueError("mesh sizes must differ")
    return math.log(E1 / E2) / math.log(h1 / h2)


@dataclass
class ConvergenceRow:
    h: float
    tau: float
    error: float
    ratio: float | None = None
    order: float | None = None
    wall_time: float = 0.0
    note: str = ""


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow] = field(default_factory=list)
    title: str = ""

    @property
    def errors(self):
        return [r.error for r in self.rows]

    def to_text(self, h_unit: float | None = math.pi) -> str:
        """Transposed table with one column per run."""
        def hfmt(h):
            if h_unit:
                k = h_unit / h
                if abs(k - round(k)) < 1e-9:
                    return f"pi/{round(k)}"
            return f"{h:.6g}"

        def tfmt(t):
            k = 1.0 / t
            return f"1/{round(k)}" if abs(k - round(k)) < 1e-9 else f"{t:.6g}"

        def num(v, f):
            if v is None:
                return "-"
            return "inf" if math.isinf(v) else format(v, f)

        head = ["(h, tau)"] + [f"({hfmt(r.h)}, {tfmt(r.tau)})" for r in self.rows]
        lines = [head,
                 ["E(h, tau)"] + [num(r.error, ".4e") for r in self.rows],
                 ["ratio"] + [num(r.ratio, ".4f") for r in self.rows],
                 ["Conv. Order"] + [num(r.order, ".4f") for r in self.rows],
                 ["wall time (s)"] + [f"{r.wall_time:.2f}" for r in self.rows]]
        if any(r.note for r in self.rows):
            lines.append(["note"] + [r.note or "-" for r in self.rows])
        widths = [max(len(line[c]) for line in lines) for c in range(len(head))]
        out = [self.title] if self.title else []
        for line in lines:
            out.append(" | ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip())
        return "\n".join(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["h", "tau", "error", "ratio", "order", "wall_time", "note"])
        for r in self.rows:
            w.writerow([repr(r.h), repr(r.tau), repr(r.error),
                        "" if r.ratio is None else repr(r.ratio),
                        "" if r.order is None else repr(r.order),
                        f"{r.wall_time:.6f}", r.note])
        return buf.getvalue()


def convergence_study(case: ProblemCase, schedule: Sequence[tuple[float, float]],
                      scheme: str = "adi4", override: bool = False,
                      title: str = "") -> ConvergenceReport:
    """Run every ``(h, tau)`` pair (coarsest first) and tabulate errors.

    A failing run is recorded with ``error = inf`` and a note instead of
    aborting the study; ratios and orders are only reported between two
    finite errors.
    """
    if case.exact is None:
        raise ConfigurationError("a convergence study needs an exact solution")
    report = ConvergenceReport(title=title)
    for h, tau in sorted(schedule, key=lambda p: -p[0]):
        try:
            res = run_simulation(case, h, tau, scheme, override=override)
            row = ConvergenceRow(h, tau, res.error, wall_time=res.wall_time, note=res.note)
        except (ConfigurationError, ArithmeticError) as exc:
            row = ConvergenceRow(h, tau, math.inf, note=f"{type(exc).__name__}: {exc}")
        if report.rows:
            prev = report.rows[-1]
            if all(math.isfinite(e) and e > 0 for e in (prev.error, row.error)):
                row.ratio = prev.error / row.error
                row.order = convergence_order(prev.error, row.error, prev.h, row.h)
        report.rows.append(row)
    return report
