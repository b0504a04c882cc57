"""Command line interface: ``padeadi {run,convergence,stability-scan,energy-probe,info}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure or divergence.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .adi import CFL_LIMIT
from .config import load_config
from .diagnostics import (DENSE_MAX_NODES, energy, energy_lower_bound, spectral_bounds,
                          unfactored_step)
from .errors import ConfigurationError
from .expr import parse_number
from .grid import Grid3D, WaveState, build_velocity_field
from .harness import convergence_study, run_simulation
from .snapshot import export_slice, export_snapshot

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _parse_schedule(text: str):
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigurationError(f"schedule entry {item!r} must be h:tau")
        h, tau = item.split(":", 1)
        pairs.append((parse_number(h), parse_number(tau)))
    if not pairs:
        raise ConfigurationError("empty schedule")
    return pairs


def _parse_list(text: str):
    return [parse_number(p) for p in text.split(",") if p.strip()]


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    case = cfg.case
    pending = sorted(cfg.snapshot_times)
    outdir = Path(args.output) if args.output else cfg.output_dir
    written = []

    def on_step(state):
        while pending and abs(state.t - pending[0]) <= 0.5 * state.tau:
            ts = pending.pop(0)
            outdir.mkdir(parents=True, exist_ok=True)
            written.append(export_snapshot(state, outdir / f"snapshot_t{ts:.4f}.wf3d"))
            for axis, idx in cfg.slices:
                written.append(export_slice(state, axis, idx,
                                            outdir / f"slice_{axis}{idx}_t{ts:.4f}.csv"))

    res = run_simulation(case, cfg.h, cfg.tau, cfg.scheme, override=args.override,
                         callback=on_step)
    g = res.state.grid
    print(f"case {case.name}: grid {g.nx}x{g.ny}x{g.nz}, h={cfg.h:.6g}, tau={cfg.tau:.6g}, "
          f"steps={res.steps}, cfl={res.cfl_ratio:.6f}, wall={res.wall_time:.2f}s")
    for p in written:
        print(f"wrote {p}")
    if res.diverged:
        print(f"DIVERGED: {res.note}")
        return EXIT_NUMERIC
    if res.error is not None:
        print(f"max-norm error at T={res.state.t:.6g}: {res.error:.4e}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    rep = convergence_study(cfg.case, _parse_schedule(args.schedule), cfg.scheme,
                            override=args.override, title=f"{cfg.case.name} ({cfg.scheme})")
    print(rep.to_text())
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    return EXIT_NUMERIC if any(not math.isfinite(r.error) for r in rep.rows) else EXIT_OK


def cmd_stability_scan(args) -> int:
    cfg = load_config(args.config)
    taus = _parse_list(args.taus) if args.taus else [cfg.tau]
    for ratio in _parse_list(args.ratios):
        sched = [(tau / ratio, tau) for tau in taus]
        rep = convergence_study(cfg.case, sched, cfg.scheme, override=True,
                                title=f"tau/h = {ratio:.6f}")
        print(rep.to_text())
        print()
    return EXIT_OK


def cmd_energy_probe(args) -> int:
    cfg = load_config(args.config)
    case = cfg.case
    x0, x1, y0, y1, z0, z1 = case.domain
    n = args.nodes
    if not 6 <= n <= DENSE_MAX_NODES:
        raise ConfigurationError(f"--nodes must be in 6..{DENSE_MAX_NODES}")
    h = (x1 - x0) / (n - 1)
    grid = Grid3D.from_box(x0, x1, y0, y0 + (n - 1) * h, z0, z0 + (n - 1) * h, h)
    model = build_velocity_field(case.nu, grid)
    tau = args.cfl * h / model.nu_max
    rng = np.random.default_rng(args.seed)
    u0 = np.zeros(grid.shape)
    u1 = np.zeros(grid.shape)
    u0[1:-1, 1:-1, 1:-1] = rng.standard_normal((n - 2,) * 3)
    u1[1:-1, 1:-1, 1:-1] = u0[1:-1, 1:-1, 1:-1] + 0.1 * rng.standard_normal((n - 2,) * 3)
    state = WaveState(grid, u0, u1, 1, tau)
    S0 = energy(state, model).S
    drift, floor_ok = 0.0, True
    for _ in range(args.steps):
        state = unfactored_step(state, model)
        S = energy(state, model).S
        drift = max(drift, abs(S - S0))
        floor_ok &= S >= energy_lower_bound(state, model) - 1e-12 * max(1.0, abs(S0))
    tol = 1e-10 * max(1.0, abs(S0))
    sb = spectral_bounds(grid)
    print(f"grid {n}^3, tau={tau:.6g} (nu_max tau/h = {args.cfl}), steps={args.steps}")
    print(f"S_0 = {S0:.12e}, max |S_n - S_0| = {drift:.3e} (tolerance {tol:.1e})")
    print(f"spectral bounds: a_h={sb.a_h:.6f} m={sb.m:.6f} M={sb.M:g}; "
          f"coercivity floor {'holds' if floor_ok else 'VIOLATED'}")
    return EXIT_OK if drift <= tol and floor_ok else EXIT_NUMERIC


def cmd_info(args) -> int:
    print(f"padeadi {__version__}")
    print(f"kernel backend: {BACKEND}")
    print(f"CFL limit (max nu tau/h): {CFL_LIMIT:.15f}")
    print("schemes: adi4, explicit2")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="padeadi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one configuration to its final time")
    r.add_argument("config")
    r.add_argument("--override", action="store_true", help="run even if the CFL check fails")
    r.add_argument("--output", help="output directory (overrides [output] dir)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("convergence", help="error table over a list of (h, tau)")
    c.add_argument("config")
    c.add_argument("--schedule", required=True, help='e.g. "pi/10:1/16,pi/20:1/32"')
    c.add_argument("--csv", help="also write the table as CSV")
    c.add_argument("--override", action="store_true")
    c.set_defaults(func=cmd_convergence)

    s = sub.add_parser("stability-scan", help="refinement studies at fixed tau/h")
    s.add_argument("config")
    s.add_argument("--ratios", required=True, help='tau/h values, e.g. "9/(10*pi),19/(20*pi)"')
    s.add_argument("--taus", help="time steps to run at each ratio (default: config tau)")
    s.set_defaults(func=cmd_stability_scan)

    e = sub.add_parser("energy-probe", help="energy drift of the unfactored scheme")
    e.add_argument("config")
    e.add_argument("--nodes", type=int, default=7)
    e.add_argument("--steps", type=int, default=100)
    e.add_argument("--cfl", type=float, default=0.5)
    e.add_argument("--seed", type=int, default=0)
    e.set_defaults(func=cmd_energy_probe)

    i = sub.add_parser("info", help="version and backend")
    i.set_defaults(func=cmd_info)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
