"""Text run configurations.

A config is an INI-style file of ``key = value`` lines grouped in sections::

    [problem]
    example = 2            # start from a built-in case (optional)

    [grid]
    domain = 0, pi, 0, pi, 0, pi
    h = pi/16

    [time]
    tau = 1/20
    T = 1

    [velocity]
    nu = sqrt(1 + sin(x)^2 + sin(y)^2 + sin(z)^2)    # or: model = example2

    [source]
    kind = expression      # none | example1 | example2 | example3 | ricker | expression
    s = ...

    [boundary]
    g = exact              # zero | exact | <expression>
    exact = exp(-t)*cos(x)*cos(y)*cos(z)

    [initial]
    f1 = cos(x)*cos(y)*cos(z)
    f2 = -cos(x)*cos(y)*cos(z)

    [output]
    dir = out
    snapshots = 0.2, 0.5
    slices = x:65
    scheme = adi4

Numbers may be constant expressions (``pi/16``).  Sections not given fall
back to the built-in example named in ``[problem]``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .adi import BoundarySpec, SourceSpec, ricker
from .errors import ConfigurationError
from .expr import Expression, parse_number
from .harness import SCHEMES
from .problems import ProblemCase, builtin_example

SECTIONS = ("problem", "grid", "time", "velocity", "source", "boundary", "initial", "output")


@dataclass
class RunConfig:
    case: ProblemCase
    h: float
    tau: float
    scheme: str = "adi4"
    output_dir: Path = Path("out")
    snapshot_times: tuple = ()
    slices: tuple = ()  # (axis letter, 1-based index)
    source_path: Path | None = None
    extras: dict = field(default_factory=dict)


def _numbers(text, n=None, what="value"):
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    vals = [parse_number(p) for p in parts]
    if n is not None and len(vals) != n:
        raise ConfigurationError(f"{what} needs {n} numbers, got {len(vals)}")
    return vals


def _get(cp, section, key, default=None):
    if cp.has_section(section) and cp.has_option(section, key):
        return cp.get(section, key).strip()
    return default


def _builtin_velocity(name):
    cases = {"example1": 1, "example2": 2, "example3": 3}
    if name not in cases:
        raise ConfigurationError(f"unknown velocity model {name!r}")
    return builtin_example(cases[name]).nu


def parse_config(text: str, source_path=None) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   strict=True)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigurationError(f"unknown section(s): {', '.join(sorted(unknown))}")

    ex = _get(cp, "problem", "example")
    base = builtin_example(int(parse_number(ex))) if ex else None

    # geometry and time
    dom = _get(cp, "grid", "domain")
    domain = _numbers(dom, 6, "domain") if dom else (base.domain if base else None)
    if domain is None:
        raise ConfigurationError("[grid] domain is required")
    h = _get(cp, "grid", "h")
    h = parse_number(h) if h else (base.h if base else None)
    tau = _get(cp, "time", "tau")
    tau = parse_number(tau) if tau else (base.tau if base else None)
    T = _get(cp, "time", "T")
    T = parse_number(T) if T else (base.T if base else None)
    for name, v in (("[grid] h", h), ("[time] tau", tau), ("[time] T", T)):
        if v is None:
            raise ConfigurationError(f"{name} is required")
        if not v > 0:
            raise ConfigurationError(f"{name} must be positive")

    # velocity
    nu_text, model = _get(cp, "velocity", "nu"), _get(cp, "velocity", "model")
    if nu_text and model:
        raise ConfigurationError("[velocity] takes either nu or model, not both")
    if nu_text:
        nu = Expression(nu_text).space
    elif model:
        nu = _builtin_velocity(model)
    elif base:
        nu = base.nu
    else:
        raise ConfigurationError("[velocity] needs nu = <expression> or model = <name>")

    # exact solution and boundary data
    exact_text = _get(cp, "boundary", "exact")
    exact = Expression(exact_text) if exact_text else (base.exact if base else None)
    g = _get(cp, "boundary", "g")
    if g is None:
        bc = base.bc if base else BoundarySpec.zero()
    elif g == "zero":
        bc = BoundarySpec.zero()
    elif g == "exact":
        if exact is None:
            raise ConfigurationError("g = exact needs an exact solution")
        bc = BoundarySpec(exact)
    else:
        bc = BoundarySpec(Expression(g))

    # source
    kind = _get(cp, "source", "kind")
    if kind is None:
        src = base.source if base else SourceSpec.none()
    elif kind == "none":
        src = SourceSpec.none()
    elif kind in ("example1", "example2", "example3"):
        src = builtin_example(int(kind[-1])).source
    elif kind == "expression":
        s = _get(cp, "source", "s")
        if not s:
            raise ConfigurationError("kind = expression needs s = <expression>")
        src = SourceSpec.from_function(Expression(s))
    elif kind == "ricker":
        loc = _get(cp, "source", "location")
        fp = _get(cp, "source", "fp")
        if not (loc and fp):
            raise ConfigurationError("a ricker source needs location and fp")
        fp = parse_number(fp)
        delay = _get(cp, "source", "delay")
        delay = parse_number(delay) if delay else 0.5 / fp
        src = SourceSpec.point_source(_numbers(loc, 3, "location"), ricker(fp, delay))
    else:
        raise ConfigurationError(f"unknown source kind {kind!r}")

    # initial data
    f1_text, f2_text = _get(cp, "initial", "f1"), _get(cp, "initial", "f2")
    zero = Expression("0").space
    f1 = Expression(f1_text).space if f1_text else (base.f1 if base else zero)
    f2 = Expression(f2_text).space if f2_text else (base.f2 if base else zero)

    if base is not None:
        case = replace(base, domain=tuple(domain), nu=nu, source=src, bc=bc, f1=f1, f2=f2,
                       exact=exact, T=T, h=h, tau=tau)
    else:
        case = ProblemCase("custom", tuple(domain), nu, src, bc, f1, f2, exact, T, h, tau)

    # output
    scheme = _get(cp, "output", "scheme", "adi4")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"scheme must be one of {SCHEMES}")
    outdir = Path(_get(cp, "output", "dir", "out"))
    snaps = _get(cp, "output", "snapshots")
    snaps = tuple(_numbers(snaps)) if snaps else ()
    for ts in snaps:
        if not 0 <= ts <= T:
            raise ConfigurationError(f"snapshot time {ts} outside [0, T]")
    slices = []
    for item in (_get(cp, "output", "slices") or "").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            axis, idx = item.split(":")
            axis, idx = axis.strip().lower(), int(idx)
        except ValueError:
            raise ConfigurationError(f"slice {item!r} must look like x:65") from None
        if axis not in "xyz" or len(axis) != 1:
            raise ConfigurationError(f"bad slice axis in {item!r}")
        slices.append((axis, idx))
    if source_path is not None and not outdir.is_absolute():
        outdir = Path(source_path).parent / outdir
    return RunConfig(case, h, tau, scheme, outdir, snaps, tuple(slices),
                     Path(source_path) if source_path else None)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path)
