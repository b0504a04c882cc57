"""Built-in test problems.

Example 1 and 2 are manufactured solutions on ``[0, pi]^3`` (homogeneous and
inhomogeneous Dirichlet data); Example 3 is a Ricker point source in a
layered-gradient medium on a 1280 x 1280 x 800 m box.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .adi import BoundarySpec, SourceSpec, ricker
from .errors import ConfigurationError

PI = math.pi


def _zero(x, y, z):
    return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y), np.shape(z)))


@dataclass
class ProblemCase:
    """Everything needed to run one experiment except the mesh sizes.

    ``h`` and ``tau`` are optional defaults used by the CLI when a config
    does not set them.
    """

    name: str
    domain: tuple
    nu: Callable
    source: SourceSpec
    bc: BoundarySpec
    f1: Callable
    f2: Callable = _zero
    exact: Callable | None = None
    T: float = 1.0
    h: float | None = None
    tau: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = tuple(float(v) for v in self.domain)
        if len(d) != 6:
            raise ConfigurationError("domain must be (x0, x1, y0, y1, z0, z1)")
        for a, b in zip(d[::2], d[1::2]):
            if not b > a:
                raise ConfigurationError(f"degenerate domain extent [{a}, {b}]")
        self.domain = d
        if not self.T > 0:
            raise ConfigurationError("final time T must be positive")
        if self.exact is not None:
            self.check_consistency()

    def sample_points(self):
        """The 27 points of the 3x3x3 lattice spanning the box (corners, faces, centre)."""
        axes = [(a, 0.5 * (a + b), b) for a, b in zip(self.domain[::2], self.domain[1::2])]
        return list(itertools.product(*axes))

    def check_consistency(self, tol: float = 1e-10):
        """Spot-check that ``exact`` matches ``f1``, ``f2`` and ``g`` at t = 0."""
        ex = self.exact
        d = 1e-3
        for p in self.sample_points():
            x, y, z = p
            u0 = float(ex(x, y, z, 0.0))
            scale = max(1.0, abs(u0))
            if abs(float(self.f1(x, y, z)) - u0) > tol * scale:
                raise ConfigurationError(f"f1 disagrees with the exact solution at {p}")
            # fourth-order central difference for u_t(0)
            ut = (-ex(x, y, z, 2 * d) + 8 * ex(x, y, z, d)
                  - 8 * ex(x, y, z, -d) + ex(x, y, z, -2 * d)) / (12 * d)
            if abs(float(self.f2(x, y, z)) - float(ut)) > max(tol, 1e-9) * scale:
                raise ConfigurationError(f"f2 disagrees with the exact solution at {p}")
            on_face = any(v in (a, b) for v, a, b in zip(p, self.domain[::2], self.domain[1::2]))
            if on_face and not self.bc.is_zero:
                if abs(float(self.bc.g(x, y, z, 0.0)) - u0) > tol * scale:
                    raise ConfigurationError(f"boundary data disagrees with exact at {p}")
            elif on_face and abs(u0) > tol:
                raise ConfigurationError(f"zero boundary data but exact is {u0} at {p}")

    def residual(self, x, y, z, t, d: float = 0.02) -> np.ndarray:
        """``u_tt - nu^2 Lap u - s`` for the exact solution (sixth-order differences).

        Only meaningful for analytic sources; used as a self-consistency
        check of manufactured problems.
        """
        if self.exact is None or self.source.kind != "analytic":
            raise ConfigurationError("residual needs an exact solution and an analytic source")
        ex = self.exact
        w = (2.0 / 180, -27.0 / 180, 270.0 / 180, -490.0 / 180, 270.0 / 180, -27.0 / 180, 2.0 / 180)

        def second(f):
            return sum(c * f(k - 3) for k, c in enumerate(w)) / (d * d)

        utt = second(lambda k: ex(x, y, z, t + k * d))
        lap = (second(lambda k: ex(x + k * d, y, z, t)) + second(lambda k: ex(x, y + k * d, z, t))
               + second(lambda k: ex(x, y, z + k * d, t)))
        return utt - self.nu(x, y, z) ** 2 * lap - self.source.analytic(x, y, z, t)


# ---------------------------------------------------------------------------

def _example1():
    def nu(x, y, z):
        return np.sqrt(1.0 + (x / PI) ** 2 + (y / PI) ** 2 + (z / PI) ** 2)

    def exact(x, y, z, t):
        return np.cos(t) * np.sin(x) * np.sin(y) * np.sin(z)

    def s(x, y, z, t):
        # u_tt - c Lap u with c = nu^2 and Lap u = -3u
        r = (x / PI) ** 2 + (y / PI) ** 2 + (z / PI) ** 2
        return (2.0 + 3.0 * r) * exact(x, y, z, t)

    return ProblemCase("example1", (0, PI) * 3, nu, SourceSpec.from_function(s),
                       BoundarySpec.zero(), lambda x, y, z: exact(x, y, z, 0.0),
                       _zero, exact, T=1.0, h=PI / 10, tau=0.0025)


def _example2():
    def nu(x, y, z):
        return np.sqrt(1.0 + np.sin(x) ** 2 + np.sin(y) ** 2 + np.sin(z) ** 2)

    def exact(x, y, z, t):
        return np.exp(-t) * np.cos(x) * np.cos(y) * np.cos(z)

    def s(x, y, z, t):
        r = np.sin(x) ** 2 + np.sin(y) ** 2 + np.sin(z) ** 2
        return (4.0 + 3.0 * r) * exact(x, y, z, t)

    return ProblemCase("example2", (0, PI) * 3, nu, SourceSpec.from_function(s),
                       BoundarySpec(exact), lambda x, y, z: exact(x, y, z, 0.0),
                       lambda x, y, z: -exact(x, y, z, 0.0), exact, T=1.0, h=PI / 16,
                       tau=1 / 20)


EX3_EXTENT = (1280.0, 1280.0, 800.0)
EX3_FP = 10.0
EX3_DELAY = 0.5 / EX3_FP
EX3_SOURCE = (640.0, 640.0, 400.0)
EX3_H = 10.0
MIN_POINTS_PER_WAVELENGTH = 10.0


def example3_velocity(x, y, z):
    xm, ym, zm = EX3_EXTENT
    return 1200.0 + 400.0 * (x / xm) ** 2 + 100.0 * (y / ym) ** 2 + 800.0 * (z / zm) ** 2


def points_per_wavelength(nu_min: float, fp: float, h: float) -> float:
    return nu_min / fp / h


def _example3():
    nu_min = 1200.0  # attained at the origin; the profile grows along every axis
    ppw = points_per_wavelength(nu_min, EX3_FP, EX3_H)
    if ppw < MIN_POINTS_PER_WAVELENGTH:
        raise ConfigurationError(f"only {ppw:.1f} grid points per wavelength")
    xm, ym, zm = EX3_EXTENT
    src = SourceSpec.point_source(EX3_SOURCE, ricker(EX3_FP, EX3_DELAY))
    return ProblemCase("example3", (0, xm, 0, ym, 0, zm), example3_velocity, src,
                       BoundarySpec.zero(), _zero, _zero, None, T=0.5, h=EX3_H, tau=0.001,
                       meta={"fp": EX3_FP, "delay": EX3_DELAY, "points_per_wavelength": ppw})


_BUILTINS = {1: _example1, 2: _example2, 3: _example3}


def builtin_example(example_id: int) -> ProblemCase:
    try:
        make = _BUILTINS[int(example_id)]
    except (KeyError, ValueError, TypeError):
        raise ConfigurationError(f"unknown example {example_id!r}; choose 1, 2 or 3") from None
    return make()
