"""Uniform rectangular grids, node-indexed fields and the velocity model.

Logical node indices are 1-based (``i = 1..nx``) at every public entry point
of this module; arrays are stored 0-based with shape ``(nx, ny, nz)`` so that
``u[i-1, j-1, k-1]`` is the value at node ``(i, j, k)``.  The linear ordering
used for serialization is x-fastest, then y, then z (Fortran order of the
``(nx, ny, nz)`` array).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MIN_NODES = 5


@dataclass(frozen=True)
class Grid3D:
    nx: int
    ny: int
    nz: int
    hx: float
    hy: float
    hz: float
    x0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < MIN_NODES:
                raise ValueError(f"{name} must be an integer >= {MIN_NODES}, got {n}")
            object.__setattr__(self, name, int(n))
        for name in ("hx", "hy", "hz"):
            h = float(getattr(self, name))
            if not (h > 0 and np.isfinite(h)):
                raise ValueError(f"{name} must be positive and finite, got {h}")
            object.__setattr__(self, name, h)

    @classmethod
    def from_box(cls, x0, x1, y0, y1, z0, z1, h, hy=None, hz=None, tol=1e-9):
        """Grid with spacing ``h`` covering ``[x0,x1]x[y0,y1]x[z0,z1]``.

        Each extent must be an integer multiple of its spacing to within
        ``tol`` (relative), otherwise ``ValueError`` is raised.
        """
        spacings = (h, h if hy is None else hy, h if hz is None else hz)
        counts = []
        for (a, b), s, name in zip(((x0, x1), (y0, y1), (z0, z1)), spacings, "xyz"):
            if not b > a:
                raise ValueError(f"degenerate {name}-extent [{a}, {b}]")
            cells = (b - a) / s
            if abs(cells - round(cells)) > tol * max(1.0, cells):
                raise ValueError(
                    f"{name}-extent {b - a} is not an integer multiple of h={s}")
            counts.append(int(round(cells)) + 1)
        return cls(*counts, *spacings, x0, y0, z0)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spacing(self) -> tuple[float, float, float]:
        return (self.hx, self.hy, self.hz)

    @property
    def origin(self) -> tuple[float, float, float]:
        return (self.x0, self.y0, self.z0)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def is_uniform(self) -> bool:
        return bool(np.isclose(self.hx, self.hy, rtol=1e-12)
                    and np.isclose(self.hx, self.hz, rtol=1e-12))

    @property
    def upper(self) -> tuple[float, float, float]:
        return tuple(o + (n - 1) * h for o, n, h in
                     zip(self.origin, self.shape, self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def mesh(self):
        """Broadcastable coordinate arrays of shapes (nx,1,1), (1,ny,1), (1,1,nz)."""
        return np.ix_(self.axis_coords(0), self.axis_coords(1), self.axis_coords(2))

    def _check(self, i, j, k):
        for idx, n, name in zip((i, j, k), self.shape, "ijk"):
            if not 1 <= idx <= n:
                raise IndexError(f"{name}={idx} outside 1..{n}")

    def node_coords(self, i: int, j: int, k: int) -> tuple[float, float, float]:
        self._check(i, j, k)
        return (self.x0 + (i - 1) * self.hx,
                self.y0 + (j - 1) * self.hy,
                self.z0 + (k - 1) * self.hz)

    def linear_index(self, i: int, j: int, k: int) -> int:
        """0-based position of node (i, j, k) in the x-fastest ordering."""
        self._check(i, j, k)
        return (i - 1) + self.nx * ((j - 1) + self.ny * (k - 1))

    def node_index(self, linear: int) -> tuple[int, int, int]:
        if not 0 <= linear < self.size:
            raise IndexError(f"linear index {linear} outside 0..{self.size - 1}")
        k, rem = divmod(linear, self.nx * self.ny)
        j, i = divmod(rem, self.nx)
        return (i + 1, j + 1, k + 1)

    def nearest_node(self, x, y, z) -> tuple[int, int, int]:
        idx = []
        for v, o, h, n in zip((x, y, z), self.origin, self.spacing, self.shape):
            m = int(np.floor((v - o) / h + 0.5)) + 1
            idx.append(min(max(m, 1), n))
        return tuple(idx)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


@dataclass
class ScalarField3D:
    """Real values at every node of ``grid``, stored as an (nx, ny, nz) array."""

    grid: Grid3D
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.shape != self.grid.shape:
            raise ValueError(f"data shape {self.data.shape} != grid shape {self.grid.shape}")

    @classmethod
    def from_values(cls, grid: Grid3D, values) -> "ScalarField3D":
        values = np.asarray(values, dtype=float)
        if values.size != grid.size:
            raise ValueError(f"expected {grid.size} values, got {values.size}")
        return cls(grid, values.reshape(grid.shape, order="F"))

    @property
    def values(self) -> np.ndarray:
        """Flat copy in x-fastest order."""
        return self.data.ravel(order="F")

    def __getitem__(self, ijk):
        i, j, k = ijk
        self.grid._check(i, j, k)
        return self.data[i - 1, j - 1, k - 1]

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data)))


def sample(func: Callable, grid: Grid3D, *args) -> np.ndarray:
    """Evaluate a vectorized ``func(x, y, z, *args)`` at every node."""
    x, y, z = grid.mesh()
    out = func(x, y, z, *args)
    return np.broadcast_to(np.asarray(out, dtype=float), grid.shape).copy()


@dataclass
class VelocityModel:
    """Wave speed callable and the cached squared speed ``c = nu**2`` at nodes."""

    nu: Callable
    grid: Grid3D
    c: np.ndarray = field(repr=False)

    @property
    def c_field(self) -> ScalarField3D:
        return ScalarField3D(self.grid, self.c)

    @property
    def nu_max(self) -> float:
        return float(np.sqrt(self.c.max()))

    @property
    def nu_min(self) -> float:
        return float(np.sqrt(self.c.min()))


def build_velocity_field(nu: Callable, grid: Grid3D) -> VelocityModel:
    """Sample ``nu(x, y, z)`` on the grid and cache ``c = nu**2``.

    Raises ``ValueError`` naming the first (1-based) node where the speed is
    non-positive or non-finite.
    """
    speed = sample(nu, grid)
    bad = ~(np.isfinite(speed) & (speed > 0))
    if bad.any():
        i, j, k = (int(v) + 1 for v in np.argwhere(bad)[0])
        raise ValueError(
            f"wave speed must be positive and finite; got {speed[i-1, j-1, k-1]} "
            f"at node ({i}, {j}, {k}) = {grid.node_coords(i, j, k)}")
    return VelocityModel(nu=nu, grid=grid, c=speed * speed)


@dataclass
class WaveState:
    """The two stored time levels of the three-level scheme.

    ``u_prev`` holds level ``step - 1`` and ``u_curr`` level ``step``; the
    clock is ``t = step * tau``.
    """

    grid: Grid3D
    u_prev: np.ndarray
    u_curr: np.ndarray
    step: int
    tau: float

    def __post_init__(self):
        for name in ("u_prev", "u_curr"):
            if getattr(self, name).shape != self.grid.shape:
                raise ValueError(f"{name} does not match the grid shape")

    @property
    def t(self) -> float:
        return self.step * self.tau

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u_curr)) and np.all(np.isfinite(self.u_prev)))
