"""Compact fourth-order ADI time stepping for u_tt = c (u_xx + u_yy + u_zz) + s.

One step solves the factored scheme

    [1 - w T_x/12] [1 - w T_y/12] [1 - w T_z/12] dtt u
        = w (T_x + T_y + T_z) u^n + tau^2 (1 + dtt/12) s,

with ``w = tau^2 c / h^2`` and ``T = delta2 / (1 + delta2/12)``, as three
sweeps of tridiagonal line solves:

1. x-sweep for ``u**`` on every interior (j, k) line, the right-hand side
   assembled from ``u^n`` with the five-point substitute of ``T`` in y and z,
2. y-sweep for ``u*`` on every interior (i, k) line,
3. z-sweep for ``dtt u = u^{n+1} - 2u^n + u^{n-1}`` on every interior (i, j)
   line.

The Dirichlet ends of the x- and y-sweeps (``u**`` on the i-faces, ``u*`` on
the j-faces) come from small plane solves driven by the exact boundary data.
Values of ``u**`` on the j-faces and ``u*`` on the k-faces enter only through
the right-hand sides and are extrapolated from the interior with the
one-sided cubic formula.

Arrays are ``(nx, ny, nz)`` with 0-based storage; "interior" always means
positions ``1..n-2`` of an axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import AssemblyError, ConfigurationError, UnsupportedConfiguration
from .grid import Grid3D, VelocityModel, WaveState, sample
from .stencils import (PADE_DIAG, PADE_OFF, avg12, compact_laplacian, d2,
                       ghost_extrapolate, pade_ratio, wide_d2)
from .tridiag import solve_lines

CFL_LIMIT = 1.0 / math.sqrt(3.0)
CLOSURES = ("wide", "pade")


# ---------------------------------------------------------------------------
# problem data

def ricker(fp: float, delay: float) -> Callable:
    """Ricker wavelet with peak frequency ``fp`` centred at ``t = delay``."""
    a = (math.pi * fp) ** 2

    def wavelet(t):
        arg = a * (np.asarray(t, dtype=float) - delay) ** 2
        return (1.0 - 2.0 * arg) * np.exp(-arg)

    return wavelet


@dataclass(frozen=True)
class SourceSpec:
    """Source term ``s(x, y, z, t)``.

    ``kind`` is ``"none"``, ``"analytic"`` (a vectorized callable of
    ``x, y, z, t``) or ``"point"`` (a wavelet ``w(t)`` collocated on the node
    nearest ``location`` with weight ``1 / (hx hy hz)``).
    """

    kind: str = "none"
    analytic: Callable | None = None
    location: tuple[float, float, float] | None = None
    wavelet: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("none", "analytic", "point"):
            raise ConfigurationError(f"unknown source kind {self.kind!r}")
        if self.kind == "analytic" and self.analytic is None:
            raise ConfigurationError("analytic source needs a callable")
        if self.kind == "point" and (self.location is None or self.wavelet is None):
            raise ConfigurationError("point source needs a location and a wavelet")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def from_function(cls, s: Callable):
        return cls("analytic", analytic=s)

    @classmethod
    def point_source(cls, location, wavelet: Callable):
        return cls("point", location=tuple(float(v) for v in location), wavelet=wavelet)

    @property
    def is_zero(self) -> bool:
        return self.kind == "none"

    def source_node(self, grid: Grid3D) -> tuple[int, int, int]:
        """0-based node carrying a point source; validates its placement."""
        lo, hi = grid.origin, grid.upper
        if not all(a < v < b for v, a, b in zip(self.location, lo, hi)):
            raise ConfigurationError(
                f"point source {self.location} is not inside the open domain")
        ijk = grid.nearest_node(*self.location)
        if any(m in (1, n) for m, n in zip(ijk, grid.shape)):
            raise ConfigurationError(
                f"point source {self.location} maps to boundary node {ijk}")
        return tuple(m - 1 for m in ijk)

    def sample(self, grid: Grid3D, t: float) -> np.ndarray:
        if self.kind == "none":
            return grid.zeros()
        if self.kind == "analytic":
            return sample(self.analytic, grid, t)
        out = grid.zeros()
        out[self.source_node(grid)] = float(self.wavelet(t)) / (grid.hx * grid.hy * grid.hz)
        return out


@dataclass(frozen=True)
class BoundarySpec:
    """Dirichlet data ``g(x, y, z, t)`` on the six faces (``None`` means zero)."""

    g: Callable | None = None

    @classmethod
    def zero(cls):
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.g is None

    def plane(self, grid: Grid3D, axis: int, side: int, t: float) -> np.ndarray:
        """Values on the face ``axis`` = first (side 0) or last (side -1) node."""
        shape = tuple(n for a, n in enumerate(grid.shape) if a != axis)
        if self.g is None:
            return np.zeros(shape)
        coords = list(grid.mesh())
        pos = 0 if side == 0 else grid.shape[axis] - 1
        coords[axis] = np.take(coords[axis], [pos], axis=axis)
        vals = np.broadcast_to(np.asarray(self.g(*coords, t), dtype=float),
                               tuple(1 if a == axis else n for a, n in enumerate(grid.shape)))
        return np.take(vals, 0, axis=axis).copy()

    def apply(self, u: np.ndarray, grid: Grid3D, t: float) -> np.ndarray:
        """Overwrite the six faces of ``u`` in place with ``g(., t)``."""
        for axis in range(3):
            for side in (0, -1):
                idx = [slice(None)] * 3
                idx[axis] = side
                u[tuple(idx)] = self.plane(grid, axis, side, t)
        return u

    def check_initial(self, f1: Callable, grid: Grid3D, tol: float = 1e-10):
        """Raise if ``g(., 0)`` and ``f1`` disagree on the boundary."""
        u0 = sample(f1, grid)
        g0 = self.apply(u0.copy(), grid, 0.0)
        err = float(np.abs(g0 - u0).max())
        scale = max(1.0, float(np.abs(u0).max()))
        if err > tol * scale:
            raise ConfigurationError(
                f"boundary data disagrees with the initial condition by {err:.3e}")


class CFLResult(NamedTuple):
    ratio: float
    stable: bool


def cfl_check(model: VelocityModel, tau: float, h: float | None = None) -> CFLResult:
    """Courant number ``max nu tau / h`` against the ``1/sqrt(3)`` limit.

    Only uniform grids are supported: the bound is derived for
    ``h = hx = hy = hz``.
    """
    grid = model.grid
    if not grid.is_uniform:
        raise UnsupportedConfiguration(
            "the CFL bound assumes equal spacings hx = hy = hz; got "
            f"{grid.spacing}")
    if h is None:
        h = grid.hx
    ratio = model.nu_max * tau / h
    return CFLResult(float(ratio), bool(ratio < CFL_LIMIT))


def time_averaged_source(src: SourceSpec, grid: Grid3D, t_prev, t, t_next) -> np.ndarray:
    """``tau^2 (s^{n+1} + 10 s^n + s^{n-1}) / 12`` at every node."""
    tau = t_next - t
    if src.is_zero:
        return grid.zeros()
    return tau * tau * (src.sample(grid, t_next) + 10.0 * src.sample(grid, t)
                        + src.sample(grid, t_prev)) / 12.0


class SweepCoefficients(NamedTuple):
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray


def sweep_coefficients(inv_c, lam: float, axis: int) -> SweepCoefficients:
    """Row-aligned diagonals of ``(1 + delta2/12)(1/c) - lam delta2/12``.

    ``inv_c`` holds ``1/c`` on full lines along ``axis``; the returned arrays
    cover the interior rows of those lines.
    """
    n = inv_c.shape[axis]

    def take(a, b):
        return np.take(inv_c, np.arange(a, b), axis=axis)

    sub = take(0, n - 2) / 12.0 - lam / 12.0
    diag = 10.0 * take(1, n - 1) / 12.0 + lam / 6.0
    sup = take(2, n) / 12.0 - lam / 12.0
    return SweepCoefficients(sub, diag, sup)


def _apply_sweep_operator(v, inv_c, lam, axis):
    """``[(1 + delta2/12)(1/c) - lam delta2/12] v`` at interior rows of ``axis``."""
    return avg12(v * inv_c, axis) - (lam / 12.0) * d2(v, axis)


def _solve_dirichlet(sub, diag, sup, rhs, lo, hi, axis):
    """Tridiagonal solve along ``axis`` with known end values moved to the rhs."""
    rhs = rhs.copy()
    first = [slice(None)] * rhs.ndim
    last = [slice(None)] * rhs.ndim
    first[axis], last[axis] = 0, -1
    first, last = tuple(first), tuple(last)
    rhs[first] -= np.broadcast_to(sub, rhs.shape)[first] * lo
    rhs[last] -= np.broadcast_to(sup, rhs.shape)[last] * hi
    return solve_lines(sub, diag, sup, rhs, axis=axis)


def _compact_solve(rhs, lo, hi, axis):
    """Solve ``(1 + delta2/12) q = rhs`` along ``axis`` with known ends."""
    return _solve_dirichlet(PADE_OFF, PADE_DIAG, PADE_OFF, rhs, lo, hi, axis)


def _extrapolate_face(a, axis, side):
    """Fill face ``side`` of ``a`` along ``axis`` from the four interior layers."""
    n = a.shape[axis]
    q = (1, 2, 3, 4) if side == 0 else (n - 2, n - 3, n - 4, n - 5)
    layers = [np.take(a, m, axis=axis) for m in q]
    return ghost_extrapolate(*layers)


# ---------------------------------------------------------------------------
# stepper

class ADIStepper:
    """Advances :class:`WaveState` objects of one problem by one step.

    Coefficient arrays that depend only on the velocity model and the time
    step are built once here.  ``closure`` selects how the scheme treats
    values beyond the grid lines: ``"wide"`` (default) uses the five-point
    ``delta2 (1 - delta2/12)`` substitute with extrapolated ghost values and
    extrapolated auxiliary boundary values; ``"pade"`` applies the exact
    ``T`` operators with zero extension and is only meaningful for
    homogeneous Dirichlet problems (it reproduces the factored scheme
    algebraically, which the diagnostics use as a reference).
    """

    def __init__(self, model: VelocityModel, src: SourceSpec, bc: BoundarySpec,
                 tau: float, closure: str = "wide"):
        if closure not in CLOSURES:
            raise ConfigurationError(f"closure must be one of {CLOSURES}")
        grid = model.grid
        if min(grid.shape) < 6:
            raise ConfigurationError("the ADI sweeps need at least 6 nodes per axis")
        if src.kind == "point":
            src.source_node(grid)
        if closure == "pade" and not bc.is_zero:
            raise ConfigurationError("the 'pade' closure requires zero boundary data")
        self.grid = grid
        self.model = model
        self.src = src
        self.bc = bc
        self.tau = float(tau)
        self.closure = closure
        self.lam = tuple(self.tau ** 2 / h ** 2 for h in grid.spacing)
        self.c = model.c
        self.inv_c = 1.0 / model.c
        inner = self.inv_c
        self._coef = (
            sweep_coefficients(inner[:, 1:-1, 1:-1], self.lam[0], 0),
            sweep_coefficients(inner[1:-1, :, 1:-1], self.lam[1], 1),
            sweep_coefficients(inner[1:-1, 1:-1, :], self.lam[2], 2),
        )

    # -- boundary helpers ---------------------------------------------------

    def _dtt_plane(self, axis, side, n):
        """Second time difference of the boundary data on a face, step n."""
        grid, bc, tau = self.grid, self.bc, self.tau
        if bc.is_zero:
            return np.zeros(tuple(m for a, m in enumerate(grid.shape) if a != axis))
        t = n * tau
        return (bc.plane(grid, axis, side, t + tau) - 2.0 * bc.plane(grid, axis, side, t)
                + bc.plane(grid, axis, side, t - tau))

    def _plane_u_star(self, D, inv_c, lam_z):
        """u* on a boundary face from its second time difference ``D``.

        ``D`` is a 2D face array whose second axis is z.  Solves
        ``(1 + dz2/12)(u*/c) = [(1 + dz2/12)(1/c) - lam dz2/12] D`` on the
        interior z-lines of the face; edge values stay equal to ``D``.
        """
        rhs = _apply_sweep_operator(D, inv_c, lam_z, 1)[1:-1]
        Dc = D * inv_c
        q = _compact_solve(rhs, Dc[1:-1, 0], Dc[1:-1, -1], 1)
        out = D.copy()
        out[1:-1, 1:-1] = q / inv_c[1:-1, 1:-1]
        return out

    # -- sweeps ---------------------------------------------------------------

    def assemble_x_rhs(self, state: WaveState) -> np.ndarray:
        """Right-hand side of the x-sweep on interior nodes, shape (nx-2, ny-2, nz-2)."""
        u = state.u_curr
        lx, ly, lz = self.lam
        if self.closure == "wide":
            wy = wide_d2(u[:, :, 1:-1], 1)
            wz = wide_d2(u[:, 1:-1, :], 2)
        else:
            wy = pade_ratio(u, 1)[:, 1:-1, 1:-1]
            wz = pade_ratio(u, 2)[:, 1:-1, 1:-1]
        g = ly * wy + lz * wz
        if not self.src.is_zero:
            n, tau = state.step, self.tau
            s = time_averaged_source(self.src, self.grid, (n - 1) * tau, n * tau, (n + 1) * tau)
            g += (s * self.inv_c)[:, 1:-1, 1:-1]
        if self.closure == "pade":
            g[0] = 0.0
            g[-1] = 0.0
        F = lx * d2(u[:, 1:-1, 1:-1], 0) + avg12(g, 0)
        if not np.all(np.isfinite(F)):
            i, j, k = (int(v) + 2 for v in np.argwhere(~np.isfinite(F))[0])
            raise AssemblyError(f"non-finite x-sweep right-hand side at node ({i}, {j}, {k})")
        return F

    def x_sweep_boundary_planes(self, state: WaveState):
        """u** (and the intermediate u*) on the faces i = 1 and i = nx.

        Returns ``(u_star_star_planes, u_star_planes)``, each a pair of
        (ny, nz) arrays for the low and high face.
        """
        lx, ly, lz = self.lam
        uss, us = [], []
        for side in (0, -1):
            D = self._dtt_plane(0, side, state.step)
            inv_c = self.inv_c[side]
            ustar = self._plane_u_star(D, inv_c, lz)
            # (1 + dy2/12)(u**/c) = [(1 + dy2/12)(1/c) - ly dy2/12] u*
            rhs = _apply_sweep_operator(ustar, inv_c, ly, 0)[:, 1:-1]
            Dc = D * inv_c
            q = _compact_solve(rhs, Dc[0, 1:-1], Dc[-1, 1:-1], 0)
            plane = D.copy()
            plane[1:-1, 1:-1] = q * self.c[side][1:-1, 1:-1]
            uss.append(plane)
            us.append(ustar)
        return uss, us

    def x_sweep(self, F, planes) -> np.ndarray:
        """Solve the x-lines for u**; returns the full (nx, ny, nz) array.

        Interior values come from the line solves, the i-faces from
        ``planes``; the j-faces (read by the y-sweep right-hand side) are
        extrapolated from the interior, or zero for the ``"pade"`` closure.
        """
        sub, diag, sup = self._coef[0]
        lo, hi = planes[0][1:-1, 1:-1], planes[1][1:-1, 1:-1]
        uss = np.zeros(self.grid.shape)
        uss[1:-1, 1:-1, 1:-1] = _solve_dirichlet(sub, diag, sup, F, lo, hi, 0)
        uss[0], uss[-1] = planes[0], planes[1]
        if self.closure == "wide":
            for side in (0, -1):
                uss[1:-1, side, 1:-1] = _extrapolate_face(uss, 1, side)[1:-1, 1:-1]
        return uss

    def y_sweep_boundary_planes(self, state: WaveState):
        """u* on the faces j = 1 and j = ny as a pair of (nx, nz) arrays."""
        lz = self.lam[2]
        return [self._plane_u_star(self._dtt_plane(1, side, state.step),
                                   self.inv_c[:, side, :], lz)
                for side in (0, -1)]

    def y_sweep(self, uss, planes, x_face_u_star=None) -> np.ndarray:
        """Solve the y-lines for u*; returns the full (nx, ny, nz) array."""
        sub, diag, sup = self._coef[1]
        rhs = avg12((uss * self.inv_c)[1:-1, :, 1:-1], 1)
        lo, hi = planes[0][1:-1, 1:-1], planes[1][1:-1, 1:-1]
        us = np.zeros(self.grid.shape)
        us[1:-1, 1:-1, 1:-1] = _solve_dirichlet(sub, diag, sup, rhs, lo, hi, 1)
        us[:, 0, :], us[:, -1, :] = planes[0], planes[1]
        if x_face_u_star is not None:
            us[0, 1:-1, :] = x_face_u_star[0][1:-1, :]
            us[-1, 1:-1, :] = x_face_u_star[1][1:-1, :]
        if self.closure == "wide":
            for side in (0, -1):
                us[1:-1, 1:-1, side] = _extrapolate_face(us, 2, side)[1:-1, 1:-1]
        return us

    def z_sweep_update(self, us, state: WaveState) -> np.ndarray:
        """Solve the z-lines for ``dtt u`` and return u^{n+1} with exact faces."""
        sub, diag, sup = self._coef[2]
        n = state.step
        rhs = avg12((us * self.inv_c)[1:-1, 1:-1, :], 2)
        lo = self._dtt_plane(2, 0, n)[1:-1, 1:-1]
        hi = self._dtt_plane(2, -1, n)[1:-1, 1:-1]
        dtt = _solve_dirichlet(sub, diag, sup, rhs, lo, hi, 2)
        u_next = np.empty(self.grid.shape)
        u_next[1:-1, 1:-1, 1:-1] = (2.0 * state.u_curr[1:-1, 1:-1, 1:-1]
                                    - state.u_prev[1:-1, 1:-1, 1:-1] + dtt)
        self.bc.apply(u_next, self.grid, (n + 1) * self.tau)
        return u_next

    def advance(self, state: WaveState) -> WaveState:
        """One full time step; ``state`` itself is never modified."""
        F = self.assemble_x_rhs(state)
        uss_planes, us_x_planes = self.x_sweep_boundary_planes(state)
        uss = self.x_sweep(F, uss_planes)
        us_planes = self.y_sweep_boundary_planes(state)
        us = self.y_sweep(uss, us_planes, us_x_planes)
        u_next = self.z_sweep_update(us, state)
        return WaveState(state.grid, state.u_curr, u_next, state.step + 1, state.tau)


def advance(state: WaveState, model: VelocityModel, src: SourceSpec,
            bc: BoundarySpec, closure: str = "wide") -> WaveState:
    """Convenience wrapper: one step with a freshly built :class:`ADIStepper`."""
    return ADIStepper(model, src, bc, state.tau, closure).advance(state)


def first_step(f1: Callable, f2: Callable | None, model: VelocityModel,
               src: SourceSpec, bc: BoundarySpec, tau: float) -> WaveState:
    """Initial state holding ``u^0`` and a fourth-order Taylor ``u^1``.

    Time derivatives of the solution at ``t = 0`` are replaced using the
    equation itself (``u_tt = c Lap u + s`` and its time derivatives);
    Laplacians are compact fourth-order differences of the sampled fields
    and source time derivatives are central differences with step tau/100.
    """
    grid = model.grid
    c = model.c
    u0 = sample(f1, grid)
    v0 = sample(f2, grid) if f2 is not None else grid.zeros()
    d = tau / 100.0
    try:
        s0 = src.sample(grid, 0.0)
        sp, sm = src.sample(grid, d), src.sample(grid, -d)
    except (ArithmeticError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"cannot evaluate the source near t=0: {exc}") from exc
    s_t = (sp - sm) / (2.0 * d)
    s_tt = (sp - 2.0 * s0 + sm) / (d * d)
    acc = c * compact_laplacian(u0, grid) + s0
    jerk = c * compact_laplacian(v0, grid) + s_t
    snap = c * compact_laplacian(acc, grid) + s_tt
    u1 = u0 + tau * v0 + tau ** 2 / 2 * acc + tau ** 3 / 6 * jerk + tau ** 4 / 24 * snap
    bc.apply(u1, grid, tau)
    bc.apply(u0, grid, 0.0)
    if not np.all(np.isfinite(u1)):
        raise AssemblyError("non-finite value in the first time level")
    return WaveState(grid, u0, u1, 1, tau)
