"""One-dimensional difference operators and their line-wise 3D application.

Two families live here.  The scalar functions (:func:`delta2`,
:func:`wide_delta2`, :func:`ghost_extrapolate`, :func:`apply_pade_ratio`)
act on a single grid line and use 1-based positions.  The array functions
(:func:`d2`, :func:`avg12`, :func:`wide_d2`, :func:`pade_ratio`, ...) act on
every line of an ``(nx, ny, nz)`` array along one axis at once; they return
values at the interior positions ``1..n-2`` (0-based) of that axis unless
stated otherwise.

All operators are undivided (no ``1/h**2``) except the compact derivative
helpers at the bottom of the module.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np

from .grid import Grid3D, ScalarField3D
from .tridiag import solve_lines

PADE_OFF = 1.0 / 12.0
PADE_DIAG = 10.0 / 12.0


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2

    def spacing(self, grid: Grid3D) -> float:
        return grid.spacing[self]

    def length(self, grid: Grid3D) -> int:
        return grid.shape[self]


def delta2(line, position: int) -> float:
    """Central second difference ``u[p-1] - 2u[p] + u[p+1]`` at 1-based ``position``."""
    n = len(line)
    if not 2 <= position <= n - 1:
        raise IndexError(f"delta2 needs 2 <= position <= {n - 1}, got {position}")
    p = position - 1
    return line[p - 1] - 2.0 * line[p] + line[p + 1]


def ghost_extrapolate(u1, u2, u3, u4):
    """Value one node beyond the boundary from the four nearest in-domain values.

    Arguments are ordered from the boundary inward.  Cubic extrapolation, so
    the result is exact for polynomials of degree three or less.
    """
    return 4.0 * u1 - 6.0 * u2 + 4.0 * u3 - u4


def wide_delta2(line, position: int, ghost_lo=None, ghost_hi=None) -> float:
    """Five-point ``delta2 (1 - delta2/12)`` at 1-based ``position``.

    Positions 2 and N-1 reach one node outside the line; the outside value
    must then be passed as ``ghost_lo`` / ``ghost_hi``.
    """
    n = len(line)
    if not 2 <= position <= n - 1:
        raise IndexError(f"wide_delta2 needs 2 <= position <= {n - 1}, got {position}")

    def at(q):  # 1-based access with ghosts at 0 and n+1
        if q == 0:
            if ghost_lo is None:
                raise ValueError(f"position {position} needs ghost_lo")
            return ghost_lo
        if q == n + 1:
            if ghost_hi is None:
                raise ValueError(f"position {position} needs ghost_hi")
            return ghost_hi
        return line[q - 1]

    p = position
    return (-at(p - 2) + 16.0 * at(p - 1) - 30.0 * at(p)
            + 16.0 * at(p + 1) - at(p + 2)) / 12.0


def apply_pade_ratio(line) -> np.ndarray:
    """``delta2 / (1 + delta2/12)`` applied to interior values with zero extension.

    Solves ``(1 + delta2/12) w = delta2 v`` with ``v`` and ``w`` both zero
    outside the line, using one tridiagonal solve.
    """
    v = np.asarray(line, dtype=float)
    if v.ndim != 1 or v.size < 3:
        raise ValueError("apply_pade_ratio needs a 1D line of length >= 3")
    padded = np.concatenate(([0.0], v, [0.0]))
    rhs = padded[:-2] - 2.0 * padded[1:-1] + padded[2:]
    return solve_lines(PADE_OFF, PADE_DIAG, PADE_OFF, rhs)


# ---------------------------------------------------------------------------
# array forms

def _take(a, axis, start, stop):
    sl = [slice(None)] * a.ndim
    sl[axis] = slice(start, stop)
    return a[tuple(sl)]


def interior(a, axis):
    """View of ``a`` restricted to the interior positions along ``axis``."""
    return _take(a, axis, 1, -1)


def d2(u, axis):
    """``delta2`` at interior positions along ``axis``."""
    n = u.shape[axis]
    return _take(u, axis, 0, n - 2) - 2.0 * _take(u, axis, 1, n - 1) + _take(u, axis, 2, n)


def avg12(u, axis):
    """``(1 + delta2/12)`` at interior positions along ``axis``."""
    n = u.shape[axis]
    return (_take(u, axis, 0, n - 2) + 10.0 * _take(u, axis, 1, n - 1)
            + _take(u, axis, 2, n)) / 12.0


def with_ghosts(u, axis):
    """``u`` extended by one extrapolated ghost node at each end of ``axis``."""
    n = u.shape[axis]
    if n < 4:
        raise ValueError("ghost extrapolation needs at least 4 nodes per line")
    lo = ghost_extrapolate(*(_take(u, axis, q, q + 1) for q in range(4)))
    hi = ghost_extrapolate(*(_take(u, axis, n - 1 - q, n - q) for q in range(4)))
    return np.concatenate((lo, u, hi), axis=axis)


def wide_d2(u, axis):
    """``delta2 (1 - delta2/12)`` at interior positions along ``axis``.

    The two positions next to each boundary read one ghost node, supplied by
    :func:`ghost_extrapolate` from ``u`` itself.
    """
    e = with_ghosts(u, axis)
    m = e.shape[axis]
    return (-_take(e, axis, 0, m - 4) + 16.0 * _take(e, axis, 1, m - 3)
            - 30.0 * _take(e, axis, 2, m - 2) + 16.0 * _take(e, axis, 3, m - 1)
            - _take(e, axis, 4, m)) / 12.0


def pade_ratio(u, axis):
    """``T = delta2 / (1 + delta2/12)`` along ``axis`` with zero extension.

    Boundary entries of ``u`` along ``axis`` are treated as zero; the
    returned full-shape array is zero there as well.
    """
    u = np.asarray(u, dtype=float)
    v = u.copy()
    _take(v, axis, 0, 1)[...] = 0.0
    _take(v, axis, v.shape[axis] - 1, None)[...] = 0.0
    out = np.zeros_like(v)
    interior(out, axis)[...] = solve_lines(PADE_OFF, PADE_DIAG, PADE_OFF, d2(v, axis), axis=axis)
    return out


def zero_boundary(a):
    a[0], a[-1] = 0.0, 0.0
    a[:, 0], a[:, -1] = 0.0, 0.0
    a[:, :, 0], a[:, :, -1] = 0.0, 0.0
    return a


def apply_L(field):
    """``T_x + T_y + T_z`` for a field with homogeneous Dirichlet boundary.

    Accepts a :class:`ScalarField3D` or a bare ``(nx, ny, nz)`` array and
    returns the same kind; the result is zero on all six faces.
    """
    data = field.data if isinstance(field, ScalarField3D) else np.asarray(field, dtype=float)
    v = zero_boundary(data.copy())
    out = pade_ratio(v, 0) + pade_ratio(v, 1) + pade_ratio(v, 2)
    zero_boundary(out)
    if isinstance(field, ScalarField3D):
        return ScalarField3D(field.grid, out)
    return out


# ---------------------------------------------------------------------------
# compact derivatives of sampled fields (scaled by 1/h**2)

_ONE_SIDED_D2 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0


def compact_second_derivative(u, axis, h):
    """Fourth-order compact approximation of ``d^2 u / dx_axis^2`` at every node.

    Interior nodes use the Pade relation
    ``(w[p-1] + 10 w[p] + w[p+1]) / 12 = delta2 u[p] / h**2``; the two end
    values are closed with the six-point fourth-order one-sided formula.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[axis]
    if n < 6:
        raise ValueError("compact second derivative needs at least 6 nodes per line")
    inv_h2 = 1.0 / (h * h)
    lo = sum(c * _take(u, axis, q, q + 1) for q, c in enumerate(_ONE_SIDED_D2)) * inv_h2
    hi = sum(c * _take(u, axis, n - 1 - q, n - q) for q, c in enumerate(_ONE_SIDED_D2)) * inv_h2
    rhs = d2(u, axis) * inv_h2
    _take(rhs, axis, 0, 1)[...] -= lo * PADE_OFF
    _take(rhs, axis, n - 3, n - 2)[...] -= hi * PADE_OFF
    mid = solve_lines(PADE_OFF, PADE_DIAG, PADE_OFF, rhs, axis=axis)
    return np.concatenate((lo, mid, hi), axis=axis)


def compact_laplacian(u, grid: Grid3D):
    return sum(compact_second_derivative(u, ax, grid.spacing[ax]) for ax in range(3))
