"""Thomas algorithm for single and batched tridiagonal line solves.

Every sweep of the ADI scheme reduces to many independent tridiagonal systems,
one per grid line.  :func:`solve_lines` solves all lines of a 1D/2D/3D array
along one axis in a single kernel call; :func:`thomas_solve` and
:func:`batch_solve` are the per-system interface on top of the same kernel.

Classic Thomas elimination without pivoting is used.  The sweep matrices are
not provably diagonally dominant for arbitrary velocity fields, so instead of
asserting dominance every elimination pivot is checked against
:data:`PIVOT_TOL` and a :class:`SingularSystemError` is raised on breakdown.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import NUMBA_ENABLED, njit, prange

PIVOT_TOL = 1e-14


class SingularSystemError(ArithmeticError):
    """A pivot fell below :data:`PIVOT_TOL` during forward elimination.

    ``row`` is the 0-based row within the failing line; ``line`` is the
    index of the line among the solved batch (a tuple for array solves, an
    integer batch position for :func:`batch_solve`).
    """

    def __init__(self, message, row=None, line=None):
        super().__init__(message)
        self.row = row
        self.line = line


@dataclass(frozen=True)
class TridiagonalSystem:
    """One tridiagonal system ``A x = rhs``.

    ``sub[i]`` is ``A[i+1, i]`` and ``sup[i]`` is ``A[i, i+1]``, so both
    off-diagonals have length ``n - 1``.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        for name in ("sub", "diag", "sup", "rhs"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            object.__setattr__(self, name, arr)
        n = self.diag.size
        if n < 1:
            raise ValueError("system must have at least one row")
        if self.rhs.size != n:
            raise ValueError(f"rhs has length {self.rhs.size}, expected {n}")
        if self.sub.size != n - 1 or self.sup.size != n - 1:
            raise ValueError(
                f"off-diagonals must have length {n - 1}, got "
                f"sub={self.sub.size}, sup={self.sup.size}"
            )
        for name in ("sub", "diag", "sup", "rhs"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite entries")

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def padded(self):
        """Row-aligned diagonals: ``sub[0]`` and ``sup[-1]`` are zero."""
        sub = np.concatenate(([0.0], self.sub))
        sup = np.concatenate((self.sup, [0.0]))
        return sub, self.diag, sup


@njit(cache=True, parallel=True)
def _thomas_kernel_numba(sub, diag, sup, rhs, out, fail):
    na, nb, n = rhs.shape
    for p in prange(na):
        cp = np.empty(n)
        for q in range(nb):
            fail[p, q] = -1
            beta = diag[p, q, 0]
            if abs(beta) < PIVOT_TOL:
                fail[p, q] = 0
                continue
            cp[0] = sup[p, q, 0] / beta
            out[p, q, 0] = rhs[p, q, 0] / beta
            ok = True
            for r in range(1, n):
                beta = diag[p, q, r] - sub[p, q, r] * cp[r - 1]
                if abs(beta) < PIVOT_TOL:
                    fail[p, q] = r
                    ok = False
                    break
                cp[r] = sup[p, q, r] / beta
                out[p, q, r] = (rhs[p, q, r] - sub[p, q, r] * out[p, q, r - 1]) / beta
            if not ok:
                continue
            for r in range(n - 2, -1, -1):
                out[p, q, r] = out[p, q, r] - cp[r] * out[p, q, r + 1]


def _thomas_kernel_numpy(sub, diag, sup, rhs, out, fail):
    n = rhs.shape[-1]
    cp = np.empty(rhs.shape)
    fail[...] = -1
    beta = diag[..., 0].copy()
    bad = np.abs(beta) < PIVOT_TOL
    if bad.any():
        fail[bad] = 0
        return
    cp[..., 0] = sup[..., 0] / beta
    out[..., 0] = rhs[..., 0] / beta
    for r in range(1, n):
        beta = diag[..., r] - sub[..., r] * cp[..., r - 1]
        bad = np.abs(beta) < PIVOT_TOL
        if bad.any():
            fail[bad] = r
            return
        cp[..., r] = sup[..., r] / beta
        out[..., r] = (rhs[..., r] - sub[..., r] * out[..., r - 1]) / beta
    for r in range(n - 2, -1, -1):
        out[..., r] -= cp[..., r] * out[..., r + 1]


_kernel = _thomas_kernel_numba if NUMBA_ENABLED else _thomas_kernel_numpy


def solve_lines(sub, diag, sup, rhs, axis: int = -1) -> np.ndarray:
    """Solve every tridiagonal line of ``rhs`` along ``axis``.

    ``sub``, ``diag`` and ``sup`` are row-aligned with ``rhs`` (same shape,
    or broadcastable to it): row ``r`` of a line reads
    ``sub[r] x[r-1] + diag[r] x[r] + sup[r] x[r+1] = rhs[r]``, with
    ``sub[0]`` and ``sup[-1]`` ignored.  Works for 1-, 2- and 3-D arrays.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim < 1 or rhs.ndim > 3:
        raise ValueError("solve_lines supports 1- to 3-dimensional arrays")
    shape = rhs.shape
    sub, diag, sup = (np.broadcast_to(np.asarray(a, dtype=float), shape)
                      for a in (sub, diag, sup))
    axis = axis % rhs.ndim

    def as3(a):
        a = np.moveaxis(a, axis, -1)
        while a.ndim < 3:
            a = a[np.newaxis]
        return a

    s3, d3, u3, r3 = as3(sub), as3(diag), as3(sup), as3(rhs)
    out3 = np.empty(r3.shape)
    fail = np.empty(r3.shape[:2], dtype=np.int64)
    _kernel(s3, d3, u3, r3, out3, fail)
    lines_shape = tuple(s for i, s in enumerate(shape) if i != axis)
    failed = np.argwhere(fail >= 0)
    if failed.size:
        p, q = (int(v) for v in failed[0])
        row = int(fail[p, q])
        line = np.unravel_index(p * r3.shape[1] + q, lines_shape or (1,))
        line = tuple(int(v) for v in line)
        raise SingularSystemError(
            f"pivot below {PIVOT_TOL:g} at row {row} of line {line} "
            f"(axis {axis})", row=row, line=line)
    return np.moveaxis(out3.reshape(lines_shape + (shape[axis],)), -1, axis)


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve one :class:`TridiagonalSystem` in O(n)."""
    sub, diag, sup = system.padded()
    return solve_lines(sub, diag, sup, system.rhs)


def batch_solve(systems: Sequence[TridiagonalSystem]) -> list[np.ndarray]:
    """Solve independent systems; results keep the input order.

    Systems of equal size are stacked and solved in one kernel call.  Each
    line is eliminated by exactly the same scalar arithmetic as
    :func:`thomas_solve`, so results are bitwise identical to a sequential
    loop.
    """
    systems = list(systems)
    results: list = [None] * len(systems)
    by_size: dict[int, list[int]] = {}
    for pos, s in enumerate(systems):
        by_size.setdefault(s.n, []).append(pos)
    first_failure = None
    for n, positions in by_size.items():
        stacked = [np.stack(cols) for cols in zip(*(
            (*systems[p].padded(), systems[p].rhs) for p in positions))]
        try:
            sol = solve_lines(*stacked, axis=-1)
        except SingularSystemError as exc:
            pos = positions[exc.line[0]]
            if first_failure is None or pos < first_failure[0]:
                first_failure = (pos, exc.row)
            continue
        for k, p in enumerate(positions):
            results[p] = sol[k]
    if first_failure is not None:
        pos, row = first_failure
        raise SingularSystemError(
            f"system {pos} of the batch is singular (row {row})",
            row=row, line=pos)
    return results
