"""Reference schemes and verification tools.

* :func:`explicit2_step` - the standard second-order leapfrog scheme, a
  baseline for accuracy and cost comparisons.
* :func:`unfactored_step` - the compact scheme *before* ADI factorization,
  solved by dense elimination on tiny grids.  Used as an oracle.
* :func:`energy` - the discrete energy conserved by the unfactored scheme.
* :func:`spectral_bounds` - eigenvalue bounds behind the coercivity estimate.
* :func:`factorization_error_probe` - measures the order of the term dropped
  by the factorization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .adi import BoundarySpec, SourceSpec
from .errors import AssemblyError, ConfigurationError, UnsupportedConfiguration
from .grid import Grid3D, VelocityModel, WaveState, build_velocity_field, sample
from .stencils import apply_L, d2, pade_ratio

EXPLICIT2_CFL = 1.0 / 3.0
DENSE_MAX_NODES = 12


def explicit2_step(state: WaveState, model: VelocityModel,
                   src: SourceSpec | None = None, bc: BoundarySpec | None = None,
                   check_cfl: bool = True) -> WaveState:
    """One leapfrog step ``u^{n+1} = 2u^n - u^{n-1} + tau^2 (c Lap_h u^n + s^n)``."""
    grid, tau = state.grid, state.tau
    if check_cfl:
        ratio = model.nu_max * tau / min(grid.spacing)
        if not ratio < EXPLICIT2_CFL:
            raise ConfigurationError(
                f"explicit scheme needs max nu tau/h < 1/3, got {ratio:.6f}")
    u, up = state.u_curr, state.u_prev
    lap = sum(d2(u[tuple(slice(None) if a == ax else slice(1, -1) for a in range(3))], ax)
              / grid.spacing[ax] ** 2 for ax in range(3))
    nxt = np.empty_like(u)
    inner = (slice(1, -1),) * 3
    rhs = model.c[inner] * lap
    if src is not None and not src.is_zero:
        rhs = rhs + src.sample(grid, state.t)[inner]
    nxt[inner] = 2.0 * u[inner] - up[inner] + tau * tau * rhs
    (bc or BoundarySpec.zero()).apply(nxt, grid, state.t + tau)
    return WaveState(grid, u, nxt, state.step + 1, tau)


# ---------------------------------------------------------------------------
# dense unfactored oracle

def _pade_matrix(n: int) -> np.ndarray:
    """Dense ``T = (1 + D2/12)^{-1} D2`` on ``n`` interior nodes (zero extension)."""
    d = np.diag(np.full(n, -2.0)) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    return np.linalg.solve(np.eye(n) + d / 12.0, d)


def dense_L(grid: Grid3D, scaled: bool = False, tau: float | None = None) -> np.ndarray:
    """Dense matrix of ``T_x + T_y + T_z`` on interior nodes (C order of the interior block).

    With ``scaled=True`` returns ``sum_d (tau/h_d)^2 T_d`` instead.
    """
    m = [n - 2 for n in grid.shape]
    if max(m) + 2 > DENSE_MAX_NODES:
        raise UnsupportedConfiguration(
            f"dense oracle limited to {DENSE_MAX_NODES} nodes per axis, got {grid.shape}")
    eyes = [np.eye(k) for k in m]
    out = np.zeros((math.prod(m),) * 2)
    for ax in range(3):
        parts = list(eyes)
        parts[ax] = _pade_matrix(m[ax])
        w = (tau / grid.spacing[ax]) ** 2 if scaled else 1.0
        out += w * np.kron(np.kron(parts[0], parts[1]), parts[2])
    return out


def unfactored_step(state: WaveState, model: VelocityModel) -> WaveState:
    """One step of ``(1/w - L/12) dtt u = L u^n`` by dense elimination.

    ``w = tau^2 c / h^2`` per node.  Only for zero source, homogeneous
    Dirichlet data and grids of at most 12 nodes per axis; unequal spacings
    enter through per-axis ``(tau/h_d)^2`` weights.
    """
    grid, tau = state.grid, state.tau
    inner = (slice(1, -1),) * 3
    lam_L = dense_L(grid, scaled=True, tau=tau)
    inv_c = 1.0 / model.c[inner].ravel()
    A = np.diag(inv_c) - lam_L / 12.0
    rhs = lam_L @ state.u_curr[inner].ravel()
    try:
        dtt = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise AssemblyError(f"unfactored system is singular: {exc}") from exc
    nxt = np.zeros(grid.shape)
    nxt[inner] = (2.0 * state.u_curr[inner] - state.u_prev[inner]
                  + dtt.reshape(nxt[inner].shape))
    return WaveState(grid, state.u_curr, nxt, state.step + 1, tau)


# ---------------------------------------------------------------------------
# energy

@dataclass(frozen=True)
class EnergyReading:
    step_index: int
    S: float
    norm_v: float
    norm_sum: float

    def __post_init__(self):
        vals = (self.S, self.norm_v, self.norm_sum)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("energy reading is not finite")
        if self.norm_v < 0 or self.norm_sum < 0:
            raise ValueError("norms must be non-negative")


def _omega(state: WaveState, model: VelocityModel) -> np.ndarray:
    grid = state.grid
    if not grid.is_uniform:
        raise UnsupportedConfiguration("energy assumes hx = hy = hz")
    return state.tau ** 2 * model.c / grid.hx ** 2


def energy(state: WaveState, model: VelocityModel, grid: Grid3D | None = None) -> EnergyReading:
    """``S_n = <v/w, v> + <Lv, v>/6 - <L(u^n + u^{n-1}), u^n + u^{n-1}>/4``.

    ``v = u^n - u^{n-1}``; inner products are plain sums over interior nodes.
    """
    inner = (slice(1, -1),) * 3
    w = _omega(state, model)
    v = state.u_curr - state.u_prev
    s = state.u_curr + state.u_prev
    Lv, Ls = apply_L(v), apply_L(s)
    S = (np.sum(v[inner] ** 2 / w[inner]) + np.sum(Lv[inner] * v[inner]) / 6.0
         - np.sum(Ls[inner] * s[inner]) / 4.0)
    return EnergyReading(state.step, float(S), float(np.sqrt(np.sum(v[inner] ** 2))),
                         float(np.sqrt(np.sum(s[inner] ** 2))))


class SpectralBounds(NamedTuple):
    a_h: float
    m: float
    M: float


def _pade_symbol(a):
    return a / (1.0 + a / 12.0)


def spectral_bounds(grid: Grid3D) -> SpectralBounds:
    """Bounds ``m <= -L <= M`` for the Dirichlet Pade Laplacian ``L``.

    ``a_h = -4 sin^2(pi h / 2)`` is the eigenvalue of ``delta2`` closest to
    zero with ``h = 1/(N-1)``, the spacing of the line rescaled to unit
    length; ``m = -3 a_h / (1 + a_h/12)`` and ``M = 18``.  When the axes have
    different node counts ``m`` sums the per-axis terms and ``a_h`` belongs
    to the longest axis.
    """
    a = [-4.0 * math.sin(math.pi / (2.0 * (n - 1))) ** 2 for n in grid.shape]
    m = -sum(_pade_symbol(x) for x in a)
    return SpectralBounds(max(a), m, 18.0)


def energy_lower_bound(state: WaveState, model: VelocityModel) -> float:
    """Coercivity floor ``(1/w_max - 3)|v|^2 + (m/4)|u^n + u^{n-1}|^2``."""
    r = energy(state, model)
    w_max = float(_omega(state, model).max())
    m = spectral_bounds(state.grid).m
    return (1.0 / w_max - 18.0 / 6.0) * r.norm_v ** 2 + m / 4.0 * r.norm_sum ** 2


# ---------------------------------------------------------------------------
# factorization error

def fit_slope(xs, ys) -> float:
    """Least-squares slope of ``log ys`` against ``log xs``."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if xs.size < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        raise ConfigurationError("slope fit needs at least two positive points")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


class ProbeResult(NamedTuple):
    order: float
    h: tuple
    err: tuple


def factorization_terms(c: np.ndarray, dtt: np.ndarray, lam) -> np.ndarray:
    """The term dropped when the compact operator is factored.

    ``dtt`` is the second time difference of ``u`` on the grid (zero on the
    boundary) and ``lam = (lx, ly, lz)``.  Each ``c T_d`` acts on the result
    of the operator to its right.
    """
    def cT(ax, v):
        return c * pade_ratio(v, ax)

    lx, ly, lz = lam
    Ty, Tz = cT(1, dtt), cT(2, dtt)
    err = (lx * ly / 144.0 * cT(0, Ty) + ly * lz / 144.0 * cT(1, Tz)
           + lx * lz / 144.0 * cT(0, Tz)
           - lx * ly * lz / 1728.0 * cT(0, cT(1, Tz)))
    err[0], err[-1] = 0.0, 0.0
    err[:, 0], err[:, -1] = 0.0, 0.0
    err[:, :, 0], err[:, :, -1] = 0.0, 0.0
    return err


def factorization_error_probe(nu: Callable, u_exact: Callable,
                              scales: Sequence[tuple[float, float]],
                              domain=((0.0, math.pi),) * 3, t: float = 0.5) -> ProbeResult:
    """Observed order of the factorization error under refinement.

    For each ``(h, tau)`` the dropped term is evaluated from samples of
    ``u_exact(x, y, z, t)`` (which must vanish on the boundary) at
    ``t - tau, t, t + tau``.  Returns the log-log slope of ``max |ERR|``
    against ``h``; about 6 for smooth data at fixed ``tau/h``.
    """
    if len(scales) < 3:
        raise ConfigurationError("the probe needs at least three (h, tau) scales")
    hs, errs = [], []
    for h, tau in scales:
        (x0, x1), (y0, y1), (z0, z1) = domain
        grid = Grid3D.from_box(x0, x1, y0, y1, z0, z1, h)
        model = build_velocity_field(nu, grid)
        dtt = (sample(u_exact, grid, t + tau) - 2.0 * sample(u_exact, grid, t)
               + sample(u_exact, grid, t - tau))
        lam = tuple(tau ** 2 / s ** 2 for s in grid.spacing)
        hs.append(h)
        errs.append(float(np.abs(factorization_terms(model.c, dtt, lam)).max()))
    if min(errs) <= 0.0:
        raise ConfigurationError("factorization error vanished; no order can be fitted")
    return ProbeResult(fit_slope(hs, errs), tuple(hs), tuple(errs))
