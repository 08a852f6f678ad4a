"""Characteristic (Goursat) marching for u_xy = K e^(a u), with blow-up
masking, and a Baecklund-transformation integrator mapping wave-equation
solutions w(x, y) = phi(x) + psi(y) to Liouville solutions.

The marcher fills the grid along anti-diagonals.  Each cell solves the
implicit update

    u_ij = u_(i-1)j + u_i(j-1) - u_(i-1)(j-1) + hx hy K exp(a ubar)

with ubar the average of the four cell corners, i.e. a scalar root of
g(z) = z - c - gamma e^(beta (z + s)).  When that root ceases to exist
the cell has hit the blow-up regime: it is masked (NaN) rather than
clamped, and everything depending on it is masked too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CellIterationDivergenceError,
    CornerMismatchError,
    HyperbolicError,
    OdeOverflowError,
)
from .expr import Expr, eval_dual
from .fields import Grid2D, LiouvilleParams, ScalarField2D

__all__ = [
    "GoursatData",
    "WaveSolution",
    "MarchResult",
    "march",
    "march_from_edges",
    "backlund",
]

CORNER_TOL = 1e-12
BLOWUP_THRESHOLD = 25.0
ODE_CAP = 500.0


@dataclass(frozen=True)
class GoursatData:
    """Edge data for the characteristic rectangle: ``phi`` gives
    u(x, y0) along the bottom edge, ``psi`` gives u(x0, y) up the left
    edge.  Both must agree at the corner to 1e-12."""

    phi: Expr
    psi: Expr

    def __post_init__(self):
        for e, role in ((self.phi, "phi"), (self.psi, "psi")):
            if len(e.vars) != 1:
                raise HyperbolicError(f"{role} must be univariate, has vars {e.vars}")

    def edges(self, grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
        bottom = np.broadcast_to(
            eval_dual(self.phi, grid.x(), self.phi.vars[0]).value, (grid.nx,))
        left = np.broadcast_to(
            eval_dual(self.psi, grid.y(), self.psi.vars[0]).value, (grid.ny,))
        return np.array(bottom, dtype=float), np.array(left, dtype=float)


@dataclass(frozen=True)
class WaveSolution:
    """w(x, y) = phi(x) + psi(y), the general solution of w_xy = 0."""

    phi: Expr
    psi: Expr

    def __post_init__(self):
        for e, role in ((self.phi, "phi"), (self.psi, "psi")):
            if len(e.vars) != 1:
                raise HyperbolicError(f"{role} must be univariate, has vars {e.vars}")


@dataclass
class MarchResult:
    """Marched field plus its blow-up mask (True = masked node)."""

    field: ScalarField2D
    mask: np.ndarray

    @property
    def n_masked(self) -> int:
        return int(self.mask.sum())

    def write_mask_csv(self, path) -> None:
        from .fields import open_text
        g = self.field.grid
        with open_text(path, "w") as fh:
            fh.write(f"# {g.nx} {g.ny} {g.x0!r} {g.y0!r} {g.hx!r} {g.hy!r}\n")
            for row in self.mask:
                fh.write(",".join("1" if m else "0" for m in row) + "\n")


def _solve_diagonal(c: np.ndarray, s: np.ndarray, gamma: float, beta: float,
                    ) -> np.ndarray:
    """Roots of g(z) = z - c - gamma e^(beta (z+s)) for one anti-diagonal.

    Returns NaN where no root exists (blow-up).  gamma*beta > 0 puts an
    extremum of g at z* = -ln(gamma beta)/beta - s; a root exists iff g
    changes sign between c and z*, and the physical root (the one that
    continues the gamma -> 0 branch) lies in that bracket.  Otherwise g
    is strictly monotone and c, c + gamma e^(beta (c+s)) bracket the
    root.
    """
    gb = gamma * beta
    g_c = -gamma * np.exp(beta * (c + s))
    if gb > 0:
        z_star = -np.log(gb) / beta - s
        g_star = z_star - c - 1.0 / beta
        exists = g_c * g_star <= 0
        lo = np.where(exists, np.minimum(c, z_star), np.nan)
        hi = np.where(exists, np.maximum(c, z_star), np.nan)
    else:
        other = c - g_c  # one fixed-point step, on the far side of the root
        lo = np.minimum(c, other)
        hi = np.maximum(c, other)
        exists = np.ones_like(c, dtype=bool)

    z = np.where(exists, np.clip(c - g_c, lo, hi), np.nan)
    with np.errstate(over="ignore", invalid="ignore"):
        g_lo = lo - c - gamma * np.exp(beta * (lo + s))
    sign_lo = np.sign(g_lo)

    active = exists.copy()
    tol = 1e-14 * np.maximum(1.0, np.abs(c))
    for _ in range(120):
        if not np.any(active):
            break
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(beta * (z + s))
            g = z - c - gamma * e
            gp = 1.0 - gb * e
        done = active & (np.abs(g) <= tol)
        done |= active & (hi - lo <= 16 * np.finfo(float).eps
                          * np.maximum(1.0, np.abs(z)))
        active &= ~done
        if not np.any(active):
            break
        same = np.sign(g) == sign_lo
        lo = np.where(active & same, z, lo)
        hi = np.where(active & ~same, z, hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            zn = z - g / gp
        ok = np.isfinite(zn) & (zn > lo) & (zn < hi)
        z = np.where(active, np.where(ok, zn, 0.5 * (lo + hi)), z)
    else:
        bad = np.argwhere(active)
        if bad.size:
            raise CellIterationDivergenceError(-1, -1)
    return z


def march_from_edges(bottom: np.ndarray, left: np.ndarray,
                     p: LiouvilleParams, grid: Grid2D,
                     blowup_threshold: float = BLOWUP_THRESHOLD) -> MarchResult:
    """March with explicit edge arrays (``bottom`` = u on y = y0,
    ``left`` = u on x = x0); see :func:`march`."""
    bottom = np.asarray(bottom, dtype=float)
    left = np.asarray(left, dtype=float)
    if bottom.shape != (grid.nx,) or left.shape != (grid.ny,):
        raise HyperbolicError(
            f"edge data must have shapes ({grid.nx},) and ({grid.ny},), "
            f"got {bottom.shape} and {left.shape}")
    if not (np.all(np.isfinite(bottom)) and np.all(np.isfinite(left))):
        raise HyperbolicError("Goursat edge data must be finite")
    if abs(bottom[0] - left[0]) > CORNER_TOL:
        raise CornerMismatchError(
            f"phi(x0) = {bottom[0]!r} but psi(y0) = {left[0]!r} "
            f"(difference {abs(bottom[0] - left[0]):.3e})")

    nx, ny = grid.nx, grid.ny
    gamma = grid.hx * grid.hy * p.K
    beta = p.a / 4.0
    U = np.full((ny, nx), np.nan)
    U[0, :] = bottom
    U[:, 0] = left
    U[0, 0] = bottom[0]

    for d in range(2, nx - 1 + ny - 1 + 1):
        i = np.arange(max(1, d - (ny - 1)), min(nx - 1, d - 1) + 1)
        j = d - i
        west = U[j, i - 1]
        south = U[j - 1, i]
        diag = U[j - 1, i - 1]
        ready = np.isfinite(west) & np.isfinite(south) & np.isfinite(diag)
        if not np.any(ready):
            continue
        c = west[ready] + south[ready] - diag[ready]
        s = west[ready] + south[ready] + diag[ready]
        try:
            z = _solve_diagonal(c, s, gamma, beta)
        except CellIterationDivergenceError:
            # re-raise with a real cell index for the post-mortem
            ii = i[ready][0]
            raise CellIterationDivergenceError(int(ii), int(d - ii)) from None
        z = np.where(z > blowup_threshold, np.nan, z)
        vals = np.full(i.shape, np.nan)
        vals[ready] = z
        U[j, i] = vals

    field = ScalarField2D(grid, U)
    return MarchResult(field, np.isnan(U))


def march(data: GoursatData, p: LiouvilleParams, grid: Grid2D,
          blowup_threshold: float = BLOWUP_THRESHOLD) -> MarchResult:
    """Solve the Goursat problem for u_xy = K e^(a u) on ``grid``.

    Data is prescribed on the two characteristics through the grid
    origin.  Cells whose implicit update has no bounded root, or whose
    value exceeds ``blowup_threshold``, are masked together with their
    downstream dependency cone; the mask is part of the result, not an
    error.
    """
    bottom, left = data.edges(grid)
    return march_from_edges(bottom, left, p, grid, blowup_threshold)


# --- Baecklund transformation -------------------------------------------


def _axis_samples(e: Expr, axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and first derivatives of a univariate expression on the
    doubled axis (nodes and midpoints interleaved), for RK4 stages."""
    n = axis.size
    doubled = np.empty(2 * n - 1)
    doubled[0::2] = axis
    doubled[1::2] = 0.5 * (axis[:-1] + axis[1:])
    res = eval_dual(e, doubled, e.vars[0])
    v = np.broadcast_to(res.value, doubled.shape).astype(float)
    d = np.broadcast_to(res.d1, doubled.shape).astype(float)
    return v, d


def _check_ode(u, segment: str):
    arr = np.asarray(u)
    if not np.all(np.isfinite(arr)) or np.any(arr > ODE_CAP):
        raise OdeOverflowError(segment)


def backlund(w: WaveSolution, bt_a: float, u_corner: float, grid: Grid2D,
             order: str = "xy") -> ScalarField2D:
    """Integrate the Baecklund pair

        u_x = w_x + bt_a e^((u + w)/2),
        u_y = -w_y + (2/bt_a) e^((u - w)/2)

    from u(x0, y0) = ``u_corner`` with classical RK4: along the bottom
    edge and then up all columns at once (``order="xy"``), or up the
    left edge and then across all rows (``order="yx"``).  The two orders
    agree up to the RK4 error because the pair's cross-derivatives are
    compatible exactly when u_xy = e^u.

    Raises OdeOverflowError if the solution escapes toward +inf inside
    the domain (the transform's image blows up on a line).
    """
    if bt_a == 0:
        raise HyperbolicError("bt_a must be nonzero")
    if order not in ("xy", "yx"):
        raise HyperbolicError(f"order must be 'xy' or 'yx', got {order!r}")
    if not np.isfinite(u_corner):
        raise HyperbolicError(f"u_corner must be finite, got {u_corner}")

    phi_v, phi_d = _axis_samples(w.phi, grid.x())
    psi_v, psi_d = _axis_samples(w.psi, grid.y())

    def f_x(u, k):
        # k indexes the doubled x-axis; w and w_x at fixed y (psi const)
        return phi_d[k] + bt_a * np.exp(0.5 * (u + phi_v[k] + psi_ref))

    def f_y(u, k):
        return -psi_d[k] + (2.0 / bt_a) * np.exp(0.5 * (u - phi_ref - psi_v[k]))

    def rk4_sweep(u0, f, n, h, segment):
        """March u over n-1 steps; u0 may be a scalar (edge sweep) or an
        array (all columns/rows at once).  Returns the n states."""
        out = [np.asarray(u0, dtype=float)]
        for idx in range(n - 1):
            k0 = 2 * idx
            u = out[-1]
            k1 = f(u, k0)
            k2 = f(u + 0.5 * h * k1, k0 + 1)
            k3 = f(u + 0.5 * h * k2, k0 + 1)
            k4 = f(u + h * k3, k0 + 2)
            nxt = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            _check_ode(nxt, segment(idx))
            out.append(nxt)
        return out

    if order == "xy":
        psi_ref = psi_v[0]
        bottom = rk4_sweep(u_corner, f_x, grid.nx, grid.hx,
                           lambda i: f"bottom edge near x = {grid.x0 + (i + 1) * grid.hx!r}")
        phi_ref = phi_v[0::2]  # per-column phi values at the nodes
        cols = rk4_sweep(np.array(bottom, dtype=float), f_y, grid.ny, grid.hy,
                         lambda j: f"columns near y = {grid.y0 + (j + 1) * grid.hy!r}")
        values = np.vstack(cols)
    else:
        phi_ref = phi_v[0]
        leftv = rk4_sweep(u_corner, f_y, grid.ny, grid.hy,
                          lambda j: f"left edge near y = {grid.y0 + (j + 1) * grid.hy!r}")
        psi_ref = psi_v[0::2]  # per-row psi values at the nodes
        rows = rk4_sweep(np.array(leftv, dtype=float), f_x, grid.nx, grid.hx,
                         lambda i: f"rows near x = {grid.x0 + (i + 1) * grid.hx!r}")
        values = np.vstack(rows).T
    return ScalarField2D(grid, values)
