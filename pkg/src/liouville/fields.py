"""Uniform rectangular grids, sampled scalar fields, finite-difference
residuals for the three Liouville forms, norms, and text round-trip I/O.

Conventions used throughout the package:

* field values are stored row-major in y: ``values[j, i]`` is the sample
  at ``(x0 + i*hx, y0 + j*hy)``;
* NaN is the sentinel for "no value here" (blown-up node, boundary of a
  node-centered residual); norms skip sentinels;
* node-centered residuals live on the same grid as the input field,
  cell-centered residuals live on the (nx-1) x (ny-1) staggered grid of
  cell midpoints.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    EmptyInteriorError,
    FieldsError,
    GridTooSmallError,
    NonPositiveFieldError,
)

__all__ = [
    "Grid2D",
    "ScalarField2D",
    "LiouvilleParams",
    "Norms",
    "residual_elliptic",
    "residual_hyperbolic",
    "residual_log",
    "norms",
    "extrapolate_residual",
]


@contextmanager
def open_text(path_or_file, mode: str = "r"):
    """Yield ``path_or_file`` itself if it is already a file object (so
    streams like stdout can be passed straight through), else open it."""
    if hasattr(path_or_file, "write") or hasattr(path_or_file, "read"):
        yield path_or_file
    else:
        fh = open(path_or_file, mode)
        try:
            yield fh
        finally:
            fh.close()


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid: ``nx`` x ``ny`` nodes, origin (x0, y0),
    spacings hx, hy > 0."""

    nx: int
    ny: int
    x0: float
    y0: float
    hx: float
    hy: float

    def __post_init__(self):
        # 1x1 grids occur as the staggered cell grid of a 2x2 field
        if self.nx < 1 or self.ny < 1:
            raise GridTooSmallError(f"need at least 1x1 nodes, got {self.nx}x{self.ny}")
        if not (self.hx > 0 and self.hy > 0):
            raise FieldsError(f"spacings must be positive, got hx={self.hx}, hy={self.hy}")

    @classmethod
    def from_bounds(cls, x0: float, y0: float, x1: float, y1: float,
                    nx: int, ny: int) -> "Grid2D":
        if nx < 2 or ny < 2:
            raise GridTooSmallError(
                f"need at least 2x2 nodes to span a rectangle, got {nx}x{ny}")
        if not (x1 > x0 and y1 > y0):
            raise FieldsError("domain must satisfy x1 > x0 and y1 > y0")
        return cls(nx, ny, x0, y0, (x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1))

    def x(self) -> np.ndarray:
        return self.x0 + self.hx * np.arange(self.nx)

    def y(self) -> np.ndarray:
        return self.y0 + self.hy * np.arange(self.ny)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x(), self.y())

    def cell_centers(self) -> "Grid2D":
        """Staggered grid of the (nx-1) x (ny-1) cell midpoints."""
        return Grid2D(self.nx - 1, self.ny - 1,
                      self.x0 + self.hx / 2, self.y0 + self.hy / 2,
                      self.hx, self.hy)


@dataclass
class ScalarField2D:
    """Real samples on a :class:`Grid2D` (shape ``(ny, nx)``, NaN = masked)."""

    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.ny, self.grid.nx):
            raise FieldsError(
                f"values shape {v.shape} does not match grid "
                f"(ny, nx) = ({self.grid.ny}, {self.grid.nx})"
            )
        self.values = v

    @classmethod
    def sample(cls, grid: Grid2D, fn: Callable) -> "ScalarField2D":
        X, Y = grid.meshgrid()
        return cls(grid, np.broadcast_to(fn(X, Y), (grid.ny, grid.nx)).astype(float))

    def write_csv(self, path) -> None:
        """Write ``# nx ny x0 y0 hx hy`` then ny comma-separated rows;
        repr() keeps the round trip bit-exact.  ``path`` may be an open
        text stream."""
        g = self.grid
        with open_text(path, "w") as fh:
            fh.write(f"# {g.nx} {g.ny} {g.x0!r} {g.y0!r} {g.hx!r} {g.hy!r}\n")
            for row in self.values:
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write("\n")

    @classmethod
    def read_csv(cls, path) -> "ScalarField2D":
        """Inverse of :meth:`write_csv`.  Reads the header plus exactly
        ny rows and leaves the rest of the stream unconsumed, so a field
        piped together with a trailing summary line still parses."""
        with open_text(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("#"):
                raise FieldsError("missing '# nx ny x0 y0 hx hy' header")
            parts = header[1:].split()
            if len(parts) != 6:
                raise FieldsError(f"malformed header {header!r}")
            nx, ny = int(parts[0]), int(parts[1])
            x0, y0, hx, hy = (float(p) for p in parts[2:])
            rows = []
            for _ in range(ny):
                line = fh.readline()
                if not line:
                    raise FieldsError(f"expected {ny} rows, file ended early")
                try:
                    rows.append([float(v) for v in line.strip().split(",")])
                except ValueError as exc:
                    raise FieldsError(f"bad row {len(rows)}: {exc}") from exc
        values = np.array(rows, dtype=float)
        if values.shape != (ny, nx):
            raise FieldsError(
                f"expected {ny} rows of {nx} values, got shape {values.shape}"
            )
        return cls(Grid2D(nx, ny, x0, y0, hx, hy), values)


@dataclass(frozen=True)
class LiouvilleParams:
    """Coefficients of Delta u = K e^(a u) (or u_xy = K e^(a u))."""

    K: float
    a: float

    def __post_init__(self):
        if self.K == 0 or self.a == 0:
            raise FieldsError(f"K and a must be nonzero, got K={self.K}, a={self.a}")


class Norms(NamedTuple):
    max_abs: float
    l2: float


def _require(grid: Grid2D, n_min: int, what: str) -> None:
    if grid.nx < n_min or grid.ny < n_min:
        raise GridTooSmallError(
            f"{what} needs at least {n_min}x{n_min} nodes, got {grid.nx}x{grid.ny}"
        )


def residual_elliptic(u: ScalarField2D, p: LiouvilleParams) -> ScalarField2D:
    """Node-centered residual of Delta u = K e^(a u); 5-point Laplacian on
    interior nodes, NaN sentinel on the boundary ring."""
    _require(u.grid, 3, "residual_elliptic")
    g = u.grid
    v = u.values
    r = np.full_like(v, np.nan)
    lap = (
        (v[1:-1, 2:] - 2.0 * v[1:-1, 1:-1] + v[1:-1, :-2]) / g.hx**2
        + (v[2:, 1:-1] - 2.0 * v[1:-1, 1:-1] + v[:-2, 1:-1]) / g.hy**2
    )
    r[1:-1, 1:-1] = lap - p.K * np.exp(p.a * v[1:-1, 1:-1])
    return ScalarField2D(g, r)


def _cross_and_mean(v: np.ndarray, hx: float, hy: float):
    dxy = (v[1:, 1:] - v[1:, :-1] - v[:-1, 1:] + v[:-1, :-1]) / (hx * hy)
    mean = 0.25 * (v[1:, 1:] + v[1:, :-1] + v[:-1, 1:] + v[:-1, :-1])
    return dxy, mean


def residual_hyperbolic(u: ScalarField2D, p: LiouvilleParams) -> ScalarField2D:
    """Cell-centered residual of u_xy = K e^(a u): 4-point cross stencil,
    with the cell-averaged u inside the exponential."""
    _require(u.grid, 2, "residual_hyperbolic")
    g = u.grid
    dxy, mean = _cross_and_mean(u.values, g.hx, g.hy)
    return ScalarField2D(g.cell_centers(), dxy - p.K * np.exp(p.a * mean))


def residual_log(T: ScalarField2D, K: float) -> ScalarField2D:
    """Cell-centered residual of (1/T) d2(log T)/dxdy = K for T > 0.

    The cell average of T is taken geometrically (exp of the mean of
    log T), which makes this residual exactly the a=1 hyperbolic residual
    of u = log T divided by that average.
    """
    _require(T.grid, 2, "residual_log")
    if K == 0:
        raise FieldsError("K must be nonzero")
    v = T.values
    finite = np.isfinite(v)
    if np.any(v[finite] <= 0):
        raise NonPositiveFieldError("T must be positive everywhere")
    g = T.grid
    u = np.log(v)
    dxy, mean = _cross_and_mean(u, g.hx, g.hy)
    Tbar = np.exp(mean)
    return ScalarField2D(g.cell_centers(), (dxy - K * Tbar) / Tbar)


def norms(r: ScalarField2D) -> Norms:
    """Max-abs and cell-weighted l2 norm over non-sentinel entries."""
    v = r.values
    finite = ~np.isnan(v)
    if not finite.any():
        raise EmptyInteriorError("all entries are sentinels")
    kept = v[finite]
    return Norms(
        float(np.abs(kept).max()),
        float(math.sqrt(r.grid.hx * r.grid.hy * float((kept * kept).sum()))),
    )


def extrapolate_residual(coarse: ScalarField2D, fine: ScalarField2D,
                         order: float = 2.0) -> ScalarField2D:
    """Pointwise Richardson extrapolation of a residual field under one
    dyadic refinement.

    Node-centered pairs (fine has 2n-1 nodes per axis, same origin) are
    compared on the shared coarse nodes; cell-centered pairs (fine has 2n
    cells per axis) are compared against the 2x2 average of the fine
    cells inside each coarse cell, which preserves the leading-order
    term.  The result estimates the residual's h -> 0 limit on the
    coarse locations.
    """
    cg, fg = coarse.grid, fine.grid
    tol = 1e-9 * max(cg.hx, cg.hy)
    if abs(fg.hx - cg.hx / 2) > tol or abs(fg.hy - cg.hy / 2) > tol:
        raise FieldsError("fine grid must halve the coarse spacings")
    if fg.nx == 2 * cg.nx - 1 and abs(fg.x0 - cg.x0) <= tol and abs(fg.y0 - cg.y0) <= tol:
        fine_on_coarse = fine.values[::2, ::2]
    elif (fg.nx == 2 * cg.nx
          and abs(fg.x0 + fg.hx / 2 - cg.x0) <= tol
          and abs(fg.y0 + fg.hy / 2 - cg.y0) <= tol):
        v = fine.values
        fine_on_coarse = 0.25 * (v[0::2, 0::2] + v[0::2, 1::2] + v[1::2, 0::2] + v[1::2, 1::2])
    else:
        raise FieldsError("grids are not one dyadic refinement apart")
    w = 2.0 ** order
    return ScalarField2D(cg, (w * fine_on_coarse - coarse.values) / (w - 1.0))
