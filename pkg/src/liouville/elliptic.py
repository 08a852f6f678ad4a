"""Newton solver and continuation engine for the elliptic Liouville
equation.

Two geometries: 2D rectangles (5-point Laplacian, sparse LU) and the
unit disk reduced to a radial profile (tridiagonal, with the regularity
closure u'(0) = 0 at the center).  On top of the plain Dirichlet solver
sit a pseudo-arclength continuation of the Gelfand branch
Delta u + lambda e^u = 0 with fold detection, and the boundary blow-up
exhaustion u|_boundary = M for increasing M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import splu

from .errors import (
    EllipticError,
    NonConvergenceError,
    SingularJacobianError,
)
from .expr import Expr, eval_dual
from .fields import Grid2D, LiouvilleParams, ScalarField2D

__all__ = [
    "RectangleGeometry",
    "DiskGeometry",
    "GelfandParams",
    "DirichletProblem",
    "SolveReport",
    "RadialProfile",
    "BranchPoint",
    "Fold",
    "Branch",
    "solve_dirichlet",
    "continue_branch",
    "solve_on_branch",
    "boundary_blowup_approx",
]

NEWTON_TOL = 1e-10
MAX_NEWTON = 60
MAX_HALVINGS = 30
DS_MIN, DS_MAX = 1e-4, 0.1
# A residual of order (1/h^2)|u| eps cannot be beaten in double precision,
# so a stalled line search with a negligible Newton step counts as
# converged at the rounding floor (the report then carries the achieved
# residual as its tolerance).  The caps keep genuine stagnation fatal.
STALL_RESIDUAL_CAP = 1e-6
STALL_STEP_REL = 1e-6


@dataclass(frozen=True)
class RectangleGeometry:
    grid: Grid2D

    def __post_init__(self):
        if self.grid.nx < 3 or self.grid.ny < 3:
            raise EllipticError("rectangle geometry needs at least 3x3 nodes")


@dataclass(frozen=True)
class DiskGeometry:
    """Unit disk, radially symmetric: ``n`` nodes r_i = i/(n-1) on [0, 1]."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise EllipticError("disk geometry needs at least 3 radial nodes")

    @property
    def h(self) -> float:
        return 1.0 / (self.n - 1)

    def r(self) -> np.ndarray:
        return self.h * np.arange(self.n)


@dataclass(frozen=True)
class GelfandParams:
    """Parameters of Delta u + lambda e^u = 0 (Liouville with K = -lambda,
    a = 1)."""

    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam):
            raise EllipticError(f"lambda must be finite, got {self.lam}")


Geometry = Union[RectangleGeometry, DiskGeometry]
Params = Union[LiouvilleParams, GelfandParams]


@dataclass(frozen=True)
class DirichletProblem:
    """Equation + domain + boundary data.  ``boundary`` is a constant or,
    on rectangles, an expression in (x, y) evaluated along the edge."""

    geometry: Geometry
    params: Params
    boundary: Union[Expr, float] = 0.0

    def __post_init__(self):
        if isinstance(self.boundary, Expr):
            if isinstance(self.geometry, DiskGeometry):
                raise EllipticError("disk boundary data must be a constant")
        elif not np.isfinite(self.boundary):
            raise EllipticError(f"boundary value must be finite, got {self.boundary}")


@dataclass
class SolveReport:
    """Newton post-mortem.  ``converged`` implies ``final_residual <=
    tolerance``; ``tolerance`` is the requested one, or the achieved
    residual when the solve finished at the rounding floor."""

    iterations: int
    final_residual: float
    converged: bool
    newton_history: list[float] = field(default_factory=list)
    tolerance: float = NEWTON_TOL

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "converged": self.converged,
            "newton_history": list(self.newton_history),
            "tolerance": self.tolerance,
        }


@dataclass
class RadialProfile:
    """Samples u(r_i) on the disk's radial grid, boundary node included."""

    r: np.ndarray
    values: np.ndarray

    @property
    def u0(self) -> float:
        return float(self.values[0])

    def write_csv(self, path) -> None:
        from .fields import open_text
        with open_text(path, "w") as fh:
            fh.write("r,u\n")
            for ri, ui in zip(self.r, self.values):
                fh.write(f"{float(ri)!r},{float(ui)!r}\n")


# --- discrete systems ---------------------------------------------------
#
# Both geometries reduce to F(u) = Lap_h u + (boundary terms) + coef *
# e^(a u) = 0 on the unknown vector: the Dirichlet problem
# Delta u = K e^(a u) uses (coef, a) = (-K, a), the Gelfand problem uses
# (lam, 1) with lam varying along the branch.


class _RadialSystem:
    """Tridiagonal discretization of Delta u = u'' + u'/r on [0, 1].

    Unknowns u_0 .. u_{n-2}; u_{n-1} is the boundary value.  The center
    row uses the regularity closure Delta u(0) = 2 u''(0), discretized as
    4 (u_1 - u_0) / h^2 (u'(0) = 0 folds the ghost node onto u_1).
    """

    def __init__(self, geom: DiskGeometry, boundary: float):
        n = geom.n
        h = geom.h
        r = geom.r()
        m = n - 1
        lo = np.zeros(m)
        di = np.zeros(m)
        up = np.zeros(m)
        di[0] = -4.0 / h ** 2
        up[0] = 4.0 / h ** 2
        i = np.arange(1, m)
        lo[i] = 1.0 / h ** 2 - 1.0 / (2 * r[i] * h)
        di[i] = -2.0 / h ** 2
        up[i[:-1]] = 1.0 / h ** 2 + 1.0 / (2 * r[i[:-1]] * h)
        self.bc_coef = 1.0 / h ** 2 + 1.0 / (2 * r[m - 1] * h)
        self.lo, self.di, self.up = lo, di, up
        self.boundary = boundary
        self.geom = geom
        self.m = m

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        out = self.di * u
        out[1:] += self.lo[1:] * u[:-1]
        out[:-1] += self.up[:-1] * u[1:]
        out[-1] += self.bc_coef * self.boundary
        return out

    def residual(self, u: np.ndarray, coef: float, a: float) -> np.ndarray:
        return self.laplacian(u) + coef * np.exp(a * u)

    def jacobian_solver(self, u: np.ndarray, coef: float, a: float,
                        ) -> Callable[[np.ndarray], np.ndarray]:
        ab = np.zeros((3, self.m))
        ab[0, 1:] = self.up[:-1]
        ab[1] = self.di + coef * a * np.exp(a * u)
        ab[2, :-1] = self.lo[1:]

        def solve(rhs: np.ndarray) -> np.ndarray:
            try:
                return solve_banded((1, 1), ab, rhs)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobianError(str(exc)) from exc

        return solve

    def jacobian_matvec(self, u: np.ndarray, coef: float, a: float,
                        v: np.ndarray) -> np.ndarray:
        out = (self.di + coef * a * np.exp(a * u)) * v
        out[1:] += self.lo[1:] * v[:-1]
        out[:-1] += self.up[:-1] * v[1:]
        return out

    def initial_guess(self) -> np.ndarray:
        # harmonic extension of constant data is the constant itself
        return np.full(self.m, float(self.boundary))

    def center_value(self, u: np.ndarray) -> float:
        return float(u[0])

    def pack(self, u: np.ndarray) -> RadialProfile:
        full = np.concatenate([u, [self.boundary]])
        return RadialProfile(self.geom.r(), full)


class _RectSystem:
    """5-point Laplacian on the interior nodes of a rectangle grid,
    row-major unknown ordering, Dirichlet ring folded into a constant
    vector."""

    def __init__(self, geom: RectangleGeometry, boundary: Union[Expr, float]):
        g = geom.grid
        nxi, nyi = g.nx - 2, g.ny - 2
        Tx = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(nxi, nxi))
        Ty = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(nyi, nyi))
        self.A = (sp.kron(sp.eye(nyi), Tx) / g.hx ** 2
                  + sp.kron(Ty, sp.eye(nxi)) / g.hy ** 2).tocsc()
        bv = self._boundary_values(g, boundary)
        bc = np.zeros((nyi, nxi))
        bc[:, 0] += bv[1:-1, 0] / g.hx ** 2
        bc[:, -1] += bv[1:-1, -1] / g.hx ** 2
        bc[0, :] += bv[0, 1:-1] / g.hy ** 2
        bc[-1, :] += bv[-1, 1:-1] / g.hy ** 2
        self.bc_vec = bc.ravel()
        self.bv = bv
        self.geom = geom
        self.m = nxi * nyi
        self.nxi, self.nyi = nxi, nyi

    @staticmethod
    def _boundary_values(g: Grid2D, boundary: Union[Expr, float]) -> np.ndarray:
        """Full (ny, nx) array holding the Dirichlet data on its ring,
        zeros inside."""
        if isinstance(boundary, Expr):
            X, Y = g.meshgrid()
            at = {v: c for v, c in zip(boundary.vars, (X, Y))}
            bv = np.array(np.broadcast_to(
                eval_dual(boundary, at, boundary.vars[0]).value, (g.ny, g.nx)))
        else:
            bv = np.full((g.ny, g.nx), float(boundary))
        ring = np.concatenate([bv[0], bv[-1], bv[:, 0], bv[:, -1]])
        if not np.all(np.isfinite(ring)):
            raise EllipticError("boundary data is not finite on the edge")
        bv[1:-1, 1:-1] = 0.0
        return bv

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        return self.A @ u + self.bc_vec

    def residual(self, u: np.ndarray, coef: float, a: float) -> np.ndarray:
        return self.laplacian(u) + coef * np.exp(a * u)

    def jacobian_solver(self, u: np.ndarray, coef: float, a: float,
                        ) -> Callable[[np.ndarray], np.ndarray]:
        J = self.A + sp.diags(coef * a * np.exp(a * u))
        try:
            lu = splu(J.tocsc())
        except RuntimeError as exc:
            raise SingularJacobianError(str(exc)) from exc
        return lu.solve

    def jacobian_matvec(self, u: np.ndarray, coef: float, a: float,
                        v: np.ndarray) -> np.ndarray:
        return self.A @ v + coef * a * np.exp(a * u) * v

    def initial_guess(self) -> np.ndarray:
        if not np.any(self.bc_vec):
            return np.zeros(self.m)
        return splu(self.A).solve(-self.bc_vec)

    def center_value(self, u: np.ndarray) -> float:
        """Value at the domain center (mean of the nearest nodes when the
        center falls between them)."""
        full = self.pack(u).values
        ic, jc = (self.geom.grid.nx - 1) / 2, (self.geom.grid.ny - 1) / 2
        i0, i1 = int(np.floor(ic)), int(np.ceil(ic))
        j0, j1 = int(np.floor(jc)), int(np.ceil(jc))
        return float(0.25 * (full[j0, i0] + full[j0, i1]
                             + full[j1, i0] + full[j1, i1]))

    def pack(self, u: np.ndarray) -> ScalarField2D:
        full = self.bv.copy()
        full[1:-1, 1:-1] = u.reshape(self.nyi, self.nxi)
        return ScalarField2D(self.geom.grid, full)


def _make_system(geometry: Geometry, boundary: Union[Expr, float]):
    if isinstance(geometry, DiskGeometry):
        return _RadialSystem(geometry, float(boundary))
    if isinstance(geometry, RectangleGeometry):
        return _RectSystem(geometry, boundary)
    raise EllipticError(f"unsupported geometry {type(geometry).__name__}")


def _coef_a(params: Params) -> tuple[float, float]:
    if isinstance(params, GelfandParams):
        return params.lam, 1.0
    return -params.K, params.a


def _newton(system, u: np.ndarray, coef: float, a: float,
            tol: float = NEWTON_TOL, max_iter: int = MAX_NEWTON,
            ) -> tuple[np.ndarray, SolveReport]:
    """Damped Newton with a strict-decrease backtracking line search."""
    history = []
    for it in range(max_iter):
        F = system.residual(u, coef, a)
        nrm = float(np.abs(F).max())
        history.append(nrm)
        if not np.isfinite(nrm):
            report = SolveReport(it, nrm, False, history, tol)
            raise NonConvergenceError("residual became non-finite", report, u)
        if nrm <= tol:
            return u, SolveReport(it, nrm, True, history, tol)
        du = system.jacobian_solver(u, coef, a)(-F)
        alpha = 1.0
        for _ in range(MAX_HALVINGS):
            ut = u + alpha * du
            if float(np.abs(system.residual(ut, coef, a)).max()) < nrm:
                u = ut
                break
            alpha *= 0.5
        else:
            step = float(np.abs(du).max())
            if nrm <= STALL_RESIDUAL_CAP and \
               step <= STALL_STEP_REL * (1.0 + float(np.abs(u).max())):
                return u, SolveReport(it, nrm, True, history, max(tol, nrm))
            report = SolveReport(it, nrm, False, history, tol)
            raise NonConvergenceError(
                f"line search stalled at residual {nrm:.3e}", report, u)
    F = system.residual(u, coef, a)
    nrm = float(np.abs(F).max())
    history.append(nrm)
    report = SolveReport(max_iter, nrm, False, history, tol)
    raise NonConvergenceError(
        f"no convergence in {max_iter} iterations (residual {nrm:.3e})",
        report, u)


def solve_dirichlet(p: DirichletProblem, initial: Optional[np.ndarray] = None,
                    tol: float = NEWTON_TOL, max_iter: int = MAX_NEWTON,
                    ) -> tuple[Union[ScalarField2D, RadialProfile], SolveReport]:
    """Solve the Dirichlet problem by damped Newton iteration.

    The initial guess is the discrete harmonic extension of the boundary
    data unless ``initial`` supplies the unknown vector directly.
    Raises NonConvergenceError (with the report attached) if the
    iteration stalls, SingularJacobianError if a linear solve fails.
    """
    system = _make_system(p.geometry, p.boundary)
    coef, a = _coef_a(p.params)
    u0 = system.initial_guess() if initial is None else np.asarray(initial, float)
    if u0.shape != (system.m,):
        raise EllipticError(f"initial guess must have shape ({system.m},)")
    u, report = _newton(system, u0.copy(), coef, a, tol, max_iter)
    return system.pack(u), report


# --- pseudo-arclength continuation --------------------------------------


@dataclass
class BranchPoint:
    s: float
    lam: float
    u0: float
    u: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Fold:
    """First turning point of the branch: d(lambda)/ds changes sign
    between points[index] and points[index + 1]."""

    lam0: float
    u0: float
    index: int


@dataclass
class Branch:
    points: list[BranchPoint]
    fold: Optional[Fold] = None
    aborted: bool = False

    def write_csv(self, path) -> None:
        from .fields import open_text
        with open_text(path, "w") as fh:
            fh.write("s,lambda,u0\n")
            for pt in self.points:
                fh.write(f"{pt.s!r},{pt.lam!r},{pt.u0!r}\n")


class _GelfandContinuation:
    """Bordered-system machinery for F(u, lam) = Lap_h u + lam e^u."""

    def __init__(self, geometry: Geometry, tol: float):
        self.sys = _make_system(geometry, 0.0)
        self.m = self.sys.m
        self.tol = tol

    # scaled inner product: the u block carries weight 1/m so that grid
    # refinement does not change the meaning of an arclength step
    def dot(self, du1, dl1, du2, dl2) -> float:
        return float(du1 @ du2) / self.m + dl1 * dl2

    def norm(self, du, dl) -> float:
        return float(np.sqrt(self.dot(du, dl, du, dl)))

    def solve_fixed(self, lam: float, guess: np.ndarray):
        return _newton(self.sys, guess.copy(), lam, 1.0, self.tol)

    def corrector(self, u, lam, tu, tl, u_pred, lam_pred,
                  max_iter: int = 12) -> tuple[np.ndarray, float, int]:
        """Newton on (F, N) = 0 where N pins the iterate to the plane
        through the predictor with (scaled-)normal equal to the tangent.

        As in the plain solver, a negligible update with a small residual
        counts as converged at the rounding floor.
        """
        for it in range(max_iter):
            F = self.sys.residual(u, lam, 1.0)
            nrm = float(np.abs(F).max())
            N = self.dot(u - u_pred, lam - lam_pred, tu, tl)
            if not np.isfinite(nrm):
                break
            if max(nrm, abs(N)) <= self.tol:
                return u, lam, it
            solve = self.sys.jacobian_solver(u, lam, 1.0)
            a_vec = solve(-F)
            b_vec = solve(-np.exp(u))
            denom = self.dot(b_vec, 1.0, tu, tl)
            if denom == 0.0:
                raise SingularJacobianError("degenerate bordered system")
            dlam = (-N - self.dot(a_vec, 0.0, tu, tl)) / denom
            u = u + a_vec + dlam * b_vec
            lam = lam + dlam
            step = self.norm(a_vec + dlam * b_vec, dlam)
            if nrm <= STALL_RESIDUAL_CAP and abs(N) <= self.tol and \
               step <= STALL_STEP_REL * (1.0 + float(np.abs(u).max())):
                return u, lam, it + 1
        raise NonConvergenceError("continuation corrector did not converge",
                                  SolveReport(max_iter, float("inf"), False), u)

    def tangent(self, u, lam, tu_prev, tl_prev) -> tuple[np.ndarray, float]:
        """Unit tangent of the solution curve at (u, lam), oriented to
        keep a positive scaled product with the previous tangent."""
        b_vec = self.sys.jacobian_solver(u, lam, 1.0)(-np.exp(u))
        sign = 1.0 if self.dot(b_vec, 1.0, tu_prev, tl_prev) >= 0 else -1.0
        nrm = self.norm(b_vec, 1.0)
        return sign * b_vec / nrm, sign / nrm


def continue_branch(geometry: Geometry, lam_start: float = 0.0,
                    max_steps: int = 500, ds: float = 0.05, *,
                    lam_stop: Optional[float] = None, u0_cap: float = 15.0,
                    tol: float = NEWTON_TOL, fold_tol: float = 1e-6,
                    ) -> Branch:
    """Trace the Gelfand branch from ``lam_start`` through the first fold.

    Secant-predictor pseudo-arclength steps with ds adaptive in
    [1e-4, 0.1]; the fold is detected by a sign change of d(lambda)/ds
    and refined by bisection in arclength until the bracket's lambda
    width is below ``fold_tol``.  Stops on ``max_steps``, or once past
    the fold when lambda falls below ``lam_stop`` (default: lam_start)
    or the center value exceeds ``u0_cap``.

    A step that still fails after 10 halvings of ds aborts the trace;
    the partial branch is returned with ``aborted = True``.
    """
    if lam_start < 0:
        raise EllipticError(f"lam_start must be >= 0, got {lam_start}")
    if not DS_MIN <= ds <= DS_MAX:
        raise EllipticError(f"ds must lie in [{DS_MIN}, {DS_MAX}], got {ds}")
    if lam_stop is None:
        lam_stop = lam_start
    con = _GelfandContinuation(geometry, tol)
    sys_ = con.sys

    u, _ = con.solve_fixed(lam_start, np.zeros(con.m))
    points = [BranchPoint(0.0, lam_start, sys_.center_value(u), u.copy())]

    # second point by natural continuation, a small lambda increment
    dlam0 = min(ds, 0.02)
    u2, _ = con.solve_fixed(lam_start + dlam0, u.copy())
    s2 = con.norm(u2 - u, dlam0)
    points.append(BranchPoint(s2, lam_start + dlam0, sys_.center_value(u2),
                              u2.copy()))

    tl_sign_prev = 1.0  # lambda increases along the natural start
    fold: Optional[Fold] = None
    aborted = False

    while len(points) < max_steps:
        p_prev, p_cur = points[-2], points[-1]
        du = p_cur.u - p_prev.u
        dl = p_cur.lam - p_prev.lam
        nrm = con.norm(du, dl)
        tu, tl = du / nrm, dl / nrm

        accepted = None
        for _ in range(10):
            u_pred = p_cur.u + ds * tu
            lam_pred = p_cur.lam + ds * tl
            try:
                accepted = con.corrector(u_pred.copy(), lam_pred,
                                         tu, tl, u_pred, lam_pred)
                break
            except (NonConvergenceError, SingularJacobianError):
                ds = max(ds / 2.0, DS_MIN)
        if accepted is None:
            aborted = True
            break
        un, ln, iters = accepted
        s_new = p_cur.s + con.norm(un - p_cur.u, ln - p_cur.lam)
        points.append(BranchPoint(s_new, ln, sys_.center_value(un), un.copy()))

        try:
            _, tln = con.tangent(un, ln, tu, tl)
        except SingularJacobianError:
            tln = tl  # exactly at the fold; fall back to the secant
        if fold is None and tln * tl_sign_prev < 0:
            fold = _refine_fold(con, points[-2], points[-1], fold_tol,
                                len(points) - 2)
        if tln != 0.0:
            tl_sign_prev = tln

        if iters <= 3:
            ds = min(ds * 1.4, DS_MAX)
        elif iters >= 7:
            ds = max(ds * 0.7, DS_MIN)
        if fold is not None and (ln < lam_stop or points[-1].u0 > u0_cap):
            break

    return Branch(points, fold, aborted)


def _refine_fold(con: _GelfandContinuation, p_left: BranchPoint,
                 p_right: BranchPoint, fold_tol: float, index: int) -> Fold:
    """Bisection in arclength over the sign-change bracket, then a
    parabola vertex through the three highest points seen."""
    left, right = p_left, p_right
    seen = [(left.u0, left.lam), (right.u0, right.lam)]
    for _ in range(80):
        if abs(left.lam - right.lam) <= fold_tol:
            break
        ds_mid = 0.5 * (right.s - left.s)
        du = right.u - left.u
        dl = right.lam - left.lam
        nrm = con.norm(du, dl)
        tu, tl = du / nrm, dl / nrm
        u_pred = left.u + ds_mid * tu
        lam_pred = left.lam + ds_mid * tl
        try:
            um, lm, _ = con.corrector(u_pred.copy(), lam_pred, tu, tl,
                                      u_pred, lam_pred)
            _, tlm = con.tangent(um, lm, tu, tl)
        except (NonConvergenceError, SingularJacobianError):
            break
        s_mid = left.s + con.norm(um - left.u, lm - left.lam)
        mid = BranchPoint(s_mid, lm, con.sys.center_value(um), um)
        seen.append((mid.u0, mid.lam))
        if tlm > 0:
            left = mid
        else:
            right = mid
    lam0, u0 = _parabola_vertex(seen)
    return Fold(lam0, u0, index)


def _parabola_vertex(seen: list[tuple[float, float]]) -> tuple[float, float]:
    """Vertex of the parabola lam(u0) through the three highest-lam
    samples (divided differences; exact for a quadratic)."""
    pts = sorted(set(seen), key=lambda t: -t[1])[:3]
    if len(pts) < 3:
        u0, lam0 = pts[0]
        return lam0, u0
    (x1, y1), (x2, y2), (x3, y3) = pts
    d12 = (y1 - y2) / (x1 - x2)
    d23 = (y2 - y3) / (x2 - x3)
    c2 = (d12 - d23) / (x1 - x3)
    if not np.isfinite(c2) or c2 >= 0:
        return y1, x1
    x_star = 0.5 * (x2 + x3) - d23 / (2 * c2)
    lam0 = y3 + d23 * (x_star - x3) + c2 * (x_star - x2) * (x_star - x3)
    return float(lam0), float(x_star)


def solve_on_branch(geometry: Geometry, branch: Branch, lam: float,
                    side: str = "lower", tol: float = NEWTON_TOL,
                    ) -> tuple[Union[ScalarField2D, RadialProfile], SolveReport]:
    """Solve the Gelfand problem at a prescribed lambda on one side of
    the fold, seeding Newton from the nearest branch point.

    ``side`` is "lower" (points up to the fold bracket) or "upper"
    (points past it).
    """
    if side not in ("lower", "upper"):
        raise EllipticError(f"side must be 'lower' or 'upper', got {side!r}")
    if branch.fold is None and side == "upper":
        raise EllipticError("branch has no fold, no upper side exists")
    split = branch.fold.index + 1 if branch.fold is not None else len(branch.points)
    segment = branch.points[:split] if side == "lower" else branch.points[split:]
    if not segment:
        raise EllipticError(f"no branch points on the {side} side")
    best = min(segment, key=lambda pt: abs(pt.lam - lam))
    system = _make_system(geometry, 0.0)
    u, report = _newton(system, best.u.copy(), lam, 1.0, tol)
    return system.pack(u), report


def boundary_blowup_approx(geometry: DiskGeometry, M_list: list[float],
                           tol: float = NEWTON_TOL) -> list[RadialProfile]:
    """Approximate the boundary blow-up solution of Delta u = e^u by
    solving with constant boundary data M for each M in the increasing
    ``M_list``, continuing in M with unit-sized homotopy steps."""
    Ms = [float(M) for M in M_list]
    if any(b <= a for a, b in zip(Ms, Ms[1:])):
        raise EllipticError(f"M_list must be strictly increasing, got {Ms}")
    out = []
    guess = None
    cur = min(0.0, Ms[0])
    for M in Ms:
        while True:
            cur = min(cur + 1.0, M)
            system = _RadialSystem(geometry, cur)
            if guess is None:
                guess = system.initial_guess()
            guess, _ = _newton(system, guess, -1.0, 1.0, tol)
            if cur >= M:
                break
        out.append(system.pack(guess))
    return out
