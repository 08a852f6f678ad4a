"""Closed-form Liouville solutions used as oracles for the numerical
solvers.

* two-function solution of u_xy = K e^(a u) from a characteristic pair
  (f(x), g(y)):  u = (1/a) ln(2 f' g' / (a K (f+g)^2));
* one-analytic-function solution of Delta u = K e^(a u) from a seed F(z):
  u = (1/a) (ln(8|F'|^2 / (1 -+ |F|^2)^2) - ln(a |K|));
* the radial Gelfand family on the unit disk, lambda(b) = 8b/(1+b)^2;
* the boundary blow-up solution u = ln(8/(1 - x^2 - y^2)^2);
* the singular locus f(x) + g(y) = 0 traced as a curve;
* pointwise conversion between u and T = e^u.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    ClosedFormError,
    DomainViolationError,
    NonMonotoneGError,
    NonPositiveBError,
    SeedDegenerateError,
    SignError,
    SingularNodeError,
)
from .expr import Expr, eval_complex, eval_dual
from .fields import Grid2D, LiouvilleParams, ScalarField2D

__all__ = [
    "CharacteristicPair",
    "AnalyticSeed",
    "GelfandRadial",
    "BlowupCurve",
    "hyperbolic_exact",
    "elliptic_exact",
    "gelfand_radial",
    "boundary_blowup_exact",
    "blowup_curve",
    "convert_log_form",
]


@dataclass(frozen=True)
class CharacteristicPair:
    """Univariate expressions f(x), g(y) generating a two-function solution."""

    f: Expr
    g: Expr

    def __post_init__(self):
        for e, role in ((self.f, "f"), (self.g, "g")):
            if len(e.vars) != 1:
                raise ClosedFormError(f"{role} must be univariate, has vars {e.vars}")


@dataclass(frozen=True)
class AnalyticSeed:
    """Holomorphic seed F(z) plus the denominator sign of the generated
    solution: "minus" pairs with K > 0, "plus" with K < 0."""

    F: Expr
    sign: str

    def __post_init__(self):
        if self.sign not in ("plus", "minus"):
            raise ClosedFormError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if len(self.F.vars) != 1:
            raise ClosedFormError(f"F must be univariate, has vars {self.F.vars}")


def hyperbolic_exact(cp: CharacteristicPair, p: LiouvilleParams,
                     grid: Grid2D) -> ScalarField2D:
    """Sample u = (1/a) ln(2 f'(x) g'(y) / (a K (f+g)^2)) on ``grid``.

    Raises SingularNodeError if f+g vanishes exactly at a node and
    SignError unless a*K*f'*g' > 0 everywhere on the grid.
    """
    fx = eval_dual(cp.f, grid.x(), cp.f.vars[0])
    gy = eval_dual(cp.g, grid.y(), cp.g.vars[0])
    fv = np.broadcast_to(fx.value, (grid.nx,))
    fp = np.broadcast_to(fx.d1, (grid.nx,))
    gv = np.broadcast_to(gy.value, (grid.ny,))
    gp = np.broadcast_to(gy.d1, (grid.ny,))

    s = gv[:, None] + fv[None, :]
    zero = np.argwhere(s == 0.0)
    if zero.size:
        j, i = zero[0]
        raise SingularNodeError(int(i), int(j), float(grid.x()[i]), float(grid.y()[j]))
    q = p.a * p.K * gp[:, None] * fp[None, :]
    if np.any(q <= 0):
        raise SignError(
            "a*K*f'(x)*g'(y) must be positive on the whole grid "
            f"(min {float(np.min(q))!r})"
        )
    u = (np.log(2.0 * fp[None, :] * gp[:, None] / (p.a * p.K)) - np.log(s * s)) / p.a
    return ScalarField2D(grid, u)


def elliptic_exact(seed: AnalyticSeed, K: float, a: float,
                   grid: Grid2D) -> ScalarField2D:
    """Sample u = (1/a)(ln(8|F'|^2/(1 -+ |F|^2)^2) - ln(a|K|)) on ``grid``.

    The "minus" sign solves Delta u = K e^(a u) for K > 0 and requires
    |F| < 1 on the grid; "plus" solves it for K < 0.  Requires a > 0 (the
    additive normalization ln(a|K|) has no real value otherwise).
    """
    if K == 0 or a == 0:
        raise ClosedFormError("K and a must be nonzero")
    if (seed.sign == "minus") != (K > 0):
        raise SignError(
            f"sign '{seed.sign}' pairs with K {'>' if seed.sign == 'minus' else '<'} 0, "
            f"got K={K}"
        )
    if a < 0:
        raise SignError("the analytic-seed solution requires a > 0")
    X, Y = grid.meshgrid()
    F, Fp = eval_complex(seed.F, X + 1j * Y)
    F = np.broadcast_to(F, X.shape)
    Fp = np.broadcast_to(Fp, X.shape)
    degenerate = np.argwhere(Fp == 0)
    if degenerate.size:
        j, i = degenerate[0]
        raise SeedDegenerateError(int(i), int(j))
    mod2 = (F * F.conj()).real
    if seed.sign == "minus":
        if np.any(mod2 >= 1.0):
            raise DomainViolationError(
                "|F(z)| must stay below 1 for the minus sign "
                f"(max |F|^2 = {float(mod2.max())!r})"
            )
        den = 1.0 - mod2
    else:
        den = 1.0 + mod2
    mag2 = (Fp * Fp.conj()).real
    u = (np.log(8.0 * mag2 / (den * den)) - np.log(a * abs(K))) / a
    return ScalarField2D(grid, u)


@dataclass(frozen=True)
class GelfandRadial:
    """One member of the radial solution family of Delta u + lambda e^u = 0
    on the unit disk with zero boundary data."""

    b: float
    lam: float
    u0: float

    def profile(self) -> Callable[[np.ndarray], np.ndarray]:
        b, lam = self.b, self.lam
        def u(r):
            r = np.asarray(r, dtype=float)
            return np.log(8.0 * b / (lam * (1.0 + b * r * r) ** 2))
        return u


def gelfand_radial(b: float) -> GelfandRadial:
    """Closed-form branch member: lambda(b) = 8b/(1+b)^2, u(0) = 2 ln(1+b)."""
    if not b > 0:
        raise NonPositiveBError(f"b must be positive, got {b}")
    lam = 8.0 * b / (1.0 + b) ** 2
    return GelfandRadial(b, lam, float(np.log(8.0 * b / lam)))


def boundary_blowup_exact(grid: Grid2D) -> ScalarField2D:
    """u = ln(8/(1-x^2-y^2)^2), the solution of Delta u = e^u on the unit
    disk that diverges at the boundary circle.  Nodes on or outside the
    circle get the NaN sentinel."""
    X, Y = grid.meshgrid()
    r2 = X * X + Y * Y
    u = np.full(X.shape, np.nan)
    inside = r2 < 1.0
    u[inside] = np.log(8.0) - 2.0 * np.log1p(-r2[inside])
    return ScalarField2D(grid, u)


@dataclass
class BlowupCurve:
    """Sampled singular locus f(x) + g(y) = 0: one (x, y) pair per sample,
    y = None where the locus does not cross the searched y-interval."""

    samples: list[tuple[float, Optional[float]]]
    tol: float

    def write_csv(self, path) -> None:
        from .fields import open_text
        with open_text(path, "w") as fh:
            fh.write("x,y\n")
            for x, y in self.samples:
                fh.write(f"{x!r},{'NA' if y is None else repr(y)}\n")


def blowup_curve(cp: CharacteristicPair, x_range: tuple[float, float],
                 y_range: tuple[float, float], n_samples: int = 101,
                 tol: float = 1e-12) -> BlowupCurve:
    """Trace y(x) with f(x) + g(y(x)) = 0 over ``x_range``.

    For each sampled x the equation is bracketed on ``y_range`` and
    solved by bisection polished with Newton to ``|f+g| <= tol`` scale.
    g must be strictly monotone on the y-interval (checked via the sign
    of g' at the samples); a sign change raises NonMonotoneGError.
    """
    xa, xb = x_range
    ya, yb = y_range
    if not (xb > xa and yb > ya and n_samples >= 2):
        raise ClosedFormError("need xb > xa, yb > ya and at least 2 samples")
    gname = cp.g.vars[0]
    ys_probe = np.linspace(ya, yb, max(33, n_samples))
    gy = eval_dual(cp.g, ys_probe, gname)
    gp = np.broadcast_to(gy.d1, ys_probe.shape)
    if np.any(gp == 0) or (gp.min() < 0 < gp.max()):
        raise NonMonotoneGError(
            f"g' changes sign on [{ya}, {yb}] "
            f"(range [{float(gp.min())!r}, {float(gp.max())!r}])"
        )

    def g_of(y):
        return eval_dual(cp.g, float(y), gname)

    fname = cp.f.vars[0]
    samples: list[tuple[float, Optional[float]]] = []
    for x in np.linspace(xa, xb, n_samples):
        fv = eval_dual(cp.f, float(x), fname).value
        ga, gb = g_of(ya).value, g_of(yb).value
        lo, hi = ya, yb
        flo, fhi = fv + ga, fv + gb
        if flo == 0.0:
            samples.append((float(x), float(ya)))
            continue
        if fhi == 0.0:
            samples.append((float(x), float(yb)))
            continue
        if np.sign(flo) == np.sign(fhi):
            samples.append((float(x), None))
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = fv + g_of(mid).value
            if abs(fm) <= tol or hi - lo <= 4e-16 * max(1.0, abs(mid)):
                break
            if np.sign(fm) == np.sign(flo):
                lo, flo = mid, fm
            else:
                hi = mid
        # one Newton polish (g' bounded away from zero by the probe above)
        res = g_of(mid)
        mid = mid - (fv + res.value) / res.d1
        mid = float(np.clip(mid, ya, yb))
        samples.append((float(x), mid))
    return BlowupCurve(samples, tol)


def convert_log_form(field: ScalarField2D, direction: str) -> ScalarField2D:
    """Pointwise change of unknown between u and T = e^u.

    ``direction`` is "u_to_T" or "T_to_u"; NaN sentinels pass through,
    and T_to_u requires every non-sentinel entry to be positive.
    """
    v = field.values
    if direction == "u_to_T":
        return ScalarField2D(field.grid, np.exp(v))
    if direction == "T_to_u":
        finite = np.isfinite(v)
        if np.any(v[finite] <= 0):
            from .errors import NonPositiveFieldError
            raise NonPositiveFieldError("T must be positive to form u = log T")
        return ScalarField2D(field.grid, np.log(v))
    raise ClosedFormError(f"direction must be 'u_to_T' or 'T_to_u', got {direction!r}")
