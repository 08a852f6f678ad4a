"""Newton solver, branch continuation, and large-data homotopy checked
against the closed-form families."""

import math

import numpy as np
import pytest

from liouville.closedform import AnalyticSeed, elliptic_exact, gelfand_radial
from liouville.elliptic import (
    Branch,
    DirichletProblem,
    DiskGeometry,
    GelfandParams,
    RectangleGeometry,
    _make_system,
    boundary_blowup_approx,
    continue_branch,
    solve_dirichlet,
    solve_on_branch,
)
from liouville.errors import EllipticError, NonConvergenceError
from liouville.expr import parse
from liouville.fields import Grid2D, LiouvilleParams

LN4 = math.log(4.0)
LN8 = math.log(8.0)

# boundary trace of the exact solution ln(8|F'|^2 / (1 + |F|^2)^2) with
# F(z) = z, which solves Delta u = -e^u on any domain inside C
BLOWDOWN_TRACE = "ln(8/(1+x^2+y^2)^2)"


def rect(n):
    return RectangleGeometry(Grid2D.from_bounds(-0.4, -0.4, 0.4, 0.4, n, n))


@pytest.fixture(scope="module")
def branch257():
    return continue_branch(DiskGeometry(257))


class TestRectangleSolve:
    def solve_error(self, n):
        g = Grid2D.from_bounds(-0.4, -0.4, 0.4, 0.4, n, n)
        prob = DirichletProblem(RectangleGeometry(g), LiouvilleParams(-1.0, 1.0),
                                parse(BLOWDOWN_TRACE, ("x", "y")))
        u, report = solve_dirichlet(prob)
        assert report.converged
        exact = elliptic_exact(AnalyticSeed(parse("z", ("z",)), "plus"),
                               -1.0, 1.0, g)
        return float(np.abs(u.values - exact.values).max())

    def test_second_order_against_exact(self):
        errs = [self.solve_error(n) for n in (33, 65, 129)]
        assert errs[-1] <= 1e-5
        for lo, hi in zip(errs, errs[1:]):
            assert 1.8 <= math.log2(lo / hi) <= 2.2

    def test_small_domain_converges_fast(self):
        g = Grid2D.from_bounds(0.0, 0.0, 0.1, 0.1, 17, 17)
        prob = DirichletProblem(RectangleGeometry(g), LiouvilleParams(1.0, 1.0))
        _, report = solve_dirichlet(prob)
        assert report.converged
        assert report.iterations <= 6

    def test_newton_tail_is_quadratic(self):
        g = Grid2D.from_bounds(-0.4, -0.4, 0.4, 0.4, 65, 65)
        prob = DirichletProblem(RectangleGeometry(g), LiouvilleParams(-1.0, 1.0),
                                parse(BLOWDOWN_TRACE, ("x", "y")))
        _, report = solve_dirichlet(prob)
        # check r_{k+1} <= C r_k^2 on entries small enough to be in the
        # quadratic regime but still above the rounding floor
        pairs = [(a, b) for a, b in zip(report.newton_history,
                                        report.newton_history[1:])
                 if a <= 1e-2 and b > 1e-10]
        assert pairs
        for a, b in pairs:
            assert b <= 1e3 * a * a

    def test_report_invariants(self):
        prob = DirichletProblem(rect(33), LiouvilleParams(1.0, 1.0))
        _, report = solve_dirichlet(prob)
        assert report.converged
        assert report.final_residual <= report.tolerance
        assert report.newton_history[-1] == report.final_residual
        assert len(report.newton_history) == report.iterations + 1

    def test_bad_initial_shape(self):
        prob = DirichletProblem(rect(33), LiouvilleParams(1.0, 1.0))
        with pytest.raises(EllipticError):
            solve_dirichlet(prob, initial=np.zeros(7))


class TestDiskSolve:
    def test_matches_radial_family(self):
        fam = gelfand_radial(0.5)
        errs = []
        for n in (129, 257):
            prof, report = solve_dirichlet(
                DirichletProblem(DiskGeometry(n), GelfandParams(fam.lam)))
            assert report.converged
            errs.append(float(np.abs(prof.values - fam.profile()(prof.r)).max()))
        assert errs[-1] <= 1e-5
        assert 1.8 <= math.log2(errs[0] / errs[1]) <= 2.2

    def test_boundary_node_exact(self):
        prof, _ = solve_dirichlet(
            DirichletProblem(DiskGeometry(65), GelfandParams(1.0)))
        assert prof.values[-1] == 0.0
        assert prof.r[0] == 0.0 and prof.r[-1] == 1.0

    def test_critical_K_reproduces_fold_solution(self):
        """Delta u = -2 e^u on the unit disk against the closed-form
        member with lambda = 2, the fold of the radial branch.

        The discrete fold sits strictly below 2 for every mesh (the h^2
        consistency error shifts it down), so the discrete problem this
        test poses has no solution to converge to; Newton stalls at a
        residual of order 1e-4 instead.  The failure is the finding.
        """
        fam = gelfand_radial(1.0)
        prof, report = solve_dirichlet(
            DirichletProblem(DiskGeometry(257), LiouvilleParams(-2.0, 1.0)))
        assert report.converged
        err = float(np.abs(prof.values - fam.profile()(prof.r)).max())
        assert err <= 1e-4


class TestJacobian:
    coef, a = 1.3, 0.7

    def check(self, system, rng):
        u = rng.normal(0.0, 0.5, system.m)
        worst = 0.0
        for _ in range(10):
            v = rng.normal(size=system.m)
            t = 1e-6
            fd = (system.residual(u + t * v, self.coef, self.a)
                  - system.residual(u - t * v, self.coef, self.a)) / (2 * t)
            jv = system.jacobian_matvec(u, self.coef, self.a, v)
            worst = max(worst, float(np.abs(fd - jv).max()
                                     / max(np.abs(jv).max(), 1.0)))
        return worst

    def test_rectangle_matvec_matches_differences(self):
        system = _make_system(rect(21), 0.0)
        assert self.check(system, np.random.default_rng(3)) <= 1e-6

    def test_disk_matvec_matches_differences(self):
        system = _make_system(DiskGeometry(101), 0.0)
        assert self.check(system, np.random.default_rng(4)) <= 1e-6


class TestContinuation:
    def test_starts_from_trivial_solution(self, branch257):
        first = branch257.points[0]
        assert first.lam == 0.0
        assert first.u0 == 0.0
        assert np.all(first.u == 0.0)

    def test_fold_location(self, branch257):
        fold = branch257.fold
        assert fold is not None
        assert abs(fold.lam0 - 2.0) <= 5e-5
        assert abs(fold.u0 - LN4) <= 1e-4
        # the discrete fold lies below the continuum one
        assert fold.lam0 < 2.0

    def test_not_aborted(self, branch257):
        assert not branch257.aborted
        s = [pt.s for pt in branch257.points]
        assert all(b > a for a, b in zip(s, s[1:]))

    def test_two_solutions_pair_up(self, branch257):
        # members at equal lambda have parameters b and 1/b, so the
        # product of their recovered b values must be 1
        geom = DiskGeometry(257)
        for lam in (0.8, 1.2):
            lo, _ = solve_on_branch(geom, branch257, lam, "lower")
            up, _ = solve_on_branch(geom, branch257, lam, "upper")
            b_lo = math.exp(lo.u0 / 2.0) - 1.0
            b_up = math.exp(up.u0 / 2.0) - 1.0
            assert b_lo < 1.0 < b_up
            assert abs(b_lo * b_up - 1.0) <= 1e-3

    def test_lower_branch_at_unit_lambda(self, branch257):
        prof, _ = solve_on_branch(DiskGeometry(257), branch257, 1.0, "lower")
        assert abs(prof.u0 - math.log(8.0 * (3.0 - 2.0 * math.sqrt(2.0)))) <= 1e-4

    def test_short_trace_has_no_fold(self):
        short = continue_branch(DiskGeometry(65), max_steps=5)
        assert short.fold is None
        assert not short.aborted
        assert len(short.points) == 5
        with pytest.raises(EllipticError):
            solve_on_branch(DiskGeometry(65), short, 1.0, "upper")

    def test_center_cap_truncates_upper_branch(self, branch257):
        capped = continue_branch(DiskGeometry(257), u0_cap=1.0)
        assert capped.fold is not None
        assert len(capped.points) < len(branch257.points)
        assert capped.points[-1].u0 < 2.0
        assert branch257.points[-1].u0 > 15.0

    def test_parameter_validation(self):
        with pytest.raises(EllipticError):
            continue_branch(DiskGeometry(65), lam_start=-0.5)
        with pytest.raises(EllipticError):
            continue_branch(DiskGeometry(65), ds=0.5)
        with pytest.raises(EllipticError):
            solve_on_branch(DiskGeometry(65), Branch([]), 1.0, "sideways")


class TestBoundaryBlowupApprox:
    def test_profiles_increase_toward_limit(self):
        profs = boundary_blowup_approx(DiskGeometry(513), [5.0, 8.0, 11.0])
        for prev, cur in zip(profs, profs[1:]):
            assert np.all(cur.values > prev.values)
        gaps = [LN8 - p.u0 for p in profs]
        assert all(g > 0 for g in gaps)
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_boundary_node_carries_data(self):
        (prof,) = boundary_blowup_approx(DiskGeometry(129), [3.0])
        assert prof.values[-1] == 3.0
        assert prof.u0 < 3.0

    def test_rejects_non_increasing_levels(self):
        with pytest.raises(EllipticError):
            boundary_blowup_approx(DiskGeometry(65), [5.0, 5.0])
        with pytest.raises(EllipticError):
            boundary_blowup_approx(DiskGeometry(65), [8.0, 5.0])


class TestValidation:
    def test_geometry_bounds(self):
        with pytest.raises(EllipticError):
            DiskGeometry(2)
        with pytest.raises(EllipticError):
            RectangleGeometry(Grid2D.from_bounds(0, 0, 1, 1, 2, 5))

    def test_gelfand_params_finite(self):
        with pytest.raises(EllipticError):
            GelfandParams(math.inf)

    def test_disk_rejects_expression_boundary(self):
        with pytest.raises(EllipticError):
            DirichletProblem(DiskGeometry(65), GelfandParams(1.0),
                             parse("x", ("x", "y")))
