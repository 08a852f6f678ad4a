"""Characteristic marching and the Baecklund integrator, checked against
the two-function closed form and each other."""

import math

import numpy as np
import pytest

from liouville.closedform import CharacteristicPair, hyperbolic_exact
from liouville.errors import (
    CornerMismatchError,
    HyperbolicError,
    OdeOverflowError,
)
from liouville.expr import parse
from liouville.fields import Grid2D, LiouvilleParams, norms, residual_hyperbolic
from liouville.hyperbolic import (
    GoursatData,
    WaveSolution,
    backlund,
    march,
    march_from_edges,
)

P11 = LiouvilleParams(1.0, 1.0)
ZERO_DATA = GoursatData(parse("0", ("x",)), parse("0", ("y",)))
ZERO_WAVE = WaveSolution(parse("0", ("x",)), parse("0", ("y",)))


def exact_trace(trace_src, var):
    return parse(trace_src, (var,))


class TestMarchAgainstExact:
    # traces of u = ln(2/(x+y)^2) on the edges through (0.5, 0.5)
    LIN = GoursatData(exact_trace("ln(2/(x+0.5)^2)", "x"),
                      exact_trace("ln(2/(0.5+y)^2)", "y"))
    # traces of u = ln(2 e^x e^y / (e^x + e^y)^2) through (1, 1)
    EXP = GoursatData(exact_trace("ln(2*exp(x)*exp(1)/(exp(x)+exp(1))^2)", "x"),
                      exact_trace("ln(2*exp(y)*exp(1)/(exp(y)+exp(1))^2)", "y"))

    def test_linear_pair_bound(self):
        # the marching stencil shares the exact solution's cancellation
        # for linear f, g, so h^2 holds with a tiny constant
        cp = CharacteristicPair(parse("x", ("x",)), parse("y", ("y",)))
        for n in (33, 65):
            g = Grid2D.from_bounds(0.5, 0.5, 1.5, 1.5, n, n)
            res = march(self.LIN, P11, g)
            assert res.n_masked == 0
            err = np.abs(res.field.values - hyperbolic_exact(cp, P11, g).values)
            assert err.max() <= 1e-4 * g.hx ** 2

    def test_curved_pair_second_order(self):
        cp = CharacteristicPair(parse("exp(x)", ("x",)), parse("exp(y)", ("y",)))
        errs = []
        for n in (33, 65, 129):
            g = Grid2D.from_bounds(1.0, 1.0, 2.0, 2.0, n, n)
            res = march(self.EXP, P11, g)
            assert res.n_masked == 0
            errs.append(float(np.abs(res.field.values
                                     - hyperbolic_exact(cp, P11, g).values).max()))
        assert errs[-1] <= 1e-5
        for lo, hi in zip(errs, errs[1:]):
            assert 1.8 <= math.log2(lo / hi) <= 2.2


class TestMarchZeroData:
    def test_interior_growth(self):
        g = Grid2D.from_bounds(0.0, 0.0, 1.0, 1.0, 33, 33)
        res = march(ZERO_DATA, P11, g)
        U = res.field.values
        assert res.n_masked == 0
        assert np.all(U[1:, 1:] > 0.0)
        assert np.all(np.diff(np.diag(U)) > 0.0)

    def test_corner_value(self):
        # zero edge data on the unit square has the closed continuation
        # u = -2 ln(1 - x y / 2), so u(1, 1) = ln 4
        g = Grid2D.from_bounds(0.0, 0.0, 1.0, 1.0, 65, 65)
        res = march(ZERO_DATA, P11, g)
        assert abs(res.field.values[-1, -1] - math.log(4.0)) <= 1e-6


class TestBlowupMask:
    def test_mask_hugs_singular_line(self):
        # exact solution data singular on x + y = 0; the edges through
        # (-2, -2) stay clear of it
        data = GoursatData(exact_trace("ln(2/(x-2)^2)", "x"),
                           exact_trace("ln(2/(-2+y)^2)", "y"))
        g = Grid2D.from_bounds(-2.0, -2.0, 1.0, 1.0, 97, 97)
        res = march(data, P11, g)
        X, Y = g.meshgrid()
        s = X + Y
        band = 2.0 * (g.hx + g.hy)
        assert res.n_masked > 0
        assert np.all(s[res.mask] > -band)
        assert np.all(res.mask[s > band])

    def test_no_singularity_no_mask(self):
        data = GoursatData(exact_trace("ln(2/(x+0.5)^2)", "x"),
                           exact_trace("ln(2/(0.5+y)^2)", "y"))
        g = Grid2D.from_bounds(0.5, 0.5, 1.5, 1.5, 49, 49)
        assert march(data, P11, g).n_masked == 0

    def test_threshold_monotone(self):
        g = Grid2D.from_bounds(0.0, 0.0, 3.0, 3.0, 97, 97)
        loose = march(ZERO_DATA, P11, g, blowup_threshold=25.0)
        tight = march(ZERO_DATA, P11, g, blowup_threshold=1.0)
        assert 0 < loose.n_masked < tight.n_masked
        # a lower cap masks a superset of nodes
        assert not np.any(loose.mask & ~tight.mask)


class TestMarchDeterminism:
    def test_prefix_grid_bitwise(self):
        # same h, half the extent: the diagonal sweep must reproduce the
        # shared prefix exactly, node for node
        EXP = TestMarchAgainstExact.EXP
        full = march(EXP, P11, Grid2D.from_bounds(1.0, 1.0, 2.0, 2.0, 65, 65))
        half = march(EXP, P11, Grid2D.from_bounds(1.0, 1.0, 1.5, 1.5, 33, 33))
        assert np.array_equal(full.field.values[:33, :33], half.field.values)


class TestMarchValidation:
    def test_corner_mismatch(self):
        with pytest.raises(CornerMismatchError):
            march(GoursatData(parse("0", ("x",)), parse("1", ("y",))), P11,
                  Grid2D.from_bounds(0, 0, 1, 1, 9, 9))

    def test_edge_shapes(self):
        g = Grid2D.from_bounds(0, 0, 1, 1, 9, 9)
        with pytest.raises(HyperbolicError):
            march_from_edges(np.zeros(8), np.zeros(9), P11, g)

    def test_edge_data_must_be_finite(self):
        g = Grid2D.from_bounds(0, 0, 1, 1, 9, 9)
        bad = np.zeros(9)
        bad[4] = np.inf
        with pytest.raises(HyperbolicError):
            march_from_edges(bad, np.zeros(9), P11, g)

    def test_data_must_be_univariate(self):
        with pytest.raises(HyperbolicError):
            GoursatData(parse("x*y", ("x", "y")), parse("0", ("y",)))


class TestBacklund:
    # w = 0, bt_a = 2, u(0,0) = 0 integrates to u = -2 ln(1 - x - y/2)
    def exact(self, g):
        X, Y = g.meshgrid()
        return -2.0 * np.log(1.0 - X - Y / 2.0)

    def test_matches_closed_form(self):
        g = Grid2D.from_bounds(0.0, 0.0, 0.25, 0.5, 65, 129)
        u = backlund(ZERO_WAVE, 2.0, 0.0, g)
        assert np.abs(u.values - self.exact(g)).max() <= 1e-8
        assert u.values[-1, -1] == pytest.approx(2.0 * math.log(2.0), abs=1e-8)

    def test_fourth_order_in_h(self):
        errs = []
        for n in (9, 17, 33):
            g = Grid2D.from_bounds(0.0, 0.0, 0.25, 0.5, n, 2 * n - 1)
            u = backlund(ZERO_WAVE, 2.0, 0.0, g)
            errs.append(float(np.abs(u.values - self.exact(g)).max()))
        for lo, hi in zip(errs, errs[1:]):
            assert 3.5 <= math.log2(lo / hi) <= 4.5

    def test_path_independence(self):
        g = Grid2D.from_bounds(0.0, 0.0, 0.25, 0.5, 65, 129)
        u_xy = backlund(ZERO_WAVE, 2.0, 0.0, g, "xy")
        u_yx = backlund(ZERO_WAVE, 2.0, 0.0, g, "yx")
        assert np.abs(u_xy.values - u_yx.values).max() <= 1e-8

    def test_residual_second_order_generic_wave(self):
        w = WaveSolution(parse("x/2", ("x",)), parse("-y/3", ("y",)))
        vals = []
        for n in (33, 65):
            g = Grid2D.from_bounds(0.0, 0.0, 0.5, 0.5, n, n)
            u = backlund(w, 1.0, 0.0, g)
            r = norms(residual_hyperbolic(u, P11)).max_abs
            assert r <= 2.0 * g.hx ** 2
            vals.append(r)
        assert 1.8 <= math.log2(vals[0] / vals[1]) <= 2.2

    def test_march_reproduces_backlund_field(self):
        g = Grid2D.from_bounds(0.0, 0.0, 0.25, 0.5, 65, 129)
        u = backlund(ZERO_WAVE, 2.0, 0.0, g)
        res = march_from_edges(u.values[0, :], u.values[:, 0], P11, g)
        assert res.n_masked == 0
        assert np.abs(res.field.values - u.values).max() <= 1e-8

    def test_overflow_on_blowup_line(self):
        # the image blows up on 1 - x - y/2 = 0, inside this domain
        with np.errstate(over="ignore"), pytest.raises(OdeOverflowError):
            backlund(ZERO_WAVE, 2.0, 0.0,
                     Grid2D.from_bounds(0.0, 0.0, 1.5, 1.0, 49, 33))

    def test_parameter_validation(self):
        g = Grid2D.from_bounds(0, 0, 1, 1, 9, 9)
        with pytest.raises(HyperbolicError):
            backlund(ZERO_WAVE, 0.0, 0.0, g)
        with pytest.raises(HyperbolicError):
            backlund(ZERO_WAVE, 1.0, 0.0, g, order="diagonal")
        with pytest.raises(HyperbolicError):
            backlund(ZERO_WAVE, 1.0, math.nan, g)
