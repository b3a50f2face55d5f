"""Difference quotients, log-convexity criteria, sign scans, closure laws."""

import json
import math

import numpy as np
import pytest

from logconvex import (
    DegenerateArguments,
    NonPositiveError,
    RealFunction,
    ZeroValueError,
    count_sign_changes,
    d2_log,
    diff_quotient,
    iter_diff_quotient,
    q_determinant,
    sample_grid,
    scan_convexity,
    weak_convexity_test,
)
from logconvex.convexity import INCONCLUSIVE, LOG_CONVEX, NOT_LOG_CONVEX
from logconvex.funcore import Grid


def quadratic(a, b, c):
    return RealFunction(fn=lambda x: a * x * x + b * x + c,
                        d1=lambda x: 2 * a * x + b,
                        d2=lambda x: 2 * a)


def exp_quadratic(a, b, c):
    def fn(x):
        return math.exp(a * x * x + b * x + c)

    return RealFunction(fn=fn,
                        d1=lambda x: (2 * a * x + b) * fn(x),
                        d2=lambda x: (2 * a + (2 * a * x + b) ** 2) * fn(x))


SQUARE = quadratic(1.0, 0.0, 0.0)
IDENTITY = RealFunction(fn=lambda x: x, d1=lambda x: 1.0, d2=lambda x: 0.0)
EXP = RealFunction(fn=math.exp, d1=math.exp, d2=math.exp)


class TestDiffQuotient:
    def test_square(self):
        assert diff_quotient(SQUARE, 1.0, 3.0) == 4.0

    def test_affine_is_constant_slope(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            x1, x2 = rng.uniform(-5, 5, 2)
            if abs(x1 - x2) < 1e-6:
                continue
            assert diff_quotient(IDENTITY, float(x1), float(x2)) == 1.0

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            a, b, c = rng.uniform(-2, 2, 3)
            f = quadratic(a, b, c)
            x1, x2 = rng.uniform(-3, 3, 2)
            if abs(x1 - x2) < 1e-6:
                continue
            assert diff_quotient(f, float(x1), float(x2)) == diff_quotient(f, float(x2), float(x1))

    def test_degenerate(self):
        with pytest.raises(DegenerateArguments):
            diff_quotient(SQUARE, 2.0, 2.0 + 1e-14)


class TestIterDiffQuotient:
    def test_square_value_is_leading_coefficient(self):
        # second divided difference of a*x^2+b*x+c equals a at any triple
        assert iter_diff_quotient(SQUARE, 0.0, 1.0, 2.0) == pytest.approx(1.0)
        assert iter_diff_quotient(SQUARE, 2.0, 1.0, 0.0) == pytest.approx(1.0)

    def test_affine_vanishes(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pts = rng.uniform(-4, 4, 3)
            if min(abs(pts[0] - pts[1]), abs(pts[1] - pts[2]), abs(pts[0] - pts[2])) < 1e-3:
                continue
            v = iter_diff_quotient(IDENTITY, *map(float, pts))
            assert abs(v) < 1e-12

    def test_sign_invariant_under_permutations(self):
        rng = np.random.default_rng(11)
        perms = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))
        for _ in range(200):
            a = float(rng.uniform(0.1, 2.0)) * (1.0 if rng.uniform() < 0.5 else -1.0)
            f = quadratic(a, float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
            pts = rng.uniform(-3, 3, 3)
            if min(abs(pts[0] - pts[1]), abs(pts[1] - pts[2]), abs(pts[0] - pts[2])) < 1e-3:
                continue
            signs = {math.copysign(1.0, iter_diff_quotient(f, *map(float, (pts[p[0]], pts[p[1]], pts[p[2]]))))
                     for p in perms}
            assert len(signs) == 1
            assert (a > 0) == (signs.pop() > 0)

    def test_degenerate_pairs(self):
        with pytest.raises(DegenerateArguments):
            iter_diff_quotient(SQUARE, 1.0, 1.0, 2.0)
        with pytest.raises(DegenerateArguments):
            iter_diff_quotient(SQUARE, 1.0, 2.0, 1.0)


class TestWeakConvexity:
    def test_convex_holds(self):
        assert weak_convexity_test(SQUARE, -1.0, 1.0, trials=100, seed=0).holds

    def test_concave_fails_with_witness(self):
        res = weak_convexity_test(quadratic(-1.0, 0.0, 0.0), -1.0, 1.0, trials=100, seed=0)
        assert not res.holds
        x1, x2 = res.witness
        assert -1.0 < x1 < 1.0 and -1.0 < x2 < 1.0
        # the witness really violates the midpoint inequality
        f = lambda t: -t * t
        assert f((x1 + x2) / 2) > 0.5 * (f(x1) + f(x2))

    def test_affine_equality_case_holds(self):
        assert weak_convexity_test(IDENTITY, -3.0, 7.0, trials=200, seed=5).holds

    def test_deterministic_in_seed(self):
        r1 = weak_convexity_test(quadratic(-1.0, 0.0, 0.0), -1.0, 1.0, trials=50, seed=9)
        r2 = weak_convexity_test(quadratic(-1.0, 0.0, 0.0), -1.0, 1.0, trials=50, seed=9)
        assert r1 == r2


class TestQDeterminant:
    def test_exp_is_log_affine(self):
        for x in (-1.0, 0.0, 0.5, 2.0):
            assert abs(q_determinant(EXP, x)) <= 1e-8

    def test_square_not_log_convex(self):
        # x^2 * 2 - (2x)^2 = -2 x^2
        assert q_determinant(SQUARE, 1.0) == pytest.approx(-2.0, abs=1e-12)

    def test_zero_value_rejected(self):
        with pytest.raises(ZeroValueError):
            q_determinant(SQUARE, 0.0)

    def test_fd_route_agrees(self):
        bare = RealFunction(fn=math.exp)
        for x in (0.3, 1.0):
            assert q_determinant(bare, x) == pytest.approx(0.0, abs=1e-6)


class TestD2Log:
    def test_exp(self):
        assert abs(d2_log(EXP, 0.4)) <= 1e-8

    def test_exp_of_square_fd_route(self):
        f = RealFunction(fn=lambda x: math.exp(x * x))
        assert d2_log(f, 0.7) == pytest.approx(2.0, abs=1e-6)

    def test_square(self):
        assert d2_log(SQUARE, 1.0) == pytest.approx(-2.0, abs=1e-6)
        f = RealFunction(fn=lambda x: x * x)
        assert d2_log(f, 1.0) == pytest.approx(-2.0, abs=1e-6)

    def test_nonpositive_rejected(self):
        with pytest.raises(NonPositiveError):
            d2_log(IDENTITY, -1.0)
        with pytest.raises(NonPositiveError):
            d2_log(SQUARE, 0.0)

    def test_consistency_with_q(self):
        """q(f)/f^2 = (log f)'' to 1e-6 wherever f > 1e-6, on random smooth f."""
        rng = np.random.default_rng(42)
        for _ in range(25):
            f_exact = exp_quadratic(*rng.uniform(-0.5, 0.5, 3))
            f_bare = RealFunction(fn=f_exact.fn)
            for x in rng.uniform(-1.5, 1.5, 4):
                x = float(x)
                fv = f_exact(x)
                if fv <= 1e-6:
                    continue
                for f in (f_exact, f_bare):
                    assert q_determinant(f, x) / fv ** 2 == pytest.approx(
                        d2_log(f, x), abs=1e-6 * max(1.0, abs(d2_log(f, x))))


class TestClosureLaws:
    def test_sum_and_product_stay_log_convex(self):
        rng = np.random.default_rng(42)
        xs = np.linspace(-2, 2, 16)
        for _ in range(20):
            f = exp_quadratic(rng.uniform(0, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            g = exp_quadratic(rng.uniform(0, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            for fn in (f + g, f * g):
                assert min(d2_log(fn, float(x)) for x in xs) >= -1e-8

    def test_shift_and_scale_invariance(self):
        rng = np.random.default_rng(13)
        xs = np.linspace(-1.5, 1.5, 9)
        for _ in range(10):
            f = exp_quadratic(rng.uniform(0, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            for c in (-0.5, 0.5, 2.0):
                assert min(d2_log(f.shifted(c), float(x - c)) for x in xs) >= -1e-8
                assert min(d2_log(f.scaled_arg(c), float(x / c)) for x in xs) >= -1e-8

    def test_exp_of_convex_quadratic(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            f = exp_quadratic(rng.uniform(0, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
            for x in np.linspace(-2, 2, 11):
                assert d2_log(f, float(x)) >= -1e-10


class TestCountSignChanges:
    def test_sine_on_full_period(self):
        f = RealFunction(fn=math.sin)
        grid = sample_grid(f, 0.0, 2.0 * math.pi, 1000)
        locs = count_sign_changes(grid)
        assert len(locs) == 1
        assert locs[0] == pytest.approx(math.pi, abs=0.01)

    def test_constant_has_none(self):
        grid = sample_grid(RealFunction(fn=lambda x: 1.0), 0.0, 1.0, 50)
        assert len(count_sign_changes(grid)) == 0

    def test_single_root_of_identity(self):
        grid = sample_grid(IDENTITY, -1.0, 1.0, 201)
        locs = count_sign_changes(grid)
        assert len(locs) == 1
        assert abs(locs[0]) <= 0.01  # within one cell of the root

    def test_zero_attachment_rule(self):
        xs = np.linspace(0.0, 1.0, 5)
        ys = np.array([1.0, 0.0, 0.0, -1.0, -1.0])
        locs = count_sign_changes(Grid(a=0.0, b=1.0, n=5, xs=xs, ys=ys))
        assert len(locs) == 1
        assert locs[0] == pytest.approx((xs[2] + xs[3]) / 2)
        ys2 = np.array([0.0, 0.0, 1.0, 1.0, 1.0])  # leading zeros never count
        assert len(count_sign_changes(Grid(a=0.0, b=1.0, n=5, xs=xs, ys=ys2))) == 0


class TestConvexityReport:
    def test_log_convex_verdict(self):
        report = scan_convexity(exp_quadratic(0.5, 0.0, 0.0), -1.0, 1.0, 41)
        assert report.verdict == LOG_CONVEX
        assert report.min_margin >= -1e-7 * (1 + abs(max(v for _, v in report.d2log_values)))

    def test_not_log_convex_verdict(self):
        report = scan_convexity(SQUARE, 0.5, 2.0, 41)
        assert report.verdict == NOT_LOG_CONVEX
        assert report.min_margin < -0.1

    def test_inconclusive_on_failures(self):
        report = scan_convexity(IDENTITY, -1.0, 1.0, 21)  # crosses zero: log fails
        assert report.verdict == INCONCLUSIVE

    def test_json_contract(self):
        report = scan_convexity(exp_quadratic(0.5, 0.0, 0.0), -1.0, 1.0, 11)
        data = json.loads(report.to_json())
        assert set(data) == {"interval", "grid_n", "q_values", "d2log_values",
                             "sign_changes", "verdict", "min_margin"}
        assert data["grid_n"] == 11
        assert all(len(pair) == 2 for pair in data["q_values"])
        assert data["interval"] == [-1.0, 1.0]

    def test_sign_change_locations_interior_and_sorted(self):
        # (log f)'' of exp(x^3) is 6x: one sign change at 0
        f = RealFunction(fn=lambda x: math.exp(x ** 3),
                         d1=lambda x: 3 * x * x * math.exp(x ** 3),
                         d2=lambda x: (6 * x + 9 * x ** 4) * math.exp(x ** 3))
        report = scan_convexity(f, -1.0, 1.0, 101)
        assert report.verdict == NOT_LOG_CONVEX
        assert len(report.sign_changes) == 1
        assert -1.0 < report.sign_changes[0] < 1.0
        assert report.sign_changes == sorted(report.sign_changes)
