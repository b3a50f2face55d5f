"""Convexity calculus: difference quotients, log-convexity tests, sign scans."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateArguments, NonPositiveError, ZeroValueError
from .funcore import Grid, RealFunction, default_step

LOG_CONVEX = "LogConvex"
NOT_LOG_CONVEX = "NotLogConvex"
INCONCLUSIVE = "Inconclusive"

#: LogConvex verdict tolerance: min d2log >= -VERDICT_TOL_SCALE * (1 + |max d2log|).
VERDICT_TOL_SCALE = 1e-7


def diff_quotient(f: RealFunction, x1: float, x2: float) -> float:
    """Secant slope (f(x1) - f(x2)) / (x1 - x2); exactly symmetric in x1, x2."""
    if abs(x1 - x2) < 1e-12 * max(1.0, abs(x1), abs(x2)):
        raise DegenerateArguments(f"x1={x1!r} and x2={x2!r} coincide")
    return (f(x1) - f(x2)) / (x1 - x2)


def iter_diff_quotient(f: RealFunction, x1: float, x2: float, x3: float) -> float:
    """Second-order divided difference (phi(x1,x3) - phi(x2,x3)) / (x1 - x2).

    Symmetric under permutation of the three arguments; its sign at every
    triple characterizes convexity (non-negative iff f convex). For a
    quadratic a*x^2 + b*x + c the value is the leading coefficient a.
    """
    for u, v in ((x1, x2), (x1, x3), (x2, x3)):
        if abs(u - v) < 1e-12 * max(1.0, abs(u), abs(v)):
            raise DegenerateArguments(f"arguments {u!r} and {v!r} coincide")
    return (diff_quotient(f, x1, x3) - diff_quotient(f, x2, x3)) / (x1 - x2)


@dataclass(frozen=True)
class WeakConvexityResult:
    holds: bool
    witness: tuple[float, float] | None


def weak_convexity_test(f: RealFunction, a: float, b: float, trials: int, seed: int) -> WeakConvexityResult:
    """Sample pairs (x1, x2) from (a, b) and check the midpoint inequality.

    f((x1+x2)/2) <= (f(x1)+f(x2))/2 must hold for every sampled pair; the
    first violating pair is returned as witness. Sampling is deterministic
    in ``seed``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x1, x2 = rng.uniform(a, b, size=2)
        f1, f2 = f(x1), f(x2)
        mid = f((x1 + x2) / 2.0)
        slack = 4.0 * np.finfo(float).eps * max(1.0, abs(f1), abs(f2), abs(mid))
        if mid > 0.5 * (f1 + f2) + slack:
            return WeakConvexityResult(holds=False, witness=(float(x1), float(x2)))
    return WeakConvexityResult(holds=True, witness=None)


def q_determinant(f: RealFunction, x: float, h: float | None = None) -> float:
    """f(x) * f''(x) - f'(x)^2, the 2x2 determinant whose sign tests log-convexity.

    Derivatives are exact when the function carries them, otherwise central
    differences with step ``h``.
    """
    fv = f(x)
    if abs(fv) < 1e-300:
        raise ZeroValueError(f"|f({x!r})| < 1e-300; the criterion needs a zero-free f")
    f1 = f.derivative(x, 1, h)
    f2 = f.derivative(x, 2, h)
    return fv * f2 - f1 * f1


def d2_log(f: RealFunction, x: float, h: float | None = None) -> float:
    """(log f)''(x) for positive f.

    Uses (f''f - f'^2)/f^2 with exact derivatives when both are present,
    otherwise a central second difference of log(f) with step ``h``.
    """
    fv = f(x)
    if fv <= 0.0:
        raise NonPositiveError(f"f({x!r}) = {fv!r} is not positive")
    if f.d1 is not None and f.d2 is not None:
        f1 = float(f.d1(x))
        f2 = float(f.d2(x))
        return (f2 * fv - f1 * f1) / (fv * fv)
    if h is None:
        h = default_step(x, 2)
    fp, fm = f(x + h), f(x - h)
    if fp <= 0.0 or fm <= 0.0:
        raise NonPositiveError(f"f is not positive on the stencil around x={x!r}")
    return (math.log(fp) - 2.0 * math.log(fv) + math.log(fm)) / (h * h)


def count_sign_changes(values: Grid) -> np.ndarray:
    """Midpoints of grid cells where the sampled value changes strict sign.

    Zero samples attach to the preceding sign, so tangential zeros are not
    double counted and leading zeros never produce a change.
    """
    xs, ys = values.xs, values.ys
    locations = []
    prev_sign = 0
    for i in range(len(ys)):
        s = 0 if ys[i] == 0.0 else (1 if ys[i] > 0.0 else -1)
        if s == 0:
            continue
        if prev_sign != 0 and s != prev_sign:
            locations.append(0.5 * (xs[i - 1] + xs[i]))
        prev_sign = s
    return np.asarray(locations, dtype=float)


@dataclass(frozen=True)
class ConvexityReport:
    """Per-point log-convexity diagnostics over an interval."""

    interval: tuple[float, float]
    grid_n: int
    q_values: list[tuple[float, float | None]]
    d2log_values: list[tuple[float, float | None]]
    sign_changes: list[float]
    verdict: str
    min_margin: float

    def to_dict(self) -> dict:
        def pair_list(pairs):
            return [[x, (None if v is None or not math.isfinite(v) else v)] for x, v in pairs]

        return {
            "interval": [self.interval[0], self.interval[1]],
            "grid_n": self.grid_n,
            "q_values": pair_list(self.q_values),
            "d2log_values": pair_list(self.d2log_values),
            "sign_changes": list(self.sign_changes),
            "verdict": self.verdict,
            "min_margin": self.min_margin if math.isfinite(self.min_margin) else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def build_report(xs, q_vals, d2_vals) -> ConvexityReport:
    """Assemble a ConvexityReport from per-point samples (None marks failures)."""
    xs = [float(t) for t in xs]
    finite_d2 = [v for v in d2_vals if v is not None and math.isfinite(v)]
    any_failed = any(v is None or not math.isfinite(v) for v in d2_vals)
    sign_changes = sorted(set(_change_locations(xs, d2_vals)) | set(_change_locations(xs, q_vals)))
    if not finite_d2 or any_failed:
        verdict = INCONCLUSIVE
        min_margin = min(finite_d2) if finite_d2 else math.nan
    else:
        min_margin = min(finite_d2)
        tol = VERDICT_TOL_SCALE * (1.0 + abs(max(finite_d2)))
        verdict = LOG_CONVEX if min_margin >= -tol else NOT_LOG_CONVEX
    return ConvexityReport(
        interval=(xs[0], xs[-1]),
        grid_n=len(xs),
        q_values=list(zip(xs, q_vals)),
        d2log_values=list(zip(xs, d2_vals)),
        sign_changes=[float(s) for s in sign_changes],
        verdict=verdict,
        min_margin=float(min_margin) if finite_d2 else math.nan,
    )


def _change_locations(xs, vals) -> list[float]:
    locations = []
    prev_sign = 0
    prev_x = None
    for x, v in zip(xs, vals):
        if v is None or not math.isfinite(v) or v == 0.0:
            prev_x = x
            continue
        s = 1 if v > 0.0 else -1
        if prev_sign != 0 and s != prev_sign:
            locations.append(0.5 * (prev_x + x))
        prev_sign = s
        prev_x = x
    return locations


def scan_convexity(f: RealFunction, a: float, b: float, n: int, h: float | None = None) -> ConvexityReport:
    """Sample q(f) and (log f)'' on a uniform n-point grid of [a, b].

    Points where evaluation fails are recorded as gaps and force an
    Inconclusive verdict.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    xs = np.linspace(a, b, n)
    q_vals: list[float | None] = []
    d2_vals: list[float | None] = []
    for x in xs:
        try:
            q_vals.append(q_determinant(f, float(x), h))
        except Exception:
            q_vals.append(None)
        try:
            d2_vals.append(d2_log(f, float(x), h))
        except Exception:
            d2_vals.append(None)
    return build_report(xs, q_vals, d2_vals)
