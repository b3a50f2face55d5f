"""Log-convex solutions of f(x+1) = g(x) f(x) via the truncated product

    f(x) = lim_n  g(n)^x * prod_{k} g(k)/g(x+k)      (g(0) := 1)

with two-sided truncation control

    p_{n+1}(x) g(n)^x  <=  f(x)  <=  p_n(x) g(n)^x,   p_n(x) = prod_{k<n} g(k)/g(x+k),

valid on the base interval (0, 1]. Arguments outside (0, 1] are reduced by
iterating the functional equation; the normalization f(1) = 1 anchors integer
arguments exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, NonPositiveError, PoleError, \
    SeriesDivergence, ToleranceNotMet, ZeroValueError
from .funcore import RealFunction
from .representer import Representer

DEFAULT_TOL = 1e-8
DEFAULT_MAX_N = 2 ** 20

#: |g| below this counts as a pole in product denominators.
POLE_TOL = 1e-300

#: Series term budget before ToleranceNotMet (monotone but too-slow decay).
SERIES_BUDGET = 2 ** 24


@dataclass(frozen=True)
class ProductState:
    """Truncation diagnostics for one evaluation of the product representation.

    ``n`` is the final truncation index, ``p_n`` the partial product at the
    reduced base argument, ``lower``/``upper`` the sandwich bounds, ``value``
    the geometric mean of the bounds, ``rel_gap`` = |g(x+n)/g(n) - 1|.
    """

    n: int
    p_n: float
    lower: float
    upper: float
    value: float
    rel_gap: float
    converged: bool


@dataclass(frozen=True)
class InterpolationTarget:
    """f(n) = prod_{k=1}^{n-1} g(k); a_1 is the empty product 1."""

    n: int
    a_n: float


def reduce_to_base(x: float) -> tuple[float, int]:
    """Split x = x0 + m with x0 in (0, 1] and integer m."""
    m = math.ceil(x) - 1
    x0 = x - m
    if x0 <= 0.0:  # guard against rounding at integer boundaries
        x0 += 1.0
        m -= 1
    return x0, int(m)


def _g_values_with_convention(g: Representer, ks: np.ndarray) -> np.ndarray:
    """Representer values with g(0) := 1 applied at the exact argument 0."""
    ks = np.asarray(ks, dtype=float)
    out = np.empty_like(ks)
    zero = ks == 0.0
    if np.any(~zero):
        out[~zero] = g.values(ks[~zero])
    out[zero] = 1.0
    return out


def partial_product(g: Representer, x: float, n: int) -> float:
    """p_n(x) = prod_{k=0}^{n-1} g(k)/g(x+k) with the g(0) := 1 convention.

    The convention covers the exact argument 0: the k=0 numerator always,
    and the k=0 denominator when x = 0. Any other vanishing denominator is
    a pole.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ks = np.arange(n, dtype=float)
    num = _g_values_with_convention(g, ks)
    den = np.empty(n)
    den[0] = 1.0 if x == 0.0 else g(x)
    if n > 1:
        den[1:] = g.values(x + ks[1:])
    tiny = np.abs(den) < POLE_TOL
    if np.any(tiny):
        k = int(np.flatnonzero(tiny)[0])
        raise PoleError(f"g(x+k) vanishes at k={k} (x+k={x + k!r})", point=x + k, k=k)
    if np.all(num > 0.0) and np.all(den > 0.0):
        return float(np.exp(np.sum(np.log(num) - np.log(den))))
    return float(np.prod(num / den))


def sandwich_bounds(g: Representer, x: float, n: int) -> tuple[float, float]:
    """Two-sided truncation bounds p_{n+1} g(n)^x <= f(x) <= p_n g(n)^x.

    Valid on the base interval: requires 0 < x <= 1 and n >= 2.
    """
    if not (0.0 < x <= 1.0):
        raise DomainError(f"sandwich bounds need 0 < x <= 1, got {x!r}")
    if n < 2:
        raise ValueError("n must be >= 2")
    p_n = partial_product(g, x, n)
    p_n1 = partial_product(g, x, n + 1)
    gx = g(float(n)) ** x
    return p_n1 * gx, p_n * gx


def evaluate(g: Representer, x: float, tol: float = DEFAULT_TOL,
             max_n: int = DEFAULT_MAX_N) -> ProductState:
    """Evaluate the product representation at x > 0.

    The argument is reduced to the base interval (0, 1]; n doubles until the
    ratio gap |g(x+n)/g(n) - 1| and the relative bracket width both fall
    below ``tol``, or ``max_n`` is reached (converged=False). The returned
    value is the geometric mean of the sandwich bounds. DivergenceError is
    raised when the gap fails to decrease over three successive doublings,
    the signature of a representer violating lim g(n)/g(x+n) = 1.
    """
    if not (x > 0.0):
        raise DomainError(f"evaluate needs x > 0, got {x!r}")
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    if max_n < 4:
        raise ValueError("max_n must be >= 4")
    x0, m = reduce_to_base(x)
    scale = _forward_factor(g, x0, m)

    n = 4
    have = 0  # sum of log terms accumulated for k < have
    acc = 0.0
    prev_gap = math.inf
    stalled = 0
    while True:
        if have < n:
            ks = np.arange(have, n, dtype=float)
            num = _g_values_with_convention(g, ks)
            den = g.values(x0 + ks)
            tiny = np.abs(den) < POLE_TOL
            if np.any(tiny):
                k = have + int(np.flatnonzero(tiny)[0])
                raise PoleError(f"g(x+k) vanishes at k={k}", point=x0 + k, k=k)
            if not (np.all(num > 0.0) and np.all(den > 0.0)):
                bad = float(x0 + have + np.flatnonzero(den <= 0.0)[0]) if np.any(den <= 0.0) \
                    else float(have + np.flatnonzero(num <= 0.0)[0])
                raise NonPositiveError(f"representer must stay positive on (0, inf); "
                                       f"g <= 0 near {bad!r}")
            acc += float(np.sum(np.log(num) - np.log(den)))
            have = n
        g_n = g(float(n))
        g_xn = g(x0 + float(n))
        if abs(g_xn) < POLE_TOL:
            raise PoleError(f"g(x+k) vanishes at k={n}", point=x0 + n, k=n)
        if g_n <= 0.0 or g_xn <= 0.0:
            raise NonPositiveError(f"representer must stay positive on (0, inf); "
                                   f"g <= 0 near n={n}")
        log_pn = acc
        log_pn1 = acc + (math.log(g_n) - math.log(g_xn))
        log_gx = x0 * math.log(g_n)
        lower = math.exp(log_pn1 + log_gx)
        upper = math.exp(log_pn + log_gx)
        value = math.exp(0.5 * (log_pn + log_pn1) + log_gx)
        rel_gap = abs(g_xn / g_n - 1.0)

        if rel_gap <= tol and (upper - lower) <= tol * abs(value):
            converged = True
            break
        if rel_gap >= prev_gap * (1.0 - 1e-12):
            stalled += 1
            if stalled >= 3:
                raise DivergenceError(
                    f"|g(x+n)/g(n) - 1| = {rel_gap:.3e} failed to decrease over three "
                    f"doublings (n={n}); the representer violates lim g(n)/g(x+n) = 1")
        else:
            stalled = 0
        prev_gap = rel_gap
        if n >= max_n:
            converged = False
            break
        n = min(2 * n, max_n)

    return ProductState(
        n=n,
        p_n=math.exp(log_pn),
        lower=lower * scale,
        upper=upper * scale,
        value=value * scale,
        rel_gap=rel_gap,
        converged=converged,
    )


def _forward_factor(g: Representer, x0: float, m: int) -> float:
    """prod_{k=0}^{m-1} g(x0 + k) for m >= 0 (empty product is 1)."""
    if m <= 0:
        return 1.0
    vals = g.values(x0 + np.arange(m, dtype=float))
    total = 1.0
    for v in vals:
        total *= float(v)
    return total


def _backward_denominator(g: Representer, x: float, count: int) -> float:
    """prod_{k=0}^{count-1} g(x + k), raising PoleError on vanishing factors."""
    total = 1.0
    for k in range(count):
        v = g(x + k)
        if abs(v) < POLE_TOL:
            raise PoleError(f"g({x + k!r}) vanishes in the negative-extension chain",
                            point=x + k, k=k)
        total *= v
    return total


def extend(g: Representer, x: float, tol: float = DEFAULT_TOL,
           max_n: int = DEFAULT_MAX_N) -> float:
    """The interpolant at any real x via reduction to the base interval.

    Writes x = x0 + m with x0 in (0, 1]. The base value is the product
    evaluation, except at x0 = 1 where the normalization f(1) = 1 is exact.
    For m >= 0 the functional equation multiplies forward; for m < 0 the
    solved form f(x) = f(x + |m|) / prod g(x + k) extends to negative reals,
    raising PoleError when a denominator factor vanishes.
    """
    x0, m = reduce_to_base(x)
    if m < 0:
        base = 1.0 if x0 == 1.0 else evaluate(g, x0, tol, max_n).value
        return base / _backward_denominator(g, x, -m)
    if x0 == 1.0:
        return _forward_factor(g, x0, m)
    return evaluate(g, x, tol, max_n).value


def extended_state(g: Representer, x: float, tol: float = DEFAULT_TOL,
                   max_n: int = DEFAULT_MAX_N) -> ProductState:
    """ProductState for any real x, anchored like ``extend``.

    Runs the base-interval product for diagnostics, then scales value and
    bounds through the functional equation (bounds swap when the scale factor
    is negative, as happens for Gamma on (-1, 0)).
    """
    x0, m = reduce_to_base(x)
    state = evaluate(g, x0, tol, max_n)
    base = 1.0 if x0 == 1.0 else state.value
    if m >= 0:
        factor = _forward_factor(g, x0, m)
        value = base * factor
        bounds = sorted((state.lower * factor, state.upper * factor))
    else:
        den = _backward_denominator(g, x, -m)
        value = base / den
        bounds = sorted((state.lower / den, state.upper / den))
    return ProductState(n=state.n, p_n=state.p_n, lower=bounds[0], upper=bounds[1],
                        value=value, rel_gap=state.rel_gap, converged=state.converged)


def interpolation_targets(g: Representer, n_max: int) -> list[InterpolationTarget]:
    """a_n = prod_{k=1}^{n-1} g(k) for n = 1..n_max, by running product."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    out = [InterpolationTarget(n=1, a_n=1.0)]
    a = 1.0
    for n in range(2, n_max + 1):
        a *= g(float(n - 1))
        out.append(InterpolationTarget(n=n, a_n=a))
    return out


def logconvexity_series(g: Representer, x: float, tol: float = 1e-8) -> float:
    """(log f)''(x) as the series sum_k [ (g'/g)^2 - g''/g ] at x + k.

    Terms accumulate until the last term and the k^-2-model tail estimate
    (last_term * k) both drop below tol relative to the partial sum. The sum
    plus the tail estimate is returned. SeriesDivergence is raised when term
    magnitudes fail to decrease over 64 consecutive indices; ToleranceNotMet
    when the term budget runs out first.
    """
    if not (x > 0.0):
        raise DomainError(f"series needs x > 0, got {x!r}")
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    total = 0.0
    k = 0
    chunk = 64
    streak = 0
    prev_last_abs = None
    while k < SERIES_BUDGET:
        size = min(chunk, SERIES_BUDGET - k)
        us = x + np.arange(k, k + size, dtype=float)
        gv = g.values(us)
        if np.any(np.abs(gv) < POLE_TOL):
            i = int(np.flatnonzero(np.abs(gv) < POLE_TOL)[0])
            raise ZeroValueError(f"g vanishes at x+k={us[i]!r}")
        d1 = g.d1_values(us)
        d2 = g.d2_values(us)
        terms = (d1 * d1) / (gv * gv) - d2 / gv
        total += float(np.sum(terms))
        k += size
        last = float(terms[-1])
        scale = max(1.0, abs(total))
        tail = last * (k - 1)
        if abs(last) < tol * scale and abs(tail) < tol * scale:
            return total + tail
        abs_terms = np.abs(terms)
        # "failed to decrease" up to float jitter in the term arithmetic
        within = bool(np.all(abs_terms[1:] >= abs_terms[:-1] * (1.0 - 1e-12))) if size > 1 else True
        joins = prev_last_abs is None or abs_terms[0] >= prev_last_abs * (1.0 - 1e-12)
        if within and joins:
            streak += size
        else:
            streak = 0
        if streak >= 64:
            raise SeriesDivergence(
                f"series terms non-decreasing over {streak} consecutive k near k={k}")
        prev_last_abs = float(abs_terms[-1])
        chunk = min(2 * chunk, 65536)
    raise ToleranceNotMet(f"series did not reach tol={tol!r} within {SERIES_BUDGET} terms")


def bilinear_a(f: RealFunction, g: RealFunction, x: float, terms: int) -> float:
    """sum_{k < terms} [ (f'(x+k))^2 f(x+k)^-2  -  g''(x+k) g(x+k)^-2 ].

    The determinant form written out literally; note a(g, g) coincides with
    ``logconvexity_series`` terms only when g'' vanishes (the series uses
    g''/g, this uses g''/g^2).
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    f = f.fn if isinstance(f, Representer) else f
    g = g.fn if isinstance(g, Representer) else g
    total = 0.0
    for k in range(terms):
        u = x + k
        fv, gv = f(u), g(u)
        if abs(fv) < POLE_TOL:
            raise ZeroValueError(f"f vanishes at x+k={u!r} (k={k})")
        if abs(gv) < POLE_TOL:
            raise ZeroValueError(f"g vanishes at x+k={u!r} (k={k})")
        f1 = f.derivative(u, 1)
        g2 = g.derivative(u, 2)
        total += (f1 * f1) / (fv * fv) - g2 / (gv * gv)
    return total
