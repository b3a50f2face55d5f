"""Representer functions g for the multiplicative equation f(x+1) = g(x) f(x).

Builtins, the parsed expression language, and Artinian derivative chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import NonPositiveError, PoleError, ZeroDerivative
from .funcore import RealFunction, default_step
from .special import _fib_real_vec, fib_real, fib_real_d1, fib_real_d2

_INF = math.inf

#: |fib_real(x)| below this raises PoleError in the fibonacci representer.
FIB_POLE_TOL = 1e-12


@dataclass(frozen=True)
class Representer:
    """A positive function g with exact first and second derivatives.

    ``positivity_domain`` is the interval on which g is promised positive;
    construction spot-checks it on a 64-point grid.
    """

    fn: RealFunction
    positivity_domain: tuple[float, float] = (0.0, _INF)
    name: str = ""
    ast: ex.Expr | None = None

    def __post_init__(self):
        for x in _spot_grid(*self.positivity_domain):
            if self.fn(float(x)) <= 0.0:
                raise NonPositiveError(
                    f"representer {self.name or self.fn.name or '?'} is not positive "
                    f"at x={float(x)!r} inside {self.positivity_domain}"
                )

    def __call__(self, x: float) -> float:
        return self.fn(x)

    def values(self, xs) -> np.ndarray:
        return self.fn.values(xs)

    def d1(self, x: float) -> float:
        return self.fn.derivative(x, 1)

    def d2(self, x: float) -> float:
        return self.fn.derivative(x, 2)

    def d1_values(self, xs) -> np.ndarray:
        if self.fn.d1 is None:
            return np.array([self.fn.derivative(float(t), 1) for t in np.asarray(xs, dtype=float)])
        return np.asarray(self.fn.d1(np.asarray(xs, dtype=float)), dtype=float)

    def d2_values(self, xs) -> np.ndarray:
        if self.fn.d2 is None:
            return np.array([self.fn.derivative(float(t), 2) for t in np.asarray(xs, dtype=float)])
        return np.asarray(self.fn.d2(np.asarray(xs, dtype=float)), dtype=float)


def _spot_grid(a: float, b: float, n: int = 64) -> np.ndarray:
    # a window of length 8 stands in for an infinite end
    if math.isinf(a) and math.isinf(b):
        return np.linspace(-4.0, 4.0, n)
    if math.isinf(b):
        return a + 8.0 * (np.arange(n) + 0.5) / n
    if math.isinf(a):
        return b - 8.0 * (np.arange(n) + 0.5) / n
    return a + (b - a) * (np.arange(n) + 0.5) / n


def function_from_ast(tree: ex.Expr, domain: tuple[float, float] = (-_INF, _INF),
                      name: str = "") -> RealFunction:
    """Wrap an expression tree as a RealFunction with symbolic d1 and d2."""
    d1_tree = tree.diff()
    d2_tree = d1_tree.diff()
    return RealFunction(
        fn=lambda x, t=tree: ex.evaluate(t, x),
        d1=lambda x, t=d1_tree: ex.evaluate(t, x),
        d2=lambda x, t=d2_tree: ex.evaluate(t, x),
        domain=domain,
        name=name or tree.pretty(),
        ast=tree,
    )


def parse_representer(src: str, params: dict[str, float] | None = None,
                      positivity_domain: tuple[float, float] = (0.0, _INF),
                      name: str = "") -> Representer:
    """Parse ``src`` (substituting ``params``) into a representer.

    Exact d1/d2 come from symbolic differentiation; positivity over
    ``positivity_domain`` is spot-checked at construction.
    """
    tree = ex.simplify(ex.parse(src, params))
    fn = function_from_ast(tree, name=name or src.strip())
    return Representer(fn=fn, positivity_domain=positivity_domain,
                       name=name or src.strip(), ast=tree)


def builtin(name: str, c: float | None = None, v: float | None = None) -> Representer:
    """Built-in representers: identity, power(c), constant(v), fibonacci."""
    if name == "identity":
        tree = ex.Var()
        return Representer(fn=function_from_ast(tree, name="identity"),
                           positivity_domain=(0.0, _INF), name="identity", ast=tree)
    if name == "power":
        if c is None or not math.isfinite(c):
            raise ValueError("power representer needs a finite exponent c")
        tree = ex.simplify(ex.Binary("^", ex.Var(), ex.Const(float(c))))
        domain = (-_INF, _INF) if float(c).is_integer() and c >= 0 else (0.0, _INF)
        return Representer(fn=function_from_ast(tree, domain=domain, name=f"power(c={c})"),
                           positivity_domain=(0.0, _INF), name=f"power(c={c})", ast=tree)
    if name == "constant":
        if v is None or not (v > 0):
            raise ValueError("constant representer needs v > 0")
        tree = ex.Const(float(v))
        return Representer(fn=function_from_ast(tree, name=f"constant({v})"),
                           positivity_domain=(-_INF, _INF), name=f"constant({v})", ast=tree)
    if name == "fibonacci":
        return _fibonacci_representer()
    raise ValueError(f"unknown builtin representer {name!r}")


def _fib_guarded(x: float) -> float:
    den = fib_real(x)
    if abs(den) < FIB_POLE_TOL:
        raise PoleError(f"fibonacci representer pole: fib_real({x!r}) ~ 0", point=x)
    return den


def _fibonacci_representer() -> Representer:
    # g = u/v with u(x) = fib_real(x+1), v(x) = fib_real(x); quotient-rule
    # derivatives from the exact Binet derivatives.
    def g(x):
        if isinstance(x, np.ndarray):
            den = _fib_real_vec(x)
            bad = np.abs(den) < FIB_POLE_TOL
            if np.any(bad):
                pt = float(np.asarray(x)[bad][0])
                raise PoleError(f"fibonacci representer pole: fib_real({pt!r}) ~ 0", point=pt)
            return _fib_real_vec(x + 1.0) / den
        return fib_real(x + 1.0) / _fib_guarded(x)

    def g1(x: float) -> float:
        v = _fib_guarded(x)
        u, du, dv = fib_real(x + 1.0), fib_real_d1(x + 1.0), fib_real_d1(x)
        return (du * v - u * dv) / (v * v)

    def g2(x: float) -> float:
        v = _fib_guarded(x)
        u = fib_real(x + 1.0)
        du, dv = fib_real_d1(x + 1.0), fib_real_d1(x)
        ddu, ddv = fib_real_d2(x + 1.0), fib_real_d2(x)
        return (ddu * v - u * ddv) / (v * v) - 2.0 * dv * (du * v - u * dv) / (v * v * v)

    fn = RealFunction(fn=g, d1=g1, d2=g2, name="fibonacci")
    return Representer(fn=fn, positivity_domain=(0.0, _INF), name="fibonacci")


def from_spec(spec: str, params: dict[str, float] | None = None) -> Representer:
    """Resolve a CLI representer spec.

    Reserved names: "identity", "fibonacci", "power:c=<v>", "const:<v>".
    Anything else is parsed as an expression in x.
    """
    s = spec.strip()
    if s == "identity":
        return builtin("identity")
    if s == "fibonacci":
        return builtin("fibonacci")
    if s.startswith("power:c="):
        return builtin("power", c=float(s[len("power:c="):]))
    if s.startswith("const:"):
        return builtin("constant", v=float(s[len("const:"):]))
    return parse_representer(spec, params)


# --------------------------------------------------------------------------
# Artinian derivative chains: g_n = (g_{n-1} f^(n-1))' / f^(n)
# --------------------------------------------------------------------------

#: |f^(k)(x)| below this raises ZeroDerivative.
DERIVATIVE_TOL = 1e-12


def artinian_chain(g0: Representer, f: RealFunction, n: int) -> list[RealFunction]:
    """Successive representers of the derivatives of a solution for g0.

    Returns [g_1, ..., g_n] where g_k(x) = (g_{k-1} f^(k-1))'(x) / f^(k)(x).
    Exact symbolic trees are used when both f and g0 are expression-backed;
    otherwise nested central differences, limited to n <= 3.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(f, Representer):
        f_ast, f_fn = f.ast, f.fn
    else:
        f_fn = f
        f_ast = f.ast if isinstance(f.ast, ex.Expr) else None
    if f_ast is not None and g0.ast is not None:
        return _chain_symbolic(g0.ast, f_ast, n)
    if n > 3:
        raise ValueError("without expression-backed inputs the chain is limited to n <= 3 "
                         "(finite-difference noise grows with the order)")
    return _chain_numeric(g0, f_fn, n)


def function_from_source(src: str, params: dict[str, float] | None = None,
                         domain: tuple[float, float] = (-_INF, _INF)) -> RealFunction:
    """Parse an expression into a RealFunction, keeping the tree for chains."""
    tree = ex.simplify(ex.parse(src, params))
    return function_from_ast(tree, domain=domain)


def _quotient_function(num: ex.Expr, den: ex.Expr, name: str) -> RealFunction:
    d_num, d_den = num.diff(), den.diff()
    dd_num, dd_den = d_num.diff(), d_den.diff()

    def check_den(x):
        dv = ex.evaluate(den, x)
        if np.any(np.abs(np.asarray(dv)) < DERIVATIVE_TOL):
            raise ZeroDerivative(f"|f^(k)| < {DERIVATIVE_TOL} in the chain at x={x!r}")
        return dv

    def val(x):
        return ex.evaluate(num, x) / check_den(x)

    def d1(x):
        dv = check_den(x)
        return (ex.evaluate(d_num, x) * dv - ex.evaluate(num, x) * ex.evaluate(d_den, x)) / (dv * dv)

    def d2(x):
        dv = check_den(x)
        u = ex.evaluate(num, x)
        du, ddv1 = ex.evaluate(d_num, x), ex.evaluate(d_den, x)
        ddu, ddv2 = ex.evaluate(dd_num, x), ex.evaluate(dd_den, x)
        return ((ddu * dv - u * ddv2) / (dv * dv)
                - 2.0 * ddv1 * (du * dv - u * ddv1) / (dv * dv * dv))

    return RealFunction(fn=val, d1=d1, d2=d2, name=name,
                        ast=ex.simplify(ex.Binary("/", num, den)))


def _chain_symbolic(g_ast: ex.Expr, f_ast: ex.Expr, n: int) -> list[RealFunction]:
    f_derivs = [ex.simplify(f_ast)]
    for _ in range(n):
        f_derivs.append(f_derivs[-1].diff())
    out: list[RealFunction] = []
    prev = ex.simplify(g_ast)  # g_{k-1} as a full tree (quotients included)
    for k in range(1, n + 1):
        num = ex.simplify(ex.Binary("*", prev, f_derivs[k - 1])).diff()
        den = f_derivs[k]
        g_k = _quotient_function(num, den, name=f"g{k}")
        out.append(g_k)
        prev = g_k.ast
    return out


def _nth_derivative(f: RealFunction, x: float, k: int) -> float:
    if k == 0:
        return f(x)
    if k <= 2:
        return f.derivative(x, k)
    # third derivative: central difference of the second
    h = default_step(x, 2)
    return (f.derivative(x + h, 2) - f.derivative(x - h, 2)) / (2.0 * h)


def _chain_numeric(g0: Representer, f: RealFunction, n: int) -> list[RealFunction]:
    out: list[RealFunction] = []
    prev: RealFunction | Representer = g0

    def make_gk(prev_fn, k):
        def product(x: float) -> float:
            return prev_fn(x) * _nth_derivative(f, x, k - 1)

        def val(x: float) -> float:
            den = _nth_derivative(f, x, k)
            if abs(den) < DERIVATIVE_TOL:
                raise ZeroDerivative(f"|f^({k})({x!r})| < {DERIVATIVE_TOL}")
            h = default_step(x, 1)
            return (product(x + h) - product(x - h)) / (2.0 * h) / den

        return RealFunction(fn=val, name=f"g{k}")

    for k in range(1, n + 1):
        g_k = make_gk(prev, k)
        out.append(g_k)
        prev = g_k
    return out
