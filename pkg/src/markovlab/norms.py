"""L^p and sup norms on the three domains, plus the 1-D reductions.

Certified paths: even integer p (exact quadrature of the polynomial P**p)
and p = inf (sup over a boundary-including grid, an under-estimate by
construction). General finite p >= 1 falls back to composite Gauss panels
and is not certified; acceptance-grade checks only ever use the certified
paths or the 1-D reductions below.

The 1-D reduction integrates |P_n^(a,a)(x)|^p (1 - x^(1/l))^beta over [0,1]
through the substitution x = t^l, splitting panels at the zeros of the
Jacobi factor so every panel has a smooth integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .classical import jacobi_P
from .domains import (
    DEFAULT_NODE_CAP,
    Domain,
    QuadratureRule,
    gauss_legendre_1d,
    map_to_physical,
    quad_rule,
    sup_grid,
)
from .poly2d import BivariatePoly

__all__ = [
    "NormSpec",
    "lp_norm",
    "markov_ratio",
    "wn_1d_integral",
    "wn_ratio",
    "bernoulli_sandwich",
]


@dataclass(frozen=True)
class NormSpec:
    """Which norm: exponent p (math.inf for sup), domain, and whether the
    intrinsic weight w = v - u applies on the weighted simplex."""

    p: float
    domain: Domain
    weighted: bool = True

    def __post_init__(self) -> None:
        if not (self.p >= 1.0):
            raise ValueError("p must be >= 1")


def _weight_power(spec: NormSpec) -> int | None:
    if spec.domain.kind == "simplex-weighted":
        return 1 if spec.weighted else 0
    return None


def _as_evaluator(P, degree: int | None):
    """Accept a BivariatePoly or a (callable, degree) pair."""
    if isinstance(P, BivariatePoly):
        if P.is_zero:
            return None, 0
        return P.eval, P.total_degree()
    if callable(P):
        if degree is None:
            raise TypeError("degree is required when P is a bare callable")
        return P, int(degree)
    raise TypeError(f"cannot evaluate {type(P).__name__}")


@lru_cache(maxsize=64)
def _gl_cached(m: int):
    x, w = gauss_legendre_1d(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_nodes(lo: float, hi: float, panels: int, order: int):
    """Composite GL nodes/weights: `panels` panels of `order` points."""
    x, w = _gl_cached(order)
    edges = np.linspace(lo, hi, panels + 1)
    a = edges[:-1, None]
    h = (edges[1:, None] - a) / 2.0
    nodes = (a + h + h * x[None, :]).ravel()
    weights = (h * w[None, :]).ravel()
    return nodes, weights


def _panel_integral_2d(f, spec: NormSpec, p: float, degree: int) -> float:
    """Non-certified composite-panel integral of |f|^p over the domain."""
    dom = spec.domain
    panels = 4 * max(1, degree)
    order = 6
    if dom.kind in ("koornwinder", "simplex-weighted"):
        wp = 1 if dom.kind == "koornwinder" else _weight_power(spec)
        xu, wu = _panel_nodes(-1.0, 1.0, panels, order)
        xt, wt = _panel_nodes(0.0, 1.0, panels, order)
        U = np.repeat(xu, xt.size)
        T = np.tile(xt, xu.size)
        W = np.repeat(wu, xt.size) * np.tile(wt, xu.size)
        W = W * (1.0 - U) ** (wp + 1) * T**wp
        V = U + (1.0 - U) * T
        x, y = map_to_physical(dom, U, V)
        return float(np.sum(W * np.abs(np.asarray(f(x, y))) ** p))
    l = dom.l
    xs, ws = _panel_nodes(0.0, 1.0, panels, order)
    S = np.repeat(xs, xs.size)
    T = np.tile(xs, xs.size)
    W0 = np.repeat(ws, xs.size) * np.tile(ws, xs.size)
    W0 = W0 * (l * l) * S ** (l - 1) * T ** (l - 1) * (1.0 - S) ** l
    X0 = S**l
    Y0 = (1.0 - S) ** l * T**l
    total = 0.0
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            total += float(np.sum(W0 * np.abs(np.asarray(f(sx * X0, sy * Y0))) ** p))
    return total


def lp_norm(
    P,
    spec: NormSpec,
    *,
    degree: int | None = None,
    grid_density: int = 8,
    grid_floor: int = 64,
    node_cap: int = DEFAULT_NODE_CAP,
    rule: QuadratureRule | None = None,
) -> float:
    """The L^p (or sup) norm of P under spec.

    P is normally a BivariatePoly; a bare callable plus an explicit degree
    is accepted so closed-form family evaluators can be measured without
    round-tripping through their ill-conditioned expansions.

    Even integer p uses a rule exact for P**p. p = inf takes the max over
    sup_grid (grid_density/grid_floor control its side counts). Other finite
    p >= 1 uses composite panels, 4 * degree per axis, non-certified.
    An externally built `rule` may be supplied to amortize node construction
    across calls; it must be exact to degree p * deg(P).
    """
    if not (spec.p >= 1.0):
        raise ValueError("p must be >= 1")
    f, deg = _as_evaluator(P, degree)
    if f is None:
        return 0.0
    if math.isinf(spec.p):
        pts = sup_grid(spec.domain, deg, density=grid_density, floor=grid_floor)
        vals = np.asarray(f(pts[:, 0], pts[:, 1]))
        return float(np.abs(vals).max())
    p = spec.p
    if float(p).is_integer() and int(p) % 2 == 0 and p >= 2:
        ip = int(p)
        if rule is None:
            rule = quad_rule(
                spec.domain, ip * deg, _weight_power(spec), node_cap=node_cap
            )
        x, y = rule.eval_points()
        vals = np.asarray(f(x, y))
        total = float(np.sum(rule.weights * vals**ip))
        return max(total, 0.0) ** (1.0 / ip)
    return _panel_integral_2d(f, spec, p, deg) ** (1.0 / p)


def markov_ratio(P: BivariatePoly, axis: str, spec: NormSpec, **norm_kw) -> float:
    """||dP/daxis|| / ||P|| under spec. Zero denominator is a domain error."""
    denom = lp_norm(P, spec, **norm_kw)
    if denom == 0.0:
        raise ValueError("zero polynomial has no Markov ratio")
    return lp_norm(P.partial(axis), spec, **norm_kw) / denom


# ---------------------------------------------------------------------------
# 1-D reductions for W_n on the delta-l family.
# ---------------------------------------------------------------------------

def _jacobi_zeros_01(n: int, alpha: float) -> np.ndarray:
    """Zeros of P_n^(alpha, alpha) inside (0, 1), ascending.

    Sign scan on a cosine-spaced grid (zero gaps are bounded below in the
    angular variable) followed by vectorized bisection.
    """
    expected = n // 2
    if expected == 0:
        return np.zeros(0)
    scan = 16 * (n + 2)
    for attempt in range(3):
        theta = np.linspace(0.0, np.pi / 2.0, scan)
        x = np.cos(theta)[::-1]  # ascending in (0, 1], includes both ends
        vals = jacobi_P(n, alpha, alpha, x)
        sign = np.sign(vals)
        flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
        if flips.size == expected:
            break
        scan *= 4  # densify; alpha-dependent clustering can hide a zero
    else:
        raise RuntimeError("zero bracketing failed; scan grid exhausted")
    lo = x[flips].copy()
    hi = x[flips + 1].copy()
    flo = jacobi_P(n, alpha, alpha, lo)
    for _ in range(60):
        mid = (lo + hi) / 2.0
        fmid = jacobi_P(n, alpha, alpha, mid)
        left = flo * fmid > 0
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    return (lo + hi) / 2.0


def _wn_integrand(n: int, alpha: float, p: float, beta: float, l: int):
    def f(t: np.ndarray) -> np.ndarray:
        return (
            np.abs(jacobi_P(n, alpha, alpha, t**l)) ** p
            * (1.0 - t) ** beta
            * l
            * t ** (l - 1)
        )

    return f


def _gl_panel(f, a: float, b: float, m: int) -> float:
    x, w = _gl_cached(m)
    h = (b - a) / 2.0
    return float(h * np.sum(w * f(a + h + h * x)))


def _adaptive_panel(f, a: float, b: float, depth: int = 0) -> float:
    coarse = _gl_panel(f, a, b, 24)
    mid = (a + b) / 2.0
    fine = _gl_panel(f, a, mid, 24) + _gl_panel(f, mid, b, 24)
    if abs(fine - coarse) <= 1e-13 * (abs(fine) + 1e-300) or depth >= 28:
        return fine
    return _adaptive_panel(f, a, mid, depth + 1) + _adaptive_panel(f, mid, b, depth + 1)


def wn_1d_integral(n: int, alpha: float, p: float, beta_exponent: float, l: int) -> float:
    """integral_0^1 |P_n^(alpha,alpha)(x)|^p (1 - x^(1/l))^beta dx.

    Substituting x = t^l turns the algebraic weight into the polynomial
    (1-t)^beta times l t^(l-1); panels split at the mapped zeros of the
    Jacobi factor. With p and beta both integers each panel's integrand is
    a polynomial of a single sign, integrated by one exact Gauss rule;
    otherwise panels are refined adaptively (non-certified).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    if not (p >= 1.0) or math.isinf(p):
        raise ValueError("p must be finite and >= 1")
    if l < 1 or l % 2 == 0:
        raise ValueError("l must be odd and >= 1")
    if beta_exponent < 0:
        raise ValueError("beta_exponent must be >= 0")
    zeros = _jacobi_zeros_01(n, alpha)
    breaks = np.concatenate([[0.0], zeros ** (1.0 / l), [1.0]])
    f = _wn_integrand(n, alpha, p, beta_exponent, l)
    exact = float(p).is_integer() and float(beta_exponent).is_integer()
    total = 0.0
    if exact:
        deg = int(p) * n * l + int(beta_exponent) + l - 1
        m = deg // 2 + 2

        def signed(t: np.ndarray) -> np.ndarray:
            # polynomial integrand, single sign inside a panel
            return (
                jacobi_P(n, alpha, alpha, t**l) ** int(p)
                * (1.0 - t) ** int(beta_exponent)
                * l
                * t ** (l - 1)
            )

        for a, b in zip(breaks[:-1], breaks[1:]):
            total += abs(_gl_panel(signed, float(a), float(b), m))
        return total
    for a, b in zip(breaks[:-1], breaks[1:]):
        total += _adaptive_panel(f, float(a), float(b))
    return total


def wn_ratio(n: int, alpha: float, l: int, p: float) -> float:
    """Norm ratio of dW_n/dy to W_n on the delta-l domain, via the 1-D
    reduction: [(p+1) * I(beta=l) / I(beta=(p+1)l)]^(1/p)."""
    i_num = wn_1d_integral(n, alpha, p, float(l), l)
    i_den = wn_1d_integral(n, alpha, p, (p + 1.0) * l, l)
    return ((p + 1.0) * i_num / i_den) ** (1.0 / p)


def bernoulli_sandwich(x, l: int):
    """The three stacked quantities ((1-x)/l)^l, (1-x^(1/l))^l, (1-x)^l.

    For x in [0,1] and integer l >= 1 the middle term is sandwiched by the
    outer two; callers assert the ordering pointwise.
    """
    x = np.asarray(x, dtype=np.float64)
    lower = ((1.0 - x) / l) ** l
    mid = (1.0 - x ** (1.0 / l)) ** l
    upper = (1.0 - x) ** l
    return lower, mid, upper
