"""Exact L2 best constants as generalized symmetric eigenproblems.

The best constant sup ||dP/daxis|| / ||P|| over polynomials of total degree
at most n equals sqrt(lambda_max(A, G)) with A and G the derivative and
plain Gram matrices over any basis of the space. Both matrices are assembled
in a scaled Chebyshev product basis (monomial Grams are numerically singular
by n ~ 8), and the pencil is solved inverse-free:

    G = R^T R with R from a modified Gram-Schmidt QR of sqrt(W) B, where B
    is the basis-by-node value matrix of an exact quadrature rule, so R is
    the Cholesky factor of G computed at the square root of its condition
    number; A stays in the factored form C^T C; power iteration runs on
    R^{-T} C^T C R^{-1}.

The entire pipeline runs in numpy.longdouble (80-bit extended on x86),
which is what makes the upper sweep ends (Koornwinder n = 14, simplex and
Schur n = 16) reachable: float64 Cholesky of the explicit Gram fails at
Koornwinder n = 13, and even the float64 square-root path returns garbage on
the simplex past n ~ 12. No LAPACK call sits on the critical path; every
step is a hand loop over numpy primitives, so results are deterministic and
dtype-faithful.

A dense oracle path (explicit float64 Grams through the poly2d evaluators,
hand Cholesky, cyclic Jacobi rotations) is kept deliberately separate and
cross-checked at small n by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import _cheb_coeffs_int
from .domains import Domain, quad_rule, simplex_weighted
from .poly2d import BivariatePoly

__all__ = [
    "ConditioningError",
    "FactorPoint",
    "basis",
    "gram",
    "l2_markov_factor",
    "l2_schur_factor",
    "markov_witness",
    "dense_markov_oracle",
    "dense_schur_oracle",
    "jacobi_eigenvalues",
]

POWER_TOL = 1e-10
POWER_MAX_ITER = 500
COND_LIMIT = 1e13


class ConditioningError(Exception):
    """Basis conditioning exhausted; reduce n."""


@dataclass(frozen=True)
class FactorPoint:
    """One computed best constant: degree, value, and how it was obtained."""

    n: int
    value: float
    method: str

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError("factor values are nonnegative")
        if self.method not in ("eigen", "extremal-sequence", "ratio-sample"):
            raise ValueError(f"unknown method tag {self.method!r}")


def _graded_indices(n: int) -> list[tuple[int, int]]:
    """Exponent pairs (i, j), i + j <= n, graded then lexicographic in (i, j)
    with the x-power ranked first (descending within a degree block)."""
    out = []
    for d in range(n + 1):
        for i in range(d, -1, -1):
            out.append((i, d - i))
    return out


def space_dimension(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def basis(n: int, domain: Domain) -> list[BivariatePoly]:
    """Degree-graded Chebyshev product basis T_i(x/sx) T_j(y/sy), i+j <= n.

    The affine scalings are the domain's bounding half-widths, so both
    arguments stay in [-1, 1] over the domain.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    sx, sy = domain.bounding_half_widths()
    polys = []
    ci = [np.asarray(_cheb_coeffs_int(i), dtype=np.float64) for i in range(n + 1)]
    for i, j in _graded_indices(n):
        cx = ci[i] / sx ** np.arange(i + 1)
        cy = ci[j] / sy ** np.arange(j + 1)
        polys.append(BivariatePoly(np.outer(cx, cy)))
    return polys


# ---------------------------------------------------------------------------
# Node-matrix assembly (extended precision).
# ---------------------------------------------------------------------------

def _cheb_rows(order: int, t: np.ndarray):
    """All T_0..T_order and derivatives at t, stacked as (order+1, N) rows."""
    N = t.shape[0]
    dt = t.dtype
    T = np.empty((order + 1, N), dtype=dt)
    D = np.empty((order + 1, N), dtype=dt)
    T[0] = 1.0
    D[0] = 0.0
    if order >= 1:
        T[1] = t
        D[1] = 1.0
    for m in range(2, order + 1):
        T[m] = 2.0 * t * T[m - 1] - T[m - 2]
        D[m] = 2.0 * T[m - 1] + 2.0 * t * D[m - 1] - D[m - 2]
    return T, D


def _node_matrices(
    idx: list[tuple[int, int]],
    x: np.ndarray,
    y: np.ndarray,
    sx: float,
    sy: float,
    deriv_axis: str | None,
):
    """Value (and optionally derivative) matrix of the basis at the nodes."""
    order = max(max(i, j) for i, j in idx)
    TX, DX = _cheb_rows(order, x / sx)
    TY, DY = _cheb_rows(order, y / sy)
    N = x.shape[0]
    B = np.empty((N, len(idx)), dtype=x.dtype)
    for a, (i, j) in enumerate(idx):
        B[:, a] = TX[i] * TY[j]
    if deriv_axis is None:
        return B, None
    C = np.empty_like(B)
    for a, (i, j) in enumerate(idx):
        if deriv_axis == "x":
            C[:, a] = (DX[i] / sx) * TY[j]
        else:
            C[:, a] = TX[i] * (DY[j] / sy)
    return B, C


# ---------------------------------------------------------------------------
# Hand linear algebra in the working dtype.
# ---------------------------------------------------------------------------

def _mgs_r(M: np.ndarray, cond_limit: float) -> tuple[np.ndarray, np.ndarray]:
    """QR by modified Gram-Schmidt with one reorthogonalization pass.

    Returns (Q, R) with R upper triangular, positive diagonal. Raises
    ConditioningError on (numerical) rank loss or when the diagonal spread
    exceeds cond_limit: past that point even extended precision cannot
    certify digits, and silently degrading answers is worse than refusing.
    """
    N, k = M.shape
    Q = M.astype(M.dtype, copy=True)
    R = np.zeros((k, k), dtype=M.dtype)
    for j in range(k):
        v = Q[:, j]
        for _ in range(2):  # second pass restores orthogonality at high cond
            for i in range(j):
                r = Q[:, i] @ v
                R[i, j] += r
                v = v - r * Q[:, i]
        nrm = math.sqrt(float(v @ v))
        if nrm == 0.0:
            raise ConditioningError(f"rank loss at basis column {j}; reduce n")
        R[j, j] = nrm
        Q[:, j] = v / nrm
    d = np.diagonal(R)
    spread = float(d.max() / d.min())
    if spread > cond_limit:
        raise ConditioningError(
            f"triangular factor spread {spread:.3e} exceeds {cond_limit:.1e}; reduce n"
        )
    return Q, R


def _upper_inverse(R: np.ndarray) -> np.ndarray:
    """Inverse of an upper-triangular matrix by back substitution."""
    k = R.shape[0]
    X = np.zeros_like(R)
    for i in range(k - 1, -1, -1):
        e = np.zeros(k, dtype=R.dtype)
        e[i] = 1.0
        if i + 1 < k:
            e = e - R[i, i + 1 :] @ X[i + 1 :, :]
        X[i, :] = e / R[i, i]
    return X


def _power_top(apply_m, dim: int, tol: float, max_iter: int):
    """Largest eigenvalue of a symmetric PSD operator by power iteration.

    Deterministic all-ones start; Rayleigh-quotient convergence test. At the
    iteration cap the best current estimate is returned (the caller treats
    only conditioning as an error); convergence state is reported back.
    """
    v = np.ones(dim, dtype=np.longdouble)
    v /= math.sqrt(float(v @ v))
    lam_prev = np.longdouble(0.0)
    lam = lam_prev
    iters = 0
    converged = False
    for iters in range(1, max_iter + 1):
        w = apply_m(v)
        nrm = math.sqrt(float(w @ w))
        if nrm == 0.0:
            return np.longdouble(0.0), v, iters, True
        lam = v @ w
        v = w / nrm
        if iters > 1 and abs(float(lam - lam_prev)) <= tol * max(1.0, abs(float(lam))):
            converged = True
            break
        lam_prev = lam
    return lam, v, iters, converged


def jacobi_eigenvalues(A: np.ndarray, sweeps: int = 60) -> np.ndarray:
    """All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    The oracle eigensolver: independent of the power-iteration path. Works
    in the dtype of A; intended for the small dimensions of the oracle
    checks, where it converges to machine precision in a few sweeps.
    """
    A = np.array(A, copy=True)
    k = A.shape[0]
    if A.shape != (k, k):
        raise ValueError("matrix must be square")
    if k == 1:
        return A[:, 0].copy()
    eps = float(np.finfo(A.dtype).eps)
    for _ in range(sweeps):
        off = math.sqrt(float(np.sum(np.tril(A, -1) ** 2)))
        scale = math.sqrt(float(np.sum(np.diagonal(A) ** 2))) + 1.0
        if off <= 4.0 * eps * scale:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = float(A[p, q])
                if abs(apq) <= eps * scale:
                    continue
                theta = float(A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
    return np.sort(np.diagonal(A).copy())


def _cholesky_lower(G: np.ndarray) -> np.ndarray:
    """Hand Cholesky; raises ConditioningError when G is not numerically
    positive definite, the signal to back off to a smaller degree."""
    k = G.shape[0]
    L = np.zeros_like(G)
    for i in range(k):
        for j in range(i + 1):
            s = float(G[i, j] - L[i, :j] @ L[j, :j])
            if i == j:
                if s <= 0.0:
                    raise ConditioningError(
                        f"Gram matrix numerically indefinite at row {i}; reduce n"
                    )
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


# ---------------------------------------------------------------------------
# Public Gram assembly (explicit matrices, float64 contract).
# ---------------------------------------------------------------------------

def gram(
    basis_polys: list[BivariatePoly], domain: Domain, extra_weight_power: int = 0
) -> np.ndarray:
    """Gram matrix G[a, b] = integral of basis_a * basis_b over the domain.

    extra_weight_power 0 integrates against the domain's intrinsic measure;
    2 multiplies by (v - u)^2 (weighted simplex only), giving the matrix of
    ||w P||^2 used by the Schur pencil. The result is symmetrized float64
    and is checked positive definite; an indefinite result raises
    ConditioningError (reduce n).
    """
    if extra_weight_power not in (0, 2):
        raise ValueError("extra_weight_power must be 0 or 2")
    if not basis_polys:
        raise ValueError("empty basis")
    if extra_weight_power == 2 and domain.kind != "simplex-weighted":
        raise ValueError("the squared-weight Gram lives on the weighted simplex")
    deg = max(p.total_degree() for p in basis_polys)
    wp = None
    if domain.kind == "simplex-weighted":
        wp = 1 + extra_weight_power
    rule = quad_rule(domain, 2 * deg, wp, dtype=np.longdouble)
    x, y = rule.eval_points()
    B = np.empty((x.shape[0], len(basis_polys)), dtype=np.longdouble)
    for a, p in enumerate(basis_polys):
        B[:, a] = p.eval(x, y)
    Bw = B * rule.weights[:, None]
    G = (B.T @ Bw).astype(np.float64)
    G = (G + G.T) / 2.0
    _cholesky_lower(G)  # definiteness gate
    return G


# ---------------------------------------------------------------------------
# Factor computations (extended-precision factored pencils).
# ---------------------------------------------------------------------------

def _pencil_top(
    B_num: np.ndarray,
    w_num: np.ndarray,
    B_den: np.ndarray,
    w_den: np.ndarray,
    *,
    tol: float,
    max_iter: int,
    cond_limit: float,
    column_scaling=None,
):
    """sqrt of the top generalized eigenvalue of (N^T N, D^T D) where
    N = sqrt(w_num) B_num and D = sqrt(w_den) B_den, plus the eigenvector
    in basis coordinates."""
    C = np.sqrt(w_num)[:, None] * B_num
    S = np.sqrt(w_den)[:, None] * B_den
    if column_scaling is not None:
        sc = np.asarray(column_scaling, dtype=C.dtype)
        if sc.shape != (C.shape[1],) or np.any(sc <= 0):
            raise ValueError("column_scaling must be positive, one per basis element")
        C = C * sc[None, :]
        S = S * sc[None, :]
    _, R = _mgs_r(S, cond_limit)
    Rinv = _upper_inverse(R)
    RinvT = Rinv.T

    def apply_m(v):
        u = Rinv @ v
        z = C @ u
        return RinvT @ (C.T @ z)

    lam, v, iters, converged = _power_top(apply_m, R.shape[0], tol, max_iter)
    coeffs = Rinv @ v
    if column_scaling is not None:
        coeffs = coeffs * sc
    value = math.sqrt(max(float(lam), 0.0))
    return value, coeffs, iters, converged


def l2_markov_factor(
    n: int,
    axis: str,
    domain: Domain,
    *,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    cond_limit: float = COND_LIMIT,
    column_scaling=None,
) -> FactorPoint:
    """Best constant sup ||dP/daxis||_2 / ||P||_2 over total degree <= n.

    Norms are the domain's intrinsic L2 norms (weight w on the weighted
    simplex). The value is sqrt of the top eigenvalue of the derivative
    pencil; see the module docstring for the solve.
    """
    value, _ = _markov_solve(
        n, axis, domain, tol=tol, max_iter=max_iter,
        cond_limit=cond_limit, column_scaling=column_scaling,
    )
    return FactorPoint(n, value, "eigen")


def markov_witness(
    n: int,
    axis: str,
    domain: Domain,
    *,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    cond_limit: float = COND_LIMIT,
) -> tuple[FactorPoint, BivariatePoly]:
    """The factor together with an extremal polynomial realizing it."""
    value, coeffs = _markov_solve(
        n, axis, domain, tol=tol, max_iter=max_iter,
        cond_limit=cond_limit, column_scaling=None,
    )
    polys = basis(n, domain)
    acc = BivariatePoly.zero()
    for c, p in zip(np.asarray(coeffs, dtype=np.float64), polys):
        acc = acc + p.scale(float(c))
    return FactorPoint(n, value, "eigen"), acc


def _markov_solve(n, axis, domain, *, tol, max_iter, cond_limit, column_scaling):
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0, np.ones(1)
    idx = _graded_indices(n)
    sx, sy = domain.bounding_half_widths()
    wp = 1 if domain.kind == "simplex-weighted" else None
    rule = quad_rule(domain, 2 * n, wp, dtype=np.longdouble)
    x, y = rule.eval_points()
    B, C = _node_matrices(idx, x, y, sx, sy, axis)
    return _pencil_top(
        C, rule.weights, B, rule.weights,
        tol=tol, max_iter=max_iter, cond_limit=cond_limit,
        column_scaling=column_scaling,
    )[:2]


def l2_schur_factor(
    n: int,
    *,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    cond_limit: float = COND_LIMIT,
    column_scaling=None,
) -> FactorPoint:
    """Best constant sup ||P||_{2,w} / ||(v-u) P||_{2,w} over degree <= n
    on the weighted simplex."""
    if n < 0:
        raise ValueError("n must be >= 0")
    dom = simplex_weighted()
    idx = _graded_indices(n)
    rule_num = quad_rule(dom, 2 * n, 1, dtype=np.longdouble)
    rule_den = quad_rule(dom, 2 * n, 3, dtype=np.longdouble)
    xn, yn = rule_num.eval_points()
    xd, yd = rule_den.eval_points()
    Bn, _ = _node_matrices(idx, xn, yn, 1.0, 1.0, None)
    Bd, _ = _node_matrices(idx, xd, yd, 1.0, 1.0, None)
    value, _, _, _ = _pencil_top(
        Bn, rule_num.weights, Bd, rule_den.weights,
        tol=tol, max_iter=max_iter, cond_limit=cond_limit,
        column_scaling=column_scaling,
    )
    return FactorPoint(n, value, "eigen")


# ---------------------------------------------------------------------------
# Dense oracle path: explicit float64 Grams, hand Cholesky, Jacobi rotations.
# ---------------------------------------------------------------------------

def _dense_top(A: np.ndarray, G: np.ndarray) -> float:
    L = _cholesky_lower(G)
    k = G.shape[0]
    # Solve L X = A, then L Y = X^T: Y = L^{-1} A L^{-T}.
    X = np.empty_like(A)
    for j in range(k):
        col = A[:, j].copy()
        for i in range(k):
            col[i] = (col[i] - L[i, :i] @ col[:i]) / L[i, i]
        X[:, j] = col
    Y = np.empty_like(A)
    for j in range(k):
        col = X[j, :].copy()
        for i in range(k):
            col[i] = (col[i] - L[i, :i] @ col[:i]) / L[i, i]
        Y[:, j] = col
    Y = (Y + Y.T) / 2.0
    lam = float(jacobi_eigenvalues(Y)[-1])
    return math.sqrt(max(lam, 0.0))


def dense_markov_oracle(n: int, axis: str, domain: Domain) -> float:
    """Markov factor via explicit Grams of the poly2d basis objects and a
    cyclic-Jacobi eigensolve. Small n only; the independent cross-check."""
    if n == 0:
        return 0.0
    polys = basis(n, domain)
    wp = 1 if domain.kind == "simplex-weighted" else None
    rule = quad_rule(domain, 2 * n, wp)
    x, y = rule.eval_points()
    B = np.column_stack([p.eval(x, y) for p in polys])
    D = np.column_stack([p.partial(axis).eval(x, y) for p in polys])
    W = rule.weights[:, None]
    G = B.T @ (W * B)
    A = D.T @ (W * D)
    return _dense_top((A + A.T) / 2.0, (G + G.T) / 2.0)


def dense_schur_oracle(n: int) -> float:
    dom = simplex_weighted()
    polys = basis(n, dom)
    rn = quad_rule(dom, 2 * n, 1)
    rd = quad_rule(dom, 2 * n, 3)
    xn, yn = rn.eval_points()
    xd, yd = rd.eval_points()
    Bn = np.column_stack([p.eval(xn, yn) for p in polys])
    Bd = np.column_stack([p.eval(xd, yd) for p in polys])
    A = Bn.T @ (rn.weights[:, None] * Bn)
    G = Bd.T @ (rd.weights[:, None] * Bd)
    return _dense_top((A + A.T) / 2.0, (G + G.T) / 2.0)
