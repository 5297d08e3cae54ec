"""Dense bivariate polynomials with exact-arithmetic-friendly operations.

Coefficients are stored as a dense float64 array ``coeffs[i, j]`` for the
monomial ``x**i * y**j``. The zero polynomial is tracked by an explicit flag
instead of a sentinel degree, so degree queries on it can refuse cleanly.

The same class doubles as the coefficient carrier on the parameter square:
the pullback operations reinterpret the two axes as (u, v) and return
ordinary BivariatePoly instances over those variables.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "BivariatePoly",
    "coeffs_allclose",
    "pullback_symmetric",
    "pullback_derivative_x",
    "pullback_derivative_y",
]


def _trimmed(coeffs: np.ndarray) -> np.ndarray:
    """Drop trailing all-zero rows/columns. Exact zero comparison only."""
    rows, cols = coeffs.shape
    while rows > 1 and not coeffs[rows - 1, :].any():
        rows -= 1
    while cols > 1 and not coeffs[:, cols - 1].any():
        cols -= 1
    return coeffs[:rows, :cols]


class BivariatePoly:
    """Polynomial in two variables with float64 coefficients.

    Parameters
    ----------
    coeffs:
        2-D array-like; entry (i, j) multiplies x**i * y**j. Trailing zero
        rows and columns are trimmed on construction.
    """

    __slots__ = ("coeffs", "is_zero")

    def __init__(self, coeffs) -> None:
        arr = np.atleast_2d(np.asarray(coeffs, dtype=np.float64))
        if arr.ndim != 2:
            raise ValueError("coefficient array must be 2-D")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = _trimmed(arr.copy())
        self.is_zero: bool = not arr.any()
        if self.is_zero:
            arr = np.zeros((1, 1))
        self.coeffs: np.ndarray = arr
        self.coeffs.setflags(write=False)

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls(np.zeros((1, 1)))

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], float]) -> "BivariatePoly":
        """Build from a sparse {(i, j): c} mapping."""
        if not terms:
            return cls.zero()
        dx = max(i for i, _ in terms)
        dy = max(j for _, j in terms)
        arr = np.zeros((dx + 1, dy + 1))
        for (i, j), c in terms.items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            arr[i, j] += c
        return cls(arr)

    def total_degree(self) -> int:
        """Largest i + j with a nonzero coefficient. Refuses on zero."""
        if self.is_zero:
            raise ValueError("zero polynomial has no degree")
        idx = np.argwhere(self.coeffs != 0.0)
        return int((idx[:, 0] + idx[:, 1]).max())

    def degrees(self) -> tuple[int, int]:
        """(degree in x, degree in y); refuses on zero."""
        if self.is_zero:
            raise ValueError("zero polynomial has no degree")
        idx = np.argwhere(self.coeffs != 0.0)
        return int(idx[:, 0].max()), int(idx[:, 1].max())

    def __call__(self, x, y):
        return self.eval(x, y)

    def eval(self, x, y):
        """Evaluate by nested single-variable Horner passes.

        The inner pass runs over y for each x-power row, the outer pass over
        x. Vectorized over array inputs; dtype follows the inputs so the
        routine also serves extended-precision callers.
        """
        x = np.asarray(x)
        y = np.asarray(y)
        dt = np.result_type(x.dtype, y.dtype, np.float64)
        c = self.coeffs.astype(dt, copy=False)
        # Horner in y per row, then Horner in x across rows.
        acc = np.zeros(np.broadcast(x, y).shape, dtype=dt)
        for i in range(c.shape[0] - 1, -1, -1):
            row = c[i]
            rowval = np.full_like(acc, row[-1])
            for j in range(len(row) - 2, -1, -1):
                rowval = rowval * y + row[j]
            acc = acc * x + rowval
        if acc.shape == ():
            return dt.type(acc)
        return acc

    def partial(self, axis: str) -> "BivariatePoly":
        """Partial derivative along 'x' or 'y'."""
        if self.is_zero:
            return BivariatePoly.zero()
        c = self.coeffs
        if axis == "x":
            if c.shape[0] == 1:
                return BivariatePoly.zero()
            rows = np.arange(1, c.shape[0])
            return BivariatePoly(c[1:, :] * rows[:, None])
        if axis == "y":
            if c.shape[1] == 1:
                return BivariatePoly.zero()
            cols = np.arange(1, c.shape[1])
            return BivariatePoly(c[:, 1:] * cols[None, :])
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    def multiply(self, other: "BivariatePoly") -> "BivariatePoly":
        """Exact coefficient convolution (no FFT; float ops only)."""
        if self.is_zero or other.is_zero:
            return BivariatePoly.zero()
        a, b = self.coeffs, other.coeffs
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
        for i in range(a.shape[0]):
            for k in range(b.shape[0]):
                out[i + k, :] += np.convolve(a[i], b[k])
        return BivariatePoly(out)

    def __mul__(self, other):
        if isinstance(other, BivariatePoly):
            return self.multiply(other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def scale(self, c: float) -> "BivariatePoly":
        if c == 0.0 or self.is_zero:
            return BivariatePoly.zero()
        return BivariatePoly(self.coeffs * c)

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        a, b = self.coeffs, other.coeffs
        rows = max(a.shape[0], b.shape[0])
        cols = max(a.shape[1], b.shape[1])
        out = np.zeros((rows, cols))
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return BivariatePoly(out)

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        return self + other.scale(-1.0)

    def __repr__(self) -> str:
        if self.is_zero:
            return "BivariatePoly(zero)"
        dx, dy = self.degrees()
        return f"BivariatePoly(deg_x={dx}, deg_y={dy}, terms={int(np.count_nonzero(self.coeffs))})"

    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max())


def coeffs_allclose(a: BivariatePoly, b: BivariatePoly, rtol: float = 1e-12) -> bool:
    """Coefficientwise comparison at tolerance rtol scaled by the larger
    max-abs coefficient of the two operands. Two zeros compare equal."""
    scale = max(a.max_abs_coeff(), b.max_abs_coeff())
    if scale == 0.0:
        return True
    diff = a - b
    return diff.max_abs_coeff() <= rtol * scale


def pullback_symmetric(p: BivariatePoly) -> BivariatePoly:
    """Compose with the symmetric map (u, v) -> (u + v, u * v).

    Returns Q with Q(u, v) = p(u + v, u*v); the result's axes are (u, v).
    Expansion is binomial and exact at the integer level:
    (u+v)^i (uv)^j contributes C(i, m) to coefficient (m + j, i - m + j).
    """
    if p.is_zero:
        return BivariatePoly.zero()
    c = p.coeffs
    dx, dy = c.shape[0] - 1, c.shape[1] - 1
    side = dx + dy + 1
    out = np.zeros((side, side))
    for i in range(dx + 1):
        binoms = [math.comb(i, m) for m in range(i + 1)]
        for j in range(dy + 1):
            cij = c[i, j]
            if cij == 0.0:
                continue
            for m in range(i + 1):
                out[m + j, i - m + j] += cij * binoms[m]
    return BivariatePoly(out)


def pullback_derivative_y(p: BivariatePoly) -> BivariatePoly:
    """Pulled-back y-derivative: with Q = pullback_symmetric(p), returns
    dQ/du - dQ/dv, an antisymmetric polynomial in (u, v).

    Chain rule: (d/du - d/dv) p(u+v, uv) = (v - u) * (dp/dy)(u+v, uv), so
    this equals the pullback of dp/dy times (v - u). Computed on the (u, v)
    side so the identity check against that product is a real consistency
    test and not a tautology.
    """
    q = pullback_symmetric(p)
    return q.partial("x") - q.partial("y")


def pullback_derivative_x(p: BivariatePoly) -> BivariatePoly:
    """Pulled-back x-derivative combination: d(v*Q)/dv - d(u*Q)/du.

    With Q = pullback_symmetric(p) the product-rule Q terms cancel and the
    result equals (v - u) times the pullback of dp/dx; this is the quantity
    the weighted first-derivative pencils integrate on the simplex side.
    """
    q = pullback_symmetric(p)
    u = BivariatePoly(np.array([[0.0], [1.0]]))  # u
    v = BivariatePoly(np.array([[0.0, 1.0]]))  # v
    return (v * q).partial("y") - (u * q).partial("x")
