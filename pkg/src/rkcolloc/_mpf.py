"""Extended-precision helpers used during kernel-system construction.

The collocation Gram matrices become numerically rank deficient in double
precision once the smoothness order grows (for order 5 spaces this already
happens around 50 nodes in one dimension).  Construction therefore optionally
runs in multiple-precision floating point: gmpy2 ``mpfr`` scalars stored in
numpy object arrays.  numpy's ``dot``/``@`` and elementwise arithmetic all
work on object arrays, so the surrounding linear algebra reads the same as
the float64 path.  Everything exported back to callers is float64.

Only construction uses this module; time stepping and user-facing arrays are
plain float64.
"""

import math
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import SingularMatrix

_BITS_PER_DIGIT = math.log2(10.0)


def bits_for(digits):
    """Mantissa bits needed for roughly `digits` significant decimals."""
    return int(digits * _BITS_PER_DIGIT) + 8


@contextmanager
def workprec(digits):
    """Temporarily set the gmpy2 working precision (decimal digits)."""
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = bits_for(digits)
    try:
        yield
    finally:
        ctx.precision = old


def frac_matrix_to_obj(rows, digits):
    """Convert a nested sequence of Fractions to an mpfr object array."""
    with workprec(digits):
        out = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                out[i, j] = mpfr(mpq(v.numerator, v.denominator))
    return out


def to_obj(a, digits):
    """Lift a float array (or scalar) to mpfr objects at the given digits."""
    with workprec(digits):
        arr = np.asarray(a)
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for i, v in enumerate(arr.reshape(-1)):
            flat[i] = mpfr(v)
    return out if out.shape else out[()]


def number_to_obj(v, digits):
    """One exact scalar (int, float, or Fraction) to mpfr."""
    with workprec(digits):
        if isinstance(v, Fraction):
            return mpfr(mpq(v.numerator, v.denominator))
        return mpfr(v)


def to_float(a):
    """Round an object array back to float64."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=float)
    flat = out.reshape(-1)
    for i, v in enumerate(arr.reshape(-1)):
        flat[i] = float(v)
    return out if out.shape else float(out[()])


def is_obj(a):
    return isinstance(a, np.ndarray) and a.dtype == object


def sqrt_any(x):
    """Square root that works for both float and mpfr scalars."""
    if isinstance(x, (mpfr, mpq)):
        return gmpy2.sqrt(x)
    return math.sqrt(x)


def polyval2d_obj(x, y, c):
    """Evaluate sum_ij c[i,j] x^i y^j by nested Horner on object arrays.

    `x` and `y` may be scalars or broadcast-compatible arrays (object or
    float); `c` is a 2-D object array.
    """
    nx, ny = c.shape
    # Horner in y inside Horner in x.
    acc = None
    for i in range(nx - 1, -1, -1):
        row = c[i, ny - 1]
        for j in range(ny - 2, -1, -1):
            row = row * y + c[i, j]
        acc = row if acc is None else acc * x + row
    return acc


def solve_obj(a, b, digits):
    """Gaussian elimination with partial pivoting on object arrays.

    `b` may be a vector or a matrix of right-hand sides.  Raises
    SingularMatrix on an exactly-zero pivot (with mpfr scalars a pivot that
    underflows to zero means the system truly lost rank at this precision).
    """
    with workprec(digits):
        a = np.array(a, dtype=object)
        vec = b.ndim == 1
        bb = np.array(b, dtype=object).reshape(len(b), -1)
        n = a.shape[0]
        for k in range(n):
            piv = max(range(k, n), key=lambda r: abs(a[r, k]))
            if a[piv, k] == 0:
                raise SingularMatrix(f"zero pivot in column {k}")
            if piv != k:
                a[[k, piv]] = a[[piv, k]]
                bb[[k, piv]] = bb[[piv, k]]
            inv = 1 / a[k, k]
            for r in range(k + 1, n):
                f = a[r, k] * inv
                if f != 0:
                    a[r, k + 1:] -= f * a[k, k + 1:]
                    bb[r] -= f * bb[k]
        x = np.empty_like(bb)
        for k in range(n - 1, -1, -1):
            acc = bb[k] - a[k, k + 1:] @ x[k + 1:]
            x[k] = acc / a[k, k]
    return x[:, 0] if vec else x


def inv_obj(a, digits):
    """Inverse via multi-RHS elimination (construction-precision checks)."""
    n = a.shape[0]
    eye = np.empty((n, n), dtype=object)
    with workprec(digits):
        one, zero = mpfr(1), mpfr(0)
        for i in range(n):
            for j in range(n):
                eye[i, j] = one if i == j else zero
    return solve_obj(a, eye, digits)
