"""Piecewise-polynomial reproducing kernels for Sobolev spaces on an interval.

The space W_2^m[a,b] (functions with m-1 absolutely continuous derivatives
and the m-th derivative in L2) carries the inner product

    (u, v) = sum_{i<m} u^(i)(a) v^(i)(a) + integral_a^b u^(m) v^(m) dx

whose reproducing kernel K(x, y) is, for each fixed y, a polynomial of
degree 2m-1 in x on each side of the knot x = y.  Both polynomial pieces
are stored as 2m-by-2m coefficient tables (powers of x by powers of y).

Construction is done once in exact rational arithmetic: the left piece's
coefficients solve a constant 2m-by-2m linear system whose right-hand side
is polynomial in y, so one exact solve per monomial column yields the whole
table.  The right piece differs from the left by the antisymmetric jump
polynomial (-1)^m (x-y)^(2m-1) / (2m-1)!, and equals the transpose of the
left table by symmetry of K; both identities are checked exactly during
construction.

Homogeneous boundary conditions are imposed by deflation: given a
functional L(u) = u^(r)(p) at an endpoint p, the kernel of the constrained
subspace {u : L(u) = 0} is

    K_new(x, y) = K(x, y) - phi(x) phi(y) / d,   phi = L applied to K's
    second argument,  d = L(phi).

Deflation is also exact, so a chain of constraints yields bit-identical
tables in any order.
"""

import json
import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _mpf
from .errors import (
    DegenerateConstraint,
    OutOfDomain,
    SingularMatrix,
    SmoothnessExceeded,
)

# Relative floor for the deflation denominator |d| against the kernel's
# diagonal scale.
DEFLATION_RTOL = 1e-12


class BoundaryFunctional(NamedTuple):
    """Point-evaluation functional u -> u^(order)(point).

    `point` must be one of the interval endpoints: the two-piece coefficient
    tables cannot represent the extra breakpoint an interior functional
    would create.
    """

    point: float
    order: int


def _falling(n, k):
    """Falling factorial n (n-1) ... (n-k+1) as an exact integer."""
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _frac_solve(mat, rhs_cols):
    """Exact Gaussian elimination; `rhs_cols` is a list of columns."""
    n = len(mat)
    a = [list(row) for row in mat]
    b = [list(col) for col in rhs_cols]  # b[c][row]
    ncols = len(b)
    perm = list(range(n))
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            raise SingularMatrix(f"exact-rational system has zero column {k}")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            for c in range(ncols):
                b[c][k], b[c][piv] = b[c][piv], b[c][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f != 0:
                for j in range(k, n):
                    a[r][j] -= f * a[k][j]
                for c in range(ncols):
                    b[c][r] -= f * b[c][k]
    out = []
    for c in range(ncols):
        x = [Fraction(0)] * n
        for k in range(n - 1, -1, -1):
            s = b[c][k]
            for j in range(k + 1, n):
                s -= a[k][j] * x[j]
            x[k] = s / a[k][k]
        out.append(x)
    return out


def _build_base_tables(m, af, bf):
    """Exact left/right coefficient tables for the base kernel on [af, bf]."""
    n = 2 * m

    # Row block (i), i = 0..m-1: p^(i)(a) - (-1)^(m-1-i) p^(2m-1-i)(a) = 0.
    mat = []
    for i in range(m):
        row = []
        sgn = (-1) ** ((m - 1 - i) % 2)
        hi = n - 1 - i
        for j in range(n):
            v = Fraction(0)
            if j >= i:
                v += _falling(j, i) * af ** (j - i)
            if j >= hi:
                v -= sgn * _falling(j, hi) * af ** (j - hi)
            row.append(v)
        mat.append(row)
    # Row block (ii), j = 0..m-1: p^(m+j)(b) = -(-1)^m (b-y)^(m-1-j)/(m-1-j)!.
    for j in range(m):
        row = []
        for i in range(n):
            v = Fraction(0)
            if i >= m + j:
                v = Fraction(_falling(i, m + j)) * bf ** (i - m - j)
            row.append(v)
        mat.append(row)

    # Right-hand side, one column per monomial y^t, t = 0..m-1.
    sgn_m = (-1) ** (m % 2)
    cols = []
    for t in range(m):
        col = [Fraction(0)] * n
        for j in range(m):
            p = m - 1 - j
            if t <= p:
                binom = math.comb(p, t)
                col[m + j] = (
                    -Fraction(sgn_m)
                    * binom
                    * bf ** (p - t)
                    * (-1) ** (t % 2)
                    / Fraction(math.factorial(p))
                )
        cols.append(col)
    sols = _frac_solve(mat, cols)

    left = [[Fraction(0)] * n for _ in range(n)]
    for t in range(m):
        for i in range(n):
            left[i][t] = sols[t][i]

    # Jump polynomial (-1)^m (x-y)^(2m-1)/(2m-1)! added to the left piece.
    fact = Fraction(math.factorial(n - 1))
    right = [row[:] for row in left]
    for k in range(n):
        right[k][n - 1 - k] += Fraction(
            (-1) ** ((m - 1 - k) % 2) * math.comb(n - 1, k)
        ) / fact

    # Symmetry of K forces the right table to be the left one transposed.
    for i in range(n):
        for j in range(n):
            if right[i][j] != left[j][i]:
                raise ArithmeticError(
                    "kernel table symmetry check failed; construction is wrong"
                )
    return left, right


def _dtable(table, s, r):
    """Coefficient table of d^s/dx^s d^r/dy^r applied to a table."""
    n = len(table)
    return [
        [table[i][j] * _falling(i, s) * _falling(j, r) for j in range(r, n)]
        for i in range(s, n)
    ]


class Kernel1D:
    """A reproducing kernel on [a, b], possibly with endpoint constraints.

    Instances are immutable in practice: `deflate` returns a new kernel.
    Coefficient tables are exact rationals; float64 and extended-precision
    views are derived lazily and cached.
    """

    def __init__(self, m, interval, constraints, left, right):
        self.m = int(m)
        self.a, self.b = float(interval[0]), float(interval[1])
        self.constraints = tuple(BoundaryFunctional(*c) for c in constraints)
        self.left = tuple(tuple(row) for row in left)
        self.right = tuple(tuple(row) for row in right)
        self._f64 = {}
        self._obj = {}
        self._diag_scale = None

    @property
    def interval(self):
        return (self.a, self.b)

    def __repr__(self):
        cons = ", ".join(f"u^({c.order})({c.point:g})" for c in self.constraints)
        return (
            f"Kernel1D(m={self.m}, interval=({self.a:g}, {self.b:g})"
            + (f", constraints=[{cons}])" if cons else ")")
        )

    # -- evaluation ---------------------------------------------------------

    def _check_orders(self, s, r):
        top = 2 * self.m - 1
        if s < 0 or r < 0:
            raise ValueError("derivative orders must be nonnegative")
        if s > top or r > top:
            raise SmoothnessExceeded(
                f"order ({s},{r}) exceeds the piecewise degree {top}"
            )

    def _tables_f64(self, s, r):
        key = (s, r)
        if key not in self._f64:
            lt = np.array(_dtable(self.left, s, r), dtype=float)
            rt = np.array(_dtable(self.right, s, r), dtype=float)
            self._f64[key] = (lt, rt)
        return self._f64[key]

    def _tables_obj(self, s, r, digits):
        key = (s, r, digits)
        if key not in self._obj:
            lt = _mpf.frac_matrix_to_obj(_dtable(self.left, s, r), digits)
            rt = _mpf.frac_matrix_to_obj(_dtable(self.right, s, r), digits)
            self._obj[key] = (lt, rt)
        return self._obj[key]

    def eval(self, s, r, x, y, region=None):
        """Evaluate d^s/dx^s d^r/dy^r K at (x, y); x, y may be arrays.

        The piece is chosen by x <= y (left) versus x > y (right) unless
        `region` forces one, which is how the matching of the two pieces
        across the knot is tested.  Orders with s + r > 2m - 2 are
        discontinuous across x = y, so evaluating there without an explicit
        region raises SmoothnessExceeded.
        """
        self._check_orders(s, r)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        scalar = x.ndim == 0 and y.ndim == 0
        for arr, name in ((x, "x"), (y, "y")):
            if ((arr < self.a) | (arr > self.b)).any():
                raise OutOfDomain(
                    f"{name} outside [{self.a:g}, {self.b:g}]"
                )
        x, y = np.broadcast_arrays(x, y)
        lt, rt = self._tables_f64(s, r)
        if region is None:
            if s + r > 2 * self.m - 2 and np.any(x == y):
                raise SmoothnessExceeded(
                    f"order ({s},{r}) is discontinuous across x = y; "
                    "pass region='left' or 'right' to evaluate one piece"
                )
            out = np.where(
                x <= y, npoly.polyval2d(x, y, lt), npoly.polyval2d(x, y, rt)
            )
        elif region == "left":
            out = npoly.polyval2d(x, y, lt)
        elif region == "right":
            out = npoly.polyval2d(x, y, rt)
        else:
            raise ValueError(f"unknown region {region!r}")
        return float(out) if scalar else np.asarray(out, dtype=float)

    def __call__(self, x, y):
        return self.eval(0, 0, x, y)

    def _eval_obj(self, s, r, x, y, digits):
        """Extended-precision evaluation on object arrays (internal)."""
        self._check_orders(s, r)
        lt, rt = self._tables_obj(s, r, digits)
        with _mpf.workprec(digits):
            lv = _mpf.polyval2d_obj(x, y, lt)
            rv = _mpf.polyval2d_obj(x, y, rt)
            out = np.where(np.less_equal(x, y), lv, rv)
        return out

    def diag_scale(self):
        """max K(x,x) over a diagonal sample; scale for degeneracy guards."""
        if self._diag_scale is None:
            xs = np.linspace(self.a, self.b, 129)
            lt, _ = self._tables_f64(0, 0)
            self._diag_scale = float(np.max(np.abs(npoly.polyval2d(xs, xs, lt))))
        return self._diag_scale

    # -- deflation ----------------------------------------------------------

    def deflate(self, functional):
        """Impose the homogeneous constraint u^(order)(point) = 0.

        Returns a new kernel for the constrained subspace.  Raises
        DegenerateConstraint when the functional (nearly) annihilates the
        current kernel, which happens in particular when the same
        constraint is imposed twice.
        """
        p, order = functional
        p = float(p)
        order = int(order)
        self._check_orders(order, 0)
        af, bf = Fraction(self.a), Fraction(self.b)
        pf = Fraction(p)
        if pf != af and pf != bf:
            raise ValueError(
                "constraint points must be interval endpoints; an interior "
                "point would break the two-piece form of the kernel"
            )
        # As a function of x the functional is applied to the second
        # argument, fixed at p.  With p at the left end the evaluation
        # region x >= p is the right piece; at the right end it is the left
        # piece.  Either way a single polynomial represents phi on [a, b].
        table = self.right if (pf - af) <= (bf - pf) else self.left
        n = 2 * self.m
        phi = [
            sum(
                table[i][t] * _falling(t, order) * pf ** (t - order)
                for t in range(order, n)
            )
            for i in range(n)
        ]
        d = sum(
            phi[i] * _falling(i, order) * pf ** (i - order)
            for i in range(order, n)
        )
        if abs(float(d)) <= DEFLATION_RTOL * self.diag_scale():
            raise DegenerateConstraint(
                f"functional u^({order})({p:g}) has norm^2 {float(d):.3e} "
                f"against kernel scale {self.diag_scale():.3e}"
            )
        new_left = [
            [self.left[i][j] - phi[i] * phi[j] / d for j in range(n)]
            for i in range(n)
        ]
        new_right = [
            [self.right[i][j] - phi[i] * phi[j] / d for j in range(n)]
            for i in range(n)
        ]
        return Kernel1D(
            self.m,
            (self.a, self.b),
            self.constraints + (BoundaryFunctional(p, order),),
            new_left,
            new_right,
        )

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        """Plain-JSON form; coefficients rounded to float64 (17 digits)."""
        return {
            "m": self.m,
            "interval": [self.a, self.b],
            "constraints": [[c.point, c.order] for c in self.constraints],
            "left_coeffs": [[float(v) for v in row] for row in self.left],
            "right_coeffs": [[float(v) for v in row] for row in self.right],
        }

    @classmethod
    def from_dict(cls, d):
        left = [[Fraction(v) for v in row] for row in d["left_coeffs"]]
        right = [[Fraction(v) for v in row] for row in d["right_coeffs"]]
        return cls(d["m"], d["interval"], d["constraints"], left, right)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def build_base_kernel(m, interval):
    """Reproducing kernel of the unconstrained order-m space on `interval`."""
    m = int(m)
    if m < 1:
        raise ValueError("smoothness order m must be at least 1")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"empty interval ({a:g}, {b:g})")
    left, right = _build_base_tables(m, Fraction(a), Fraction(b))
    return Kernel1D(m, (a, b), (), left, right)


def kernel(m, interval, constraints=()):
    """Base kernel deflated by each constraint in turn."""
    k = build_base_kernel(m, interval)
    for c in constraints:
        k = k.deflate(c)
    return k


def deflate(k, functional):
    return k.deflate(functional)


def loads(text):
    """Rebuild a kernel from its JSON dump."""
    return Kernel1D.loads(text)


def eval(k, s, r, x, y, region=None):  # noqa: A001 - mirrors the kernel op name
    return k.eval(s, r, x, y, region=region)


def verify_reproducing(k, coeffs, y):
    """Residual |(f, K(., y)) - f(y)| of the reproducing identity.

    `coeffs` are polynomial coefficients (low order first, degree at most
    2m-1).  For a constrained kernel the identity only holds for f
    satisfying the constraints; the caller is responsible for that.  The
    integral term is done with Gauss-Legendre rules that are exact for the
    polynomial integrand, split at the knot, so the residual reflects only
    table accuracy and float rounding.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) > 2 * k.m:
        raise ValueError(f"need a polynomial of degree <= {2 * k.m - 1}")
    y = float(y)
    if not k.a <= y <= k.b:
        raise OutOfDomain(f"y={y:g} outside [{k.a:g}, {k.b:g}]")

    # Endpoint part of the inner product.
    total = 0.0
    dcf = coeffs
    for i in range(k.m):
        total += npoly.polyval(k.a, dcf) * k.eval(i, 0, k.a, y, region="left")
        dcf = npoly.polyder(dcf)
    # dcf now holds the m-th derivative of f.
    nodes, weights = np.polynomial.legendre.leggauss(2 * k.m)
    for lo, hi, region in ((k.a, y, "left"), (y, k.b, "right")):
        if hi - lo <= 0.0:
            continue
        half = 0.5 * (hi - lo)
        xs = lo + half * (nodes + 1.0)
        vals = npoly.polyval(xs, dcf) * k.eval(k.m, 0, xs, np.full_like(xs, y), region=region)
        total += half * float(weights @ vals)
    return abs(total - npoly.polyval(y, coeffs))
