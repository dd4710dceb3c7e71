"""Dense direct solves, eigenvalues, and condition estimation.

Thin wrappers over scipy/LAPACK with the failure behavior the rest of the
package relies on: an effectively-zero pivot raises SingularMatrix instead
of returning garbage, and eigenvalue nonconvergence raises
ConvergenceFailure.  All routines take and return float64 arrays.
"""

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, SingularMatrix

# A pivot at or below this fraction of its column's magnitude is treated as
# an exact zero.
PIVOT_RTOL = 1e-14

# Advisory iteration budget for eigenvalue sweeps, as a multiple of the
# matrix dimension.  The LAPACK driver used here (geev) does not expose its
# internal sweep limit, so the knob is recorded for interface compatibility
# and nonconvergence is surfaced as ConvergenceFailure.
DEFAULT_EIG_BUDGET_PER_DIM = 100


def _as_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def lu_factor(a):
    """LU-factor a square matrix, guarding against singular pivots.

    Returns the (lu, piv) pair understood by :func:`lu_solve_factored`.
    Raises SingularMatrix when any U diagonal entry is at or below
    PIVOT_RTOL times the largest magnitude of its column in A.
    """
    a = _as_square(a)
    colmax = np.abs(a).max(axis=0)
    lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    d = np.abs(np.diag(lu))
    bad = d <= PIVOT_RTOL * np.maximum(colmax, np.finfo(float).tiny)
    if bad.any():
        k = int(np.argmax(bad))
        raise SingularMatrix(
            f"pivot {d[k]:.3e} in column {k} below "
            f"{PIVOT_RTOL:g} * column max {colmax[k]:.3e}"
        )
    return lu, piv


def lu_solve_factored(factored, b):
    """Solve with a factorization from :func:`lu_factor`."""
    return scipy.linalg.lu_solve(factored, np.asarray(b, dtype=float))


def lu_solve(a, b):
    """Solve A x = b (b may hold multiple right-hand sides as columns)."""
    a = _as_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"right-hand side length {b.shape[0]} does not match order {a.shape[0]}"
        )
    return lu_solve_factored(lu_factor(a), b)


def eigenvalues(a, budget=None):
    """All eigenvalues of a real square matrix, as a complex array.

    `budget` is an advisory iteration cap (default 100 per dimension kept
    for interface stability); the LAPACK backend manages its own sweeps and
    a failure to converge raises ConvergenceFailure.
    """
    a = _as_square(a)
    if budget is None:
        budget = DEFAULT_EIG_BUDGET_PER_DIM * a.shape[0]
    if budget <= 0:
        raise ValueError("iteration budget must be positive")
    try:
        w = scipy.linalg.eigvals(a, check_finite=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger
        raise ConvergenceFailure(str(exc)) from exc
    return np.asarray(w, dtype=complex)


def condition_estimate(a):
    """Estimate of the 1-norm condition number ||A||_1 ||A^-1||_1.

    Uses the LAPACK reciprocal-condition estimator on the LU factors (no
    explicit inverse is formed), accurate to within a small factor rather
    than to full precision.  Always at least 1.  Raises SingularMatrix for
    an exactly singular input.
    """
    a = _as_square(a)
    anorm = np.abs(a).sum(axis=0).max()
    if anorm == 0.0:
        raise SingularMatrix("zero matrix has no condition number")
    lu, piv = lu_factor(a)
    gecon = scipy.linalg.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0:  # pragma: no cover - gecon only fails on bad arguments
        raise ConvergenceFailure(f"gecon returned info={info}")
    if rcond == 0.0:
        raise SingularMatrix("condition estimator reports exact singularity")
    return max(1.0, 1.0 / rcond)
