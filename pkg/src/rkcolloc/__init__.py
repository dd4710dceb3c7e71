"""Collocation with piecewise-polynomial reproducing kernels.

Closed-form kernels for spaces of m-times differentiable functions on an
interval, boundary-constrained subspaces by rank-one deflation, cardinal
bases through modified Gram-Schmidt on the Gram matrix, differentiation
matrices, a pointwise power-function error estimate, and explicit-Euler
time stepping for evolution problems on tensor-product boxes.
"""

from .cardinal import GramMatrix, OrthoFactor, gram, mgs_factor
from .diffmat import (
    DiffMatrix,
    apply_to_interpolant,
    build_diffmat,
    error_bound,
    iteration_spectrum,
    power_error,
)
from .errors import (
    ConvergenceFailure,
    DegenerateConstraint,
    DegenerateNode,
    Divergence,
    IllConditionedConstruction,
    LossOfPositivity,
    OutOfDomain,
    RKCollocError,
    SingularMatrix,
    SmoothnessExceeded,
    ZeroReference,
)
from .kernel1d import (
    BoundaryFunctional,
    Kernel1D,
    build_base_kernel,
    deflate,
    kernel,
    verify_reproducing,
)
from .problems import (
    BenchmarkCase,
    ErrorReport,
    figure_lattice,
    get_case,
    iteration_matrix_spectrum,
    list_cases,
    metrics,
    run_case,
    run_table,
    solve_case,
)
from .solver import (
    ExtensionFunction,
    LinearBVP,
    SemidiscreteSystem,
    euler_integrate,
    make_extension,
    polynomial_extension,
    solve_linear_bvp,
    zero_extension,
)
from .tensor import (
    LinearOperator,
    TensorGrid,
    TensorKernel,
    make_interior_grid,
    tensor_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkCase",
    "BoundaryFunctional",
    "ConvergenceFailure",
    "DegenerateConstraint",
    "DegenerateNode",
    "DiffMatrix",
    "Divergence",
    "ErrorReport",
    "ExtensionFunction",
    "GramMatrix",
    "IllConditionedConstruction",
    "Kernel1D",
    "LinearBVP",
    "LinearOperator",
    "LossOfPositivity",
    "OrthoFactor",
    "OutOfDomain",
    "RKCollocError",
    "SemidiscreteSystem",
    "SingularMatrix",
    "SmoothnessExceeded",
    "TensorGrid",
    "TensorKernel",
    "ZeroReference",
    "apply_to_interpolant",
    "build_base_kernel",
    "build_diffmat",
    "deflate",
    "error_bound",
    "euler_integrate",
    "figure_lattice",
    "get_case",
    "gram",
    "iteration_matrix_spectrum",
    "iteration_spectrum",
    "kernel",
    "list_cases",
    "make_extension",
    "make_interior_grid",
    "metrics",
    "mgs_factor",
    "polynomial_extension",
    "power_error",
    "run_case",
    "run_table",
    "solve_case",
    "solve_linear_bvp",
    "tensor_kernel",
    "verify_reproducing",
    "zero_extension",
]
