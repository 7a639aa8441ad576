"""Numerical tolerances shared by the library and its tests."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # input checks
    symmetry: float = 1e-8
    # Jacobi stops once off-diagonal Frobenius mass <= jacobi_offdiag * ||M||_F
    jacobi_offdiag: float = 1e-12
    jacobi_max_sweeps: int = 100
    # negative Gram eigenvalues above -clamp are rounding and get set to 0
    eig_clamp: float = 1e-12
    # smallest admissible eigenvalue for inv_sqrt_sym
    pos_def: float = 1e-12
    # smallest / largest singular value for least squares
    rank: float = 1e-10
    zero_column: float = 1e-14
    # OMP early stop on ||r|| <= omp_residual * ||y||
    omp_residual: float = 1e-10
    # relative slack on every theorem inequality
    theorem_slack: float = 1e-10
    # hypothesis thresholds on eta
    prop1_eta: float = 0.5
    prop2_eta: float = 0.75
    # default cap on exhaustive subset enumeration
    subset_cap: int = 2_000_000
    # per-subset sandwich is on by default up to this many subsets
    sandwich_default_max: int = 1_000_000


TOL = Tolerances()
