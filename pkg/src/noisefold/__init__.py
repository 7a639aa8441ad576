"""Noise folding in compressed sensing.

Signal noise added before measurement, ``y = A (x + z) + w``, is equivalent
after whitening to a standard model ``y' = B x + u`` with white noise of
variance ``sigma^2 + (p/n) sigma0^2``. This package builds that whitened
system, certifies how much whitening can move the RIP constants and the
coherence, and measures the effect on greedy sparse recovery.
"""

from .analysis import (
    PropositionVerdict,
    RipReport,
    coherence,
    estimate_noise_covariance,
    rip_constants,
    verify_prop1,
    verify_prop2,
)
from .ensembles import (
    EnsembleSpec,
    gen_bernoulli,
    gen_concat_orthobases,
    gen_gaussian,
    gen_sphere_columns,
)
from .errors import ConfigError, ConvergenceError, NoiseFoldError, PreconditionError
from .harness import (
    ExperimentConfig,
    TrialRecord,
    emit_csv,
    parse_config,
    run_equivalent_standard,
    run_folding_sweep,
    run_verification_suite,
)
from .linalg import (
    SymEigen,
    inv_sqrt_sym,
    least_squares,
    singular_values,
    spectral_norm,
    sym_eigen,
)
from .model import (
    MeasurementDraw,
    NoiseSpec,
    SparseSignal,
    effective_noise_covariance,
    gen_sparse_signal,
    measure_prenoise,
    measure_standard,
)
from .recovery import RecoveryResult, omp, squared_error, threshold_recover
from .rng import RandomStream, derive_seed
from .whitening import (
    FoldingFactor,
    WhitenedSystem,
    apply_whitening,
    compute_eta,
    eta1,
    eta2,
    eta3,
    eta_gaussian_bound,
    folding_gamma,
    whiten,
)

__version__ = "0.1.0"
