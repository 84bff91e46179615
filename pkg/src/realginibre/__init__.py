"""Exact and simulated statistics of the real eigenvalues of real Ginibre matrices."""

from .special_fn import LogScaledReal, log_gamma, erfc, cosh_truncated
from .skew_basis import (
    AccuracyError,
    SkewEntry,
    skew_poly_eval,
    a_inner_quadrature,
    b_inner_quadrature,
    f_entry,
    e_term,
    fit_error_bound_constant,
)
from .cumulant_engine import (
    CapacityError,
    EvenPolynomial,
    MNuMatrix,
    CumulantReport,
    m_nu_matrix,
    cumulant,
    mean_nr_exact,
    variance_nr_exact,
    covariance_monomials,
    mgf_determinant,
    trace_sum_z,
)
from .asymptotics import (
    LimitCheck,
    mean_nr_asymptotic,
    sigma2_limit,
    s_pq_sum,
    s_pq_limit,
    scaling_exponent,
    covariance_limit,
)
from .appendix_linalg import (
    CyclicTridiagonal,
    SingularMatrixError,
    build_cyclic,
    det_cyclic,
    invert_cyclic,
    gaussian_moment,
)
from .monte_carlo import (
    EnsembleSummary,
    TrialResult,
    sample_ginibre,
    real_spectrum,
    run_ensemble,
    clt_test,
)

__version__ = "0.1.0"
