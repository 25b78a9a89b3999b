"""Numerics for small-noise Wishart (matrix squared-Bessel) diffusions.

The package has five layers:

- :mod:`~wishart_ldp.linalg` — symmetric-cone utilities (PSD checks,
  matrix square roots, a symmetric Sylvester solver);
- :mod:`~wishart_ldp.sde` — positivity-preserving Euler schemes for the
  matrix process, its trace, and its eigenvalue system, plus batched
  endpoint/tube samplers with replica-stable randomness;
- :mod:`~wishart_ldp.rates` — action functionals on paths (matrix,
  eigenvalue-family, largest-eigenvalue) and endpoint rate functions;
- :mod:`~wishart_ldp.riccati` — backward matrix Riccati solves and the
  exponential-functional transform they compute;
- :mod:`~wishart_ldp.experiments` / :mod:`~wishart_ldp.cli` — the Monte
  Carlo verification harness and its command-line front end.
"""

from .errors import (
    BadInitialConditionError,
    BlowUpError,
    DegeneratePathError,
    DomainError,
    IndefiniteInputError,
    InputFormatError,
    SingularPencilError,
    WishartLdpError,
)
from .experiments import (
    ExperimentSpec,
    LdpScanResult,
    default_theta_battery,
    ks_distance,
    run_experiment,
    wilson_interval,
)
from .linalg import (
    ConeCheck,
    Definiteness,
    MatrixNorms,
    classify_spd,
    matrix_norms,
    solve_sylvester,
    sqrt_spd,
    sym,
)
from .rates import (
    ContactDiagnostic,
    ContactVerdict,
    RateReport,
    TiltPath,
    compute_tilt_path,
    contact_measure_diagnostic,
    dual_functional,
    eigenvalue_rate,
    endpoint_rate,
    lower_envelope,
    max_eigenvalue_endpoint_rate,
    max_eigenvalue_path_rate,
    optimal_endpoint_path,
    path_rate,
)
from .riccati import (
    MatrixMeasure,
    RiccatiSolution,
    endpoint_laplace_closed_form,
    endpoint_rate_legendre,
    laplace_transform,
    rate_via_riccati,
    riccati_residual,
    solve_riccati,
)
from .sde import (
    MatrixPath,
    ScalarPath,
    SimConfig,
    matrix_interpolator,
    replica_rng,
    sample_besq_endpoints,
    sample_eigenvalue_endpoints,
    sample_wishart_endpoints,
    simulate_eigenvalues,
    simulate_trace_besq,
    simulate_wishart,
    tilted_flow,
    tube_hit_count,
)

__version__ = "0.1.0"

__all__ = [
    "BadInitialConditionError",
    "BlowUpError",
    "ConeCheck",
    "ContactDiagnostic",
    "ContactVerdict",
    "DegeneratePathError",
    "Definiteness",
    "DomainError",
    "ExperimentSpec",
    "IndefiniteInputError",
    "InputFormatError",
    "LdpScanResult",
    "MatrixMeasure",
    "MatrixNorms",
    "MatrixPath",
    "RateReport",
    "RiccatiSolution",
    "ScalarPath",
    "SimConfig",
    "SingularPencilError",
    "TiltPath",
    "WishartLdpError",
    "classify_spd",
    "compute_tilt_path",
    "contact_measure_diagnostic",
    "default_theta_battery",
    "dual_functional",
    "eigenvalue_rate",
    "endpoint_laplace_closed_form",
    "endpoint_rate",
    "endpoint_rate_legendre",
    "ks_distance",
    "laplace_transform",
    "lower_envelope",
    "matrix_interpolator",
    "matrix_norms",
    "max_eigenvalue_endpoint_rate",
    "max_eigenvalue_path_rate",
    "optimal_endpoint_path",
    "path_rate",
    "rate_via_riccati",
    "replica_rng",
    "riccati_residual",
    "run_experiment",
    "sample_besq_endpoints",
    "sample_eigenvalue_endpoints",
    "sample_wishart_endpoints",
    "simulate_eigenvalues",
    "simulate_trace_besq",
    "simulate_wishart",
    "solve_riccati",
    "solve_sylvester",
    "sqrt_spd",
    "sym",
    "tilted_flow",
    "tube_hit_count",
    "wilson_interval",
    "__version__",
]
