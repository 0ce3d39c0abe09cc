"""monocert: certified numerics for a trigamma-corrected Stirling remainder.

Modules:

* ``special``    -- ln Gamma, digamma, polygamma (orders <= 8), Binet remainder
* ``functions``  -- f_a, F_a, g_a, their derivatives, Laplace kernels, quadratures
* ``cmverify``   -- complete-monotonicity sweeps, kernel signs, coefficient claims
* ``bounds``     -- Gamma and gamma-ratio enclosures, lemma checks, counterexamples
* ``report`` / ``cli`` -- report documents and the ``monocert`` command
"""

from .bounds import (
    BoundPair,
    Counterexample,
    CounterexampleSearch,
    asymptotic_limit_checks,
    gamma_bound_counterexample,
    gamma_bounds,
    gamma_ratio_bounds,
    lemma_inequalities_check,
    relative_width,
    width_decay_ratio,
)
from .cmverify import (
    DEAD_BAND,
    ClaimResult,
    CMReport,
    GridSpec,
    Verdict,
    classify_fa,
    kernel_sign_sweep,
    logcm_difference_check,
    remark_criterion_check,
    series_vs_direct,
    threshold_curve_report,
    verify_series_claims,
)
from .errors import ConvergenceError, DomainError, MonocertError, UnsupportedOrderError
from .functions import (
    F_a,
    binet_theta,
    difference_closed_form,
    f_a,
    f_a_derivative,
    g_a,
    phi1,
    phi2,
    phi_kernel,
    phi_threshold,
    theta_representation_check,
)
from .quadrature import QuadratureConfig, QuadratureResult
from .special import digamma, ln_gamma, polygamma, stirling_remainder, trigamma

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
