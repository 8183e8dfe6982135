"""omegak: evaluation and numerical certification of the modified-Bessel
derivative family omega_n^(m) and the exponential family g_n^(m), with
BDF1 convolution-quadrature kernel tables."""

__version__ = "0.1.0"

from .expcore import (  # noqa: F401
    EvalResult,
    FamilyIndex,
    gn_deriv_closed,
    gn_deriv_delta,
    gn_deriv_recursive,
    gn_eval,
)

from .bessel import (  # noqa: F401
    OmegaQuery,
    gn_normalization_integral,
    omega_tilde,
    omega_tilde_deriv,
    omega_tilde_oracle,
)
