"""Multivariate Cauchy families on R^d and S^d under Moebius transformations."""

from .densities import (
    EuclideanCauchy,
    KentTypeCauchy,
    MarginalCauchyBeta,
    SphericalCauchy,
    kent_d2_densities,
    kent_mode_antimode,
    marginal_pushforward_param,
    pdf_euclid,
    pdf_kent,
    pdf_marginal,
    pdf_sphere,
    pushforward_params,
)
from .errors import (
    DensityUndefinedError,
    DomainError,
    InvalidParameterError,
    NonConvergenceError,
    SingularInputError,
)
from .estimation import (
    ContourCircle,
    ContourLine,
    Estimate,
    MleConfig,
    PointMass,
    SphereEstimate,
    likelihood_residual,
    loglik_euclid,
    loglik_sphere,
    mle_closed,
    mle_numeric,
    mle_sphere,
    profile_sigma,
    stationary_diagnostics,
)
from .geometry import (
    INFINITY,
    ExtendedComplexParam,
    Rotation,
    ext_param_transform,
    invert_point,
    random_rotation,
    reflect,
)
from .moebius import (
    MoebiusChain,
    MoebiusMap,
    SphereMoebius,
    chain_compose,
    inv_stereographic,
    inv_stereographic_ext,
    moebius_apply,
    moebius_apply_param,
    sphere_moebius_apply,
    sphere_moebius_compose,
    sphere_moebius_invert,
    stereographic,
)
from .moments import (
    hyp2f1,
    marginal_mean,
    marginal_second_moment,
    mom_estimate,
    sphere_mean_scatter,
)
from .oracle import integrate, jacobian_det_fd, ks_statistic, numeric_argmax
from .sampling import (
    RngStream,
    sample_euclid_cauchy,
    sample_kent,
    sample_marginal,
    sample_sphere_cauchy,
    sample_uniform_sphere,
)

__version__ = "0.1.0"
