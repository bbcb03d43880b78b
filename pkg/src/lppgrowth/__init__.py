"""Last-passage percolation, corner growth and their Tracy-Widom edge statistics."""

__version__ = "0.1.0"

from ._validation import DomainError, ModelParams  # noqa: E402
from .airy import AiryValue, airy  # noqa: E402
from .asymptotics import (  # noqa: E402
    EdgeConstants,
    edge_constants,
    equilibrium_density,
    exp_constants,
    omega,
    rate_J,
    sigma,
    tasep_fluct_params,
)
from .ensemble import CdfValue, exact_cdf_laguerre, exact_cdf_meixner, meixner_cdf_table  # noqa: E402
from .estimators import EdgeRescaler  # noqa: E402
from .growth import last_passage, monte_carlo_batch, sample_weights  # noqa: E402
from .tracy_widom import tw_cdf_fredholm, tw_cdf_painleve  # noqa: E402

__all__ = [
    "AiryValue",
    "CdfValue",
    "DomainError",
    "EdgeConstants",
    "EdgeRescaler",
    "ModelParams",
    "airy",
    "edge_constants",
    "equilibrium_density",
    "exact_cdf_laguerre",
    "exact_cdf_meixner",
    "exp_constants",
    "last_passage",
    "meixner_cdf_table",
    "monte_carlo_batch",
    "omega",
    "rate_J",
    "sample_weights",
    "sigma",
    "tasep_fluct_params",
    "tw_cdf_fredholm",
    "tw_cdf_painleve",
]
