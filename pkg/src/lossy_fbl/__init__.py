"""Finite-blocklength bounds for fixed-length lossy source coding.

Converse and achievability bounds on the minimal code size M*(n, d, eps)
for binary, discrete, binary-erased and Gaussian memoryless sources,
together with d-tilted information, rate dispersion, Gaussian
approximations and small-scale oracles.  Quantities are in nats unless a
name says bits.
"""

from .errors import (BudgetExceededError, ConvergenceError, DomainError, LossyFBLError,
                     MonotonicityError)
from .families import BoundSpec, bound_families, distortion_bound, gaussian_approx, get_bound
from .solver import BoundValue, DistortionBound, distortion_from_bound, rate_from_eps_bound
from .sources import (BES, BMS, DMS, GMS, d_range, dispersion, distortion_dispersion,
                      distortion_rate, lambda_star, rate_distortion, rd_point,
                      required_blocklength, tilted_info_dist)

__version__ = "0.1.0"

__all__ = [
    "BES", "BMS", "DMS", "GMS", "BoundSpec", "BoundValue", "BudgetExceededError",
    "ConvergenceError", "DistortionBound", "DomainError", "LossyFBLError", "MonotonicityError",
    "bound_families", "d_range", "dispersion", "distortion_bound", "distortion_dispersion",
    "distortion_from_bound", "distortion_rate", "gaussian_approx", "get_bound", "lambda_star",
    "rate_distortion", "rate_from_eps_bound", "rd_point", "required_blocklength",
    "tilted_info_dist",
]
