"""Moment-anchored reparameterisation of Gaussian, Poisson and exponential mixtures."""

from ._core import (
    NumericalError,
    ValidationError,
    build_basis,
    fit,
    from_angular,
    gelman_rubin,
    loglik,
    marginal_one_obs,
    mixture_moments,
    n1_divergence_probe,
    pair_closed,
    pair_quad,
    sample_prior,
    to_angular,
    version,
)

__all__ = [
    "NumericalError",
    "ValidationError",
    "build_basis",
    "fit",
    "from_angular",
    "gelman_rubin",
    "loglik",
    "marginal_one_obs",
    "mixture_moments",
    "n1_divergence_probe",
    "pair_closed",
    "pair_quad",
    "sample_prior",
    "to_angular",
    "version",
]

__version__ = version()
