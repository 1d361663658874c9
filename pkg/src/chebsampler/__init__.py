"""Sampling from black-box densities by inverse transform on Chebyshev approximants."""

from .chebyshev import ChebSeries, build_approximant, clenshaw_eval, coeffs_from_values
from .density import DensityFn, Domain2D, Interval
from .errors import (
    ConstructionError,
    DegenerateConditionalError,
    ExpressionError,
    ExprSyntaxError,
    HatViolationError,
    NegativeDensityError,
    NonFiniteError,
    RankOverflowError,
    RunawayError,
    SamplingError,
    UnknownIdentifierError,
    UnresolvedError,
    ZeroMassError,
    ZeroSliceError,
)
from .estimators import ChebyshevSampler, LowRankSampler, RejectionSampler
from .expr import compile_expr, parse
from .lowrank import LowRank2D, aca_approximate
from .rejection import RejectionStats, rejection_sample_1d, rejection_sample_2d
from .rng import SampleBatch, UniformSource
from .sampler1d import Cdf1D, cdf_from_density, invert_cdf, sample_1d
from .sampler2d import Sampler2DSession, build_session, sample_2d

__version__ = "0.1.0"

__all__ = [
    "Cdf1D", "ChebSeries", "ChebyshevSampler", "ConstructionError", "DegenerateConditionalError",
    "DensityFn", "Domain2D", "ExprSyntaxError", "ExpressionError", "HatViolationError", "Interval",
    "LowRank2D", "LowRankSampler", "NegativeDensityError", "NonFiniteError", "RankOverflowError",
    "RejectionSampler", "RejectionStats", "RunawayError", "SampleBatch", "Sampler2DSession",
    "SamplingError", "UniformSource", "UnknownIdentifierError", "UnresolvedError", "ZeroMassError",
    "ZeroSliceError", "aca_approximate", "build_approximant", "build_session", "cdf_from_density",
    "clenshaw_eval", "coeffs_from_values", "compile_expr", "invert_cdf", "parse",
    "rejection_sample_1d", "rejection_sample_2d", "sample_1d", "sample_2d",
]
