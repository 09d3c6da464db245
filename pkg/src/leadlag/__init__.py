"""Lead-lag analysis of asynchronous tick data.

Estimates complex-valued correlation matrices of unevenly spaced price
series without any interpolation or resampling, then reads lead-lag
structure out of the correlation phases: Hermitian eigenmodes, oriented
spanning trees and planar graphs, and sector-level phase summaries.
"""

from ._version import __version__
from .errors import InputError, LeadLagError, NumericalError
from .estimator import (
    ComplexCorrelationMatrix,
    EstimatorConfig,
    FourierCoefficients,
    coefficients_for_series,
    complex_covariance_matrix,
    covariance_to_correlation,
    estimate_correlation,
    fourier_coeffs,
    magnitude_phase,
    real_covariance,
)
from .graphs import (
    Edge,
    FilteredGraph,
    classify_phase_bins,
    degree_report,
    magnitude_phase_scatter,
    max_spanning_tree,
    orient_edges,
    planar_certificate,
    pmfg,
)
from .ingest import (
    ColumnSchema,
    ParseReport,
    SectorTable,
    filter_active,
    load_sector_table,
    parse_quotes,
)
from .kernels import (active_backend, available_backends,
                      harmonic_jump_sums)
from .series import (
    QuoteEvent,
    TickSeries,
    build_tick_series,
    parse_sessions,
    rescale_to_circle,
    reverse_time,
    splice_sessions,
)
from .spectral import (
    ComponentTag,
    EigenDecomposition,
    classify_components,
    eig_hermitian,
    principal_components,
    remove_market_mode,
    residual_correlation,
)
from .synth import (
    AssetSpec,
    MarketScenario,
    generate,
    one_factor_scenario,
    sector_block_scenario,
)

__all__ = [
    "__version__",
    "AssetSpec",
    "ColumnSchema",
    "ComplexCorrelationMatrix",
    "ComponentTag",
    "Edge",
    "EigenDecomposition",
    "EstimatorConfig",
    "FilteredGraph",
    "FourierCoefficients",
    "InputError",
    "LeadLagError",
    "MarketScenario",
    "NumericalError",
    "ParseReport",
    "QuoteEvent",
    "SectorTable",
    "TickSeries",
    "active_backend",
    "available_backends",
    "build_tick_series",
    "classify_components",
    "classify_phase_bins",
    "coefficients_for_series",
    "complex_covariance_matrix",
    "covariance_to_correlation",
    "degree_report",
    "eig_hermitian",
    "estimate_correlation",
    "filter_active",
    "fourier_coeffs",
    "generate",
    "harmonic_jump_sums",
    "load_sector_table",
    "magnitude_phase",
    "magnitude_phase_scatter",
    "max_spanning_tree",
    "one_factor_scenario",
    "orient_edges",
    "parse_quotes",
    "parse_sessions",
    "planar_certificate",
    "pmfg",
    "principal_components",
    "real_covariance",
    "remove_market_mode",
    "rescale_to_circle",
    "residual_correlation",
    "reverse_time",
    "sector_block_scenario",
    "splice_sessions",
]
