from .bernoulli import (
    bernoulli_bands,
    binom_cdf,
    binom_pmf,
    flow_quantiles,
    fn_j,
    min_two_binomials_quantiles,
)
from .diagnostics import (
    CutEstimate,
    DetachingReport,
    detect_detaching,
    extreme_cuts,
    overlap_test,
    peak_density,
    skewness,
)
from .mfd import (
    AGGREGATE_COLUMNS,
    SAMPLE_COLUMNS,
    MfdEstimate,
    default_densities,
    estimate_mfd,
)

__all__ = [
    "AGGREGATE_COLUMNS",
    "SAMPLE_COLUMNS",
    "CutEstimate",
    "DetachingReport",
    "MfdEstimate",
    "bernoulli_bands",
    "binom_cdf",
    "binom_pmf",
    "default_densities",
    "detect_detaching",
    "estimate_mfd",
    "extreme_cuts",
    "flow_quantiles",
    "fn_j",
    "min_two_binomials_quantiles",
    "overlap_test",
    "peak_density",
    "skewness",
]
