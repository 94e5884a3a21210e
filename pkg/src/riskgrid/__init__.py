"""Exact law-invariant coherent risk measures on the uniform n-point space."""
from .avar import (
    Interval,
    LevelError,
    avar,
    avar_closed_form,
    avar_dual,
    avar_grid,
    avar_quantile_integral,
    avar_ru,
    interpolation_weight,
    value_at_risk,
)
from .axioms import AuditConfig, AuditReport, RiskFunctional, gen_comonotone_pair
from .core import (
    DimensionError,
    OrderStatistics,
    OutcomeVector,
    cdf,
    format_rational,
    integrated_cdf,
    integrated_cdf_curve,
    order_statistics,
    to_rational,
)
from .dominance import (
    BirkhoffDecomposition,
    DominanceVerdict,
    Method,
    Relation,
    birkhoff_decompose,
    hlp_transfer_matrix,
    is_comonotone,
    ssd_compare,
)
from .kusuoka import (
    Comonotonicity,
    KusuokaFamily,
    KusuokaMeasure,
    NaturalRiskStatistic,
    SpectralWeights,
    classify_comonotone,
    eval_family,
    eval_kusuoka,
    eval_nrs,
    eval_spectral,
    kusuoka_to_spectral,
    spectral_to_kusuoka,
)

__version__ = "0.1.0"
