"""Asian option pricing on a binomial lattice with permanent linear price impact."""

from .benchmark import (
    Averaging,
    KvInputs,
    KvRow,
    default_kv_inputs,
    kv_comparison_table,
    kv_geometric_price,
    std_normal_cdf,
)
from .errors import (
    ArbitrageViolation,
    CapExceeded,
    ConfigError,
    CountOverflow,
    DegenerateLattice,
    NonPositiveInputs,
    PricingError,
    ZeroImpact,
)
from .impact import (
    AdjustedModel,
    ImpactSpec,
    MarketSpec,
    NoArbRegion,
    RateConvention,
    ReplicationResult,
    adjust_factors,
    martingale_check,
    no_arb_region,
    replicate_node,
)
from .paths import (
    AreaCountTable,
    PathStats,
    PathWord,
    area_count_table,
    enumerate_paths,
    path_prices,
    path_probability,
    path_stats,
)
from .pricing import (
    ArithmeticBounds,
    GeometricPriceResult,
    Method,
    bound_upper_global,
    bound_upper_pathwise,
    price_arithmetic_exact_enum,
    price_geometric,
    price_geometric_enum,
    price_geometric_recombined,
    rho_path,
    rho_star,
    two_sided_bounds,
)

__version__ = "0.1.0"
