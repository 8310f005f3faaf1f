"""Secrecy outage analysis and relay placement for two-hop wiretap networks."""

__version__ = "0.1.0"

from .errors import (ConstraintViolationError, DegenerateLinkError, DomainError,  # noqa: E402
                     RelaySecError, UnsupportedValueError)
from .geometry import (Distances, FourNodeLayout, Point2D, PowerPair, Strategy,  # noqa: E402
                       distances_from_layout, gain_means)
from .closedform import (asymptotic_outages, df_optimal_power_ratio,  # noqa: E402
                         df_outage_general, df_outage_optimal, df_rf_identity_residual,
                         direct_outage, rf_outage)
from .montecarlo import (McConfig, McEstimate, mc_cellular_direct, mc_cellular_relay,  # noqa: E402
                         mc_df_outage, mc_direct_outage, mc_rf_outage)
from .cellular import (CellScenario, cell_edge_constants, direct_outage_bounds,  # noqa: E402
                       direct_outage_single_eve, relay_outage_at_A, sweep_direct_outage)
from .optimizer import (OptimizationResult, OptimizerConfig, SearchRegion,  # noqa: E402
                        optimize_cellular_relay, optimize_relay_fournode,
                        sweep_eavesdropper_distance)
