"""Age-of-information and delay analysis for store-and-forward relay chains.

Closed-form predictions for homogeneous chains and for a two-node network
with split ground traffic, an exact-trajectory FCFS tandem simulator to
validate them, and a sweep/optimisation CLI that writes machine-readable CSV.
"""

from .chain import (
    ChainParams,
    average_aoi,
    conditional_wait,
    ewy_bound,
    mm1_average_aoi,
    network_delay,
    sojourn_pdf,
)
from .optimize import OptimizeResult, minimize_aoi_chain, minimize_aoi_split
from .sim import (
    BurkeReport,
    EwyEstimate,
    NetworkSpec,
    NodeSpec,
    NoDataError,
    PacketRecord,
    SimResult,
    UnstableNetworkError,
    estimate_ewy,
    run,
    validate_burke,
)
from .specfun import gamma_int, upper_incomplete_gamma_int
from .split import (
    SplitParams,
    aoi_mixture,
    aoi_node1,
    aoi_node2,
    conditional_wait_2,
    ewy_bound_2,
    hypoexp_pdf,
    network_delay_split,
)

__version__ = "0.1.0"

__all__ = [
    "ChainParams",
    "SplitParams",
    "NetworkSpec",
    "NodeSpec",
    "PacketRecord",
    "SimResult",
    "BurkeReport",
    "EwyEstimate",
    "OptimizeResult",
    "NoDataError",
    "UnstableNetworkError",
    "average_aoi",
    "aoi_mixture",
    "aoi_node1",
    "aoi_node2",
    "conditional_wait",
    "conditional_wait_2",
    "estimate_ewy",
    "ewy_bound",
    "ewy_bound_2",
    "gamma_int",
    "hypoexp_pdf",
    "mm1_average_aoi",
    "minimize_aoi_chain",
    "minimize_aoi_split",
    "network_delay",
    "network_delay_split",
    "run",
    "sojourn_pdf",
    "upper_incomplete_gamma_int",
    "validate_burke",
]
