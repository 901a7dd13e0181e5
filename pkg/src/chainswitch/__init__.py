"""Runtime blockchain monitoring, weighted selection, and switchover orchestration."""

from .core import (
    BlockHeader,
    ChainDescriptor,
    ChainFamily,
    ChainswitchError,
    DataRecord,
    FeeStats,
    RollingWindow,
)
from .metrics import MetricVector, compute_vector
from .selection import RankingPolicy, RankingResult, policy_from_document, rank
from .switchover import SuggestionState, SwitchoverSuggestion

__version__ = "0.1.0"

__all__ = [
    "BlockHeader",
    "ChainDescriptor",
    "ChainFamily",
    "ChainswitchError",
    "DataRecord",
    "FeeStats",
    "MetricVector",
    "RankingPolicy",
    "RankingResult",
    "RollingWindow",
    "SuggestionState",
    "SwitchoverSuggestion",
    "compute_vector",
    "policy_from_document",
    "rank",
    "__version__",
]
