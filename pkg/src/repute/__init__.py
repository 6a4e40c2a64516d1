"""Dynamic reputation framework for an agent-mediated e-market."""

from .engine import (
    BuyerPolicy,
    Category,
    ReputationRecord,
    SellerCategoryIndex,
    advance_experience,
    bootstrap_reputation,
    classify,
    combine_overall,
    eta,
    mu,
    reputation_change,
    update_individual,
    xi,
)
from .fuzzy import TFN, ImportanceScale, PerformanceScale, TrapezoidalFuzzyNumber

__all__ = [
    "BuyerPolicy", "Category", "ReputationRecord", "SellerCategoryIndex",
    "advance_experience", "bootstrap_reputation", "classify", "combine_overall",
    "eta", "mu", "reputation_change", "update_individual", "xi",
    "TFN", "TrapezoidalFuzzyNumber", "ImportanceScale", "PerformanceScale",
]
