"""
替换策略模块
主存/辅存分区、替换建议以及可插拔的替换策略
"""

from policy.base import ObservedEvent, PolicyContext, ReplacementPolicy
from policy.baselines import LfuPolicy, LruPolicy, RandomPolicy
from policy.markov_policy import MarkovPolicy
from policy.registry import PolicyRegistry
from policy.tiers import (
    Rationale,
    Recommendation,
    TierState,
    apply,
    best_secondary,
    format_recommendation,
    parse_recommendation,
    recommend,
    worst_primary,
)

# 注册内置策略
PolicyRegistry.register("markov", MarkovPolicy)
PolicyRegistry.register("lru", LruPolicy)
PolicyRegistry.register("lfu", LfuPolicy)
PolicyRegistry.register("random", RandomPolicy)

__all__ = [
    "ObservedEvent",
    "PolicyContext",
    "ReplacementPolicy",
    "LfuPolicy",
    "LruPolicy",
    "RandomPolicy",
    "MarkovPolicy",
    "PolicyRegistry",
    "Rationale",
    "Recommendation",
    "TierState",
    "apply",
    "best_secondary",
    "format_recommendation",
    "parse_recommendation",
    "recommend",
    "worst_primary",
]
