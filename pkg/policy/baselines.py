"""
对照策略: LRU / LFU / 随机

与马氏策略使用相同的分区与建议类型,只是得分来源不同。
"""

from __future__ import annotations

import logging
from typing import Dict, Optional

import numpy as np

from core.rng import POLICY_STREAM, make_generator
from policy.base import PolicyContext, ReplacementPolicy
from policy.tiers import Rationale, Recommendation, TierState, recommend
from views.catalog import ViewCatalog

logger = logging.getLogger(__name__)

NEVER_SEEN = -1


class LruPolicy(ReplacementPolicy):
    """
    最近最少使用

    提升窗口内被引用过的、最近一次引用最晚的辅存视图;淘汰最近一次
    引用最早的主存视图(从未引用记为-1)。引用时间跨窗口保留。
    """

    name = "lru"

    def __init__(self, catalog: ViewCatalog, context: Optional[PolicyContext] = None) -> None:
        super().__init__(catalog, context)
        self._last_seen: Dict[int, int] = {}

    def observe(self, seq: int, view: int, hit: bool) -> None:
        super().observe(seq, view, hit)
        self._last_seen[view] = seq

    def recency(self) -> np.ndarray:
        scores = np.full(len(self.catalog), NEVER_SEEN, dtype=np.float64)
        for view, seq in self._last_seen.items():
            scores[view] = seq
        return scores

    def decide(self, tier: TierState) -> Recommendation:
        referenced = {e.view for e in self._window}
        candidates = tier.secondary & referenced
        if not candidates:
            return Recommendation.no_action()
        # 只在窗口内引用过的辅存视图中挑选
        scores = self.recency()
        for i in tier.secondary - candidates:
            scores[i] = -np.inf
        return recommend(scores, self.recency(), tier, self.context.require_gain)


class LfuPolicy(ReplacementPolicy):
    """最不经常使用,按窗口内的引用次数计分"""

    name = "lfu"

    def counts(self) -> np.ndarray:
        views = np.fromiter((e.view for e in self._window), dtype=np.int64)
        return np.bincount(views, minlength=len(self.catalog)).astype(np.float64)

    def decide(self, tier: TierState) -> Recommendation:
        counts = self.counts()
        if not any(counts[i] > 0 for i in tier.secondary):
            return Recommendation.no_action()
        return recommend(counts, counts, tier, self.context.require_gain)


class RandomPolicy(ReplacementPolicy):
    """随机提升一个辅存视图,主存已满时随机淘汰一个主存视图"""

    name = "random"

    def __init__(self, catalog: ViewCatalog, context: Optional[PolicyContext] = None) -> None:
        super().__init__(catalog, context)
        self._rng = make_generator(self.context.seed, POLICY_STREAM)

    def decide(self, tier: TierState) -> Recommendation:
        if not tier.secondary or tier.primary_capacity == 0:
            return Recommendation.no_action()
        promote = int(self._rng.choice(sorted(tier.secondary)))
        if not tier.is_full:
            return Recommendation(promote=promote, rationale=Rationale.CAPACITY_FREE)
        evict = int(self._rng.choice(sorted(tier.primary)))
        logger.debug(f"随机替换: promote={promote}, evict={evict}")
        return Recommendation(promote=promote, evict=evict, rationale=Rationale.SWAP)
