"""
马氏分析替换策略

每个重新估计点:
    1. 主存未命中的窗口事件组成辅存轨迹,估计稳态向量 π_s
    2. 主存命中的窗口事件组成主存轨迹,估计稳态向量 π_p
    3. 提升辅存中 π_s 最大的视图,主存已满时淘汰主存中 π_p 最小的视图
    4. 交换只在整个窗口的稳态向量中提升视图的概率高于淘汰视图时发生

tier_mode="global" 时两步都使用整个窗口的单一稳态向量。
"""

from __future__ import annotations

import logging
from typing import Optional

from estimator.episodes import extract_episodes
from markov.analyzer import SteadyStateAnalyzer
from markov.engine import StateVector
from policy.base import PolicyContext, ReplacementPolicy
from policy.tiers import Rationale, Recommendation, TierState, recommend
from views.catalog import QueryTrace, ViewCatalog

logger = logging.getLogger(__name__)


class MarkovPolicy(ReplacementPolicy):
    """按稳态访问概率做提升与淘汰"""

    name = "markov"

    def __init__(self, catalog: ViewCatalog, context: Optional[PolicyContext] = None) -> None:
        super().__init__(catalog, context)
        self.analyzer = SteadyStateAnalyzer(self.context.markov, self.context.estimator)

    def _steady(self, trace: QueryTrace) -> Optional[StateVector]:
        """轨迹没有完整episode时返回None"""
        if not extract_episodes(trace).episodes:
            return None
        analysis = self.analyzer.analyze_trace(
            trace, start_view=int(trace.views[-1]), strict=False
        )
        if not analysis.result.converged:
            logger.warning(
                f"稳态迭代未收敛: iterations={analysis.result.iterations}, "
                f"residual={analysis.result.residual:.3g},使用最后一次迭代结果"
            )
        return analysis.result.vector

    def decide(self, tier: TierState) -> Recommendation:
        if self.context.tier_mode == "global":
            pi = self._steady(self.window_trace())
            if pi is None:
                return Recommendation.no_action()
            return recommend(pi, None, tier, self.context.require_gain)

        pi_secondary = self._steady(self.window_trace(hit=False))
        if pi_secondary is None:
            logger.debug("辅存轨迹没有完整episode,不做替换")
            return Recommendation.no_action()

        pi_window = None
        pi_primary = None
        if tier.is_full and tier.primary:
            pi_window = self._steady(self.window_trace())
            pi_primary = self._steady(self.window_trace(hit=True))
            if pi_primary is None:
                # 主存轨迹过短时退回到整个窗口
                pi_primary = pi_window
        rec = recommend(pi_secondary, pi_primary, tier, self.context.require_gain)
        if rec.rationale is not Rationale.SWAP:
            return rec

        # 两层向量不在同一尺度上,交换以整个窗口的稳态排序为准
        if pi_window is None:
            return Recommendation.no_action()
        global_scores = pi_window.probs
        if not global_scores[rec.promote] > global_scores[rec.evict]:
            logger.info(
                f"窗口稳态排序未变: {self.catalog.name(rec.promote)}="
                f"{global_scores[rec.promote]:.4g} <= {self.catalog.name(rec.evict)}="
                f"{global_scores[rec.evict]:.4g},不交换"
            )
            return Recommendation.no_action()
        return rec
