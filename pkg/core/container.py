"""
依赖注入容器
按一次调用的配置创建稳态分析器与仿真配置,命令行各子命令共用
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Optional

from core.config import AppSettings, get_settings

if TYPE_CHECKING:
    from markov.analyzer import SteadyStateAnalyzer
    from policy.tiers import TierState
    from sim.simulator import SimConfig

logger = logging.getLogger(__name__)


class Container:
    """
    依赖注入容器

    Example:
        >>> from core.container import Container
        >>> container = Container()
        >>> analyzer = container.get_analyzer()
        >>> config = container.get_sim_config(tier)  # doctest: +SKIP
    """

    def __init__(self, settings: Optional[AppSettings] = None):
        """
        初始化容器

        Args:
            settings: 应用配置,如果为None则使用全局配置
        """
        self.settings = settings or get_settings()
        self._analyzer: Optional[SteadyStateAnalyzer] = None
        logger.debug("依赖注入容器已初始化")

    def get_analyzer(self) -> SteadyStateAnalyzer:
        """获取按配置构造的稳态分析器(单例)"""
        if self._analyzer is None:
            from markov.analyzer import SteadyStateAnalyzer

            self._analyzer = SteadyStateAnalyzer(
                markov=self.settings.markov, estimator=self.settings.estimator
            )
        return self._analyzer

    def get_sim_config(self, tier: TierState, seed: Optional[int] = None) -> SimConfig:
        """
        按配置构造仿真配置

        Args:
            tier: 初始分区
            seed: 随机种子,None时使用配置中的默认值

        Returns:
            SimConfig,马氏策略的迭代与估计参数取自同一份配置
        """
        from sim.simulator import MarkovParams, SimConfig

        simulation = self.settings.simulation
        return SimConfig(
            tier=tier,
            policy=simulation.policy,
            retrain_interval=simulation.retrain_interval,
            markov_params=MarkovParams.from_settings(
                self.settings.markov, self.settings.estimator
            ),
            seed=simulation.seed if seed is None else seed,
            window=simulation.window,
            tier_mode=simulation.tier_mode,
            require_gain=simulation.require_gain,
        )
