"""
ReplacementPolicy - 替换策略抽象基类
====================================

仿真器按事件顺序调用 observe 记录每次命中,在每个重新估计点调用
decide 得到替换建议。所有策略共用同一个构造签名
(目录 + PolicyContext),因此可以通过 PolicyRegistry 按名称创建。

扩展指南:
    1. 继承 ReplacementPolicy
    2. 实现 decide
    3. 用 PolicyRegistry.register 注册
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

from core.config import EstimatorSettings, MarkovSettings
from policy.tiers import Recommendation, TierState
from views.catalog import QueryTrace, ViewCatalog


@dataclass(frozen=True)
class PolicyContext:
    """
    策略运行参数

    Attributes:
        seed: 随机种子,只有random策略使用
        markov: 稳态迭代配置
        estimator: 初始概率估计配置
        tier_mode: per_tier按层分别估计,global使用窗口的单一稳态向量
        require_gain: 仅当提升得分高于淘汰得分时交换
    """

    seed: int = 0
    markov: Optional[MarkovSettings] = None
    estimator: Optional[EstimatorSettings] = None
    tier_mode: str = "per_tier"
    require_gain: bool = False


class ObservedEvent(NamedTuple):
    """窗口中的一次命中"""

    seq: int
    view: int
    hit: bool


class ReplacementPolicy(ABC):
    """
    替换策略抽象基类

    Attributes:
        name: 注册名
        catalog: 视图目录
        context: 运行参数
    """

    name: str = "base"

    def __init__(self, catalog: ViewCatalog, context: Optional[PolicyContext] = None) -> None:
        self.catalog = catalog
        self.context = context or PolicyContext()
        self._window: List[ObservedEvent] = []

    def observe(self, seq: int, view: int, hit: bool) -> None:
        """
        记录一次命中

        Args:
            seq: 事件序号
            view: 命中的视图下标
            hit: 事件发生时该视图是否在主存
        """
        self._window.append(ObservedEvent(seq, view, hit))

    def reset_window(self) -> None:
        """清空估计窗口"""
        self._window.clear()

    @property
    def window(self) -> List[ObservedEvent]:
        return list(self._window)

    def window_trace(self, hit: Optional[bool] = None) -> QueryTrace:
        """
        把窗口事件转换为查询轨迹

        Args:
            hit: None取全部事件,True只取主存命中,False只取主存未命中
        """
        trace = QueryTrace(
            catalog=self.catalog,
            query_ids=tuple(f"Q{e.seq + 1}" for e in self._window),
            views=[e.view for e in self._window],
        )
        if hit is None:
            return trace
        return trace.subsequence(e.hit == hit for e in self._window)

    @abstractmethod
    def decide(self, tier: TierState) -> Recommendation:
        """
        根据当前窗口给出替换建议

        Args:
            tier: 当前分区

        Returns:
            Recommendation,no_action表示不做改变
        """

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={len(self.catalog)}, window={len(self._window)})"
