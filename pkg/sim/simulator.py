"""
两级缓存仿真器

按事件顺序回放查询轨迹:事件的视图在主存中即为命中。每隔
retrain_interval 个事件调用一次替换策略并更新分区。未命中不会立即
提升任何视图,所有移动都发生在重新估计点。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from core.config import (
    DefaultRow,
    EstimatorSettings,
    MarkovSettings,
    PolicyName,
    Weighting,
)
from core.exceptions import DimensionMismatch
from policy import PolicyContext, PolicyRegistry, TierState, apply
from views.catalog import QueryTrace

logger = logging.getLogger(__name__)

Observer = Callable[[int, TierState], None]


class MarkovParams(BaseModel):
    """马氏策略的估计与迭代参数"""

    tol: float = Field(default=1e-8, gt=0.0)
    max_iter: int = Field(default=10_000, gt=0)
    damping: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    auto_guard: bool = False
    guard_damping: float = Field(default=0.85, gt=0.0, lt=1.0)
    start: Literal["unit", "uniform"] = "unit"
    default_row: DefaultRow = "uniform"
    weighting: Weighting = "episode_mean"

    @classmethod
    def from_settings(
        cls, markov: MarkovSettings, estimator: EstimatorSettings
    ) -> MarkovParams:
        return cls(
            tol=markov.tol,
            max_iter=markov.max_iter,
            damping=markov.damping,
            auto_guard=markov.auto_guard,
            guard_damping=markov.guard_damping,
            start=markov.start,
            default_row=estimator.default_row,
            weighting=estimator.weighting,
        )

    def markov_settings(self) -> MarkovSettings:
        return MarkovSettings(
            tol=self.tol,
            max_iter=self.max_iter,
            damping=self.damping,
            auto_guard=self.auto_guard,
            guard_damping=self.guard_damping,
            start=self.start,
        )

    def estimator_settings(self) -> EstimatorSettings:
        return EstimatorSettings(default_row=self.default_row, weighting=self.weighting)


class SimConfig(BaseModel):
    """
    仿真配置

    Attributes:
        tier: 初始分区
        policy: 替换策略名称
        retrain_interval: 两次重新估计之间的查询数
        markov_params: 马氏策略参数
        seed: 随机种子(random策略使用)
        window: recent只用上次重新估计以来的事件,cumulative使用全部历史
        tier_mode: per_tier按层估计,global使用单一稳态向量
        require_gain: 仅当提升得分高于淘汰得分时交换
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tier: TierState
    policy: PolicyName = "markov"
    retrain_interval: int = Field(default=500, ge=1)
    markov_params: MarkovParams = Field(default_factory=MarkovParams)
    seed: int = Field(default=0, ge=0)
    window: Literal["recent", "cumulative"] = "recent"
    tier_mode: Literal["per_tier", "global"] = "per_tier"
    require_gain: bool = False

    def policy_context(self) -> PolicyContext:
        return PolicyContext(
            seed=self.seed,
            markov=self.markov_params.markov_settings(),
            estimator=self.markov_params.estimator_settings(),
            tier_mode=self.tier_mode,
            require_gain=self.require_gain,
        )


@dataclass(frozen=True)
class SimReport:
    """
    仿真结果

    Attributes:
        policy: 策略名称
        total_queries: 事件数
        primary_hits: 主存命中数
        hit_rate: primary_hits / total_queries,没有事件时为0
        promotions: 提升次数
        evictions: 淘汰次数
        per_interval_hit_rates: 每个重新估计间隔的命中率,包括最后一个不完整间隔
    """

    policy: str
    total_queries: int
    primary_hits: int
    hit_rate: float
    promotions: int
    evictions: int
    per_interval_hit_rates: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 <= self.hit_rate <= 1.0:
            raise ValueError(f"命中率不在[0,1]内: {self.hit_rate}")
        if self.promotions < self.evictions:
            raise ValueError("淘汰次数不能超过提升次数")

    @property
    def empty(self) -> bool:
        return self.total_queries == 0


def run_simulation(
    trace: QueryTrace,
    config: SimConfig,
    observer: Optional[Observer] = None,
) -> SimReport:
    """
    回放轨迹并统计主存命中率

    Args:
        trace: 查询轨迹
        config: 仿真配置
        observer: 每次重新估计后以 (seq, tier) 调用的回调

    Returns:
        SimReport

    Raises:
        DimensionMismatch: 轨迹目录大小与分区不一致
    """
    tier = config.tier
    if len(trace.catalog) != len(tier.catalog):
        raise DimensionMismatch(len(tier.catalog), len(trace.catalog), "轨迹目录与分区大小")

    policy = PolicyRegistry.create(config.policy, trace.catalog, config.policy_context())
    interval = config.retrain_interval

    hits = promotions = evictions = 0
    interval_hits = interval_events = 0
    rates: List[float] = []

    for seq, view in enumerate(trace.views.tolist()):
        hit = view in tier.primary
        hits += hit
        interval_hits += hit
        interval_events += 1
        policy.observe(seq, view, hit)

        if interval_events == interval:
            rates.append(interval_hits / interval_events)
            interval_hits = interval_events = 0

            rec = policy.decide(tier)
            tier = apply(tier, rec)
            promotions += rec.promote is not None
            evictions += rec.evict is not None
            if config.window == "recent":
                policy.reset_window()
            if observer is not None:
                observer(seq, tier)

    if interval_events:
        rates.append(interval_hits / interval_events)

    total = len(trace)
    report = SimReport(
        policy=config.policy,
        total_queries=total,
        primary_hits=hits,
        hit_rate=hits / total if total else 0.0,
        promotions=promotions,
        evictions=evictions,
        per_interval_hit_rates=tuple(rates),
    )
    if report.empty:
        logger.warning("轨迹为空,仿真结果为空报告")
    logger.info(
        f"仿真完成: policy={config.policy}, total={total}, hits={hits}, "
        f"hit_rate={report.hit_rate:.4f}, promotions={promotions}, evictions={evictions}"
    )
    return report


def compare_policies(
    trace: QueryTrace,
    base_config: SimConfig,
    policies: Sequence[PolicyName],
) -> List[Tuple[str, SimReport]]:
    """
    在同一轨迹、同一种子下依次运行多个策略

    Returns:
        与policies对齐的 (策略名, SimReport) 列表
    """
    results: List[Tuple[str, SimReport]] = []
    for name in policies:
        config = base_config.model_copy(update={"policy": name})
        results.append((name, run_simulation(trace, config)))
    return results
