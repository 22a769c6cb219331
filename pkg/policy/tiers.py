"""
主存/辅存两级分区与替换建议

辅存中稳态概率最高的视图被提升到主存;主存已满时,主存中稳态概率
最低的视图被淘汰。并列时取目录下标最小者。
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Sequence, Union

import numpy as np

from core.exceptions import (
    CapacityViolation,
    DimensionMismatch,
    EmptyTier,
    TierInvariantError,
)
from core.formatting import format_decimal
from markov.engine import StateVector
from views.catalog import ViewCatalog

logger = logging.getLogger(__name__)

Scores = Union[StateVector, Sequence[float], np.ndarray]


class Rationale(str, Enum):
    """建议原因"""

    CAPACITY_FREE = "capacity_free"
    SWAP = "swap"
    NO_ACTION = "no_action"


@dataclass(frozen=True)
class TierState:
    """
    视图目录的主存/辅存分区

    Attributes:
        catalog: 视图目录
        primary: 主存中的视图下标
        secondary: 辅存中的视图下标
        primary_capacity: 主存容量(视图数)

    Example:
        >>> catalog = ViewCatalog(("V1", "V2", "V3"))
        >>> tier = TierState.initial(catalog, capacity=1)
        >>> sorted(tier.secondary)
        [0, 1, 2]
    """

    catalog: ViewCatalog
    primary: FrozenSet[int]
    secondary: FrozenSet[int]
    primary_capacity: int

    def __post_init__(self) -> None:
        primary = frozenset(int(i) for i in self.primary)
        secondary = frozenset(int(i) for i in self.secondary)
        object.__setattr__(self, "primary", primary)
        object.__setattr__(self, "secondary", secondary)

        if self.primary_capacity < 0:
            raise TierInvariantError(f"主存容量不能为负: {self.primary_capacity}")
        if primary & secondary:
            raise TierInvariantError(f"主存与辅存有交集: {sorted(primary & secondary)}")
        if primary | secondary != frozenset(range(len(self.catalog))):
            raise TierInvariantError("主存与辅存的并集必须恰好是全部视图")
        if len(primary) > self.primary_capacity:
            raise CapacityViolation(len(primary), self.primary_capacity)

    @classmethod
    def initial(
        cls, catalog: ViewCatalog, capacity: int, primary: Iterable[int] = ()
    ) -> TierState:
        """由主存视图集合构造分区,其余视图位于辅存"""
        primary_set = frozenset(primary)
        secondary = frozenset(range(len(catalog))) - primary_set
        return cls(catalog, primary_set, secondary, capacity)

    @property
    def is_full(self) -> bool:
        return len(self.primary) >= self.primary_capacity

    def describe(self) -> str:
        names = self.catalog.names
        primary = ",".join(names[i] for i in sorted(self.primary)) or "-"
        return f"primary={{{primary}}} ({len(self.primary)}/{self.primary_capacity})"


@dataclass(frozen=True)
class Recommendation:
    """
    替换建议

    Attributes:
        promote: 提升到主存的辅存视图
        evict: 从主存淘汰的视图,仅在提升需要腾出容量时存在
        promote_score: 提升视图的得分(稳态概率)
        evict_score: 淘汰视图的得分
        rationale: 建议原因
    """

    promote: Optional[int] = None
    evict: Optional[int] = None
    promote_score: Optional[float] = None
    evict_score: Optional[float] = None
    rationale: Rationale = Rationale.NO_ACTION

    def __post_init__(self) -> None:
        if self.promote is not None and self.promote == self.evict:
            raise ValueError("提升视图与淘汰视图不能相同")
        if self.evict is not None and self.promote is None:
            raise ValueError("没有提升视图时不能淘汰")

    @classmethod
    def no_action(cls) -> Recommendation:
        return cls()


def _scores(pi: Scores, tier: TierState) -> np.ndarray:
    values = pi.probs if isinstance(pi, StateVector) else np.asarray(pi, dtype=np.float64)
    if values.size != len(tier.catalog):
        raise DimensionMismatch(len(tier.catalog), values.size, "稳态向量与目录大小")
    return values


def best_secondary(pi: Scores, tier: TierState) -> int:
    """
    辅存中得分最高的视图,并列取下标最小者

    Raises:
        EmptyTier: 辅存为空
    """
    if not tier.secondary:
        raise EmptyTier("辅存")
    values = _scores(pi, tier)
    best = None
    for i in sorted(tier.secondary):
        if best is None or values[i] > values[best]:
            best = i
    return int(best)


def worst_primary(pi: Scores, tier: TierState) -> int:
    """
    主存中得分最低的视图,并列取下标最小者

    Raises:
        EmptyTier: 主存为空
    """
    if not tier.primary:
        raise EmptyTier("主存")
    values = _scores(pi, tier)
    worst = None
    for i in sorted(tier.primary):
        if worst is None or values[i] < values[worst]:
            worst = i
    return int(worst)


def recommend(
    pi_secondary: Scores,
    pi_primary: Optional[Scores],
    tier: TierState,
    require_gain: bool = False,
) -> Recommendation:
    """
    给出替换建议

    两个稳态向量分别由辅存与主存的轨迹估计;pi_primary为None时两次
    求极值都使用pi_secondary(全局向量模式)。

    Args:
        pi_secondary: 辅存轨迹的稳态向量
        pi_primary: 主存轨迹的稳态向量
        tier: 当前分区
        require_gain: 为真时只有提升得分高于淘汰得分才交换

    Returns:
        Recommendation
    """
    if not tier.secondary or tier.primary_capacity == 0:
        return Recommendation.no_action()

    secondary_scores = _scores(pi_secondary, tier)
    promote = best_secondary(secondary_scores, tier)
    promote_score = float(secondary_scores[promote])

    if len(tier.primary) < tier.primary_capacity:
        rec = Recommendation(
            promote=promote,
            promote_score=promote_score,
            rationale=Rationale.CAPACITY_FREE,
        )
    else:
        primary_scores = _scores(pi_primary if pi_primary is not None else pi_secondary, tier)
        evict = worst_primary(primary_scores, tier)
        evict_score = float(primary_scores[evict])
        if require_gain and not promote_score > evict_score:
            logger.info(
                f"提升得分 {promote_score:.4g} 未超过淘汰得分 {evict_score:.4g},不交换"
            )
            return Recommendation.no_action()
        rec = Recommendation(
            promote=promote,
            evict=evict,
            promote_score=promote_score,
            evict_score=evict_score,
            rationale=Rationale.SWAP,
        )

    logger.info(f"替换建议: {format_recommendation(rec, tier.catalog)}")
    return rec


def apply(tier: TierState, rec: Recommendation) -> TierState:
    """
    应用替换建议,返回新的分区

    先把evict移到辅存,再把promote移到主存。

    Raises:
        TierInvariantError: 建议与分区不匹配
        CapacityViolation: 不淘汰就提升会超出容量
    """
    if rec.promote is None:
        return tier
    if rec.promote not in tier.secondary:
        raise TierInvariantError(f"提升视图 {rec.promote} 不在辅存中")
    if rec.evict is not None and rec.evict not in tier.primary:
        raise TierInvariantError(f"淘汰视图 {rec.evict} 不在主存中")

    primary = set(tier.primary)
    secondary = set(tier.secondary)
    if rec.evict is not None:
        primary.discard(rec.evict)
        secondary.add(rec.evict)
    if len(primary) + 1 > tier.primary_capacity:
        raise CapacityViolation(len(primary) + 1, tier.primary_capacity)
    secondary.discard(rec.promote)
    primary.add(rec.promote)
    return TierState(tier.catalog, frozenset(primary), frozenset(secondary), tier.primary_capacity)


def _fmt_view(index: Optional[int], catalog: ViewCatalog) -> str:
    return "-" if index is None else catalog.name(index)


def _fmt_score(score: Optional[float]) -> str:
    return "-" if score is None else format_decimal(score)


def format_recommendation(rec: Recommendation, catalog: ViewCatalog) -> str:
    """
    单行序列化

    Example:
        >>> catalog = ViewCatalog(("V1", "V2", "V3"))
        >>> format_recommendation(Recommendation(), catalog)
        'promote=-, evict=-, reason=no_action, promote_score=-, evict_score=-'
    """
    return (
        f"promote={_fmt_view(rec.promote, catalog)}, "
        f"evict={_fmt_view(rec.evict, catalog)}, "
        f"reason={rec.rationale.value}, "
        f"promote_score={_fmt_score(rec.promote_score)}, "
        f"evict_score={_fmt_score(rec.evict_score)}"
    )


_LINE_PATTERN = re.compile(
    r"^promote=(?P<promote>[^,]+), evict=(?P<evict>[^,]+), "
    r"reason=(?P<reason>\w+), promote_score=(?P<ps>[^,]+), evict_score=(?P<es>[^,]+)$"
)


def parse_recommendation(line: str, catalog: ViewCatalog) -> Recommendation:
    """解析format_recommendation的输出"""
    match = _LINE_PATTERN.match(line.strip())
    if match is None:
        raise ValueError(f"无法解析替换建议: {line!r}")

    def view(text: str) -> Optional[int]:
        return None if text == "-" else catalog.index(text)

    def score(text: str) -> Optional[float]:
        return None if text == "-" else float(text)

    return Recommendation(
        promote=view(match["promote"]),
        evict=view(match["evict"]),
        promote_score=score(match["ps"]),
        evict_score=score(match["es"]),
        rationale=Rationale(match["reason"]),
    )
