"""
Episode提取与单个Episode的概率行

一个episode是同一视图上的最长连续命中,以第一次命中其他视图结束。
连续命中次数记为Total,则:
    P(留在视图i) = Total / (Total + 1)
    P(转到视图j) = 1 / (Total + 1)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, NamedTuple, Sequence, Union

import numpy as np

from views.catalog import QueryTrace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Episode:
    """
    一次连续命中及其后的转移

    Attributes:
        start_view: 连续命中的视图下标i
        run_length: 连续命中次数(Total),至少为1
        next_view: 结束该episode的视图下标j,必须不等于i
    """

    start_view: int
    run_length: int
    next_view: int

    def __post_init__(self) -> None:
        if self.run_length < 1:
            raise ValueError(f"run_length必须至少为1: {self.run_length}")
        if self.next_view == self.start_view:
            raise ValueError(f"next_view不能等于start_view: {self.start_view}")
        if self.start_view < 0 or self.next_view < 0:
            raise ValueError("视图下标必须非负")


@dataclass(frozen=True)
class EpisodeRow:
    """单个episode给出的稀疏概率行,恰好两个非零项,精确和为1"""

    start_view: int
    probs: Dict[int, Fraction]

    def as_floats(self) -> Dict[int, float]:
        """转换为浮点概率"""
        return {column: float(p) for column, p in self.probs.items()}


class EpisodeExtraction(NamedTuple):
    """extract_episodes的结果"""

    episodes: List[Episode]
    discarded: int


def extract_episodes(trace: Union[QueryTrace, Sequence[int]]) -> EpisodeExtraction:
    """
    从轨迹中切分episode

    每个episode消耗连续命中段以及结束它的那一次命中;末尾没有转移结束的
    连续段被丢弃,其长度作为discarded返回。

    Args:
        trace: 查询轨迹,或直接给出视图下标序列

    Returns:
        (episodes, discarded)

    Example:
        >>> extract_episodes([0, 0, 0, 1])
        EpisodeExtraction(episodes=[Episode(start_view=0, run_length=3, next_view=1)], discarded=0)
        >>> extract_episodes([0])
        EpisodeExtraction(episodes=[], discarded=1)
    """
    views = trace.views if isinstance(trace, QueryTrace) else np.asarray(trace)
    sequence = [int(v) for v in views]
    m = len(sequence)

    episodes: List[Episode] = []
    discarded = 0
    i = 0
    while i < m:
        start = sequence[i]
        run = 1
        while i + run < m and sequence[i + run] == start:
            run += 1
        if i + run == m:
            discarded = run
            break
        episodes.append(Episode(start, run, sequence[i + run]))
        i += run + 1

    if discarded:
        logger.debug(f"末尾 {discarded} 次命中没有转移,已丢弃")
    return EpisodeExtraction(episodes, discarded)


def episode_probabilities(episode: Episode) -> EpisodeRow:
    """
    计算单个episode的概率行

    Example:
        >>> row = episode_probabilities(Episode(0, 3, 1))
        >>> row.probs[0], row.probs[1]
        (Fraction(3, 4), Fraction(1, 4))
    """
    total = episode.run_length
    return EpisodeRow(
        start_view=episode.start_view,
        probs={
            episode.start_view: Fraction(total, total + 1),
            episode.next_view: Fraction(1, total + 1),
        },
    )


def replay_episodes(episodes: Sequence[Episode], discarded_tail: Sequence[int] = ()) -> List[int]:
    """按episode重放视图序列,再接上被丢弃的末尾命中"""
    sequence: List[int] = []
    for episode in episodes:
        sequence.extend([episode.start_view] * episode.run_length)
        sequence.append(episode.next_view)
    sequence.extend(discarded_tail)
    return sequence
