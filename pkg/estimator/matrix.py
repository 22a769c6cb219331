"""
初始概率矩阵(Initial Probability Matrix)

按起始视图对episode行做算术平均;没有episode的视图使用默认行。
内部全部用有理数计算,只在导出时转换为浮点。
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import IndexOutOfCatalog
from estimator.episodes import Episode, episode_probabilities
from markov.engine import ExactRows, TransitionMatrix

logger = logging.getLogger(__name__)

DefaultRow = Literal["uniform", "self_loop"]
Weighting = Literal["episode_mean", "transition_counts"]
RowValue = Union[Fraction, int, str]


@dataclass(frozen=True)
class RowProvenance:
    """行来源: observed(k个episode) / defaulted / supplied"""

    kind: Literal["observed", "defaulted", "supplied"]
    episodes: int = 0

    def __str__(self) -> str:
        if self.kind == "observed":
            return f"observed({self.episodes})"
        return self.kind


@dataclass(frozen=True)
class InitialProbabilityMatrix:
    """
    n×n 行随机的视图转移概率估计

    Attributes:
        n: 视图数
        exact: 精确有理数行
        row_provenance: 每行的来源标记
    """

    n: int
    exact: ExactRows
    row_provenance: Tuple[RowProvenance, ...]

    @property
    def rows(self) -> np.ndarray:
        """浮点矩阵"""
        return np.array([[float(x) for x in row] for row in self.exact], dtype=np.float64)

    def to_transition_matrix(self) -> TransitionMatrix:
        """转换为迭代引擎使用的转移矩阵(保留精确行)"""
        return TransitionMatrix(entries=self.rows, exact=self.exact)

    def observed_views(self) -> List[int]:
        return [i for i, p in enumerate(self.row_provenance) if p.kind == "observed"]


def _default_row(i: int, n: int, mode: DefaultRow) -> Tuple[Fraction, ...]:
    if mode == "uniform":
        return tuple(Fraction(1, n) for _ in range(n))
    if mode == "self_loop":
        return tuple(Fraction(int(j == i)) for j in range(n))
    raise ValueError(f"不支持的默认行: {mode}")


def _episode_mean(episodes: Sequence[Episode], n: int) -> Tuple[Fraction, ...]:
    row = [Fraction(0)] * n
    for episode in episodes:
        for column, p in episode_probabilities(episode).probs.items():
            row[column] += p
    k = len(episodes)
    return tuple(x / k for x in row)


def _transition_counts(episodes: Sequence[Episode], n: int) -> Tuple[Fraction, ...]:
    counts = [0] * n
    for episode in episodes:
        counts[episode.start_view] += episode.run_length
        counts[episode.next_view] += 1
    total = sum(counts)
    return tuple(Fraction(c, total) for c in counts)


def _validate_supplied(i: int, values: Sequence[RowValue], n: int) -> Tuple[Fraction, ...]:
    if len(values) != n:
        raise ValueError(f"第 {i} 行给定了 {len(values)} 个值,需要 {n} 个")
    row = tuple(Fraction(v) for v in values)
    if any(x < 0 for x in row):
        raise ValueError(f"第 {i} 行存在负概率")
    if sum(row) != 1:
        raise ValueError(f"第 {i} 行的和为 {sum(row)},必须精确为1")
    return row


def build_initial_matrix(
    episodes: Sequence[Episode],
    n: int,
    default_row: DefaultRow = "uniform",
    weighting: Weighting = "episode_mean",
    row_overrides: Optional[Mapping[int, Sequence[RowValue]]] = None,
) -> InitialProbabilityMatrix:
    """
    构建初始概率矩阵

    对每个至少有一个episode的起始视图i,第i行为其各episode行的算术平均
    (weighting="transition_counts"时按计数合并);其余视图使用默认行;
    row_overrides中给出的行直接替换对应行。

    Args:
        episodes: episode列表,顺序不影响结果
        n: 视图数
        default_row: "uniform"(每项1/n)或"self_loop"(自身为1)
        weighting: "episode_mean" 或 "transition_counts"
        row_overrides: 视图下标 -> 精确概率行

    Returns:
        InitialProbabilityMatrix

    Raises:
        IndexOutOfCatalog: episode引用了不小于n的视图

    Example:
        >>> m = build_initial_matrix([Episode(0, 3, 1), Episode(0, 2, 2)], n=3)
        >>> m.exact[0]
        (Fraction(17, 24), Fraction(1, 8), Fraction(1, 6))
    """
    if n < 1:
        raise ValueError(f"视图数必须为正: {n}")
    if default_row not in ("uniform", "self_loop"):
        raise ValueError(f"不支持的默认行: {default_row}")

    grouped: Dict[int, List[Episode]] = defaultdict(list)
    for episode in episodes:
        for index in (episode.start_view, episode.next_view):
            if index >= n:
                raise IndexOutOfCatalog(index, n)
        grouped[episode.start_view].append(episode)

    if weighting not in ("episode_mean", "transition_counts"):
        raise ValueError(f"不支持的合并方式: {weighting}")
    combine = _episode_mean if weighting == "episode_mean" else _transition_counts

    overrides = dict(row_overrides or {})
    for i in overrides:
        if not 0 <= i < n:
            raise IndexOutOfCatalog(i, n)

    rows: List[Tuple[Fraction, ...]] = []
    provenance: List[RowProvenance] = []
    for i in range(n):
        if i in overrides:
            rows.append(_validate_supplied(i, overrides[i], n))
            provenance.append(RowProvenance("supplied"))
        elif grouped.get(i):
            rows.append(combine(grouped[i], n))
            provenance.append(RowProvenance("observed", len(grouped[i])))
        else:
            rows.append(_default_row(i, n, default_row))
            provenance.append(RowProvenance("defaulted"))

    observed = sum(1 for p in provenance if p.kind == "observed")
    logger.info(
        f"初始概率矩阵构建完成: n={n}, episodes={len(episodes)}, "
        f"observed={observed}, default_row={default_row}, weighting={weighting}"
    )
    return InitialProbabilityMatrix(n=n, exact=tuple(rows), row_provenance=tuple(provenance))


WORKED_EXAMPLE_ROWS: Tuple[Tuple[str, ...], ...] = (
    ("17/24", "1/8", "1/6"),
    ("1/5", "7/10", "1/10"),
    ("1/10", "1/10", "4/5"),
)


def worked_example_matrix() -> TransitionMatrix:
    """三视图示例的完整初始概率矩阵,V₂、V₃两行为给定行"""
    return TransitionMatrix.from_fractions(WORKED_EXAMPLE_ROWS)
