"""
马氏链稳态迭代引擎

状态向量(行向量)反复右乘转移矩阵,直到相邻两次迭代的最大范数差不超过tol。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from core.exceptions import DimensionMismatch, NonStochasticMatrix

logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9
CLAMP_TOLERANCE = 1e-12

ExactRows = Tuple[Tuple[Fraction, ...], ...]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """
    n×n 转移矩阵

    Attributes:
        entries: 浮点矩阵(只读)
        exact: 可选的精确有理数行,存在时entries由其转换而来
    """

    entries: np.ndarray
    exact: Optional[ExactRows] = None

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch(entries.shape[0], entries.shape[-1], "转移矩阵行列数")
        if entries.shape[0] < 1:
            raise ValueError("转移矩阵至少为1×1")
        if self.exact is not None:
            exact = tuple(tuple(Fraction(x) for x in row) for row in self.exact)
            if len(exact) != entries.shape[0] or any(len(r) != entries.shape[0] for r in exact):
                raise DimensionMismatch(entries.shape[0], len(exact), "精确矩阵行数")
            object.__setattr__(self, "exact", exact)
        object.__setattr__(self, "entries", _frozen(entries))

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Union[Fraction, int, str]]]) -> TransitionMatrix:
        """由精确有理数行构造"""
        exact = tuple(tuple(Fraction(x) for x in row) for row in rows)
        entries = np.array([[float(x) for x in row] for row in exact], dtype=np.float64)
        return cls(entries=entries, exact=exact)

    @classmethod
    def identity(cls, n: int) -> TransitionMatrix:
        """n阶单位矩阵"""
        return cls.from_fractions(
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        )

    @classmethod
    def uniform(cls, n: int) -> TransitionMatrix:
        """所有元素为1/n的矩阵"""
        return cls.from_fractions([[Fraction(1, n)] * n for _ in range(n)])

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def check_stochastic(self, tolerance: float = ROW_SUM_TOLERANCE) -> None:
        """
        检查行随机条件

        Raises:
            NonStochasticMatrix: 存在负元素、大于1的元素或行和偏离1超过tolerance
        """
        for i, row in enumerate(self.entries):
            row_sum = float(row.sum())
            if np.any(row < -tolerance) or np.any(row > 1.0 + tolerance):
                raise NonStochasticMatrix(i, row_sum, "元素不在[0,1]内")
            if abs(row_sum - 1.0) > tolerance:
                raise NonStochasticMatrix(i, row_sum)

    def is_stochastic(self, tolerance: float = ROW_SUM_TOLERANCE) -> bool:
        try:
            self.check_stochastic(tolerance)
        except NonStochasticMatrix:
            return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    视图上的概率分布

    Attributes:
        probs: 各视图概率,非负且和为1
        iteration_index: 表示第几个未来时段
        exact: 可选的精确有理数分量
    """

    probs: np.ndarray
    iteration_index: int = 0
    exact: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if probs.size < 1:
            raise ValueError("状态向量不能为空")
        if np.any(probs < -CLAMP_TOLERANCE):
            raise ValueError(f"状态向量存在负分量: {probs.min():.3g}")
        probs = np.clip(probs, 0.0, None)
        total = float(probs.sum())
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise ValueError(f"状态向量分量和为 {total:.12g},不是概率分布")
        object.__setattr__(self, "probs", _frozen(probs))

    @classmethod
    def unit(cls, n: int, index: int) -> StateVector:
        """视图index上的单位向量,即 [1.0 0.0 0.0]"""
        if not 0 <= index < n:
            raise DimensionMismatch(n, index + 1, "起始视图下标")
        probs = np.zeros(n)
        probs[index] = 1.0
        exact = tuple(Fraction(int(i == index)) for i in range(n))
        return cls(probs=probs, exact=exact)

    @classmethod
    def uniform(cls, n: int) -> StateVector:
        return cls(probs=np.full(n, 1.0 / n), exact=tuple([Fraction(1, n)] * n))

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, index: int) -> float:
        return float(self.probs[index])

    def tolist(self) -> List[float]:
        return [float(x) for x in self.probs]


@dataclass(frozen=True)
class SteadyStateResult:
    """
    稳态迭代结果

    Attributes:
        vector: 最后一次迭代得到的状态向量
        iterations: 乘法次数
        converged: 是否在max_iter内收敛
        residual: 最后一步的最大绝对变化
        tol: 使用的收敛阈值
    """

    vector: StateVector
    iterations: int
    converged: bool
    residual: float
    tol: float

    def __post_init__(self) -> None:
        if self.converged and self.residual > self.tol:
            raise ValueError("converged为真时residual必须不超过tol")


def _check_dimensions(v: StateVector, P: TransitionMatrix) -> None:
    if v.n != P.n:
        raise DimensionMismatch(P.n, v.n, "状态向量与转移矩阵维度")


def step(v: StateVector, P: TransitionMatrix) -> StateVector:
    """
    状态向量右乘转移矩阵一次

    result[j] = Σᵢ v[i]·P[i][j],微小负值截断为0并重新归一化。

    Args:
        v: 当前状态向量
        P: 转移矩阵

    Returns:
        iteration_index加1的新状态向量

    Raises:
        DimensionMismatch: 维度不一致
    """
    _check_dimensions(v, P)
    result = v.probs @ P.entries
    result = np.where(result < 0.0, 0.0, result)
    total = float(result.sum())
    if total > 0.0:
        result = result / total
    return StateVector(probs=result, iteration_index=v.iteration_index + 1)


def iterate_to_steady(
    v0: StateVector,
    P: TransitionMatrix,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    stochastic_tolerance: float = 1e-6,
) -> SteadyStateResult:
    """
    反复迭代直到稳态

    相邻两次迭代的最大范数差不超过tol即视为收敛;达到max_iter仍未收敛时
    返回converged=False,由调用方决定如何处理(周期链会出现这种情况)。

    Args:
        v0: 初始状态向量
        P: 转移矩阵
        tol: 收敛阈值,必须为正
        max_iter: 最大迭代次数
        stochastic_tolerance: 行随机检查容差

    Returns:
        SteadyStateResult

    Raises:
        DimensionMismatch: 维度不一致
        NonStochasticMatrix: 行和偏离1超过stochastic_tolerance

    Example:
        >>> P = TransitionMatrix.from_fractions(
        ...     [["17/24", "1/8", "1/6"], ["1/5", "7/10", "1/10"], ["1/10", "1/10", "4/5"]]
        ... )
        >>> result = iterate_to_steady(StateVector.unit(3, 0), P, tol=5e-3)
        >>> [round(x, 2) for x in result.vector.tolist()]  # doctest: +SKIP
        [0.33, 0.27, 0.4]
    """
    if tol <= 0:
        raise ValueError(f"tol必须为正数: {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter必须为正整数: {max_iter}")
    _check_dimensions(v0, P)
    P.check_stochastic(stochastic_tolerance)

    v = v0
    residual = float("inf")
    iterations = 0
    converged = False
    while iterations < max_iter:
        nxt = step(v, P)
        iterations += 1
        residual = float(np.max(np.abs(nxt.probs - v.probs)))
        v = nxt
        logger.debug(f"第 {iterations} 次迭代: residual={residual:.3e}")
        if residual <= tol:
            converged = True
            break

    if converged:
        logger.info(f"稳态迭代在 {iterations} 次后收敛 (residual={residual:.3e})")
    else:
        logger.warning(
            f"稳态迭代 {iterations} 次后未收敛 (residual={residual:.3e}),链可能是周期的"
        )
    return SteadyStateResult(
        vector=v, iterations=iterations, converged=converged, residual=residual, tol=tol
    )


def trajectory(v0: StateVector, P: TransitionMatrix, steps: int) -> List[StateVector]:
    """返回 [v0, v1, ..., v_steps] 的迭代轨迹"""
    vectors = [v0]
    for _ in range(steps):
        vectors.append(step(vectors[-1], P))
    return vectors


def apply_damping(P: TransitionMatrix, d: float) -> TransitionMatrix:
    """
    阻尼混合: P' = d·P + (1−d)·U,U为全1/n矩阵

    存在精确行时按有理数计算(d取其十进制字符串的精确值),结果行和严格为1。

    Args:
        P: 转移矩阵
        d: 阻尼系数,0 < d ≤ 1

    Returns:
        新的转移矩阵;d=1时原样返回P
    """
    if not 0.0 < d <= 1.0:
        raise ValueError(f"阻尼系数必须在(0, 1]内: {d}")
    if d == 1.0:
        return P

    n = P.n
    if P.exact is not None:
        dq = Fraction(str(d))
        teleport = (1 - dq) / n
        return TransitionMatrix.from_fractions(
            [[dq * x + teleport for x in row] for row in P.exact]
        )
    return TransitionMatrix(entries=d * P.entries + (1.0 - d) / n)


def check_irreducible(P: TransitionMatrix) -> bool:
    """正元素构成的有向图是否强连通"""
    adjacency = (P.entries > 0.0).astype(np.int8)
    graph = nx.from_numpy_array(adjacency, create_using=nx.DiGraph)
    return nx.is_strongly_connected(graph)
