"""
稳态分析服务
组合初始概率估计与稳态迭代,统一处理阻尼、自动保护与错误策略
"""

from __future__ import annotations

import logging
from typing import Mapping, NamedTuple, Optional, Sequence, Tuple

from core.config import EstimatorSettings, MarkovSettings
from core.exceptions import NonConvergence, ReducibleChain
from estimator.episodes import EpisodeExtraction, extract_episodes
from estimator.matrix import InitialProbabilityMatrix, RowValue, build_initial_matrix
from markov.engine import (
    StateVector,
    SteadyStateResult,
    TransitionMatrix,
    apply_damping,
    check_irreducible,
    iterate_to_steady,
)
from markov.exact import stationary_exact
from views.catalog import QueryTrace

logger = logging.getLogger(__name__)


class TraceAnalysis(NamedTuple):
    """一条轨迹的估计与稳态结果"""

    matrix: InitialProbabilityMatrix
    result: SteadyStateResult
    episodes: int
    discarded: int


class SteadyStateAnalyzer:
    """
    稳态分析器

    Example:
        >>> analyzer = SteadyStateAnalyzer()
        >>> matrix = analyzer.estimate(trace)  # doctest: +SKIP
        >>> result = analyzer.steady(matrix.to_transition_matrix())  # doctest: +SKIP
    """

    def __init__(
        self,
        markov: Optional[MarkovSettings] = None,
        estimator: Optional[EstimatorSettings] = None,
    ) -> None:
        """
        初始化分析器

        Args:
            markov: 迭代配置,None时使用默认值
            estimator: 估计配置,None时使用默认值
        """
        self.markov = markov or MarkovSettings()
        self.estimator = estimator or EstimatorSettings()

    def estimate(
        self,
        trace: QueryTrace,
        row_overrides: Optional[Mapping[int, Sequence[RowValue]]] = None,
    ) -> InitialProbabilityMatrix:
        """由轨迹估计初始概率矩阵"""
        return self._estimate(trace, row_overrides)[0]

    def _estimate(
        self,
        trace: QueryTrace,
        row_overrides: Optional[Mapping[int, Sequence[RowValue]]],
    ) -> Tuple[InitialProbabilityMatrix, EpisodeExtraction]:
        extraction = extract_episodes(trace)
        if extraction.discarded:
            logger.info(f"轨迹末尾 {extraction.discarded} 次命中没有转移,不参与估计")
        matrix = build_initial_matrix(
            extraction.episodes,
            n=len(trace.catalog),
            default_row=self.estimator.default_row,
            weighting=self.estimator.weighting,
            row_overrides=row_overrides,
        )
        return matrix, extraction

    def start_vector(self, n: int, start_view: Optional[int] = None) -> StateVector:
        """按配置构造初始状态向量,unit模式默认从视图0出发"""
        if self.markov.start == "uniform":
            return StateVector.uniform(n)
        return StateVector.unit(n, start_view or 0)

    def prepare(self, matrix: TransitionMatrix, strict: bool = True) -> TransitionMatrix:
        """
        迭代前的检查与保护

        Args:
            matrix: 转移矩阵
            strict: 为真时不可约条件不满足且未开启自动保护则抛出ReducibleChain

        Returns:
            可能加了阻尼的转移矩阵

        Raises:
            NonStochasticMatrix: 行和偏离1超过容差
            ReducibleChain: strict且链不可约条件不满足
        """
        matrix.check_stochastic(self.markov.stochastic_tolerance)
        if self.markov.damping is not None:
            matrix = apply_damping(matrix, self.markov.damping)
        if check_irreducible(matrix):
            return matrix
        if self.markov.auto_guard:
            logger.warning(
                f"转移图不是强连通的,自动加阻尼 d={self.markov.guard_damping}"
            )
            return apply_damping(matrix, self.markov.guard_damping)
        if strict:
            raise ReducibleChain(f"n={matrix.n}")
        return matrix

    def steady(
        self,
        matrix: TransitionMatrix,
        start: Optional[StateVector] = None,
        strict: bool = True,
    ) -> SteadyStateResult:
        """
        迭代求稳态

        Args:
            matrix: 转移矩阵
            start: 初始向量,None时按配置构造
            strict: 为真时未收敛抛出NonConvergence,否则只记录警告

        Returns:
            SteadyStateResult
        """
        prepared = self.prepare(matrix, strict=strict)
        v0 = start if start is not None else self.start_vector(prepared.n)
        result = iterate_to_steady(
            v0,
            prepared,
            tol=self.markov.tol,
            max_iter=self.markov.max_iter,
            stochastic_tolerance=self.markov.stochastic_tolerance,
        )
        if not result.converged and strict:
            raise NonConvergence(result.iterations, result.residual)
        return result

    def exact(self, matrix: TransitionMatrix) -> StateVector:
        """直接求解稳态分布"""
        return stationary_exact(self.prepare(matrix, strict=True))

    def analyze_trace(
        self,
        trace: QueryTrace,
        start_view: Optional[int] = None,
        row_overrides: Optional[Mapping[int, Sequence[RowValue]]] = None,
        strict: bool = False,
    ) -> TraceAnalysis:
        """
        估计轨迹的转移矩阵并求稳态

        Args:
            trace: 查询轨迹
            start_view: unit模式的起始视图,None时取轨迹第一个事件的视图
            row_overrides: 给定行
            strict: 见steady

        Returns:
            TraceAnalysis
        """
        matrix, extraction = self._estimate(trace, row_overrides)
        if start_view is None and len(trace):
            start_view = int(trace.views[0])
        start = self.start_vector(matrix.n, start_view)
        result = self.steady(matrix.to_transition_matrix(), start=start, strict=strict)
        return TraceAnalysis(
            matrix=matrix,
            result=result,
            episodes=len(extraction.episodes),
            discarded=extraction.discarded,
        )
