"""
合成查询负载生成
按给定的视图转移规律(真实转移矩阵)生成马氏调制的查询轨迹
"""

from __future__ import annotations

import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.exceptions import InputNotFound
from core.rng import WORKLOAD_STREAM, make_generator
from markov.engine import TransitionMatrix
from views.catalog import QueryTrace, ViewCatalog

logger = logging.getLogger(__name__)

Probability = Union[str, float, int]


def _to_fraction(value: Probability) -> Fraction:
    # 浮点按十进制字面量解释,0.1 -> 1/10
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


class WorkloadSpec(BaseModel):
    """
    负载规格

    Attributes:
        n_views: 视图数
        ground_truth: n×n 真实转移矩阵,元素可以是小数或 "17/24" 形式的有理数
        n_queries: 查询数
        seed: 随机种子
        start_view: 第一个事件命中的视图(下标或视图名)
        view_names: 视图名,默认 V1..Vn

    Example:
        >>> spec = WorkloadSpec(
        ...     n_views=2,
        ...     ground_truth=[["1/2", "1/2"], [0.25, 0.75]],
        ...     n_queries=10,
        ... )
    """

    n_views: int = Field(..., ge=1)
    ground_truth: List[List[Probability]]
    n_queries: int = Field(..., ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    start_view: Union[int, str] = 0
    view_names: Optional[List[str]] = None

    @field_validator("ground_truth")
    @classmethod
    def validate_entries(cls, v: List[List[Probability]]) -> List[List[Probability]]:
        """检查每个元素都能解析为有理数"""
        for i, row in enumerate(v):
            for j, value in enumerate(row):
                try:
                    _to_fraction(value)
                except (ValueError, ZeroDivisionError) as e:
                    raise ValueError(f"ground_truth[{i}][{j}] 无法解析: {value!r}") from e
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> WorkloadSpec:
        """检查维度、视图名与起始视图,并检查真实矩阵的行随机条件"""
        n = self.n_views
        if len(self.ground_truth) != n or any(len(row) != n for row in self.ground_truth):
            raise ValueError(f"ground_truth 必须是 {n}×{n} 矩阵")
        if self.view_names is not None and len(self.view_names) != n:
            raise ValueError(f"view_names 需要 {n} 个名字,实际 {len(self.view_names)} 个")
        self.catalog()
        self.start_index()
        self.transition_matrix().check_stochastic()
        return self

    def catalog(self) -> ViewCatalog:
        names = self.view_names or [f"V{i + 1}" for i in range(self.n_views)]
        return ViewCatalog(tuple(names))

    def start_index(self) -> int:
        """起始视图下标"""
        if isinstance(self.start_view, str):
            return self.catalog().index(self.start_view)
        if not 0 <= self.start_view < self.n_views:
            raise ValueError(f"start_view 超出范围: {self.start_view}")
        return self.start_view

    def transition_matrix(self) -> TransitionMatrix:
        return TransitionMatrix.from_fractions(
            [[_to_fraction(v) for v in row] for row in self.ground_truth]
        )

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> WorkloadSpec:
        """
        读取JSON负载规格

        Raises:
            InputNotFound: 文件不存在或不可读
            pydantic.ValidationError: 内容不合法
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputNotFound(str(path)) from e
        return cls.model_validate_json(text)


def generate_workload(spec: WorkloadSpec) -> QueryTrace:
    """
    生成查询轨迹

    第0个事件命中start_view;第t+1个事件的视图从第t个事件所在视图的
    真实转移行中抽取。相同规格总是得到相同轨迹。

    Args:
        spec: 负载规格

    Returns:
        QueryTrace,查询标签为 Q1..Qm
    """
    catalog = spec.catalog()
    n = spec.n_views
    m = spec.n_queries
    views = np.empty(m, dtype=np.int64)
    if m:
        cumulative = np.cumsum(spec.transition_matrix().entries, axis=1)
        uniforms = make_generator(spec.seed, WORKLOAD_STREAM).random(max(m - 1, 0))
        current = spec.start_index()
        views[0] = current
        for t in range(1, m):
            current = min(
                int(np.searchsorted(cumulative[current], uniforms[t - 1], side="right")),
                n - 1,
            )
            views[t] = current

    logger.info(f"负载生成完成: n_views={n}, n_queries={m}, seed={spec.seed}")
    return QueryTrace(
        catalog=catalog,
        query_ids=tuple(f"Q{i + 1}" for i in range(m)),
        views=views,
    )
