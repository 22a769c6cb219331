"""
统一配置管理中心
使用Pydantic Settings进行配置验证和管理
命令行参数只覆盖本次调用,配置只提供默认值
"""

from __future__ import annotations

import logging
import sys
from functools import lru_cache
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

try:
    import json_log_formatter  # type: ignore
except ImportError:
    json_log_formatter = None

DefaultRow = Literal["uniform", "self_loop"]
Weighting = Literal["episode_mean", "transition_counts"]
PolicyName = Literal["markov", "lru", "lfu", "random"]


class EstimatorSettings(BaseSettings):
    """初始概率矩阵估计配置"""

    model_config = SettingsConfigDict(env_prefix="ESTIMATOR_", extra="ignore")

    default_row: DefaultRow = Field(
        default="uniform", description="没有任何episode的视图所用的默认行"
    )
    weighting: Weighting = Field(
        default="episode_mean", description="同一视图多个episode行的合并方式"
    )


class MarkovSettings(BaseSettings):
    """稳态迭代配置"""

    model_config = SettingsConfigDict(env_prefix="MARKOV_", extra="ignore")

    tol: float = Field(default=1e-8, gt=0.0, description="相邻迭代最大范数差阈值")
    max_iter: int = Field(default=10_000, gt=0, description="最大迭代次数")
    damping: Optional[float] = Field(
        default=None, gt=0.0, le=1.0, description="阻尼系数,None表示不加阻尼"
    )
    auto_guard: bool = Field(
        default=False, description="链不可约条件不满足时自动加阻尼"
    )
    guard_damping: float = Field(
        default=0.85, gt=0.0, lt=1.0, description="自动保护使用的阻尼系数"
    )
    stochastic_tolerance: float = Field(
        default=1e-6, gt=0.0, description="行随机检查的容差"
    )
    start: Literal["unit", "uniform"] = Field(
        default="unit", description="初始状态向量"
    )


class SimulationSettings(BaseSettings):
    """仿真配置"""

    model_config = SettingsConfigDict(env_prefix="SIM_", extra="ignore")

    policy: PolicyName = Field(default="markov", description="替换策略")
    retrain_interval: int = Field(default=500, ge=1, description="重新估计间隔(查询数)")
    capacity: int = Field(default=1, ge=0, description="主存容量(视图数)")
    seed: int = Field(default=0, ge=0, description="随机种子")
    window: Literal["recent", "cumulative"] = Field(
        default="recent", description="估计窗口: 最近一个间隔或累计"
    )
    tier_mode: Literal["per_tier", "global"] = Field(
        default="per_tier", description="按层分别估计或使用全局稳态向量"
    )
    require_gain: bool = Field(
        default=False, description="仅当提升视图得分高于淘汰视图时交换"
    )


class ObservabilitySettings(BaseSettings):
    """可观测性配置"""

    model_config = SettingsConfigDict(env_prefix="OBSERVABILITY_", extra="ignore")

    log_level: str = Field(default="WARNING", description="日志级别")
    log_format: Literal["json", "text"] = Field(default="text", description="日志格式")
    log_file: Optional[str] = Field(default=None, description="日志文件路径")

    @field_validator("log_level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """验证日志级别名称"""
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"无效的日志级别: {v}")
        return level


class AppSettings(BaseSettings):
    """应用主配置"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    app_name: str = Field(default="mvcache", description="应用名称")
    app_version: str = Field(default="1.0.0", description="应用版本")
    float_digits: int = Field(
        default=12, ge=1, le=17, description="数值输出的有效数字位数"
    )

    # 子配置
    estimator: EstimatorSettings = Field(default_factory=EstimatorSettings)
    markov: MarkovSettings = Field(default_factory=MarkovSettings)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    observability: ObservabilitySettings = Field(
        default_factory=ObservabilitySettings
    )

    def validate_settings(self) -> List[str]:
        """检查组合配置,返回警告列表"""
        warnings = []
        if self.markov.damping is not None and self.markov.auto_guard:
            warnings.append("已显式设置damping,auto_guard不会生效")
        if self.markov.tol >= 1e-2:
            warnings.append(f"tol={self.markov.tol} 过大,稳态只精确到两位小数左右")
        if self.simulation.capacity == 0:
            warnings.append("主存容量为0,仿真中不会发生任何提升")
        return warnings


@lru_cache()
def get_settings() -> AppSettings:
    """
    获取应用配置单例
    使用lru_cache确保配置只加载一次
    """
    settings = AppSettings()

    warnings = settings.validate_settings()
    if warnings:
        logger = logging.getLogger(__name__)
        logger.warning("配置警告:")
        for warning in warnings:
            logger.warning(f"  - {warning}")

    return settings


def setup_logging(
    observability: Optional[ObservabilitySettings] = None,
) -> None:
    """
    配置日志系统

    日志只写到stderr(或文件),stdout保留给命令输出。

    Args:
        observability: 可观测性配置,None时使用全局配置
    """
    observability = observability or get_settings().observability
    log_level = getattr(logging, observability.log_level, logging.WARNING)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if observability.log_file:
        log_path = Path(observability.log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))

    if observability.log_format == "json" and json_log_formatter:
        formatter = json_log_formatter.JSONFormatter()
        for handler in handlers:
            handler.setFormatter(formatter)

    logging.basicConfig(
        level=log_level,
        handlers=handlers,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True,
    )

    logging.getLogger(__name__).debug(
        f"日志系统已初始化 - 级别: {observability.log_level}, "
        f"格式: {observability.log_format}"
    )
