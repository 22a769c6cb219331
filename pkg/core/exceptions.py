"""
异常体系
所有业务异常继承MvCacheError,并携带命令行退出码
"""

from __future__ import annotations

from typing import Optional


class MvCacheError(Exception):
    """物化视图替换系统的基础异常"""

    exit_code: int = 1


# ==================== 输入格式错误 (退出码 2) ====================


class TraceFormatError(MvCacheError):
    """查询轨迹格式错误"""

    exit_code = 2


class MalformedLine(TraceFormatError):
    """轨迹中某一行字段数错误或视图名为空"""

    def __init__(self, line_no: int, detail: str = "") -> None:
        self.line_no = line_no
        self.detail = detail
        message = f"第 {line_no} 行格式错误"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class DuplicateHeaderMismatch(TraceFormatError):
    """存在表头但与规定表头不一致"""

    def __init__(self, header: str, expected: str) -> None:
        self.header = header
        self.expected = expected
        super().__init__(f"表头 '{header}' 与规定表头 '{expected}' 不一致")


class MatrixFormatError(MvCacheError):
    """矩阵CSV格式错误"""

    exit_code = 2


class InputNotFound(MvCacheError):
    """输入文件不存在或不可读"""

    exit_code = 2

    def __init__(self, path: str) -> None:
        self.path = path
        super().__init__(f"无法读取输入文件: {path}")


# ==================== 空输入 (退出码 3) ====================


class EmptyInputError(MvCacheError):
    """输入为空,策略无法运行"""

    exit_code = 3


class EmptyTier(MvCacheError):
    """在空层上求最优/最差视图"""

    exit_code = 3

    def __init__(self, tier_name: str) -> None:
        self.tier_name = tier_name
        super().__init__(f"{tier_name} 层为空")


# ==================== 数值错误 (退出码 4 / 5) ====================


class NonStochasticMatrix(MvCacheError):
    """矩阵不是行随机矩阵"""

    exit_code = 4

    def __init__(self, row: int, row_sum: float, detail: str = "") -> None:
        self.row = row
        self.row_sum = row_sum
        message = f"第 {row} 行不满足行随机条件 (行和={row_sum:.12g})"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class NonConvergence(MvCacheError):
    """幂迭代在max_iter内未收敛"""

    exit_code = 5

    def __init__(self, iterations: int, residual: float) -> None:
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"迭代 {iterations} 次后未收敛 (residual={residual:.12g}),"
            f"可尝试 --damping 0.85"
        )


class ReducibleChain(MvCacheError):
    """马氏链不可约条件不满足"""

    exit_code = 5

    def __init__(self, detail: Optional[str] = None) -> None:
        message = "转移图不是强连通的,稳态分布不唯一,可尝试 --damping 0.85"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


# ==================== 目录/维度/层错误 (退出码 6) ====================


class CatalogMismatch(MvCacheError):
    """视图不在共享目录中,或目录不一致"""

    exit_code = 6

    def __init__(self, message: str, line_no: Optional[int] = None) -> None:
        self.line_no = line_no
        if line_no is not None:
            message = f"第 {line_no} 行: {message}"
        super().__init__(message)


class IndexOutOfCatalog(MvCacheError):
    """视图下标超出目录大小"""

    exit_code = 6

    def __init__(self, index: int, size: int) -> None:
        self.index = index
        self.size = size
        super().__init__(f"视图下标 {index} 超出目录大小 {size}")


class DimensionMismatch(MvCacheError):
    """向量/矩阵/目录维度不一致"""

    exit_code = 6

    def __init__(self, expected: int, actual: int, what: str = "维度") -> None:
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}不一致: 期望 {expected}, 实际 {actual}")


class TierInvariantError(MvCacheError):
    """主存/辅存分区不变量被破坏"""

    exit_code = 6


class CapacityViolation(TierInvariantError):
    """主存视图数超过容量"""

    def __init__(self, size: int, capacity: int) -> None:
        self.size = size
        self.capacity = capacity
        super().__init__(f"主存将包含 {size} 个视图,超过容量 {capacity}")


__all__ = [
    "MvCacheError",
    "TraceFormatError",
    "MalformedLine",
    "DuplicateHeaderMismatch",
    "MatrixFormatError",
    "InputNotFound",
    "EmptyInputError",
    "EmptyTier",
    "NonStochasticMatrix",
    "NonConvergence",
    "ReducibleChain",
    "CatalogMismatch",
    "IndexOutOfCatalog",
    "DimensionMismatch",
    "TierInvariantError",
    "CapacityViolation",
]
