"""
矩阵与向量的CSV读写

矩阵格式:
    # views: V1,V2,V3
    0.708333333333,0.125,0.166666666667
    ...
向量格式相同,只有一行数据。
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Tuple, Union

from core.exceptions import MatrixFormatError
from core.formatting import FLOAT_DIGITS, format_row
from estimator.matrix import InitialProbabilityMatrix
from markov.engine import StateVector, TransitionMatrix
from views.catalog import ViewCatalog

logger = logging.getLogger(__name__)

VIEWS_PREFIX = "# views:"

# 12位有效数字的十进制值,在此范围内恢复为小分母有理数
_RECOVERY_DENOMINATOR = 10**4
_RECOVERY_TOLERANCE = Fraction(1, 10**12)


def _views_line(catalog: ViewCatalog) -> str:
    return f"{VIEWS_PREFIX} {','.join(catalog.names)}"


def write_matrix_csv(
    matrix: Union[InitialProbabilityMatrix, TransitionMatrix],
    catalog: ViewCatalog,
    digits: int = FLOAT_DIGITS,
) -> str:
    """
    导出矩阵CSV

    Args:
        matrix: 初始概率矩阵或转移矩阵
        catalog: 视图目录,大小必须等于n
        digits: 有效数字位数

    Returns:
        CSV文本,第i行为从视图i出发的转移概率
    """
    rows = matrix.exact if matrix.exact is not None else matrix.entries
    if len(rows) != len(catalog):
        raise MatrixFormatError(f"矩阵维度 {len(rows)} 与目录大小 {len(catalog)} 不一致")
    lines = [_views_line(catalog)]
    lines.extend(format_row(row, digits) for row in rows)
    return "\n".join(lines) + "\n"


def write_vector_csv(
    vector: StateVector, catalog: ViewCatalog, digits: int = FLOAT_DIGITS, exact: bool = False
) -> str:
    """导出状态向量,exact为真且向量带有理数分量时按有理数格式化"""
    values = vector.exact if exact and vector.exact is not None else vector.tolist()
    return f"{_views_line(catalog)}\n{format_row(values, digits)}\n"


def recover_rational(text: str) -> Fraction:
    """
    把十进制字符串还原为有理数

    若存在分母不超过10⁴、与该十进制值相差不超过1e-12的有理数则取之,
    否则取十进制值本身的精确有理数。
    """
    value = Fraction(text.strip())
    candidate = value.limit_denominator(_RECOVERY_DENOMINATOR)
    if abs(candidate - value) <= _RECOVERY_TOLERANCE:
        return candidate
    return value


def _parse_views_line(line: str) -> ViewCatalog:
    if not line.startswith(VIEWS_PREFIX):
        raise MatrixFormatError(f"第1行必须以 '{VIEWS_PREFIX}' 开头")
    names = [name.strip() for name in line[len(VIEWS_PREFIX):].split(",")]
    try:
        return ViewCatalog(tuple(names))
    except ValueError as e:
        raise MatrixFormatError(f"视图名无效: {e}") from e


def read_matrix_csv(text: str) -> Tuple[ViewCatalog, TransitionMatrix]:
    """
    读取矩阵CSV

    Returns:
        (目录, 带精确有理数行的转移矩阵)

    Raises:
        MatrixFormatError: 格式错误、行数或列数与视图数不一致、数值无法解析
    """
    lines = [line.rstrip("\r") for line in text.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise MatrixFormatError("矩阵文件为空")

    catalog = _parse_views_line(lines[0])
    n = len(catalog)
    data = lines[1:]
    if len(data) != n:
        raise MatrixFormatError(f"需要 {n} 行数据,实际 {len(data)} 行")

    rows: List[Tuple[Fraction, ...]] = []
    for offset, line in enumerate(data, start=2):
        fields = line.split(",")
        if len(fields) != n:
            raise MatrixFormatError(f"第 {offset} 行需要 {n} 个值,实际 {len(fields)} 个")
        try:
            rows.append(tuple(recover_rational(field) for field in fields))
        except (ValueError, ZeroDivisionError) as e:
            raise MatrixFormatError(f"第 {offset} 行数值无法解析: {e}") from e

    logger.info(f"矩阵读取完成: n={n}")
    return catalog, TransitionMatrix.from_fractions(rows)
