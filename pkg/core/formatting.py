"""数值输出格式,固定有效数字位数,与区域设置无关"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

FLOAT_DIGITS = 12

Number = Union[float, int, Fraction]


def format_decimal(value: Number, digits: int = FLOAT_DIGITS) -> str:
    """
    格式化为固定有效数字的十进制字符串

    Example:
        >>> format_decimal(Fraction(17, 24))
        '0.708333333333'
        >>> format_decimal(1.0)
        '1'
    """
    text = format(float(value), f".{digits}g")
    return "0" if text == "-0" else text


def format_row(values: Iterable[Number], digits: int = FLOAT_DIGITS) -> str:
    return ",".join(format_decimal(v, digits) for v in values)
