"""
稳态分布的直接求解

解 πP = π, Σπ = 1。矩阵带精确有理数行时用sympy做有理数高斯消元,
否则用numpy直接求解。作为幂迭代结果的独立对照。
"""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np
import sympy

from core.exceptions import ReducibleChain
from markov.engine import StateVector, TransitionMatrix, check_irreducible

logger = logging.getLogger(__name__)


def _solve_rational(P: TransitionMatrix) -> StateVector:
    n = P.n
    assert P.exact is not None
    # (Pᵀ − I)π = 0,最后一个方程换成 Σπ = 1
    system = sympy.zeros(n, n)
    for i, row in enumerate(P.exact):
        for j, value in enumerate(row):
            system[j, i] = sympy.Rational(value.numerator, value.denominator)
    for i in range(n):
        system[i, i] -= 1
    for j in range(n):
        system[n - 1, j] = sympy.Integer(1)
    rhs = sympy.zeros(n, 1)
    rhs[n - 1, 0] = sympy.Integer(1)

    solution = system.LUsolve(rhs)
    exact = tuple(Fraction(int(x.p), int(x.q)) for x in solution)
    return StateVector(probs=np.array([float(x) for x in exact]), exact=exact)


def _solve_float(P: TransitionMatrix) -> StateVector:
    n = P.n
    system = P.entries.T - np.eye(n)
    system[n - 1, :] = 1.0
    rhs = np.zeros(n)
    rhs[n - 1] = 1.0
    pi = np.linalg.solve(system, rhs)
    pi = np.clip(pi, 0.0, None)
    return StateVector(probs=pi / pi.sum())


def stationary_exact(P: TransitionMatrix) -> StateVector:
    """
    直接线性求解稳态分布

    Args:
        P: 行随机转移矩阵

    Returns:
        唯一满足 π·P = π 且 Σπ = 1 的状态向量;精确路径下exact字段给出有理数解

    Raises:
        ReducibleChain: 正元素有向图不是强连通的

    Example:
        >>> P = TransitionMatrix.from_fractions(
        ...     [["17/24", "1/8", "1/6"], ["1/5", "7/10", "1/10"], ["1/10", "1/10", "4/5"]]
        ... )
        >>> stationary_exact(P).exact
        (Fraction(12, 37), Fraction(10, 37), Fraction(15, 37))
    """
    if not check_irreducible(P):
        raise ReducibleChain(f"n={P.n}")

    if P.exact is not None:
        logger.debug(f"使用有理数高斯消元求解 n={P.n} 的稳态分布")
        return _solve_rational(P)

    logger.debug(f"使用浮点直接求解 n={P.n} 的稳态分布")
    return _solve_float(P)
