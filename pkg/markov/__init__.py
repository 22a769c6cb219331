"""
马氏分析模块
稳态迭代、精确稳态求解与阻尼保护
"""

from markov.engine import (
    StateVector,
    SteadyStateResult,
    TransitionMatrix,
    apply_damping,
    check_irreducible,
    iterate_to_steady,
    step,
    trajectory,
)
from markov.exact import stationary_exact

__all__ = [
    "StateVector",
    "SteadyStateResult",
    "TransitionMatrix",
    "apply_damping",
    "check_irreducible",
    "iterate_to_steady",
    "stationary_exact",
    "step",
    "trajectory",
]
