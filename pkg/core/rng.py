"""
可复现随机数生成器
所有随机性来自显式种子,按用途划分独立子流
"""

from __future__ import annotations

import numpy as np

# 子流编号
WORKLOAD_STREAM = 0
POLICY_STREAM = 1


def make_generator(seed: int, stream: int = WORKLOAD_STREAM) -> np.random.Generator:
    """
    创建指定种子与子流的随机数生成器

    同一(seed, stream)总是得到相同序列;不同stream之间统计独立。

    Args:
        seed: 非负整数种子(64位)
        stream: 子流编号

    Returns:
        基于PCG64DXSM的Generator

    Example:
        >>> rng = make_generator(42, WORKLOAD_STREAM)
        >>> rng.random()  # doctest: +SKIP
    """
    if seed < 0:
        raise ValueError(f"种子必须为非负整数: {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64DXSM(sequence))
