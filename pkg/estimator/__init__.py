"""
初始概率估计模块
从查询轨迹切分episode并构建初始概率矩阵
"""

from estimator.episodes import (
    Episode,
    EpisodeExtraction,
    EpisodeRow,
    episode_probabilities,
    extract_episodes,
    replay_episodes,
)
from estimator.matrix import (
    InitialProbabilityMatrix,
    RowProvenance,
    build_initial_matrix,
    worked_example_matrix,
)

__all__ = [
    "Episode",
    "EpisodeExtraction",
    "EpisodeRow",
    "episode_probabilities",
    "extract_episodes",
    "replay_episodes",
    "InitialProbabilityMatrix",
    "RowProvenance",
    "build_initial_matrix",
    "worked_example_matrix",
]
