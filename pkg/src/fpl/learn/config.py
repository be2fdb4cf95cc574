from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class LearnError(ValueError):
    pass


@dataclass(frozen=True)
class LearnConfig:
    """Hyperparameters of the learner.

    ``dev_threshold`` of None picks 3 standard deviations for multi-dimensional
    data and 4 for one-dimensional data.
    """

    init_len: int = 10
    min_traj: int = 5
    dev_threshold: Optional[float] = None
    dev_window: int = 3
    cluster_std_threshold: float = 2.0
    merge_similarity_threshold: float = 0.5
    merge_time_weight: float = 1.0
    merge_samples: int = 20
    std_floor: float = 1e-3
    max_depth: int = 64

    def __post_init__(self):
        if self.init_len < 2:
            raise LearnError("init_len must be at least 2")
        if self.min_traj < 2:
            raise LearnError("min_traj must be at least 2")
        if self.dev_threshold is not None and not self.dev_threshold > 0:
            raise LearnError("dev_threshold must be positive")
        if self.dev_window < 1:
            raise LearnError("dev_window must be at least 1")
        if not 0 < self.merge_similarity_threshold < 1:
            raise LearnError("merge_similarity_threshold must lie in (0, 1)")

    def threshold_for(self, dim: int) -> float:
        if self.dev_threshold is not None:
            return self.dev_threshold
        return 4.0 if dim == 1 else 3.0
