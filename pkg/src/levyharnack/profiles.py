"""Ratio profiles: the evidence container for every two-sided comparability claim."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RatioProfile:
    """Grid of (argument, ratio) pairs with the observed extremes.

    Whenever the theory asserts that two quantities agree up to bounded
    multiplicative constants, the artifact stores the pointwise ratio on a
    grid; ``max_ratio / min_ratio`` is the empirical comparability constant.
    """

    label: str
    arguments: np.ndarray
    ratios: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        args = np.asarray(self.arguments, dtype=float)
        ratios = np.asarray(self.ratios, dtype=float)
        object.__setattr__(self, "arguments", args)
        object.__setattr__(self, "ratios", ratios)
        if args.shape != ratios.shape:
            raise ValueError("arguments and ratios must have matching shapes")
        if args.size == 0:
            raise ValueError("empty profile")
        if not np.all(np.isfinite(ratios)) or np.any(ratios <= 0.0):
            raise ValueError(f"profile '{self.label}' has nonpositive or "
                             "non-finite ratios")

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min())

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def spread(self) -> float:
        """max/min: the empirical two-sided comparability constant."""
        return self.max_ratio / self.min_ratio

    def rows(self):
        for a, r in zip(self.arguments, self.ratios):
            yield {"argument": float(a), "ratio": float(r)}
