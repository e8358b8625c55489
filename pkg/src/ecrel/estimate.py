from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class SimEstimate:
    """Binomial Monte Carlo estimate.

    ``p_hat`` is the raw hit fraction. Estimators of scaled quantities (for
    example a volume polynomial value) set ``scale`` and read ``value`` /
    ``value_error`` instead.
    """

    p_hat: float
    std_error: float
    trials: int
    losses: int
    seed: int
    scale: float = 1.0

    @classmethod
    def from_counts(cls, losses: int, trials: int, seed: int, scale: float = 1.0) -> SimEstimate:
        if trials < 1:
            raise ValueError("trials must be >= 1")
        p = losses / trials
        return cls(
            p_hat=p,
            std_error=math.sqrt(p * (1.0 - p) / trials),
            trials=trials,
            losses=losses,
            seed=seed,
            scale=scale,
        )

    @property
    def value(self) -> float:
        return self.scale * self.p_hat

    @property
    def value_error(self) -> float:
        return self.scale * self.std_error
