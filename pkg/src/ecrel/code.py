from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CodeParams:
    """An ``(n, k)`` MDS code: ``n`` disks, any ``k`` of which recover the data."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and isinstance(self.k, int)):
            raise TypeError("n and k must be integers")
        if not 1 <= self.k < self.n:
            raise ValueError(f"need 1 <= k < n, got (n, k) = ({self.n}, {self.k})")

    @property
    def redundancy(self) -> int:
        """``n - k``, the number of simultaneous erasures the code tolerates."""
        return self.n - self.k

    def __str__(self) -> str:
        return f"({self.n},{self.k})"
