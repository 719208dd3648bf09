"""Sample budgets and deterministic, prefix-stable random streams."""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SampleBudget:
    """How many draws a sampled check may use, from which seed."""

    n_samples: int = 10_000
    seed: int = 0
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    def with_samples(self, n: int) -> SampleBudget:
        return SampleBudget(n, self.seed, self.tolerance)


class SampleStream:
    """Rows of independent U(0, 1) draws keyed by ``(seed, label)``.

    Rows are generated in fixed-size blocks, each from its own generator, so
    the first ``n`` rows never depend on how many rows are requested in total.
    Raising a budget therefore only appends samples.
    """

    BLOCK = 1024

    def __init__(self, seed: int, label: str, width: int) -> None:
        self._key = [int(seed) & _MASK64, zlib.crc32(label.encode("utf-8"))]
        self.width = width

    def block(self, b: int) -> np.ndarray:
        rng = np.random.default_rng(self._key + [b])
        return rng.random((self.BLOCK, self.width))

    def rows(self, n: int) -> Iterator[list[float]]:
        for b in range((n + self.BLOCK - 1) // self.BLOCK):
            rows = self.block(b).tolist()
            yield from rows[: min(self.BLOCK, n - b * self.BLOCK)]

    def take(self, n: int) -> list[list[float]]:
        return list(self.rows(n))
