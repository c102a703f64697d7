"""
Alias-method sampling tables
"""

from typing import Sequence

import numpy as np


class AliasTable:
    """O(1) sampling from a fixed discrete distribution (Vose's method)"""

    def __init__(self, probabilities: Sequence[float]):
        probs = np.asarray(probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("alias table needs a non-empty probability vector")
        total = probs.sum()
        if not np.isfinite(total) or total <= 0 or (probs < 0).any():
            raise ValueError("probabilities must be non-negative with a positive sum")

        n = probs.size
        scaled = probs * (n / total)
        self.prob = np.ones(n, dtype=float)
        self.alias = np.arange(n, dtype=int)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = g
            scaled[g] = scaled[g] - (1.0 - scaled[s])
            if scaled[g] < 1.0:
                small.append(g)
            else:
                large.append(g)
        # leftovers are 1 up to rounding
        for i in small + large:
            self.prob[i] = 1.0

    def __len__(self) -> int:
        return int(self.prob.size)

    def sample(self, rng: np.random.Generator) -> int:
        """Draw one index"""
        i = int(rng.integers(len(self)))
        return i if rng.random() < self.prob[i] else int(self.alias[i])

    def distribution(self) -> np.ndarray:
        """Probabilities implied by the table"""
        n = len(self)
        implied = self.prob / n
        np.add.at(implied, self.alias, (1.0 - self.prob) / n)
        return implied
