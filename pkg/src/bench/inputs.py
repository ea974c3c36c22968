from typing import List

import numpy as np
from numpy.random import SFC64, Generator, SeedSequence

from model.enums import InputGenerator

# keys stay below 2^63 so they survive the signed paths of numpy and pandas
KEY_LIMIT = 2 ** 63
FEW_DISTINCT = 16


class InputFactory:

    def __init__(self, seed: int):
        """Seeded key generator; the same seed always yields the same keys."""
        self.seed = seed
        self.rng = Generator(SFC64(SeedSequence(seed)))

    def keys(self, n: int, generator: InputGenerator) -> List[int]:
        if generator is InputGenerator.Uniform:
            keys = self.rng.integers(KEY_LIMIT, size=n, dtype=np.uint64)
        elif generator is InputGenerator.Sorted:
            keys = np.sort(self.rng.integers(KEY_LIMIT, size=n, dtype=np.uint64))
        elif generator is InputGenerator.Reverse:
            keys = np.sort(self.rng.integers(KEY_LIMIT, size=n, dtype=np.uint64))[::-1]
        elif generator is InputGenerator.FewDistinct:
            keys = self.rng.integers(FEW_DISTINCT, size=n, dtype=np.uint64)
        else:
            raise ValueError(f'unknown input generator {generator!r}')
        return [int(key) for key in keys]
