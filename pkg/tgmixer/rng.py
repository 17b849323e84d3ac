"""Random streams derived from one root seed."""

import numpy as np

from .models import SeedStream

__all__ = ["derive_rng"]


def derive_rng(seed: int, stream: SeedStream, *extra: int) -> np.random.Generator:
    """Generator for (seed, stream, *extra); independent of every other tuple."""
    return np.random.default_rng([int(seed), int(stream), *(int(e) for e in extra)])
