"""Random generators shared by the test modules (numpy Generators, seeded by callers)."""
import numpy as np

from varlp import ExponentSeq, SeqVector
from varlp.exponents import INF


def exponent_values(rng, size, low=1.0, high=6.0, p_inf=0.1, p_one=0.1):
    v = rng.uniform(low, high, size)
    r = rng.random(size)
    v[r < p_one] = 1.0
    v[r > 1.0 - p_inf] = INF
    return v


def exponent_prefix(rng, length, **kw):
    """A finite-prefix exponent sequence; the last value repeats."""
    return ExponentSeq.finite(exponent_values(rng, length, **kw).tolist())


def coefficients(rng, size):
    # mixed magnitudes, both signs
    return rng.normal(size=size) * np.exp(rng.uniform(-3.0, 3.0, size))


def sparse_vector(rng, max_support=16, max_index=None):
    k = int(rng.integers(1, max_support + 1))
    max_index = max_index or 2 * max_support
    idx = np.sort(rng.choice(np.arange(1, max_index + 1), size=k, replace=False))
    return SeqVector(idx, coefficients(rng, k))
