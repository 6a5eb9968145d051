"""Seeded random streams and Haar-uniform orthonormal frames.

Every randomized routine in the package draws from a labeled substream of
its seed, so results are bit-identical no matter how work is scheduled
across threads or replications.
"""

import numpy as np

from .errors import ParameterError


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the (seed, key...) substream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Stable integer seed for the (seed, key...) substream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def haar_stiefel(dims: int, subdim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform (dims, subdim) matrix with orthonormal columns.

    Gaussian matrix, thin QR, column signs fixed so the R diagonal is
    positive (required for Haar uniformity of the Q factor).
    """
    if subdim > dims:
        raise ParameterError(f"subspace dimension {subdim} exceeds ambient {dims}")
    if subdim < 1:
        raise ParameterError(f"subspace dimension must be >= 1, got {subdim}")
    gauss = rng.standard_normal((dims, subdim))
    q, r = np.linalg.qr(gauss, mode="reduced")
    signs = np.where(np.diagonal(r) < 0.0, -1.0, 1.0)
    return q * signs
