"""Counter-based random variates: reproducible, random-access, thread-safe.

Every variate is a pure function of (seed, stream tags, position): a 64-bit
SplitMix-style avalanche hash of the counter feeds the normal inverse CDF
(or -log for unit exponentials).  Identical inputs give identical outputs on
every platform and under any threading schedule, and any slice of a stream
can be generated without generating the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_U64 = np.uint64
_MIX_GAMMA = _U64(0x9E3779B97F4A7C15)
_MIX_M1 = _U64(0xBF58476D1CE4E5B9)
_MIX_M2 = _U64(0x94D049BB133111EB)

# uint64 arithmetic wraps modulo 2^64 by design
_ERR = {"over": "ignore"}


def _mix(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """SplitMix64 finalizer: full-avalanche bijection on 64-bit words."""
    with np.errstate(**_ERR):
        z = (z ^ (z >> _U64(30))) * _MIX_M1
        z = (z ^ (z >> _U64(27))) * _MIX_M2
        return z ^ (z >> _U64(31))


def stream_key(seed: int, *tags: int) -> np.uint64:
    """Derive the key of an independent stream from a seed and integer tags."""
    with np.errstate(**_ERR):
        k = _mix(_U64(seed % (1 << 64)) * _MIX_M1 ^ _MIX_GAMMA)
        for t in tags:
            k = _mix((k + _MIX_GAMMA) ^ _U64(t % (1 << 64)) * _MIX_M2)
    return k


def _words(key: np.uint64, start: int, count: int) -> np.ndarray:
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(**_ERR):
        return _mix(key + idx * _MIX_GAMMA)


def uniforms(key: np.uint64, start: int, count: int) -> np.ndarray:
    """Open-interval uniforms from the top 53 bits of each word."""
    w = _words(key, start, count)
    return ((w >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(key: np.uint64, start: int, count: int) -> np.ndarray:
    """Standard normals at stream positions [start, start+count)."""
    return ndtri(uniforms(key, start, count))


def exponentials(key: np.uint64, start: int, count: int) -> np.ndarray:
    """Unit-rate exponentials at stream positions [start, start+count)."""
    return -np.log(uniforms(key, start, count))


@dataclass(frozen=True)
class DisorderAddress:
    """Position of one hierarchical Gaussian: level k and bit-packed prefix."""

    level: int
    path: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if self.path < 0:
            raise ValueError(f"path must be nonnegative, got {self.path}")


def disorder_gaussian(seed: int, addr: DisorderAddress, replica: int = 0) -> float:
    """The standard normal attached to one tree node, as a pure function.

    Distinct (seed, replica, level, path) tuples map to distinct counter
    positions of the hash stream; the value never depends on evaluation
    order.
    """
    key = stream_key(seed, replica, addr.level)
    return float(normals(key, addr.path, 1)[0])


def level_stream_key(seed: int, replica: int, level: int) -> np.uint64:
    """Key of the stream holding a whole level, indexed by packed prefix."""
    return stream_key(seed, replica, level)


def gaussians_across_replicas(seed: int, replicas: int, level: int, path: int) -> np.ndarray:
    """One tree node's Gaussian in every replica, as a vectorized ensemble.

    Equals [disorder_gaussian(seed, addr, r) for r in range(replicas)] but in
    one pass; used for quenched ensemble statistics such as covariance checks.
    """
    with np.errstate(**_ERR):
        k = _mix(_U64(seed % (1 << 64)) * _MIX_M1 ^ _MIX_GAMMA)
        reps = np.arange(replicas, dtype=np.uint64)
        keys = _mix((k + _MIX_GAMMA) ^ reps * _MIX_M2)
        keys = _mix((keys + _MIX_GAMMA) ^ _U64(level) * _MIX_M2)
        w = _mix(keys + _U64(path + 1) * _MIX_GAMMA)
    u = ((w >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


class HashDisorder:
    """Level-array view of the hash disorder for one (seed, replica)."""

    def __init__(self, seed: int, replica: int):
        self.seed = seed
        self.replica = replica

    def level_values(self, level: int, start: int, count: int) -> np.ndarray:
        return normals(level_stream_key(self.seed, self.replica, level), start, count)


class ZeroDisorder:
    """All Gaussians forced to zero; isolates the field contribution."""

    def level_values(self, level: int, start: int, count: int) -> np.ndarray:
        return np.zeros(count)


class FixedDisorder:
    """Explicit per-level arrays, for hand-built test instances."""

    def __init__(self, arrays: dict[int, np.ndarray]):
        self.arrays = {k: np.asarray(v, dtype=float) for k, v in arrays.items()}

    def level_values(self, level: int, start: int, count: int) -> np.ndarray:
        return self.arrays[level][start:start + count]
