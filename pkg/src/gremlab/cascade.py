"""Samplers for the limiting objects: exponential-intensity Poisson processes,
their nested cascade, the block-weighted energy functional, and the truncated
partition integral of the frozen phase.

Points of a single process are x_i = -log Gamma_i with Gamma_i the running
sums of unit exponentials, so the sequence is strictly decreasing and the top
point is standard Gumbel.  A depth-m cascade attaches an independent copy to
every node of the K-ary index tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gremlab.disorder import exponentials, stream_key

DEFAULT_TOP_COUNT = 64
CASCADE_TUPLE_CAP = 1 << 24

_PPP_STREAM = 0x70705031  # tag shared by single processes and cascade nodes


@dataclass(frozen=True)
class PointSample:
    """Finite descending point multiset with truncation metadata.

    Points are sorted non-increasing; continuous generators produce strictly
    decreasing values, ties can only come from degenerate sources such as
    the zero-disorder mode.
    """

    points: tuple[float, ...]
    truncation: int
    meta: str = ""

    def __post_init__(self):
        if any(b > a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("points must be sorted in descending order")

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points)


@dataclass(frozen=True)
class CascadeSample:
    """Top-K points of every node of a depth-m cascade.

    points_by_level[l-1] has shape (K,)*l; entry [a_1, ..., a_l] is the
    (a_l+1)-th largest point of the process attached to node (a_1...a_{l-1}).
    """

    m: int
    K: int
    seed: int
    points_by_level: tuple[np.ndarray, ...]

    def tuples(self) -> np.ndarray:
        """All K^m point vectors (e_1, ..., e_m), paths in C order."""
        K, m = self.K, self.m
        out = np.empty((K**m, m))
        for l in range(1, m + 1):
            flat = self.points_by_level[l - 1].reshape(-1)
            out[:, l - 1] = np.repeat(flat, K ** (m - l))
        return out


def _ppp_points(key, K: int) -> np.ndarray:
    gaps = exponentials(key, 0, K)
    return -np.log(np.cumsum(gaps))


def _node_key(seed: int, level: int, node: int):
    return stream_key(seed, _PPP_STREAM, level, node)


def sample_ppp_exp(seed: int, K: int = DEFAULT_TOP_COUNT) -> PointSample:
    """The K largest points of a Poisson process with intensity e^{-x} dx."""
    if K < 1:
        raise ValueError(f"top count must be >= 1, got {K}")
    pts = _ppp_points(_node_key(seed, 1, 0), K)
    return PointSample(points=tuple(float(p) for p in pts), truncation=K,
                       meta=f"ppp-exp seed={seed} K={K}")


def sample_cascade(seed: int, m: int, K: int = DEFAULT_TOP_COUNT) -> CascadeSample:
    """Depth-m cascade with an independent K-point process per tree node.

    Node (a_1...a_{l-1}) at level l draws from its own counter-based stream,
    so the sample is a pure function of the seed.
    """
    if m < 1:
        raise ValueError(f"depth must be >= 1, got {m}")
    if K < 1:
        raise ValueError(f"top count must be >= 1, got {K}")
    if K**m > CASCADE_TUPLE_CAP:
        raise ValueError(f"K^m = {K**m} exceeds the tuple cap {CASCADE_TUPLE_CAP}")
    levels = []
    for l in range(1, m + 1):
        n_nodes = K ** (l - 1)
        arr = np.empty((n_nodes, K))
        for node in range(n_nodes):
            arr[node] = _ppp_points(_node_key(seed, l, node), K)
        levels.append(arr.reshape((K,) * l))
    return CascadeSample(m=m, K=K, seed=seed, points_by_level=tuple(levels))


def cascade_energy(cs: CascadeSample, gamma_bar) -> PointSample:
    """Energies sum_l gamma_bar_l e_l over all index paths, descending.

    The weights must be strictly decreasing and positive, as produced by the
    coarse-graining.
    """
    g = np.asarray(gamma_bar, dtype=float)
    if g.ndim != 1 or g.size != cs.m:
        raise ValueError(f"need {cs.m} weights, got shape {g.shape}")
    if np.any(g <= 0) or np.any(np.diff(g) >= 0):
        raise ValueError("weights must be positive and strictly decreasing")
    total = _energy_grid(cs, g)
    pts = np.sort(total.reshape(-1))[::-1]
    return PointSample(points=tuple(float(p) for p in pts),
                       truncation=cs.K**cs.m,
                       meta=f"cascade-energy m={cs.m} K={cs.K} seed={cs.seed}")


def _energy_grid(cs: CascadeSample, g: np.ndarray) -> np.ndarray:
    total = np.zeros((cs.K,) * cs.m)
    for l in range(1, cs.m + 1):
        shape = (cs.K,) * l + (1,) * (cs.m - l)
        total = total + g[l - 1] * cs.points_by_level[l - 1].reshape(shape)
    return total


@dataclass(frozen=True)
class PartitionIntegral:
    """Truncated integral of exp(beta * energy) against the cascade."""

    value: float
    log_value: float
    beta: float
    tail_flagged: bool


def cascade_partition_integral(cs: CascadeSample, gamma_bar, beta: float) -> PartitionIntegral:
    """Truncated sum over index paths of exp(beta sum_l gamma_bar_l e_l).

    Requires beta * gamma_bar_l > 1 for every level (the frozen condition);
    otherwise the untruncated integral diverges and truncation would be
    meaningless.  The tail flag is set when the paths through the smallest
    retained first-level point still carry more than 1e-3 of the total,
    indicating the truncation depth is too shallow.
    """
    g = np.asarray(gamma_bar, dtype=float)
    if g.ndim != 1 or g.size != cs.m:
        raise ValueError(f"need {cs.m} weights, got shape {g.shape}")
    if np.any(g <= 0) or np.any(np.diff(g) >= 0):
        raise ValueError("weights must be positive and strictly decreasing")
    if beta <= 0 or np.any(beta * g <= 1.0):
        raise ValueError("need beta * gamma > 1 at every level (frozen condition)")
    energies = _energy_grid(cs, g)
    w = beta * energies
    m = float(w.max())
    e = np.exp(w - m)
    total = float(e.sum())
    last_first_level = float(e.reshape(cs.K, -1)[-1].sum())
    return PartitionIntegral(
        value=math.exp(m) * total,
        log_value=m + math.log(total),
        beta=beta,
        tail_flagged=(last_first_level / total) > 1e-3,
    )
