"""Exact finite-size enumeration of the hierarchical Gaussian Hamiltonian.

Configurations are the integers s in [0, 2^N): bit N-1-i of s is spin i,
with bit value 0 meaning spin +1, so the first-L-spins prefix is s >> (N-L)
and the magnetization class (number of minus spins) is popcount(s).  All
accumulation happens on the Boltzmann exponent scale
Y(s) = sqrt(N) sum_k a_k g_k(prefix_k(s)) + h (N - 2 popcount(s)),
chunk by chunk with a per-class running log-sum-exp.  Everything is a pure
function of (spec, replica), so results are independent of chunking and
thread schedule.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from gremlab.cascade import PointSample
from gremlab.disorder import HashDisorder, ZeroDisorder
from gremlab.hierarchy import OrderParameter, grem_scaling
from gremlab.scalars import rem_scaling

DEFAULT_SIZE_CAP = 28
_CHUNK_BITS = 20


class EnumerationCapError(ValueError):
    """Raised when 2^N leaf visits would exceed the configured cap."""


@dataclass(frozen=True)
class SimulationSpec:
    """Complete description of a reproducible finite-N experiment."""

    N: int
    op: OrderParameter
    h: float
    betas: tuple[float, ...]
    seed: int
    replicas: int = 1
    zero_disorder: bool = False
    size_cap: int = DEFAULT_SIZE_CAP

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.N > self.size_cap:
            raise EnumerationCapError(
                f"N={self.N} exceeds the enumeration cap {self.size_cap}")
        if self.h < 0:
            raise ValueError(f"field strength must be nonnegative, got {self.h}")
        if self.replicas < 1:
            raise ValueError(f"replicas must be >= 1, got {self.replicas}")
        betas = tuple(float(b) for b in self.betas)
        if not betas or any(b <= 0 for b in betas):
            raise ValueError("betas must be a nonempty sequence of positive values")
        object.__setattr__(self, "betas", betas)
        for xk in self.op.x:
            if abs(xk * self.N - round(xk * self.N)) > 1e-9:
                raise ValueError(
                    f"level boundary x={xk} times N={self.N} must be an integer")

    @property
    def level_bits(self) -> tuple[int, ...]:
        """Prefix length x_k * N per level."""
        return tuple(round(xk * self.N) for xk in self.op.x)


@dataclass(frozen=True)
class ObservableRecord:
    """Per-replica exact observables.

    logZ[j] is log of the partition sum at betas[j]; p_N = logZ/N;
    M_N = max energy / sqrt(N); restricted_logZ[j][k] is the log partition
    sum over the magnetization class with k minus spins (log 0 classes are
    -inf); argmax_magnetization is the magnetization of the maximizing
    configuration.
    """

    replica: int
    betas: tuple[float, ...]
    logZ: tuple[float, ...]
    p_N: tuple[float, ...]
    M_N: float
    restricted_logZ: tuple[tuple[float, ...], ...]
    argmax_magnetization: float


@dataclass(frozen=True)
class RestrictedPartition:
    """Log partition sums over a magnetization window, or an empty marker."""

    q: float
    eps: float
    classes: tuple[int, ...]
    log_values: tuple[float, ...] | None
    empty: bool


@dataclass
class _EnumerationResult:
    log_z: np.ndarray            # (n_beta,)
    class_log_z: np.ndarray      # (n_beta, N+1) over popcount(s ^ reference)
    y_max: float
    argmax_state: int
    top_y: np.ndarray            # descending, length <= top_k


def _disorder_source(spec: SimulationSpec, replica: int):
    if spec.zero_disorder:
        return ZeroDisorder()
    return HashDisorder(spec.seed, replica)


def _enumerate(spec: SimulationSpec, source, with_field: bool = True,
               reference: int = 0, top_k: int = 0,
               compute_partition: bool = True) -> _EnumerationResult:
    """Single pass over all 2^N configurations, chunked and order-fixed."""
    N = spec.N
    n_beta = len(spec.betas)
    betas = np.asarray(spec.betas)
    sqrt_n = math.sqrt(N)
    a = spec.op.a
    bits = spec.level_bits
    chunk_bits = min(N, _CHUNK_BITS)
    chunk_len = 1 << chunk_bits
    n_chunks = 1 << (N - chunk_bits)

    class_log_z = np.full((n_beta, N + 1), -np.inf)
    log_z = np.full(n_beta, -np.inf)
    y_max = -np.inf
    argmax_state = 0
    top = np.empty(0)
    ref = np.uint64(reference)

    for c in range(n_chunks):
        c0 = c << chunk_bits
        s = np.arange(c0, c0 + chunk_len, dtype=np.uint64)
        v = np.zeros(chunk_len)
        for k, L in enumerate(bits, start=1):
            shift = N - L
            p0 = c0 >> shift
            if shift >= chunk_bits:
                v += a[k - 1] * source.level_values(k, p0, 1)[0]
            elif shift == 0:
                v += a[k - 1] * source.level_values(k, c0, chunk_len)
            else:
                vals = source.level_values(k, p0, chunk_len >> shift)
                v += np.repeat(a[k - 1] * vals, 1 << shift)
        y = sqrt_n * v
        pop_field = np.bitwise_count(s).astype(np.int64)
        if with_field and spec.h != 0.0:
            y += spec.h * (N - 2 * pop_field)
        cls = pop_field if reference == 0 else np.bitwise_count(s ^ ref).astype(np.int64)

        i = int(np.argmax(y))
        if y[i] > y_max:
            y_max = float(y[i])
            argmax_state = c0 + i
        if top_k > 0:
            cand = y if chunk_len <= top_k else np.partition(y, chunk_len - top_k)[-top_k:]
            merged = np.concatenate([top, cand])
            if merged.size > top_k:
                merged = np.partition(merged, merged.size - top_k)[-top_k:]
            top = merged
        if not compute_partition:
            continue

        for j in range(n_beta):
            w = betas[j] * y
            shiftc = float(w.max())
            e = np.exp(w - shiftc)
            sums = np.bincount(cls, weights=e, minlength=N + 1)
            with np.errstate(divide="ignore"):
                chunk_log = shiftc + np.log(sums)
            class_log_z[j] = np.logaddexp(class_log_z[j], chunk_log)
            log_z[j] = np.logaddexp(log_z[j], shiftc + math.log(float(e.sum())))

    return _EnumerationResult(
        log_z=log_z, class_log_z=class_log_z, y_max=y_max,
        argmax_state=argmax_state, top_y=np.sort(top)[::-1],
    )


def exact_observables(spec: SimulationSpec, replica: int,
                      source=None) -> ObservableRecord:
    """Enumerate one disorder replica and collect the exact observables.

    The per-level Gaussians are drawn once per tree node and shared by the
    whole subtree; partition sums use a running maximum per inverse
    temperature, so no overflow occurs at any beta.  A custom disorder
    `source` (zero or fixed arrays) may be injected for validation runs.
    """
    if replica < 0 or replica >= spec.replicas:
        raise ValueError(f"replica index {replica} outside [0, {spec.replicas})")
    src = source if source is not None else _disorder_source(spec, replica)
    res = _enumerate(spec, src, with_field=True, reference=0, top_k=0)
    return ObservableRecord(
        replica=replica,
        betas=spec.betas,
        logZ=tuple(float(v) for v in res.log_z),
        p_N=tuple(float(v) / spec.N for v in res.log_z),
        M_N=res.y_max / spec.N,
        restricted_logZ=tuple(tuple(row) for row in res.class_log_z),
        argmax_magnetization=(spec.N - 2 * int(bin(res.argmax_state).count("1"))) / spec.N,
    )


def restricted_partition(spec: SimulationSpec, replica: int, q: float, eps: float,
                         record: ObservableRecord | None = None) -> RestrictedPartition:
    """Log partition sums over configurations with magnetization within eps of q.

    Assembled from the per-class sums; a window containing no magnetization
    class yields an explicit empty marker rather than -inf values.
    """
    if not -1.0 <= q <= 1.0:
        raise ValueError(f"target magnetization must lie in [-1, 1], got {q}")
    if eps <= 0:
        raise ValueError(f"window must be positive, got {eps}")
    rec = record if record is not None else exact_observables(spec, replica)
    N = spec.N
    classes = tuple(k for k in range(N + 1) if abs((N - 2 * k) / N - q) <= eps)
    if not classes:
        return RestrictedPartition(q=q, eps=eps, classes=(), log_values=None, empty=True)
    rows = np.asarray(rec.restricted_logZ)[:, list(classes)]
    with np.errstate(invalid="ignore"):
        vals = tuple(float(v) for v in _logsumexp_rows(rows))
    return RestrictedPartition(q=q, eps=eps, classes=classes, log_values=vals, empty=False)


def _logsumexp_rows(rows: np.ndarray) -> np.ndarray:
    m = np.max(rows, axis=1)
    out = np.where(np.isfinite(m), m, -np.inf).astype(float)
    finite = np.isfinite(m)
    if np.any(finite):
        sub = rows[finite] - m[finite, None]
        out[finite] = m[finite] + np.log(np.sum(np.exp(sub), axis=1))
    return out


def gauge_transform(sigma, rho) -> np.ndarray:
    """Componentwise spin flip of sigma by rho; an involution."""
    s = np.asarray(sigma, dtype=np.int64)
    r = np.asarray(rho, dtype=np.int64)
    if s.shape != r.shape:
        raise ValueError(f"configuration lengths differ: {s.shape} vs {r.shape}")
    for arr in (s, r):
        if not np.all(np.abs(arr) == 1):
            raise ValueError("configurations must have entries +-1")
    return s * r


def overlap(sigma, tau) -> float:
    """Normalized site overlap of two configurations."""
    s = np.asarray(sigma, dtype=np.int64)
    t = np.asarray(tau, dtype=np.int64)
    if s.shape != t.shape:
        raise ValueError(f"configuration lengths differ: {s.shape} vs {t.shape}")
    return float(np.mean(s * t))


def pack_configuration(sigma) -> int:
    """Bit-pack a +-1 configuration, spin 0 at the most significant bit."""
    bits = 0
    for v in np.asarray(sigma, dtype=np.int64):
        if v not in (-1, 1):
            raise ValueError("configurations must have entries +-1")
        bits = (bits << 1) | (1 if v == -1 else 0)
    return bits


def unpack_configuration(state: int, N: int) -> np.ndarray:
    """Inverse of `pack_configuration`."""
    return np.array([-1 if (state >> (N - 1 - i)) & 1 else 1 for i in range(N)],
                    dtype=np.int64)


@dataclass(frozen=True)
class GaugeCheckReport:
    """Per-beta moment comparison between two overlap-restricted ensembles."""

    beta: float
    replicas: int
    z_mean: float
    z_var: float
    mean_a: float
    mean_b: float


def gauge_invariance_check(spec: SimulationSpec, q: float, eps: float,
                           reference_a, reference_b,
                           replicas: int | None = None) -> list[GaugeCheckReport]:
    """Compare partition sums restricted by overlap with two references.

    For each disorder replica the field-free energies are summed over
    configurations whose overlap with the reference lies within eps of q,
    once per reference.  Distributional symmetry predicts equal laws, so the
    z-scores of the first two moments across replicas should be small.
    Moments are compared on the partition-sum scale; the test is
    conservative because both ensembles share the disorder.
    """
    n_rep = replicas if replicas is not None else spec.replicas
    if n_rep < 100:
        raise ValueError("need at least 100 replicas for a meaningful moment comparison")
    ref_bits = (pack_configuration(reference_a), pack_configuration(reference_b))
    N = spec.N
    classes = [k for k in range(N + 1) if abs((N - 2 * k) / N - q) <= eps]
    if not classes:
        raise ValueError("overlap window contains no class")

    n_beta = len(spec.betas)
    samples = np.empty((2, n_rep, n_beta))
    for r in range(n_rep):
        src = _disorder_source(spec, r)
        for side, rb in enumerate(ref_bits):
            res = _enumerate(spec, src, with_field=False, reference=rb, top_k=0)
            samples[side, r] = _logsumexp_rows(res.class_log_z[:, classes])

    reports = []
    za = np.exp(samples[0] - samples[0].mean(axis=0, keepdims=True))
    zb = np.exp(samples[1] - samples[0].mean(axis=0, keepdims=True))
    for j, beta in enumerate(spec.betas):
        a_, b_ = za[:, j], zb[:, j]
        se_mean = math.sqrt(a_.var(ddof=1) / n_rep + b_.var(ddof=1) / n_rep)
        z_mean = (a_.mean() - b_.mean()) / se_mean if se_mean > 0 else 0.0
        va, vb = a_.var(ddof=1), b_.var(ddof=1)
        ca = ((a_ - a_.mean()) ** 2).var(ddof=1) / n_rep
        cb = ((b_ - b_.mean()) ** 2).var(ddof=1) / n_rep
        se_var = math.sqrt(ca + cb)
        z_var = (va - vb) / se_var if se_var > 0 else 0.0
        reports.append(GaugeCheckReport(beta=beta, replicas=n_rep,
                                        z_mean=float(z_mean), z_var=float(z_var),
                                        mean_a=float(a_.mean()), mean_b=float(b_.mean())))
    return reports


def rescaled_energy_points(spec: SimulationSpec, replica: int, top_k: int,
                           scaling: str = "auto") -> PointSample:
    """Largest rescaled energies of one replica, in descending order.

    Single-level models use the affine extreme-value scaling; hierarchical
    models use the block-sum centering with slope 1/sqrt(N).  `scaling` may
    force 'rem' or 'grem'.
    """
    if top_k < 1 or top_k > (1 << spec.N):
        raise ValueError(f"top_k must lie in [1, 2^N], got {top_k}")
    if scaling not in ("auto", "rem", "grem"):
        raise ValueError(f"unknown scaling {scaling!r}")
    mode = scaling if scaling != "auto" else ("rem" if spec.op.is_rem() else "grem")
    src = _disorder_source(spec, replica)
    res = _enumerate(spec, src, with_field=True, reference=0, top_k=top_k,
                     compute_partition=False)
    x_vals = res.top_y / math.sqrt(spec.N)
    if mode == "rem":
        sc = rem_scaling(spec.N, spec.h)
        pts = (x_vals - sc.B) / sc.A
        meta = f"rem-scaled energies N={spec.N} h={spec.h} replica={replica}"
    else:
        sc = grem_scaling(spec.op, spec.h, spec.N)
        pts = (x_vals - sc.shift) * math.sqrt(spec.N)
        meta = f"grem-scaled energies N={spec.N} h={spec.h} replica={replica}"
    return PointSample(points=tuple(float(p) for p in pts), truncation=top_k, meta=meta)


def _replica_record(args) -> ObservableRecord:
    spec, replica = args
    return exact_observables(spec, replica)


def _replica_points(args) -> PointSample:
    spec, replica, top_k, scaling = args
    return rescaled_energy_points(spec, replica, top_k, scaling)


def _ordered_map(fn, jobs, threads: int):
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(jobs) == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def run_replicas(spec: SimulationSpec, threads: int = 1) -> list[ObservableRecord]:
    """All replica records, in replica order regardless of worker count."""
    return _ordered_map(_replica_record, [(spec, r) for r in range(spec.replicas)],
                        threads)


def run_rescaled_points(spec: SimulationSpec, top_k: int, threads: int = 1,
                        scaling: str = "auto") -> list[PointSample]:
    """Rescaled top-k energies for every replica, in replica order."""
    jobs = [(spec, r, top_k, scaling) for r in range(spec.replicas)]
    return _ordered_map(_replica_points, jobs, threads)
