"""Figure rendering for the report paths.

Every figure goes next to the delimited file it illustrates.  Rendering is
deterministic: fixed style, fixed dpi, and stripped PNG metadata, so output
directories stay byte-for-byte reproducible.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVE_KW = dict(dpi=110, metadata={"Software": None})


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), bbox_inches="tight", **_SAVE_KW)
    plt.close(fig)


def plot_tstar_table(h, t, m, r, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(h, t, label="optimal magnetization")
    ax.plot(h, m, label="ground-state constant")
    ax.plot(h, r, label="energy density at optimum")
    ax.set_xlabel("field strength h")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    _save(fig, path)


def plot_coarse_graining(cg, path) -> None:
    op = cg.op
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    xs = [0.0] + list(op.x)
    qs = [0.0] + list(op.q)
    ax.step(xs, qs, where="post", label="order parameter", lw=1.5)
    bx = np.concatenate([[0.0], np.cumsum(cg.x_bar)])
    bq = np.concatenate([[0.0], np.cumsum(cg.q_bar)])
    ax.plot(bx, bq, "o--", label=f"blocks (m={cg.m}, h={cg.h})")
    ax.set_xlabel("x")
    ax.set_ylabel("variance profile")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    _save(fig, path)


def plot_free_energy(curve, path, rem_closed=None) -> None:
    fig, (ax, ax2) = plt.subplots(
        2, 1, figsize=(6.4, 5.2), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]})
    ax.plot(curve.beta_grid, curve.values, label="limiting free energy")
    if rem_closed is not None:
        ax.plot(curve.beta_grid, rem_closed, ":", label="single-level closed form")
    ax.set_ylabel("p(beta, h)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    ax2.step(curve.beta_grid, curve.threshold_levels, where="post")
    ax2.set_xlabel("beta")
    ax2.set_ylabel("frozen blocks")
    ax2.grid(True, alpha=0.3)
    _save(fig, path)


def plot_observables(records, betas, limits, m_limit, path) -> None:
    p = np.array([rec.p_N for rec in records])
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for j, b in enumerate(betas):
        ax.scatter([b] * p.shape[0], p[:, j], s=8, alpha=0.5, color="C0")
    ax.plot(betas, limits, "k-", lw=1.5, label="limit")
    ax.plot(betas, [np.mean(p[:, j]) for j in range(len(betas))], "C1x",
            ms=9, label="replica mean")
    ax.set_xlabel("beta")
    ax.set_ylabel("free energy per spin")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    mn = [rec.M_N for rec in records]
    ax2.hist(mn, bins=max(6, len(mn) // 12), color="C0", alpha=0.7)
    ax2.axvline(m_limit, color="k", lw=1.5, label="limit")
    ax2.axvline(float(np.mean(mn)), color="C1", ls="--", label="replica mean")
    ax2.set_xlabel("ground state per sqrt(N)")
    ax2.grid(True, alpha=0.3)
    ax2.legend(loc="best")
    _save(fig, path)


def plot_ecdf_vs_gumbel(maxima, path) -> None:
    xs = np.sort(np.asarray(maxima))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post",
            label=f"rescaled maxima ({xs.size} replicas)")
    grid = np.linspace(xs[0] - 0.5, xs[-1] + 0.5, 400)
    ax.plot(grid, np.exp(-np.exp(-grid)), "k-", lw=1.2, label="Gumbel")
    ax.set_xlabel("rescaled maximum")
    ax.set_ylabel("CDF")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    _save(fig, path)


def plot_two_sample(sim, reference, path, labels=("simulation", "limit sampler")) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for data, lab in ((sim, labels[0]), (reference, labels[1])):
        xs = np.sort(np.asarray(data))
        ax.step(xs, np.arange(1, xs.size + 1) / xs.size, where="post",
                label=f"{lab} (n={xs.size})")
    ax.set_xlabel("rescaled maximum")
    ax.set_ylabel("CDF")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    _save(fig, path)


def plot_point_sample(sample, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    pts = sample.as_array()
    ax.plot(np.arange(1, pts.size + 1), pts, ".", ms=4)
    ax.set_xscale("log")
    ax.set_xlabel("rank")
    ax.set_ylabel("point value")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_tail_survival(values, alpha_ref, path) -> None:
    v = np.sort(np.asarray(values))[::-1]
    n = v.size
    surv = np.arange(1, n + 1) / n
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.loglog(v, surv, ".", ms=3, label="partition integrals")
    top = v[: max(n // 10, 2)]
    ref = surv[len(top) - 1] * (top / top[-1]) ** (-alpha_ref)
    ax.loglog(top, ref, "k-", lw=1.2, label=f"slope -{alpha_ref:.3f}")
    ax.set_xlabel("value")
    ax.set_ylabel("survival fraction")
    ax.grid(True, alpha=0.3, which="both")
    ax.legend(loc="best")
    _save(fig, path)
