"""Figure rendering for the report paths (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIGSIZE = (6.4, 4.2)


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def damping_map_figure(rows, path) -> None:
    """Heatmap of the spectral abscissa over the wavenumber lattice."""
    kmax = max(max(abs(r.k1), abs(r.k2)) for r in rows)
    grid = np.full((2 * kmax + 1, 2 * kmax + 1), np.nan)
    for r in rows:
        grid[r.k1 + kmax, r.k2 + kmax] = r.abscissa
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.imshow(grid.T, origin="lower", extent=(-kmax - 0.5, kmax + 0.5,
                                                   -kmax - 0.5, kmax + 0.5),
                   cmap="viridis")
    fig.colorbar(im, ax=ax, label="spectral abscissa")
    ax.set_xlabel("$k_1$")
    ax.set_ylabel("$k_2$")
    ax.set_title("Linear damping rate per mode")
    _finish(fig, path)


def timeseries_figure(ledger, path, quantities=None) -> None:
    quantities = quantities or ["u_sq_s", "rho_sq_s", "b_sq_s",
                                "d2b_sq_sm1", "d1u1_sq_sm1", "u2_sq_dot_sm2"]
    t = np.asarray(ledger.times)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for q in quantities:
        y = np.asarray(ledger.series(q))
        ax.semilogy(t, np.maximum(y, 1e-300), label=q, lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("squared norm")
    ax.legend(fontsize=7, ncol=2)
    ax.set_title("Norm history")
    _finish(fig, path)


def decay_figure(ledger, fits, path) -> None:
    t = np.asarray(ledger.times)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for fit in fits:
        y = np.asarray(ledger.series(fit.quantity))
        ax.loglog(1.0 + t, np.maximum(y, 1e-300), lw=1.0,
                  label=f"{fit.quantity} (slope {fit.exponent:.2f})")
        mask = (t >= fit.window[0]) & (t <= fit.window[1])
        if mask.any():
            tm = 1.0 + t[mask]
            ym = y[mask][0] * (tm / tm[0]) ** fit.exponent
            ax.loglog(tm, ym, "k--", lw=0.8)
    ax.set_xlabel("1 + t")
    ax.set_ylabel("squared norm")
    ax.legend(fontsize=7)
    ax.set_title("Algebraic decay fits")
    _finish(fig, path)


def monitor_figure(report, path) -> None:
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for fam in report.families:
        ax.plot(fam.times, fam.series, lw=1.0, label=fam.name)
    ax.set_xlabel("t")
    ax.set_ylabel("measured / epsilon power")
    ax.set_yscale("log")
    ax.legend(fontsize=6, ncol=2)
    ax.set_title(f"Bound-family ratios (ceiling {report.ceiling:g})")
    _finish(fig, path)


def convergence_figure(hs, errs, order, path, xlabel="step size") -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(hs, errs, "o-", label="measured")
    ref = errs[0] * (np.asarray(hs) / hs[0]) ** order
    ax.loglog(hs, ref, "k--", label=f"order {order}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    _finish(fig, path)


def lemma_ratio_figure(trials, path) -> None:
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
    for ax, lemma in zip(axes, ("commutator", "triple_product")):
        for s0 in (1, 2, 3):
            ratios = [tr.ratio for tr in trials
                      if tr.lemma == lemma and tr.s0 == s0]
            if ratios:
                ax.hist(ratios, bins=40, histtype="step", label=f"s0={s0}")
        ax.set_title(lemma)
        ax.set_xlabel("lhs / rhs")
        ax.legend(fontsize=7)
    _finish(fig, path)
