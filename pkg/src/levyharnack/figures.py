"""Figure rendering for the report path.

Every CLI run that produces delimited output also renders a small set of
matplotlib figures next to it (PNG, Agg backend).  Figures are
presentation only: nothing downstream reads them back.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .profiles import RatioProfile

_DPI = 140


def _finish(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_ratio_profile(profile: RatioProfile, path, title=None):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.semilogx(profile.arguments, profile.ratios, "o-", ms=3, lw=1)
    ax.axhline(profile.min_ratio, color="gray", lw=0.7, ls="--")
    ax.axhline(profile.max_ratio, color="gray", lw=0.7, ls="--")
    ax.set_xlabel("argument")
    ax.set_ylabel("ratio")
    ax.set_title(title or profile.label)
    return _finish(fig, path)


def plot_profiles(profiles, path, title=None, logy=False):
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    for label, prof in profiles.items():
        ax.semilogx(prof.arguments, prof.ratios, "o-", ms=3, lw=1, label=label)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("argument")
    ax.set_ylabel("ratio")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_curve(x, y, path, xlabel="x", ylabel="y", title=None, ref=None,
               ref_label=None):
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.loglog(x, y, "o-", ms=3, lw=1, label=ylabel)
    if ref is not None:
        ax.loglog(x, ref, "--", lw=1, label=ref_label or "reference")
        ax.legend(fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_kernel_estimate(estimate, path, reference=None, title=None):
    """Radial exit-law histogram (density against the bin-center radius)."""
    radii, dens, errs = [], [], []
    for i in range(estimate.counts.shape[0]):
        d_tot = 0.0
        e_tot = 0.0
        for a in range(estimate.n_angular):
            dd, ee = estimate.density(i, a)
            d_tot += dd / estimate.n_angular
            e_tot += (ee / estimate.n_angular) ** 2
        radii.append(estimate.bin_center_radius(i))
        dens.append(d_tot)
        errs.append(np.sqrt(e_tot))
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.errorbar(radii, dens, yerr=errs, fmt="o", ms=3, lw=1, capsize=2,
                label="exit-law histogram")
    if reference is not None:
        rr = np.geomspace(min(radii), max(radii), 200)
        ax.plot(rr, [reference(s) for s in rr], "--", lw=1, label="reference")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("|y - anchor|")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_exit_positions(batch, path, title=None):
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    pos = batch.positions[batch.ok]
    if pos.shape[1] == 1:
        ax.hist(pos[:, 0], bins=80, density=True)
        ax.set_xlabel("exit position")
    else:
        ax.plot(pos[:200000, 0], pos[:200000, 1], ".", ms=1, alpha=0.3)
        ax.set_aspect("equal")
        ax.set_xlabel("x0")
        ax.set_ylabel("x1")
    if title:
        ax.set_title(title)
    return _finish(fig, path)


def plot_report_rows(report, x_key, y_key, path, group_key=None, logx=False,
                     title=None):
    """Generic scatter of one report column against another."""
    rows = [r for r in report.rows if x_key in r and y_key in r]
    if not rows:
        return None
    fig, ax = plt.subplots(figsize=(5.2, 3.5))
    if group_key:
        groups = sorted({r.get(group_key) for r in rows}, key=str)
        for g in groups:
            xs = [r[x_key] for r in rows if r.get(group_key) == g]
            ys = [r[y_key] for r in rows if r.get(group_key) == g]
            ax.plot(xs, ys, "o", ms=4, label=f"{group_key}={g}")
        ax.legend(fontsize=7)
    else:
        ax.plot([r[x_key] for r in rows], [r[y_key] for r in rows], "o", ms=4)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_key)
    ax.set_title(title or report.name)
    return _finish(fig, path)
