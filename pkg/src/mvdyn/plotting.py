"""Small figures for the CLI report paths, written straight to files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"figure.figsize": (5, 3.2), "axes.linewidth": 0.6, "font.size": 9}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_norm_vs_depth(path, depths, norms):
    """Truncated norms against depth; the sequence is nondecreasing."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(depths, norms, "o-", lw=1)
        ax.set_xlabel("truncation depth")
        ax.set_ylabel("norm estimate")
        ax.set_xticks(list(depths))
        return _save(fig, path)


def plot_residuals(path, residuals, label="residual"):
    """Residual per enlargement round on a log scale (zeros drawn at the floor)."""
    r = np.maximum(np.asarray(residuals, dtype=float), 1e-17)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.semilogy(range(len(r)), r, "s-", lw=1)
        ax.set_xlabel("round")
        ax.set_ylabel(label)
        ax.set_xticks(range(len(r)))
        return _save(fig, path)


def plot_determinant_phase(path, ts, dets):
    """Argument of the determinant along a simplex edge, in units of pi."""
    phase = np.unwrap(np.angle(np.asarray(dets))) / np.pi
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(ts, phase, ".-", lw=1)
        ax.set_xlabel("t")
        ax.set_ylabel(r"arg det $u(t)$ / $\pi$")
        return _save(fig, path)
