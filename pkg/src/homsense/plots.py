"""Figure rendering for the report path of the command line.

Imported lazily by the CLI so that plain CSV runs never touch matplotlib.
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .units import PER_M_TO_PER_UM, RAD_TO_MRAD  # noqa: E402


def render_pattern(pattern, path):
    """Counts per bin with the model curve scaled to expected counts."""
    centers_um = pattern.bin_centers * PER_M_TO_PER_UM
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(centers_um, pattern.counts, "o", ms=3, color="tab:blue", label="counts")
    if pattern.model_overlay is not None and pattern.bin_centers.size > 1:
        window = float(np.median(np.diff(pattern.bin_centers)))
        expected = pattern.model_overlay * window * pattern.exposure
        ax.plot(centers_um, expected, "-", color="tab:red", lw=1.2, label="model")
    ax.set_xlabel(r"$\Delta k$ (um$^{-1}$)")
    ax.set_ylabel("coincidences")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fisher_scan(delta_theta_rad, fisher_values, quantum_bound, path):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(np.asarray(delta_theta_rad) * RAD_TO_MRAD, fisher_values,
            "-", color="tab:blue", label="classical F")
    ax.axhline(quantum_bound, ls="--", color="tab:gray", label="quantum bound")
    ax.set_xlabel(r"$\Delta\theta$ (mrad)")
    ax.set_ylabel(r"Fisher information (rad$^{-2}$)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_surface(sigma_k_grid, d_grid, surface, path):
    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    mesh = ax.pcolormesh(
        np.asarray(d_grid) * 1.0e3,
        np.asarray(sigma_k_grid) * PER_M_TO_PER_UM,
        surface,
        shading="auto",
        cmap="viridis",
    )
    fig.colorbar(mesh, ax=ax, label=r"Fisher information (rad$^{-2}$)")
    ax.set_xlabel("d (mm)")
    ax.set_ylabel(r"$\sigma_k$ (um$^{-1}$)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_study(estimates_rad, truth_rad, crb_std_rad, path):
    est_mrad = np.asarray(estimates_rad) * RAD_TO_MRAD
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.hist(est_mrad, bins=40, color="tab:blue", alpha=0.75)
    ax.axvline(truth_rad * RAD_TO_MRAD, color="tab:red", lw=1.5, label="truth")
    lo = (truth_rad - crb_std_rad) * RAD_TO_MRAD
    hi = (truth_rad + crb_std_rad) * RAD_TO_MRAD
    ax.axvspan(lo, hi, color="tab:red", alpha=0.15, label="CRB band")
    ax.set_xlabel(r"$\hat{\Delta\theta}$ (mrad)")
    ax.set_ylabel("trials")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
