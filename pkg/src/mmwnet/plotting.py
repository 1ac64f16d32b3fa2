"""Figure rendering for CLI reports (file output only, Agg backend)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_curve_plot", "save_table_heatmap"]


def save_curve_plot(path, x, series, xlabel, ylabel, title=None, logy=False):
    """Render one or more curves to a PNG.

    Args:
        path: output file path.
        x: shared abscissa.
        series: list of (label, y-values[, yerr or None]) tuples.
        logy: semilog-y axis (useful for deep CCDF tails).
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for entry in series:
        label, y = entry[0], np.asarray(entry[1], dtype=float)
        yerr = np.asarray(entry[2], float) if len(entry) > 2 and entry[2] is not None else None
        if yerr is not None and np.any(yerr > 0):
            ax.errorbar(x, y, yerr=yerr, label=label, capsize=2, linewidth=1.5)
        else:
            ax.plot(x, y, label=label, linewidth=1.5)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series) > 1 or series[0][0]:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_table_heatmap(path, row_labels, col_labels, values, title=None,
                       value_fmt="{:.4f}"):
    """Render a small matrix (e.g. antenna-configuration table) as a heatmap
    with annotated cells."""
    values = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(values, cmap="viridis")
    ax.set_xticks(range(len(col_labels)), [str(c) for c in col_labels])
    ax.set_yticks(range(len(row_labels)), [str(r) for r in row_labels])
    ax.set_xlabel("receive elements")
    ax.set_ylabel("transmit elements")
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            ax.text(j, i, value_fmt.format(values[i, j]),
                    ha="center", va="center", color="white", fontsize=9)
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
