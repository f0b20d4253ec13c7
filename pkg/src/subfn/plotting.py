"""Static figure rendering for the report paths (written next to the CSVs)."""

from __future__ import annotations


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_divergence_curves(rows, path, title=None):
    """Mean divergence per step for each algorithm, with ±2 stderr bands."""
    plt = _plt()
    by_algorithm: dict[str, list] = {}
    for row in rows:
        by_algorithm.setdefault(row["algorithm"], []).append(row)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, items in by_algorithm.items():
        items = sorted(items, key=lambda r: r["step"])
        xs = [r["step"] for r in items]
        ys = [r["mean_divergence"] for r in items]
        es = [2 * r["stderr"] for r in items]
        ax.plot(xs, ys, marker="o", markersize=3, label=name)
        ax.fill_between(
            xs, [y - e for y, e in zip(ys, es)], [y + e for y, e in zip(ys, es)],
            alpha=0.15,
        )
    ax.set_xlabel("steps")
    ax.set_ylabel("divergence")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_alpha_curve(means, path, title=None):
    """Mean multiplicative gap (alpha) per query budget."""
    plt = _plt()
    budgets = sorted(means)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(budgets, [means[b] for b in budgets], marker="o")
    ax.set_xlabel("budget")
    ax.set_ylabel("mean alpha")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_plan_curve(step_divergence, path, label="plan", title=None):
    """Estimated divergence after each reveal of a single trajectory."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(len(step_divergence)), step_divergence, marker="o", label=label)
    ax.set_xlabel("steps")
    ax.set_ylabel("divergence")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
