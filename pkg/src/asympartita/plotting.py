"""Figure rendering for ratio reports (headless, file output only)."""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_ratio_figure(rows, title: str, path: str, dpi: int = 150) -> str:
    """Convergence figure for a ratio report: estimate/exact vs n, and the
    deviation |ratio - 1| on log-log axes.  Writes ``path`` and returns it."""
    ns = [row.n for row in rows]
    ratios = [float(row.ratio) for row in rows]
    devs = [abs(r - 1.0) for r in ratios]

    fig, (ax_ratio, ax_dev) = plt.subplots(1, 2, figsize=(10, 4))
    ax_ratio.semilogx(ns, ratios, "ko-", lw=1.5, ms=4)
    ax_ratio.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax_ratio.set_xlabel("n")
    ax_ratio.set_ylabel("estimate / exact")
    ax_ratio.set_title(title)
    ax_ratio.grid(True, which="both", alpha=0.3)

    positive = [(n, d) for n, d in zip(ns, devs) if d > 0]
    if positive:
        xs, ys = zip(*positive)
        ax_dev.loglog(xs, ys, "ko-", lw=1.5, ms=4)
        if len(positive) >= 2:
            slope = ((math.log(ys[-1]) - math.log(ys[0]))
                     / (math.log(xs[-1]) - math.log(xs[0])))
            ax_dev.set_title(f"|ratio - 1|  (endpoint slope {slope:.2f})")
        else:
            ax_dev.set_title("|ratio - 1|")
    else:
        ax_dev.set_title("|ratio - 1| = 0 at all n")
    ax_dev.set_xlabel("n")
    ax_dev.set_ylabel("|ratio - 1|")
    ax_dev.grid(True, which="both", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return path
