"""Figures written next to the CSV reports.

Uses the non-interactive Agg backend; every function saves one PNG and
closes its figure.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _series(history, split, attr):
    rows = [m for m in history if m.split == split]
    return [m.epoch for m in rows], [getattr(m, attr) for m in rows]


def plot_learning_curves(history, path):
    """Error rate, loss and the learned information terms against epoch."""
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
        for split, style in (("train", "--"), ("test", "-")):
            axes[0].plot(*_series(history, split, "error_rate"), style, label=split)
            axes[1].plot(*_series(history, split, "loss_total"), style, label=split)
        axes[0].set_ylabel("error rate")
        axes[1].set_ylabel("loss")
        for attr, label in (("mi_learned", "mutual information"), ("loss_cond", "conditional entropy"),
                            ("loss_entropy_term", "label entropy")):
            axes[2].plot(*_series(history, "test", attr), label=label)
        axes[2].set_ylabel("nats (test)")
        for ax in axes:
            ax.set_xlabel("epoch")
            ax.legend()
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)


def plot_error_bound_sweep(curves, path):
    """``curves`` maps a label to a list of :class:`~milc.bounds.BoundReport`."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        for label, reports in curves.items():
            ax.plot([r.mi for r in reports], [r.lb_theorem for r in reports], label=label)
        base = next(iter(curves.values()))[0].base
        ax.set_xlabel(f"I(X;Y) [{base}]")
        ax.set_ylabel("error probability lower bound")
        ax.set_ylim(0, 1)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
