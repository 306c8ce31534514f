"""Figure rendering for pipeline reports.

Everything draws through the Agg backend and writes straight to files, so
reports work on headless machines. Each function takes the same records the
CSV/JSONL artifacts hold; figures are derived views, never extra state.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ContractViolation


def save_train_curve(log: list[dict], path: str) -> str:
    """Per-episode intrinsic reward band plus exploration buffer growth."""
    if not log:
        raise ContractViolation("training log is empty")
    eps = [rec["episode"] for rec in log]
    mean = np.array([rec["reward_mean"] for rec in log])
    lo = np.array([rec["reward_min"] for rec in log])
    hi = np.array([rec["reward_max"] for rec in log])
    buf = [rec["buffer_size"] for rec in log]

    fig, (ax, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax.fill_between(eps, lo, hi, alpha=0.25, label="min/max")
    ax.plot(eps, mean, lw=1.5, label="mean")
    ax.set_ylabel("intrinsic reward")
    ax.legend(loc="best", fontsize=8)
    ax2.plot(eps, buf, lw=1.5, color="tab:green")
    ax2.set_ylabel("state buffer size")
    ax2.set_xlabel("episode")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_ae_curves(curves: dict[str, list[dict]], path: str) -> str:
    """Train/holdout reconstruction loss per epoch, one panel per decoder."""
    if not curves:
        raise ContractViolation("no loss curves to plot")
    fig, axes = plt.subplots(
        1, len(curves), figsize=(5 * len(curves), 3.5), squeeze=False
    )
    for ax, (name, curve) in zip(axes[0], curves.items()):
        epochs = [rec["epoch"] for rec in curve]
        ax.plot(epochs, [rec["train_loss"] for rec in curve], label="train")
        ax.plot(epochs, [rec["holdout_loss"] for rec in curve], label="holdout")
        ax.set_yscale("log")
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("epoch")
        ax.set_ylabel("reconstruction loss")
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_result_bars(summary: list[dict], path: str) -> str:
    """Mean final-state error per condition with a stddev whisker."""
    if not summary:
        raise ContractViolation("empty result summary")
    names = [rec["condition"] for rec in summary]
    means = [rec["mean_error"] for rec in summary]
    sds = [rec["sd_error"] for rec in summary]
    fig, ax = plt.subplots(figsize=(1.2 + 1.1 * len(names), 3.5))
    xs = np.arange(len(names))
    ax.bar(xs, means, yerr=sds, capsize=4, color="tab:blue", alpha=0.85)
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("final state error")
    ax.set_title(summary[0].get("env", ""), fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_session_metrics(report: dict, trace_inputs: list, path: str) -> str:
    """Joystick magnitude over the session with the headline metrics inset."""
    norms = [float(np.linalg.norm(u)) for u in trace_inputs]
    fig, ax = plt.subplots(figsize=(7, 3))
    ax.plot(norms, lw=0.8)
    ax.set_xlabel("tick")
    ax.set_ylabel("|input|")
    ax.set_ylim(-0.05, 1.5)
    cons = report.get("consistency")
    text = (
        f"total {report['total_time']:.1f}s  control {report['control_time']:.1f}s  "
        f"toggles {report['toggles']}  "
        f"consistency {'n/a' if cons is None else format(cons, '.3f')}"
    )
    ax.set_title(text, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
