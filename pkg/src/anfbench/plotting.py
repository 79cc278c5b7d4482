"""Figures for campaign reports, written next to the textual output."""

from __future__ import annotations

from pathlib import Path

from .harness import CampaignReport, Status


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def fuel_pairs(report: CampaignReport) -> tuple[list, list, list]:
    """(source fuel, target fuel, failed?) for every trial that ran both sides."""
    src_key, trg_key = ("consumed_src", "consumed_trg")
    if report.mode.startswith("refine"):
        src_key, trg_key = ("src_fuel", "trg_fuel")
    xs, ys, bad = [], [], []
    for _, o in report.outcomes:
        if src_key in o.evidence and trg_key in o.evidence:
            xs.append(o.evidence[src_key])
            ys.append(o.evidence[trg_key])
            bad.append(o.status is Status.FAIL)
    return xs, ys, bad


def render_report_figure(report: CampaignReport, path: str | Path) -> Path:
    plt = _pyplot()
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    xs, ys, bad = fuel_pairs(report)
    if xs:
        ok = [(x, y) for x, y, b in zip(xs, ys, bad) if not b]
        ko = [(x, y) for x, y, b in zip(xs, ys, bad) if b]
        if ok:
            ax.scatter(*zip(*ok), s=10, alpha=0.6, label="pass")
        if ko:
            ax.scatter(*zip(*ko), s=14, marker="x", color="tab:red", label="fail")
        hi = max(max(xs), max(ys)) + 1
        ax.plot([0, hi], [0, hi], color="0.5", lw=0.8, ls="--", label="target = source")
        ax.set_xlabel("source fuel consumed")
        ax.set_ylabel("target fuel consumed")
        ax.legend(frameon=False, fontsize=8)
    else:
        counts = [report.passes, report.fails, report.skips]
        ax.bar(["pass", "fail", "skip"], counts, color=["tab:green", "tab:red", "0.6"])
        ax.set_ylabel("trials")
    ax.set_title(f"{report.mode}: {report.passes}/{report.trials} pass (seed {report.seed})")
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
