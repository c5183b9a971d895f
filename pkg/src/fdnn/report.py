"""Figures rendered from a benchmark results CSV.

The CSV is the interface: this module consumes files written by the
benchmark (or by anything else emitting the same header) and drops PNG
figures next to them.  One rate-versus-size figure is written per data
process in the file, plus an excess-over-optimal figure whenever the
optimal-rule rows are present.
"""

from __future__ import annotations

from pathlib import Path

from .bench import read_results_csv
from .errors import InvalidArgumentError

__all__ = ["render_report"]

_METHOD_STYLE = {
    "FDNN": dict(color="tab:blue", marker="o"),
    "QD": dict(color="tab:orange", marker="s"),
    "NB": dict(color="tab:green", marker="^"),
    "BAYES": dict(color="black", marker="x", linestyle="--"),
}


def _style(method: str) -> dict:
    return _METHOD_STYLE.get(method, dict(marker="o"))


def render_report(results_csv: str | Path, outdir: str | Path) -> list[Path]:
    """Render rate and excess-risk figures; returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = read_results_csv(results_csv)
    if not rows:
        raise InvalidArgumentError(f"{results_csv} contains no result rows")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    for dgp_id in sorted({r.dgp for r in rows}):
        cell = [r for r in rows if r.dgp == dgp_id]
        sizes = sorted({r.n for r in cell})
        methods = sorted({r.method for r in cell})

        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for method in methods:
            pts = {r.n: r for r in cell if r.method == method}
            ns = [n for n in sizes if n in pts]
            ax.errorbar(
                ns,
                [pts[n].rate for n in ns],
                yerr=[pts[n].se for n in ns],
                label=method,
                capsize=3,
                **_style(method),
            )
        ax.set_xlabel("training sample size n")
        ax.set_ylabel("misclassification rate")
        ax.set_title(f"Test error vs sample size (process {dgp_id})" if dgp_id else "Test error vs sample size")
        ax.set_xscale("log")
        ax.set_xticks(sizes)
        ax.get_xaxis().set_major_formatter(matplotlib.ticker.ScalarFormatter())
        ax.legend()
        ax.grid(True, alpha=0.3)
        path = outdir / (f"rates_dgp{dgp_id}.png" if dgp_id else "rates.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

        bayes = {r.n: r for r in cell if r.method == "BAYES"}
        if bayes:
            fig, ax = plt.subplots(figsize=(6.0, 4.0))
            for method in methods:
                if method == "BAYES":
                    continue
                pts = {r.n: r for r in cell if r.method == method}
                ns = [n for n in sizes if n in pts and n in bayes]
                ax.plot(ns, [pts[n].rate - bayes[n].rate for n in ns], label=method, **_style(method))
            ax.axhline(0.0, color="black", linewidth=0.8)
            ax.set_xlabel("training sample size n")
            ax.set_ylabel("excess risk over the optimal rule")
            ax.set_title(f"Excess risk vs sample size (process {dgp_id})")
            ax.set_xscale("log")
            ax.set_xticks(sizes)
            ax.get_xaxis().set_major_formatter(matplotlib.ticker.ScalarFormatter())
            ax.legend()
            ax.grid(True, alpha=0.3)
            path = outdir / f"excess_dgp{dgp_id}.png"
            fig.savefig(path, dpi=150, bbox_inches="tight")
            plt.close(fig)
            written.append(path)
    return written
