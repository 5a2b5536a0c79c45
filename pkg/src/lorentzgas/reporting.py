"""CSV/JSON artifact writers and figure rendering for the batch CLI.

CSV cells carry doubles at 17 significant digits in scientific notation so
files round-trip losslessly; manifests echo the full run configuration.
Figures are rendered with the Agg backend next to each table.
"""

from __future__ import annotations

import json
import math
from pathlib import Path


def fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.16e}"
    return str(value)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_cell(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(path, *, subcommand: str, parameters: dict, seed,
                   version: str, started: str, finished: str,
                   outputs: list[str]) -> None:
    doc = {
        "tool": "lorentzgas",
        "version": version,
        "subcommand": subcommand,
        "parameters": parameters,
        "seed": seed,
        "started_utc": started,
        "finished_utc": finished,
        "outputs": outputs,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _axes(title: str, xlabel: str, ylabel: str):
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    import matplotlib.pyplot as plt
    plt.close(fig)


def plot_error_decay(path, ns, ds, upper, lower) -> None:
    """Error sequence against its convergent-denominator bounds."""
    fig, ax = _axes("continued-fraction errors", "n", "d_n")
    ax.semilogy(ns, ds, "o-", label="d_n")
    ax.semilogy(ns, upper, "--", label="1/q_{n+1}")
    ax.semilogy(ns, lower, ":", label="1/(q_n+q_{n+1})")
    ax.legend()
    _save(fig, path)


def plot_partition(path, part) -> None:
    fig, ax = _axes("three-strip partition", "strip", "contribution to torus area")
    labels = ["A", "B", "C"]
    lengths = [part.l_a, part.l_b, part.l_c]
    widths = [part.s_a, part.s_b, part.s_c]
    areas = [l * s for l, s in zip(lengths, widths)]
    ax.bar(labels, areas)
    for i, (l, s) in enumerate(zip(lengths, widths)):
        ax.text(i, areas[i], f"l={l}\n|S|={s:.4g}", ha="center", va="bottom")
    ax.set_ylim(0, max(areas) * 1.35)
    _save(fig, path)


def plot_survival(path, title, curves) -> None:
    """curves: iterable of (label, t, value, stderr-or-None)."""
    fig, ax = _axes(title, "t", "survival probability")
    for label, ts, vals, errs in curves:
        if errs is None:
            ax.plot(ts, vals, "-", label=label)
        else:
            ax.errorbar(ts, vals, yerr=errs, fmt=".", ms=3, label=label)
    ax.legend()
    _save(fig, path)


def plot_histogram(path, title, xlabel, values, vline=None, vline_label=None) -> None:
    fig, ax = _axes(title, xlabel, "count")
    ax.hist(values, bins=40)
    if vline is not None:
        ax.axvline(vline, color="k", ls="--", label=vline_label)
        ax.legend()
    _save(fig, path)


def plot_limit_curve(path, rows) -> None:
    fig, ax = _axes("size-averaged survival limit", "t*", "value")
    ts = [r[0] for r in rows]
    ax.loglog(ts, [r[1] for r in rows], "o-", label="limit curve")
    ax.loglog(ts, [r[2] for r in rows], "--", label="2/(pi^2 t*)")
    ax.legend()
    _save(fig, path)


def plot_cesaro_nodes(path, rows, value, limit) -> None:
    fig, ax = _axes("rescaled survival per obstacle size", "r", "survival at t*/r")
    rs = [r[0] for r in rows]
    ax.errorbar(rs, [r[2] for r in rows], yerr=[r[3] for r in rows], fmt="o",
                label="node estimates")
    ax.axhline(value, color="C1", label="log-size average")
    ax.axhline(limit, color="k", ls="--", label="closed-form limit")
    ax.set_xscale("log")
    ax.legend()
    _save(fig, path)


def plot_kinetic(path, nodes, averaged, limit) -> None:
    fig, ax = _axes("transported moment per obstacle size", "r", "moment")
    rs = [r for r, _ in nodes]
    ms = [m for _, m in nodes]
    ax.semilogx(rs, ms, "o-", label="node moments")
    ax.axhline(averaged, color="C1", label="log-size average")
    ax.axhline(limit, color="k", ls="--", label="limit moment")
    ax.legend()
    _save(fig, path)
