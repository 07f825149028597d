"""Report artifacts: a delimited value table and a figure of the separation band."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SEPARATION_COLUMNS = ("term", "max", "sep", "min")


def _cell(v) -> str:
    return "bot" if v is None else str(v)


def write_rows_csv(rows, path, columns=SEPARATION_COLUMNS) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def plot_separation(rows, path, title: str = "") -> Path:
    """Plot max / separator / min values per term, in enumeration order.

    Undefined values are left out; the band between the two automata is shaded.
    """
    path = Path(path)
    xs, lo, mid, hi = [], [], [], []
    for i, (_, vmax, vsep, vmin) in enumerate(rows):
        if vmax is None or vsep is None or vmin is None:
            continue
        xs.append(i)
        lo.append(float(vmax))
        mid.append(float(vsep))
        hi.append(float(vmin))

    fig, ax = plt.subplots(figsize=(7, 4))
    if xs:
        ax.fill_between(xs, lo, hi, step="mid", color="0.85", label="[max, min]")
        style = dict(marker=".", linestyle="none" if len(xs) > 60 else "-", markersize=3)
        ax.plot(xs, lo, color="tab:blue", label="max automaton", **style)
        ax.plot(xs, hi, color="tab:red", label="min automaton", **style)
        ax.plot(xs, mid, color="black", label="separator", **style)
        ax.legend(loc="upper left", frameon=False)
    else:
        ax.text(0.5, 0.5, "no defined values", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("term index (enumeration order)")
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    ax.grid(True, linewidth=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report_artifacts(rows, directory, stem: str = "separation", title: str = "") -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        write_rows_csv(rows, directory / f"{stem}.csv"),
        plot_separation(rows, directory / f"{stem}.png", title),
    ]
