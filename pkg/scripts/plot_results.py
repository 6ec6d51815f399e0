"""Plot magnon-benchkit output tables.

Usage:

    python scripts/plot_results.py results/fig2d_spectrum.csv --output results/fig2d.png
    python scripts/plot_results.py results/fig1b_map.csv --output results/fig1b.png

The layout is picked from the columns: ``freq/power`` draws |r|^2 against
frequency, ``b/freq/power`` draws the field map as an image, ``t/energy``
draws time traces (one curve per bias field for ringdown maps) and
``f_eff/g`` draws the design curve on log axes.  Several spectrum or trace
files overlay on one chart, labelled by basename unless ``--labels`` is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from magnon_benchkit.columnar import ColumnarOutput, read_columnar  # noqa: E402


def _axis_label(table: ColumnarOutput, name: str) -> str:
    unit = dict(table.columns)[name]
    return name if unit == "1" else f"{name} ({unit})"


def plot_map(ax, table: ColumnarOutput) -> None:
    b = np.unique(table.column("b"))
    freq = table.column("freq")[: table.rows.shape[0] // b.size]
    power = table.column("power").reshape(b.size, freq.size)
    mesh = ax.pcolormesh(b, freq, power.T, shading="auto", cmap="viridis")
    plt.colorbar(mesh, ax=ax, label="|r|^2")
    ax.set_xlabel(_axis_label(table, "b"))
    ax.set_ylabel(_axis_label(table, "freq"))


def plot_curves(ax, table: ColumnarOutput, label: str) -> None:
    names = set(table.names)
    if {"f_eff", "g"} <= names:
        for scale in np.unique(table.column("scale")):
            keep = table.column("scale") == scale
            ax.loglog(table.column("f_eff")[keep], table.column("g")[keep], "o-", label=f"x{scale:g}")
        ax.set_xlabel(_axis_label(table, "f_eff"))
        ax.set_ylabel(_axis_label(table, "g"))
    elif {"b", "t", "energy"} <= names:
        for field in np.unique(table.column("b")):
            keep = table.column("b") == field
            ax.semilogy(table.column("t")[keep], table.column("energy")[keep], label=f"{field:g} mT")
        ax.set_xlabel(_axis_label(table, "t"))
        ax.set_ylabel("energy")
    elif {"t", "energy"} <= names:
        ax.plot(table.column("t"), table.column("energy"), linewidth=1.0, label=label)
        ax.set_xlabel(_axis_label(table, "t"))
        ax.set_ylabel("cavity energy")
    elif {"freq", "power"} <= names:
        ax.plot(table.column("freq"), table.column("power"), linewidth=1.0, label=label)
        ax.set_xlabel(_axis_label(table, "freq"))
        ax.set_ylabel("|r|^2")
    elif {"x", "g"} <= names:
        ax.plot(table.column("x"), table.column("g"), "o-", label=label)
        ax.set_xlabel(_axis_label(table, "x"))
        ax.set_ylabel(_axis_label(table, "g"))
    else:
        raise ValueError(f"no plot layout for columns {', '.join(table.names)}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description="Plot magnon-benchkit output tables.")
    p.add_argument("files", nargs="+", help="One or more columnar output files.")
    p.add_argument("--labels", nargs="*", help="Optional legend labels (override basenames).")
    p.add_argument("--output", default="magnon_plot.png", help="Output image file.")
    p.add_argument("--title", default=None, help="Figure title.")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    files = [Path(f) for f in args.files]
    labels = list(args.labels) if args.labels is not None else []

    fig, ax = plt.subplots(figsize=(10, 6))
    for idx, path in enumerate(files):
        table = read_columnar(path)
        if {"b", "freq", "power"} <= set(table.names):
            if len(files) > 1:
                raise SystemExit("field maps are plotted one file at a time")
            plot_map(ax, table)
        else:
            plot_curves(ax, table, labels[idx] if idx < len(labels) else path.stem)

    ax.grid(True, which="both", linestyle=":", linewidth=0.6)
    ax.set_title(args.title or ", ".join(p.stem for p in files))
    if ax.get_legend_handles_labels()[0]:
        ax.legend()

    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(output, dpi=150)
    print(f"Saved plot: {output}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
