"""Render the four-panel illustration from figure1 CLI artifacts.

Reads fig1_meta.json plus the four CSV series it points at and draws a 2x2
panel image: price and book value as lines on top, cash and position as
post-step plots below. Everything plotted comes straight from the files;
nothing is recomputed here.

Usage:
    python figures/figure1.py --meta out/fig/fig1_meta.json --out out/fig/fig1.png
"""

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PANEL_ORDER = ("S", "V", "psi", "phi")
PANEL_LABELS = {
    "S": "S (scaled price)",
    "V": "V (book value)",
    "psi": "psi (cash)",
    "phi": "phi (position)",
}
# cash and position are piecewise constant between rungs; draw the jumps
STEP_SERIES = frozenset({"psi", "phi"})


@dataclass(frozen=True)
class PanelSpec:
    csv_path: Path
    name: str
    label: str
    row: int
    col: int
    step: bool


def load_series(path: Path, name: str):
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", name]:
        raise ValueError(f"{path}: expected header t,{name}")
    t = np.array([float(r[0]) for r in rows[1:]])
    y = np.array([float(r[1]) for r in rows[1:]])
    return t, y


def default_panels(meta: dict, base: Path) -> list[PanelSpec]:
    panels = []
    for i, name in enumerate(PANEL_ORDER):
        try:
            filename = meta["series"][name]
        except KeyError:
            raise ValueError(f"meta lists no csv for series {name!r}")
        panels.append(
            PanelSpec(
                csv_path=base / filename,
                name=name,
                label=PANEL_LABELS[name],
                row=i // 2,
                col=i % 2,
                step=name in STEP_SERIES,
            )
        )
    return panels


def render_figure(meta: dict, panels: list[PanelSpec], out: Path):
    if len(panels) != 4:
        raise ValueError(f"need exactly 4 panels, got {len(panels)}")

    loaded = []
    for spec in panels:
        loaded.append((spec, *load_series(spec.csv_path, spec.name)))

    t0 = loaded[0][1]
    for spec, t, _ in loaded[1:]:
        if len(t) != len(t0) or not np.array_equal(t, t0):
            raise ValueError(f"{spec.csv_path}: time column differs from {panels[0].csv_path}")

    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for spec, t, y in loaded:
        ax = axes[spec.row][spec.col]
        if spec.step:
            ax.plot(t, y, drawstyle="steps-post", linewidth=1.0)
        else:
            ax.plot(t, y, linewidth=1.0)
        ax.set_ylabel(spec.label)
        ax.grid(True, alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("t")

    fig.suptitle(
        f"seed {meta['seed']}, N = {meta['depth']}, "
        f"$\\epsilon$(N) = {meta['epsilon']:.3g}"
    )
    fig.tight_layout()
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return fig


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--meta", type=Path, required=True, help="fig1_meta.json path")
    p.add_argument("--out", type=Path, required=True, help="image destination")
    args = p.parse_args(argv)

    try:
        meta = json.loads(args.meta.read_text(encoding="utf-8"))
        panels = default_panels(meta, args.meta.parent)
        fig = render_figure(meta, panels, args.out)
        plt.close(fig)
    except (OSError, ValueError, KeyError) as exc:
        print(f"figure1: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
