"""Render sshqed CSV tables to figure files.

Usage: sshqed-render <figure-kind> <csv...> -o <png>

Pure presentation: every number is read from the CSVs, nothing is
recomputed. Unknown kinds, missing columns, or empty tables exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class RenderError(Exception):
    pass


def read_table(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"{path}: no header row")
        rows = list(reader)
    if not rows:
        raise RenderError(f"{path}: table has no data rows")
    return reader.fieldnames, rows


def need(fieldnames, rows, *columns):
    missing = [c for c in columns if c not in fieldnames]
    if missing:
        raise RenderError(f"missing column(s): {', '.join(missing)}")
    return [{c: r[c] for c in fieldnames} for r in rows]


def floats(rows, column):
    return np.array([float(r[column]) for r in rows])


def groups(rows, column):
    seen = []
    for r in rows:
        if r[column] not in seen:
            seen.append(r[column])
    return seen


def render_spectrum(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "delta_detuning", "value", "band")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    in_band = [r for r in rows if r["band"] == "band"]
    in_gap = [r for r in rows if r["band"] != "band"]
    ax.scatter(floats(in_band, "delta_detuning"), floats(in_band, "value"),
               s=2, c="#7aa6c2", label="scattering")
    if in_gap:
        ax.scatter(floats(in_gap, "delta_detuning"), floats(in_gap, "value"),
                   s=8, c="#c23b22", label="in gap")
    ax.set_xlabel("detuning (J)")
    ax.set_ylabel("energy (J)")
    ax.legend(loc="upper left", fontsize=8)
    return fig


def render_boundstate(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "label", "delta_detuning", "gap",
                "cell", "sublattice", "value")
    rows = [r for r in rows if r["sublattice"] in ("A", "B")]
    if not rows:
        raise RenderError("no site rows to draw")
    panels = []
    for r in rows:
        key = (r["label"], r["delta_detuning"], r["gap"])
        if key not in panels:
            panels.append(key)
    ncol = min(3, len(panels))
    nrow = (len(panels) + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(4 * ncol, 2.8 * nrow),
                             squeeze=False)
    for i, key in enumerate(panels):
        ax = axes[i // ncol][i % ncol]
        sel = [r for r in rows if (r["label"], r["delta_detuning"], r["gap"]) == key]
        for subl, color in (("A", "#2d6a9f"), ("B", "#c23b22")):
            part = [r for r in sel if r["sublattice"] == subl]
            ax.bar(floats(part, "cell") + (0.0 if subl == "A" else 0.4),
                   floats(part, "value"), width=0.4, color=color, label=subl)
        label, det, gap = key
        ax.set_title(f"{label or 'run'}  detuning={det}  {gap}", fontsize=8)
        ax.set_xlabel("cell")
        ax.set_ylabel("probability")
        ax.legend(fontsize=7)
    for j in range(len(panels), nrow * ncol):
        axes[j // ncol][j % ncol].axis("off")
    return fig


def render_sw_couplings(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "label", "dimerization", "cell", "value")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for dim in groups(rows, "dimerization"):
        for label in groups(rows, "label"):
            sel = [r for r in rows if r["dimerization"] == dim and r["label"] == label]
            if not sel:
                continue
            x = floats(sel, "cell")
            y = np.abs(floats(sel, "value"))
            style = "o-" if label == "integral" else "s--"
            ax.semilogy(x, np.where(y > 0, y, np.nan), style, ms=4,
                        label=f"{label}, asymmetry {dim}")
    ax.set_xlabel("emitter separation (cells)")
    ax.set_ylabel("|coupling| (J)")
    ax.legend(fontsize=7)
    return fig


def render_markov_scan(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "label", "kind", "delta_detuning", "value")
    labels = groups(rows, "label")
    ncol = min(3, len(labels))
    nrow = (len(labels) + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(4 * ncol, 2.8 * nrow),
                             squeeze=False)
    styles = {"gamma_00": ("-", "#e08214"), "J_00": ("--", "#5e3c99"),
              "gamma_01": ("-", "#b2182b"), "J_01": ("--", "#2166ac")}
    for i, label in enumerate(labels):
        ax = axes[i // ncol][i % ncol]
        for kind in groups(rows, "kind"):
            sel = [r for r in rows if r["label"] == label and r["kind"] == kind]
            if not sel:
                continue
            ls, color = styles.get(kind, ("-", "#444444"))
            ax.plot(floats(sel, "delta_detuning"), floats(sel, "value"),
                    ls, color=color, lw=1.2, label=kind)
        ax.axhline(0.0, color="0.8", lw=0.6)
        ax.set_title(label or "run", fontsize=8)
        ax.set_xlabel("detuning (J)")
        ax.set_ylabel("coupling (J)")
        ax.legend(fontsize=6)
    for j in range(len(labels), nrow * ncol):
        axes[j // ncol][j % ncol].axis("off")
    return fig


def render_evolve(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "label", "time", "atom", "value")
    extra = tables[1] if len(tables) > 1 else None
    nplots = 2 if extra else 1
    fig, axes = plt.subplots(1, nplots, figsize=(6 * nplots, 4.0), squeeze=False)
    ax = axes[0][0]
    for label in groups(rows, "label"):
        for atom in groups(rows, "atom"):
            sel = [r for r in rows if r["label"] == label and r["atom"] == atom]
            if not sel:
                continue
            name = f"{label or 'run'}: emitter {atom}"
            ax.plot(floats(sel, "time"), floats(sel, "value"), lw=1.1, label=name)
    ax.set_xlabel("time (1/J)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=7)
    if extra:
        f2, rows2 = extra
        rows2 = need(f2, rows2, "label", "time", "value")
        ax2 = axes[0][1]
        for label in groups(rows2, "label"):
            sel = [r for r in rows2 if r["label"] == label]
            ax2.plot(floats(sel, "time"), floats(sel, "value"), lw=1.1,
                     label=label or "run")
        ax2.set_xlabel("time (1/J)")
        ax2.set_ylabel("fidelity")
        ax2.set_ylim(-0.02, 1.02)
        ax2.legend(fontsize=7)
    return fig


def render_photon_map(tables, ax_grid):
    fieldnames, rows = tables[0]
    rows = need(fieldnames, rows, "time", "cell", "sublattice", "value")
    times = sorted({float(r["time"]) for r in rows})
    t_index = {t: i for i, t in enumerate(times)}
    n_cells = max(int(r["cell"]) for r in rows) + 1
    grid = np.zeros((len(times), 2 * n_cells))
    for r in rows:
        site = 2 * int(r["cell"]) + (0 if r["sublattice"] == "A" else 1)
        grid[t_index[float(r["time"])], site] = float(r["value"])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    mesh = ax.imshow(grid, origin="lower", aspect="auto", cmap="magma",
                     extent=(0, 2 * n_cells, times[0], times[-1]))
    fig.colorbar(mesh, ax=ax, label="photon number")
    ax.set_xlabel("site")
    ax.set_ylabel("time (1/J)")
    return fig


RENDERERS = {
    "spectrum": render_spectrum,
    "boundstate": render_boundstate,
    "sw-couplings": render_sw_couplings,
    "markov-scan": render_markov_scan,
    "evolve": render_evolve,
    "transfer": render_evolve,
    "photon-map": render_photon_map,
}


def render(kind, csv_paths, out_path):
    if kind not in RENDERERS:
        raise RenderError(f"unknown figure kind {kind!r}; one of {sorted(RENDERERS)}")
    if not csv_paths:
        raise RenderError("need at least one CSV input")
    tables = [read_table(p) for p in csv_paths]
    fig = RENDERERS[kind](tables, None)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sshqed-render",
                                     description="Render sshqed CSV tables to a figure.")
    parser.add_argument("kind", help="figure kind: " + ", ".join(sorted(RENDERERS)))
    parser.add_argument("csvs", nargs="+", help="input CSV file(s)")
    parser.add_argument("-o", "--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.csvs, args.out)
    except (RenderError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
