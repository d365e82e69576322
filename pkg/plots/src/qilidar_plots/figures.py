"""One render function per figure kind, all driven through ``render``."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import SchemaError, column, read_table

REGIME_STYLE = {"qi": {"color": "tab:blue"}, "ci": {"color": "tab:orange"}}


@dataclass
class FigureSpec:
    kind: str
    input_csv: Path
    output: Path
    log_x: bool = False
    log_y: bool = False
    title: str | None = None


def _grouped(rows, key):
    groups: dict[str, list] = {}
    for row in rows:
        groups.setdefault(row[key], []).append(row)
    return groups


def _finish(fig, ax, spec: FigureSpec):
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    fig.savefig(spec.output)
    plt.close(fig)


def _render_probs(rows, spec):
    names = column(rows, "quantity", numeric=False)
    values = column(rows, "value")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(names)), values, color="tab:blue")
    ax.set_xticks(range(len(names)), names, rotation=45, ha="right")
    ax.set_ylabel("value")
    ax.axhline(0.0, color="black", linewidth=0.8)
    _finish(fig, ax, spec)


def _render_roc(rows, spec):
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for regime, group in sorted(_grouped(rows, "regime").items(), reverse=True):
        fa = column(group, "p_fa")
        pd = column(group, "p_d")
        order = sorted(range(len(fa)), key=fa.__getitem__)
        style = REGIME_STYLE.get(regime, {})
        ax.plot([fa[i] for i in order], [pd[i] for i in order], label=regime.upper(), **style)
        operating = [g for g in group if float(g["d_llv"]) == 0.0]
        if operating:
            ax.plot(
                [float(g["p_fa"]) for g in operating],
                [float(g["p_d"]) for g in operating],
                "o",
                markersize=7,
                **style,
            )
    ax.plot([0, 1], [0, 1], "k:", linewidth=0.8)
    ax.set_xlabel(r"$P_{FA}$")
    ax.set_ylabel(r"$P_D$")
    ax.legend(loc="lower right")
    _finish(fig, ax, spec)


def _render_qa_grid(rows, spec):
    n_bar = column(rows, "n_bar")
    bg_s = column(rows, "bg_s")
    qa = column(rows, "qa")
    xs = sorted(set(n_bar))
    ys = sorted(set(bg_s))
    if len(xs) * len(ys) != len(rows):
        raise SchemaError(f"qa_grid is not a full grid: {len(xs)}x{len(ys)} != {len(rows)} rows")
    lookup = {(x, y): q for x, y, q in zip(n_bar, bg_s, qa)}
    grid = [[lookup[(x, y)] for x in xs] for y in ys]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    contour = ax.contourf(xs, ys, grid, levels=12, cmap="viridis")
    fig.colorbar(contour, ax=ax, label="quantum advantage")
    ax.set_xlabel(r"source mean photons $\bar{n}$")
    ax.set_ylabel("signal background mean")
    _finish(fig, ax, spec)


def _render_detect_sim(rows, spec):
    z = column(rows, "z")
    llv = column(rows, "llv")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(z, llv, color="tab:red", linewidth=0.9)
    ax.axhline(0.0, color="black", linestyle="--", linewidth=0.8)
    ax.set_xlabel("time-bin z (shots)")
    ax.set_ylabel("rolling LLV")
    _finish(fig, ax, spec)


def _render_rangefind(rows, spec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups = _grouped(rows, "distance_m")
    for distance in sorted(groups, key=float):
        group = groups[distance]
        ax.plot(
            column(group, "elapsed_shots"),
            column(group, "mu_s"),
            marker=".",
            markersize=3,
            label=f"{distance} m",
        )
    ax.axhline(0.0, color="black", linestyle="--", linewidth=0.8)
    ax.set_xlabel("elapsed shots")
    ax.set_ylabel(r"sample mean LLV $\mu_S$")
    ax.legend()
    _finish(fig, ax, spec)


def _render_pcorrect(rows, spec):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    groups = _grouped(rows, "distance_m")
    for distance in sorted(groups, key=float):
        group = groups[distance]
        ax.plot(
            column(group, "elapsed_shots"),
            column(group, "p_correct"),
            marker=".",
            markersize=3,
            label=f"{distance} m",
        )
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("elapsed shots")
    ax.set_ylabel("probability of correct decision")
    ax.legend(loc="lower right")
    _finish(fig, ax, spec)


_RENDERERS = {
    "probs": _render_probs,
    "roc": _render_roc,
    "qa_grid": _render_qa_grid,
    "detect_sim": _render_detect_sim,
    "rangefind": _render_rangefind,
    "pcorrect": _render_pcorrect,
}


def render(spec: FigureSpec) -> Path:
    """Validate the CSV and write the figure; no image is created on error."""
    rows = read_table(spec.input_csv, spec.kind)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    _RENDERERS[spec.kind](rows, spec)
    return spec.output
