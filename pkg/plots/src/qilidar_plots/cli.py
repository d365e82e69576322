"""Console entry points, one per figure kind: plot_<kind> <input.csv> -o <out>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, render
from .reader import SchemaError


def _run(kind: str, argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog=f"plot_{kind}", description=f"Render a {kind} figure from a qilidar CSV."
    )
    parser.add_argument("input_csv", type=Path)
    parser.add_argument("-o", "--output", type=Path, required=True, help="image path (.svg/.pdf/.png)")
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--log-y", action="store_true")
    parser.add_argument("--title")
    args = parser.parse_args(argv)
    spec = FigureSpec(kind, args.input_csv, args.output, args.log_x, args.log_y, args.title)
    try:
        render(spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


def main_probs(argv=None) -> int:
    return _run("probs", argv)


def main_roc(argv=None) -> int:
    return _run("roc", argv)


def main_qa_grid(argv=None) -> int:
    return _run("qa_grid", argv)


def main_detect_sim(argv=None) -> int:
    return _run("detect_sim", argv)


def main_rangefind(argv=None) -> int:
    return _run("rangefind", argv)


def main_pcorrect(argv=None) -> int:
    return _run("pcorrect", argv)
