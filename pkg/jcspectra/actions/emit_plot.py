#!/usr/bin/env python3
"""
emit_plot.py - Extract plot data from an experiment CSV

Writes two whitespace-separated columns (key, value) for one CSV column,
ready for gnuplot or any other plotting tool. With --png it also renders a
small log-log chart of |value| against the key.
"""

import argparse
import csv
import math
import sys
from pathlib import Path

from jcspectra.utils import EXIT_USAGE, format_float, handle_error

PNG_SIZE = (640, 480)
PNG_MARGIN = 60


def read_column(csv_path: Path, column: str) -> list[tuple[float, float]]:
    """(key, value) pairs; the key is the CSV's first column."""
    with csv_path.open(newline="") as f:
        reader = csv.DictReader(f)
        fieldnames = reader.fieldnames or []
        if column not in fieldnames:
            have = ", ".join(fieldnames)
            raise LookupError(f"column '{column}' not in {csv_path} (have: {have})")
        key = fieldnames[0]
        pairs: list[tuple[float, float]] = []
        for row in reader:
            if row[column] == "":
                continue
            pairs.append((float(row[key]), float(row[column])))
    return pairs


def format_pairs(pairs: list[tuple[float, float]]) -> str:
    return "".join(f"{format_float(x)} {format_float(y)}\n" for x, y in pairs)


def render_loglog(pairs: list[tuple[float, float]], png_path: Path, title: str) -> int:
    """Draw |value| against key on log axes; returns the number of plotted points."""
    from PIL import Image, ImageDraw

    points = [(math.log(x), math.log(abs(y))) for x, y in pairs if x > 0 and y != 0]
    width, height = PNG_SIZE
    img = Image.new("RGB", PNG_SIZE, color="#FFFFFF")
    draw = ImageDraw.Draw(img)
    draw.rectangle(
        (PNG_MARGIN, PNG_MARGIN, width - PNG_MARGIN, height - PNG_MARGIN), outline="#404040"
    )
    draw.text((PNG_MARGIN, PNG_MARGIN // 3), title, fill="#000000")

    if points:
        xs, ys = [p[0] for p in points], [p[1] for p in points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        x_span = (x_hi - x_lo) or 1.0
        y_span = (y_hi - y_lo) or 1.0
        inner_w = width - 2 * PNG_MARGIN
        inner_h = height - 2 * PNG_MARGIN
        pixels = [
            (
                PNG_MARGIN + (x - x_lo) / x_span * inner_w,
                height - PNG_MARGIN - (y - y_lo) / y_span * inner_h,
            )
            for x, y in points
        ]
        if len(pixels) > 1:
            draw.line(pixels, fill="#1F5FBF", width=2)
        for px, py in pixels:
            draw.ellipse((px - 3, py - 3, px + 3, py + 3), fill="#1F5FBF")
        draw.text(
            (PNG_MARGIN, height - PNG_MARGIN + 10),
            f"ln x: {x_lo:.2f} .. {x_hi:.2f}   ln|y|: {y_lo:.2f} .. {y_hi:.2f}",
            fill="#000000",
        )

    img.save(png_path, "PNG")
    return len(points)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Emit two-column plot data from a result CSV")
    parser.add_argument("csv", help="Experiment CSV written by `jcspec run`")
    parser.add_argument("column", help="Column to plot against the first column")
    parser.add_argument("--output", help="Write the plot data here instead of stdout")
    parser.add_argument("--png", help="Also render a log-log PNG to this path")
    return parser


def main(args: list[str] | None = None) -> None:
    """Entry point for the emit-plot action."""
    parsed_args = build_parser().parse_args(args)
    csv_path = Path(parsed_args.csv)

    try:
        pairs = read_column(csv_path, parsed_args.column)
    except LookupError as e:
        handle_error("Error", e, EXIT_USAGE)
    except (OSError, ValueError) as e:
        handle_error(f"Error: cannot read {csv_path}", e, EXIT_USAGE)

    data = format_pairs(pairs)
    if parsed_args.output:
        _ = Path(parsed_args.output).write_text(data)
    else:
        _ = sys.stdout.write(data)

    if parsed_args.png:
        title = f"{csv_path.stem}: {parsed_args.column}"
        plotted = render_loglog(pairs, Path(parsed_args.png), title)
        print(f"Rendered {plotted} points to {parsed_args.png}", file=sys.stderr)


if __name__ == "__main__":
    main()
