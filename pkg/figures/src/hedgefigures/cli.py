"""Batch front end: render one panel image from a result CSV.

Writes the image plus a ``<out>.manifest.json`` sidecar describing the drawn
series.  Exit codes: 0 success, 2 bad flags or malformed CSV.
"""

from __future__ import annotations

import argparse
import json
import sys

from .reader import SchemaError
from .render import PanelSpec, render_panel


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hedge-figures")
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one panel from a result CSV")
    render.add_argument("--csv", required=True, help="result CSV in the benchmark schema")
    render.add_argument("--panel", required=True, help="panel label: a, b, c or d")
    render.add_argument("--out", required=True, help="output image path (.png)")
    render.add_argument("--logx", action="store_true")
    render.add_argument("--logy", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = PanelSpec(
            csv_path=args.csv, panel=args.panel, out_path=args.out,
            logx=args.logx, logy=args.logy,
        )
        result = render_panel(spec)
    except SchemaError as exc:
        sys.stderr.write(f"error: CSV is missing required column: {exc.column}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    manifest_path = args.out + ".manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(result.manifest(), fh, indent=2)
        fh.write("\n")
    sys.stdout.write(f"{result.image_path}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
