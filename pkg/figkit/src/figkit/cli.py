"""render_figs: render result figures from a simulation CSV bundle."""

from __future__ import annotations

import argparse
import os
import sys

from .contract import ContractError
from .figures import KINDS, FigureSpec, render

# short numeric aliases accepted alongside the kind names
ALIASES = {"5": "median_vs_size", "6": "cdf", "7": "stale_vs_delta",
           "8": "delta_vs_size"}


def _resolve_kinds(arg: str):
    kinds = []
    for token in arg.split(","):
        token = token.strip()
        kind = ALIASES.get(token, token)
        if kind not in KINDS:
            raise SystemExit(
                f"unknown figure {token!r}; choose from {list(KINDS)} "
                f"or aliases {sorted(ALIASES)}")
        if kind not in kinds:
            kinds.append(kind)
    return kinds


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="render_figs",
        description="render figures from a blocks.csv / summary.csv bundle")
    ap.add_argument("--in", dest="in_dir", required=True,
                    help="directory containing blocks.csv and summary.csv")
    ap.add_argument("--out", dest="out_dir", required=True,
                    help="directory for the rendered SVG files")
    ap.add_argument("--figures", default=",".join(KINDS),
                    help="comma-separated figure kinds (or aliases 5,6,7,8)")
    args = ap.parse_args(argv)

    kinds = _resolve_kinds(args.figures)
    os.makedirs(args.out_dir, exist_ok=True)
    summary = os.path.join(args.in_dir, "summary.csv")
    blocks = os.path.join(args.in_dir, "blocks.csv")

    for kind in kinds:
        spec = FigureSpec(kind=kind, summary_path=summary, blocks_path=blocks,
                          out_path=os.path.join(args.out_dir, f"{kind}.svg"))
        try:
            result = render(spec)
        except ContractError as exc:
            print(f"render_figs: {exc}", file=sys.stderr)
            return 2
        print(f"{kind}: {result.path} ({len(result.series)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
