"""Entry point: one figure per invocation, or `all` to rebuild a results dir.

Usage:
    aoi-plots FIGURE_ID INPUT_CSV OUTPUT_IMAGE
    aoi-plots all RESULTS_DIR OUTPUT_DIR

`all` expects the conventional file names chain.csv, split.csv, optimize.csv
and multiground.csv inside RESULTS_DIR and renders every figure whose input
exists.  Exit codes: 0 success, 1 usage error, 2 schema/render failure.
"""

import os
import sys
from typing import Optional

from .render import FIGURE_IDS, FigureJob, SchemaError, render

# results-directory convention used by `all`
_ALL = [
    ("delay_chain", "chain.csv"),
    ("aoi_chain", "chain.csv"),
    ("rho_star", "optimize.csv"),
    ("delay_split", "split.csv"),
    ("aoi_split", "split.csv"),
    ("aoi_multiground", "multiground.csv"),
]


def _render_all(results_dir: str, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    rendered = 0
    for figure_id, csv_name in _ALL:
        csv_path = os.path.join(results_dir, csv_name)
        if not os.path.exists(csv_path):
            print(f"skip {figure_id}: {csv_path} not found")
            continue
        out_path = os.path.join(out_dir, f"{figure_id}.png")
        render(FigureJob(figure_id, csv_path, out_path))
        print(f"wrote {out_path}")
        rendered += 1
    if rendered == 0:
        print(f"error: no known CSV files in {results_dir}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if len(argv) == 3 and argv[0] == "all":
            return _render_all(argv[1], argv[2])
        if len(argv) == 3:
            out = render(FigureJob(argv[0], argv[1], argv[2]))
            print(f"wrote {out}")
            return 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(__doc__.strip(), file=sys.stderr)
    print(f"\nfigure ids: {', '.join(FIGURE_IDS)}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
