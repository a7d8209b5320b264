"""Write the four figure presets as CSV curve files.

    python scripts/reproduce_figures.py [--out-dir results] [--symbols 100000]

Each preset runs through the same code path as ``papr-vlc --preset figN``.
"""

import argparse
import pathlib
import sys
import time

from papr_vlc.cli import PRESETS, main


def run(out_dir: pathlib.Path, symbols: int, names) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        target = out_dir / f"{name}.csv"
        t0 = time.perf_counter()
        code = main(["--preset", name, "--symbols", str(symbols), "--out", str(target)])
        print(f"{name}: exit {code}, {time.perf_counter() - t0:.1f}s -> {target}")
        if code:
            return code
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results", type=pathlib.Path)
    ap.add_argument("--symbols", default=100_000, type=int)
    ap.add_argument("presets", nargs="*", default=sorted(PRESETS))
    args = ap.parse_args()
    sys.exit(run(args.out_dir, args.symbols, args.presets))
