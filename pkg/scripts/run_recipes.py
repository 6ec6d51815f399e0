"""Run every packaged recipe and collect the outputs in one directory.

Each recipe is run through the packaged CLI with ``--out`` redirected into
the output directory; its ``# expect:`` lines are printed next to the result
so the reproduced values can be compared by eye.

Example:
    python scripts/run_recipes.py --out-dir results
    python scripts/run_recipes.py fig1d fig2f
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

# Ensure repository root on sys.path when running from a checkout.
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from magnon_benchkit.cli import main as cli_main  # noqa: E402
from magnon_benchkit.recipes import (  # noqa: E402
    expected_outputs,
    list_recipes,
    load_recipe,
    recipe_command,
)


def main() -> int:
    ap = argparse.ArgumentParser(description="Run the packaged magnon-benchkit recipes.")
    ap.add_argument("names", nargs="*", help="Recipes to run (default: all).")
    ap.add_argument("--out-dir", type=Path, default=Path("results"), help="Output directory.")
    ap.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    args = ap.parse_args()

    names = args.names or list(list_recipes())
    args.out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in names:
        config = load_recipe(name)
        filename = Path(config.output.path or f"{name}.csv").name
        out = args.out_dir / filename
        argv = [recipe_command(name), "--recipe", name, "--out", str(out)]
        if args.verbose:
            argv.append("--verbose")
        print(f"== {name}: magnon-benchkit {' '.join(argv)}")
        code = cli_main(argv)
        for line in expected_outputs(name):
            print(f"   expect: {line}")
        if code != 0:
            print(f"   exit code {code}", file=sys.stderr)
            failures += 1
    print(f"{len(names) - failures}/{len(names)} recipes ran cleanly; outputs in {args.out_dir}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
