"""Write the synthetic bilingual fixture and a copy of desk_run.cfg next to it.

    python3 scripts/make_fixture.py --out runs/fixture
    python3 -m adaptkit pipeline --config runs/fixture/desk_run.cfg --out runs/desk
"""

import argparse
import shutil
from pathlib import Path

from adaptkit.synthetic import FIXTURE_SIZES, write_bilingual_fixture

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True, help="fixture directory")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--planted-share", type=float, default=0.1,
                    help="share of the out-domain corpus drawn from the in-domain distribution")
    for name, n in FIXTURE_SIZES.items():
        ap.add_argument(f"--{name}", type=int, default=n, help=f"pairs in {name} (default {n})")
    args = ap.parse_args()

    sizes = {name: getattr(args, name) for name in FIXTURE_SIZES}
    files = write_bilingual_fixture(args.out, seed=args.seed, sizes=sizes, planted_share=args.planted_share)
    shutil.copy(HERE / "desk_run.cfg", Path(args.out) / "desk_run.cfg")
    for name, paths in files.items():
        print(name, " ".join(p.name for p in paths.values()))


if __name__ == "__main__":
    main()
