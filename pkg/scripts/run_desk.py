"""Generate the fixture, run the desk pipeline, print the BLEU line and weights."""

import argparse
import subprocess
import sys
import time
from pathlib import Path

from adaptkit.cli import main as cli_main

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--work", default="runs", help="directory for the fixture and the run")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    work = Path(args.work)
    fixture, out = work / "fixture", work / "desk"
    subprocess.run([sys.executable, str(HERE / "make_fixture.py"), "--out", str(fixture),
                    "--seed", str(args.seed)], check=True, stdout=subprocess.DEVNULL)
    start = time.perf_counter()
    status = cli_main(["-v", "pipeline", "--config", str(fixture / "desk_run.cfg"), "--out", str(out)])
    print(f"exit {status} after {time.perf_counter() - start:.1f}s")
    if status == 0:
        print((out / "bleu" / "bleu.txt").read_text().strip())
        print((out / "lm" / "weights.tsv").read_text().strip())
    return status


if __name__ == "__main__":
    sys.exit(main())
