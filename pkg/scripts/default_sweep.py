"""Run the default grid over the demo corpus and write the CSV report.

    python3 scripts/default_sweep.py --out sweep.csv --jobs 4
"""
import argparse
import time

from amquad import campaign


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="sweep.csv")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--corpus")
    args = parser.parse_args()

    entries = campaign.load_corpus(args.corpus)
    grid = campaign.SweepGrid()
    start = time.perf_counter()
    rows = campaign.sweep_rows(entries, grid, args.jobs)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        campaign.write_csv(rows, fh)
    certified = sum(r["certified"] for r in rows)
    print(f"{len(rows)} rows ({certified} certified) -> {args.out} in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
