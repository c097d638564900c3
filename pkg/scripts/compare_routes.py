"""Compare the power-mean and Holder bounds on certified cells.

Prints, per function and q, how often each route is tighter and the median
ratio bound_holder / bound_pm, plus the smallest relative slack of each route.
"""
import argparse
import collections
import statistics

from amquad import campaign


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--corpus")
    parser.add_argument("--grid", default="q=2,3,5")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    rows = campaign.sweep_rows(campaign.load_corpus(args.corpus), campaign.SweepGrid.parse(args.grid), args.jobs)
    groups = collections.defaultdict(list)
    for row in rows:
        if row["certified"] and row["bound_holder"] is not None:
            groups[row["name"], row["q"]].append(row)

    print(f"{'function':<10}{'q':>4}{'cells':>7}{'holder<':>9}{'pm<':>6}{'median h/pm':>13}{'min pm slack':>14}{'min h slack':>13}")
    for (name, q), group in sorted(groups.items()):
        ratios = [r["bound_holder"] / r["bound_pm"] for r in group if r["bound_pm"] > 0]
        h_wins = sum(r["bound_holder"] < r["bound_pm"] for r in group)
        pm_wins = sum(r["bound_pm"] < r["bound_holder"] for r in group)

        def slack(col):
            vals = [(r[col] - abs(r["defect"])) / r[col] for r in group if r[col] > 0]
            return min(vals) if vals else float("nan")

        med = statistics.median(ratios) if ratios else float("nan")
        print(f"{name:<10}{q:>4g}{len(group):>7}{h_wins:>9}{pm_wins:>6}{med:>13.4f}{slack('bound_pm'):>14.3g}{slack('bound_holder'):>13.3g}")


if __name__ == "__main__":
    main()
