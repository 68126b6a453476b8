"""Re-run the link-cap sweeps and the cap-1 rule traces for the three benchmark models.

    python scripts/reproduce_tables.py [--timeout SECONDS] [--model3-caps N]

Prints each sweep next to the published final-path counts, then the cap-1
traces for models 1 and 2.
"""

from __future__ import annotations

import argparse

from svat.bench import run_bench
from svat.engine import RunConfig, enumerate_paths
from svat.fixtures import DEFAULT_RUN, FixtureId, builtin_model
from svat.pathchain import serialize_record

PUBLISHED = {
    1: [3, 5, 7, 9, 11],
    2: [4, 18, 68, 250, 922, 3430, 12868, 48617],
    3: [33, 1027, 39553, None],  # cap 4 never finished in the original runs
}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--timeout", type=float, default=120.0, help="per-cap limit in seconds")
    ap.add_argument("--model3-caps", type=int, default=4)
    args = ap.parse_args()

    for model, published in PUBLISHED.items():
        top = args.model3_caps if model == 3 else len(published)
        report = run_bench(model, range(1, top + 1), args.timeout)
        print(f"model {model}")
        print(f"{'cap':>4} {'found':>10} {'published':>10} {'elapsed s':>10}  match")
        for row in report.rows:
            ref = published[row.cap - 1] if row.cap <= len(published) else None
            found = "dnf" if row.final_paths is None else str(row.final_paths)
            elapsed = "-" if row.elapsed is None else f"{row.elapsed:.3f}"
            match = "" if ref is None else ("yes" if ref == row.final_paths else "NO")
            print(f"{row.cap:>4} {found:>10} {ref if ref is not None else '-':>10} {elapsed:>10}  {match}")
        print()

    for fixture in (FixtureId.MODEL1, FixtureId.MODEL2):
        start, end = DEFAULT_RUN[fixture]
        result = enumerate_paths(builtin_model(fixture), RunConfig(start, end, 1))
        print(f"{fixture.value} trace, cap 1, {start} -> {end}")
        for rec in result.trace:
            print(serialize_record(rec), end="")
        print()


if __name__ == "__main__":
    main()
