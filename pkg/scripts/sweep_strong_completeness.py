"""Draw one parameterization per labeled DAG and report how many are faithful."""

from __future__ import annotations

import argparse
import collections
import time

from faithbn.faithfulness import verify_strong_completeness
from faithbn.graph import all_dags


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--vertices", type=int, default=4, choices=(1, 2, 3, 4))
    ap.add_argument("--family", choices=("discrete", "gaussian"), default="discrete")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-resamples", type=int, default=1)
    args = ap.parse_args()

    start = time.perf_counter()
    resamples = collections.Counter()
    failed = []
    graphs = list(all_dags("ABCD"[: args.vertices]))
    for g in graphs:
        rep = verify_strong_completeness(g, seed=args.seed, family=args.family, max_resamples=args.max_resamples)
        resamples[rep.resamples] += 1
        if not rep.faithful:
            failed.append((g, rep.verdict))
    print(f"{len(graphs)} DAGs on {args.vertices} vertices, family {args.family}")
    print(f"faithful: {len(graphs) - len(failed)}/{len(graphs)}")
    print("resamples:", dict(sorted(resamples.items())))
    for g, verdict in failed:
        print(f"  FAILED {g}: {verdict}")
    print(f"elapsed {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
