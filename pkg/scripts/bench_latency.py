"""Indexing and per-query latency of every scorer on a synthetic corpus.

    python scripts/bench_latency.py --docs 2000 --queries 50
"""

import argparse
import sys
from pathlib import Path

from lexevolve.evaluate import measure_latency
from lexevolve.scoring import SCORERS, Retriever

sys.path.insert(0, str(Path(__file__).resolve().parent))
from make_toy_dataset import make_dataset  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=2000)
    ap.add_argument("--queries", type=int, default=50)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    ds = make_dataset(args.docs, args.queries, 8, seed=1)
    texts = [q.text for q in ds.queries]

    print(f"{len(ds.documents)} docs, {len(texts)} queries")
    print(f"{'scorer':<14}{'index ms/doc':>14}{'query ms/q':>12}{'stdev':>9}")
    for name in SCORERS:
        holder = {}
        idx = measure_latency(lambda: holder.setdefault("r", Retriever.build(name, ds.documents)),
                              len(ds.documents))
        retriever = holder["r"]
        q = measure_latency(lambda: [retriever.search(t, 100) for t in texts], len(texts), args.repeats)
        print(f"{name:<14}{idx.ms_per_unit:>14.4f}{q.ms_per_unit:>12.3f}{q.stdev_ms:>9.3f}")


if __name__ == "__main__":
    main()
