"""Evaluate every scorer on one or more datasets and test each against BM25.

    python scripts/compare_scorers.py data/toy [more dataset dirs] --out runs/compare
"""

import argparse
import json
from pathlib import Path

from lexevolve.corpus import load_dataset, write_run
from lexevolve.evaluate import EvalReport, compare_runs, evaluate_dataset
from lexevolve.scoring import SCORERS


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("datasets", nargs="+")
    ap.add_argument("--out", default="runs/compare")
    ap.add_argument("--gain", default="exponential", choices=("exponential", "linear"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    datasets = [load_dataset(p) for p in args.datasets]
    runs, summary = {}, {}
    for name in SCORERS:
        per_ds = {}
        for ds in datasets:
            metrics, run, _ = evaluate_dataset(name, ds, gain=args.gain)
            per_ds[ds.name] = metrics
            runs[(name, ds.name)] = run
            write_run(run, name, out / f"{ds.name}.{name}.run")
        report = EvalReport.from_datasets(per_ds, scorer=name)
        summary[name] = report.to_dict()
        print(f"{name:<14} nDCG@10 {report.mean_ndcg10:.4f}  R@100 {report.mean_recall100:.4f}  "
              f"fitness {report.fitness:.4f}  {report.query_ms_per_query:.3f} ms/query")

    print("\npaired t-tests against bm25 (per dataset)")
    for ds in datasets:
        qrels = ds.qrels_by_query()
        for name in SCORERS:
            if name == "bm25":
                continue
            for c in compare_runs(runs[(name, ds.name)], runs[("bm25", ds.name)], qrels, args.gain):
                flag = "*" if c.significant else " "
                print(f"  {ds.name:<12}{name:<14}{c.metric:<10} diff {c.mean_diff:+.4f}  t {c.t:+8.3f}  p {c.p:.4f} {flag}")
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
