"""Command-line entry point: ``lexevolve {index,eval,compare,evolve}``.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import ConfigError, RunConfig, load_config
from .corpus import CorpusFormatError, load_dataset, load_qrels, qrels_to_dict, read_run, write_run
from .evaluate import EvalReport, compare_runs, evaluate_dataset
from .index import build_indexes, load_index, save_index
from .metrics import EXPONENTIAL, LINEAR
from .scoring import SCORERS, make_params

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("lexevolve")


def _index_dir(cfg: RunConfig, dataset_label: str) -> Path:
    return Path(cfg.output_dir) / "index" / dataset_label


def cmd_index(cfg: RunConfig) -> int:
    cfg.validate()
    channels = cfg.channel_list()
    for spec in cfg.datasets:
        ds = load_dataset(spec.path, spec.split, spec.label)
        indexes = build_indexes(ds.documents, channels)
        out = _index_dir(cfg, spec.label)
        out.mkdir(parents=True, exist_ok=True)
        for channel, idx in indexes.items():
            save_index(idx, out / f"{channel.value}.idx")
        seconds = next(iter(indexes.values())).build_seconds if indexes else 0.0
        ms_per_doc = seconds * 1000.0 / max(1, len(ds.documents))
        report = {
            "dataset": spec.label,
            "n_docs": len(ds.documents),
            "channels": [c.value for c in channels],
            "indexing_ms_per_doc": ms_per_doc,
        }
        (out / "index_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"{spec.label}: {len(ds.documents)} docs, {len(channels)} channel(s), {ms_per_doc:.4f} ms/doc")
    return EXIT_OK


def _saved_indexes(cfg: RunConfig, label: str):
    """Previously persisted indexes for every channel the scorer needs, or None."""
    root = _index_dir(cfg, label)
    needed = SCORERS[cfg.scorer].channels
    paths = {c: root / f"{c.value}.idx" for c in needed}
    if not all(p.is_file() for p in paths.values()):
        return None, None
    report_path = root / "index_report.json"
    ms = json.loads(report_path.read_text())["indexing_ms_per_doc"] if report_path.is_file() else None
    return {c: load_index(p) for c, p in paths.items()}, ms


def cmd_eval(cfg: RunConfig) -> int:
    cfg.validate()
    try:
        params = make_params(cfg.scorer, cfg.params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    per_query_all = {}
    for spec in cfg.datasets:
        ds = load_dataset(spec.path, spec.split, spec.label)
        indexes, ms = _saved_indexes(cfg, spec.label)
        metrics, run, per_query = evaluate_dataset(
            cfg.scorer, ds, params, cfg.gain, cfg.workers, indexes=indexes, indexing_ms_per_doc=ms
        )
        write_run(run, cfg.tag, out / f"{spec.label}.{cfg.tag}.run")
        results[spec.label] = metrics
        per_query_all[spec.label] = {q: vars(m) for q, m in per_query.items()}
    report = EvalReport.from_datasets(results, scorer=cfg.scorer, params=vars(params), gain=cfg.gain)
    (out / f"report.{cfg.tag}.json").write_text(report.to_json() + "\n")
    (out / f"per_query.{cfg.tag}.json").write_text(json.dumps(per_query_all, indent=2, sort_keys=True) + "\n")
    print(report.table())
    return EXIT_OK


def cmd_compare(run_a: str, run_b: str, qrels_path: str, gain: str = EXPONENTIAL) -> int:
    for p in (run_a, run_b, qrels_path):
        if not Path(p).is_file():
            raise ConfigError(f"file not found: {p}")
    a, b = read_run(run_a), read_run(run_b)
    qrels = qrels_to_dict(load_qrels(qrels_path))
    try:
        rows = compare_runs(a, b, qrels, gain)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(f"{'metric':<12}{'n':>5}{'mean A':>10}{'mean B':>10}{'diff':>10}{'t':>10}{'p':>10}  sig")
    for r in rows:
        print(
            f"{r.metric:<12}{r.n:>5}{r.mean_a:>10.4f}{r.mean_b:>10.4f}{r.mean_diff:>+10.4f}"
            f"{r.t:>10.4f}{r.p:>10.4g}  {'*' if r.significant else ''}"
        )
    return EXIT_OK


def cmd_evolve(cfg: RunConfig) -> int:
    from .evolve.runner import build_run, run_evolution

    plan = build_run(cfg)  # raises ConfigError before step 0
    result = run_evolution(plan)
    print(f"seed fitness {result.seed_fitness:.6f} -> best {result.best.fitness:.6f} ({result.best.id})")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value (dotted keys, JSON values)")
    common.add_argument("--seed", type=int, help="random seed for every stochastic component")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lexevolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("index", parents=[common], help="build and persist channel indexes")
    sub.add_parser("eval", parents=[common], help="retrieve, write run files and report metrics")
    p = sub.add_parser("compare", parents=[common], help="paired t-test between two run files")
    p.add_argument("run_a")
    p.add_argument("run_b")
    p.add_argument("--qrels", required=True)
    p.add_argument("--gain", choices=(EXPONENTIAL, LINEAR), default=EXPONENTIAL)
    p = sub.add_parser("evolve", parents=[common], help="run the evolutionary search")
    p.add_argument("--steps", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "compare":
            return cmd_compare(args.run_a, args.run_b, args.qrels, args.gain)
        overrides = list(args.overrides)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        if getattr(args, "steps", None) is not None:
            overrides.append(f"evolve.steps={args.steps}")
        cfg = load_config(args.config, overrides)
        return {"index": cmd_index, "eval": cmd_eval, "evolve": cmd_evolve}[args.command](cfg)
    except (ConfigError, CorpusFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - top-level failure reporting
        log.debug("failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
