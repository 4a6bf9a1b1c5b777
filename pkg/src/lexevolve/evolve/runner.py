"""Wiring a :class:`RunConfig` into an evolution run and writing its artifacts."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..config import ConfigError, RunConfig
from ..corpus import load_dataset
from ..scoring import make_params
from .database import EvolveConfig
from .evaluators import (
    Evaluator,
    MarkerCountEvaluator,
    ScorerProgramEvaluator,
    SubprocessEvaluator,
    scorer_program,
)
from .loop import EvolutionResult, LineageLog, candidate_record, evolve_loop, write_trajectory
from .mutators import (
    MarkerMutator,
    Mutator,
    MutatorConfigError,
    OpenAIChatMutator,
    ParamJitterMutator,
    ScriptedMutator,
)

TOY_SEED_PROGRAM = "# toy program: fitness counts marker tokens\n# end\n"


@dataclass
class EvolvePlan:
    seed_program: str
    steps: int
    mutator: Mutator
    evaluator: Evaluator
    evolve_cfg: EvolveConfig
    output_dir: Path
    include_programs: bool = True


def _options(section: dict[str, Any], where: str) -> tuple[str, dict[str, Any]]:
    opts = dict(section)
    kind = opts.pop("kind", None)
    if not kind:
        raise ConfigError(f"evolve.{where}.kind is required")
    return kind, opts


def make_evaluator(cfg: RunConfig) -> Evaluator:
    kind, opts = _options(cfg.evolve.evaluator, "evaluator")
    try:
        if kind == "marker":
            return MarkerCountEvaluator(**opts)
        if kind == "scorer":
            cfg.validate()
            datasets = [load_dataset(d.path, d.split, d.label) for d in cfg.datasets]
            return ScorerProgramEvaluator(datasets, gain=cfg.gain)
        if kind == "subprocess":
            return SubprocessEvaluator(**opts)
    except TypeError as exc:
        raise ConfigError(f"evolve.evaluator: {exc}") from None
    raise ConfigError(f"unknown evaluator kind {kind!r} (marker, scorer, subprocess)")


def make_mutator(cfg: RunConfig) -> Mutator:
    kind, opts = _options(cfg.evolve.mutator, "mutator")
    try:
        if kind == "marker":
            return MarkerMutator(**opts)
        if kind == "param-jitter":
            return ParamJitterMutator(seed=opts.pop("seed", cfg.seed), **opts)
        if kind == "scripted":
            return ScriptedMutator(opts["diffs"])
        if kind == "http":
            return OpenAIChatMutator(**opts)
    except MutatorConfigError as exc:
        raise ConfigError(str(exc)) from None
    except (TypeError, KeyError) as exc:
        raise ConfigError(f"evolve.mutator: {exc}") from None
    raise ConfigError(f"unknown mutator kind {kind!r} (marker, param-jitter, scripted, http)")


def seed_program_for(cfg: RunConfig, evaluator: Evaluator) -> str:
    if cfg.evolve.seed_program:
        path = Path(cfg.evolve.seed_program)
        if not path.is_file():
            raise ConfigError(f"seed program not found: {path}")
        return path.read_text(encoding="utf-8")
    if isinstance(evaluator, ScorerProgramEvaluator):
        try:
            params = make_params(cfg.scorer, cfg.params)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return scorer_program(cfg.scorer, dataclasses.asdict(params))
    if isinstance(evaluator, MarkerCountEvaluator):
        return TOY_SEED_PROGRAM
    raise ConfigError("evolve.seed_program is required for this evaluator")


def build_run(cfg: RunConfig) -> EvolvePlan:
    if cfg.evolve.steps < 0:
        raise ConfigError("evolve.steps must be >= 0")
    params = {"seed": cfg.seed, **cfg.evolve.params}
    try:
        evolve_cfg = EvolveConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"evolve.params: {exc}") from None
    evaluator = make_evaluator(cfg)
    mutator = make_mutator(cfg)
    seed = seed_program_for(cfg, evaluator)
    return EvolvePlan(
        seed, cfg.evolve.steps, mutator, evaluator, evolve_cfg,
        Path(cfg.output_dir) / "evolve", cfg.evolve.include_programs,
    )


def run_evolution(plan: EvolvePlan) -> EvolutionResult:
    out = plan.output_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "lineage.jsonl", "w", encoding="utf-8") as fh:
        result = evolve_loop(
            plan.seed_program, plan.steps, plan.mutator, plan.evaluator, plan.evolve_cfg,
            LineageLog(fh, plan.include_programs),
        )
    write_trajectory(result, out / "trajectory.csv")
    (out / "best_program.txt").write_text(result.best.program, encoding="utf-8")
    best = candidate_record(result.best, include_program=False)
    if result.best.metrics is not None:
        best["metrics"] = result.best.metrics.to_dict()
    best["seed_fitness"] = result.seed_fitness
    (out / "best.json").write_text(json.dumps(best, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return result
