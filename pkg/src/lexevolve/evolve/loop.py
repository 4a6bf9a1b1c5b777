"""The evolution loop: select, mutate, evaluate, insert, migrate."""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import IO, Any

from .database import (
    REJECTED,
    Candidate,
    EvolveConfig,
    MigrationEvent,
    Population,
)
from .diff import DiffError, apply_blocks, parse_diff, summarize_diff
from .evaluators import Evaluator
from .mutators import Mutator

log = logging.getLogger(__name__)

FAILED_MUTATION = "mutation_failed"
FAILED_EVALUATION = "evaluation_failed"


class SeedEvaluationError(RuntimeError):
    pass


@dataclass
class StepRecord:
    step: int
    island: int
    parent_id: str | None
    child_id: str | None
    status: str
    fitness: float | None
    best_fitness: float
    error: str | None = None
    migrations: int = 0

    @property
    def failed(self) -> bool:
        return self.status in (FAILED_MUTATION, FAILED_EVALUATION)


@dataclass
class EvolutionResult:
    best: Candidate
    population: Population
    seed_fitness: float
    steps: list[StepRecord] = field(default_factory=list)
    migrations: list[MigrationEvent] = field(default_factory=list)

    def trajectory(self) -> list[tuple[int, float]]:
        """(step, best fitness so far), starting with the seed at step 0."""
        return [(0, self.seed_fitness)] + [(r.step, r.best_fitness) for r in self.steps]


def candidate_record(c: Candidate, status: str | None = None, include_program: bool = True) -> dict[str, Any]:
    rec: dict[str, Any] = {
        "type": "candidate",
        "id": c.id,
        "parent_id": c.parent_id,
        "island": c.island,
        "cell": list(c.cell),
        "generation": c.generation,
        "step": c.step,
        "origin": c.origin,
        "fitness": c.fitness,
        "migrated": c.migrated,
        "status": status,
        "diff": c.diff_summary,
    }
    if include_program:
        rec["program"] = c.program
    return rec


class LineageLog:
    """Append-only JSON-lines record of candidates, steps and migrations."""

    def __init__(self, fh: IO[str] | None = None, include_programs: bool = True) -> None:
        self.fh = fh
        self.include_programs = include_programs

    def write(self, record: dict[str, Any]) -> None:
        if self.fh is not None:
            self.fh.write(json.dumps(record, sort_keys=True) + "\n")
            self.fh.flush()


def evolve_loop(
    seed_program: str,
    steps: int,
    mutator: Mutator,
    evaluator: Evaluator,
    cfg: EvolveConfig | None = None,
    lineage_log: LineageLog | None = None,
) -> EvolutionResult:
    cfg = cfg or EvolveConfig()
    lineage_log = lineage_log or LineageLog()
    pop = Population(cfg)

    try:
        seed_report = evaluator.evaluate(seed_program)
    except Exception as exc:
        raise SeedEvaluationError(f"seed program failed to evaluate: {exc}") from exc
    for island in range(cfg.islands):
        seed = Candidate(pop.new_id(), seed_program, island, seed_report, origin="seed")
        status = pop.insert(seed).status
        lineage_log.write(candidate_record(seed, status, lineage_log.include_programs))

    best = pop.best()
    result = EvolutionResult(best, pop, best.fitness)

    for step in range(1, steps + 1):
        island = (step - 1) % cfg.islands
        parent = pop.select_parent(island)
        context = pop.context(parent)
        try:
            blocks = parse_diff(mutator.propose(context))
            child_program = apply_blocks(parent.program, blocks)
        except Exception as exc:  # mutator transport errors are as recoverable as bad diffs
            kind = "diff" if isinstance(exc, DiffError) else "mutator"
            record = StepRecord(step, island, parent.id, None, FAILED_MUTATION, None, best.fitness,
                                f"{kind}: {exc}")
        else:
            child = Candidate(
                pop.new_id(),
                child_program,
                island,
                parent_id=parent.id,
                generation=parent.generation + 1,
                diff_summary=summarize_diff(blocks),
                step=step,
            )
            try:
                child.metrics = evaluator.evaluate(child_program)
            except Exception as exc:
                pop.register(child)
                lineage_log.write(candidate_record(child, FAILED_EVALUATION, lineage_log.include_programs))
                record = StepRecord(step, island, parent.id, child.id, FAILED_EVALUATION, None, best.fitness,
                                    f"evaluator: {exc}")
            else:
                status = pop.insert(child).status
                if status != REJECTED and child.fitness > best.fitness:
                    best = child
                lineage_log.write(candidate_record(child, status, lineage_log.include_programs))
                record = StepRecord(step, island, parent.id, child.id, status, child.fitness, best.fitness)

        if step % cfg.migration_interval == 0:
            events = pop.migrate(step)
            for ev in events:
                lineage_log.write({"type": "migration", **asdict(ev)})
                copy = pop.candidates[ev.copy_id]
                lineage_log.write(candidate_record(copy, ev.status, lineage_log.include_programs))
            result.migrations.extend(events)
            record.migrations = len(events)
        if record.failed:
            log.info("step %d: %s", step, record.error)
        lineage_log.write({"type": "step", **asdict(record)})
        result.steps.append(record)

    result.best = best
    return result


def write_trajectory(result: EvolutionResult, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "best_fitness"])
        for step, fit in result.trajectory():
            w.writerow([step, repr(fit)])
