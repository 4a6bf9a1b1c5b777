"""Island-partitioned MAP-Elites population database."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from rapidfuzz.distance import Levenshtein

from ..evaluate import EvalReport

ACCEPTED = "accepted"
REJECTED = "rejected"
EVICTED = "evicted"

Cell = tuple[int, int]


@dataclass
class EvolveConfig:
    islands: int = 3
    bins: int = 12
    migration_interval: int = 20
    migration_fraction: float = 0.15
    top_inspirations: int = 4
    random_inspirations: int = 4
    p_explore: float = 0.2
    p_exploit: float = 0.2
    elite_size: int = 8
    min_len: int = 10
    max_len: int = 100_000
    max_diversity: float | None = None  # defaults to max_len
    diversity_sample: int = 10
    exact_diversity: bool = False
    prior_changes: int = 5
    weight_epsilon: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.islands < 1 or self.bins < 1 or self.migration_interval < 1:
            raise ValueError("islands, bins and migration_interval must be >= 1")
        if self.p_explore < 0 or self.p_exploit < 0 or self.p_explore + self.p_exploit > 1 + 1e-12:
            raise ValueError("sampling probabilities must be nonnegative with p_explore + p_exploit <= 1")
        if not 0 <= self.migration_fraction <= 1:
            raise ValueError("migration_fraction must lie in [0, 1]")
        if not 0 < self.min_len < self.max_len:
            raise ValueError("need 0 < min_len < max_len")
        if self.elite_size < 1:
            raise ValueError("elite_size must be >= 1")

    @property
    def diversity_range(self) -> float:
        return float(self.max_diversity if self.max_diversity is not None else self.max_len)


@dataclass
class Candidate:
    id: str
    program: str
    island: int
    metrics: EvalReport | None = None
    cell: Cell = (0, 0)
    parent_id: str | None = None
    generation: int = 0
    migrated: bool = False
    diff_summary: str | None = None
    step: int = 0
    origin: str = "mutation"

    @property
    def fitness(self) -> float | None:
        return None if self.metrics is None else self.metrics.fitness


@dataclass
class IslandGrid:
    cells: dict[Cell, Candidate] = field(default_factory=dict)
    elites: list[Candidate] = field(default_factory=list)

    def members(self) -> list[Candidate]:
        return [self.cells[c] for c in sorted(self.cells)]

    def __len__(self) -> int:
        return len(self.cells)


@dataclass
class InsertResult:
    status: str
    evicted: Candidate | None = None

    @property
    def accepted(self) -> bool:
        return self.status != REJECTED


# --- behavior descriptors ------------------------------------------------------


def complexity_bin(length: int, cfg: EvolveConfig) -> int:
    clamped = min(max(length, cfg.min_len), cfg.max_len)
    frac = (math.log(clamped) - math.log(cfg.min_len)) / (math.log(cfg.max_len) - math.log(cfg.min_len))
    return min(cfg.bins - 1, int(frac * cfg.bins))


def diversity_bin(distance: float, cfg: EvolveConfig) -> int:
    frac = min(max(distance, 0.0), cfg.diversity_range) / cfg.diversity_range
    return min(cfg.bins - 1, int(frac * cfg.bins))


def edit_distance(a: str, b: str) -> int:
    return Levenshtein.distance(a, b)


def mean_distance(program: str, references: Sequence[str]) -> float:
    if not references:
        return 0.0
    return sum(edit_distance(program, r) for r in references) / len(references)


def cell_of(program: str, island_programs: Sequence[str], cfg: EvolveConfig, rng: random.Random) -> Cell:
    """(complexity bin, diversity bin) against a sample of the other island programs."""
    refs = list(island_programs)
    if not cfg.exact_diversity and len(refs) > cfg.diversity_sample:
        refs = rng.sample(refs, cfg.diversity_sample)
    return complexity_bin(len(program), cfg), diversity_bin(mean_distance(program, refs), cfg)


# --- grid operations -----------------------------------------------------------


def try_insert(grid: IslandGrid, cand: Candidate, elite_size: int = 8) -> InsertResult:
    if cand.fitness is None:
        raise ValueError("only evaluated candidates can be inserted")
    occupant = grid.cells.get(cand.cell)
    if occupant is None:
        result = InsertResult(ACCEPTED)
    elif cand.fitness > occupant.fitness:
        result = InsertResult(EVICTED, occupant)
    else:
        return InsertResult(REJECTED)
    grid.cells[cand.cell] = cand
    # sorted() is stable, so earlier elites win fitness ties.
    grid.elites = sorted(grid.elites + [cand], key=lambda c: -c.fitness)[:elite_size]
    return result


def select_parent(
    members: Sequence[Candidate], elites: Sequence[Candidate], cfg: EvolveConfig, rng: random.Random
) -> Candidate:
    if not members:
        raise ValueError("cannot select a parent from an empty island")
    r = rng.random()
    if r < cfg.p_explore:
        return rng.choice(members)
    if r < cfg.p_explore + cfg.p_exploit and elites:
        return rng.choice(elites)
    fits = [c.fitness for c in members]
    lo = min(fits)
    # Shift only when needed so positive fitnesses keep their ratios.
    weights = fits if lo > 0 else [f - lo + cfg.weight_epsilon for f in fits]
    return rng.choices(members, weights=weights, k=1)[0]


@dataclass
class MutationContext:
    parent: Candidate
    top: list[Candidate]
    random: list[Candidate]
    prior_changes: list[str]
    island: int


def lineage(cand: Candidate, lookup: dict[str, Candidate]) -> Iterable[Candidate]:
    cur: Candidate | None = cand
    while cur is not None:
        yield cur
        cur = lookup.get(cur.parent_id) if cur.parent_id else None


def assemble_context(
    parent: Candidate,
    members: Sequence[Candidate],
    cfg: EvolveConfig,
    rng: random.Random,
    lookup: dict[str, Candidate] | None = None,
) -> MutationContext:
    others = [c for c in members if c.id != parent.id]
    top = sorted(others, key=lambda c: -c.fitness)[: cfg.top_inspirations]
    top_ids = {c.id for c in top}
    rest = [c for c in others if c.id not in top_ids]
    rand = rng.sample(rest, min(cfg.random_inspirations, len(rest)))
    changes = [c.diff_summary for c in lineage(parent, lookup or {}) if c.diff_summary]
    return MutationContext(parent, top, rand, changes[: cfg.prior_changes], parent.island)


@dataclass
class MigrationEvent:
    step: int
    source_island: int
    source_id: str
    dest_island: int
    copy_id: str
    status: str


def ring_neighbors(island: int, k: int) -> list[int]:
    return sorted({(island - 1) % k, (island + 1) % k} - {island})


def migrant_count(size: int, fraction: float) -> int:
    # Guard against 0.15 * 20 == 3.0000000000000004 rounding up to 4.
    return math.ceil(round(fraction * size, 9))


class Population:
    """Candidates, per-island grids and elite archives for one evolution run.

    All mutation goes through this object; it is not thread-safe.
    """

    def __init__(self, cfg: EvolveConfig, rng: random.Random | None = None) -> None:
        self.cfg = cfg
        self.rng = rng if rng is not None else random.Random(cfg.seed)
        self.grids = [IslandGrid() for _ in range(cfg.islands)]
        self.candidates: dict[str, Candidate] = {}
        self.evictions: list[tuple[int, Cell, float, float]] = []
        self._ids = itertools.count()

    def new_id(self) -> str:
        return f"c{next(self._ids):06d}"

    def register(self, cand: Candidate) -> Candidate:
        self.candidates[cand.id] = cand
        return cand

    def members(self, island: int) -> list[Candidate]:
        return self.grids[island].members()

    def place(self, cand: Candidate) -> Cell:
        others = [c.program for c in self.members(cand.island) if c.id != cand.id]
        cand.cell = cell_of(cand.program, others, self.cfg, self.rng)
        return cand.cell

    def insert(self, cand: Candidate) -> InsertResult:
        self.register(cand)
        self.place(cand)
        result = try_insert(self.grids[cand.island], cand, self.cfg.elite_size)
        if result.evicted is not None:
            self.evictions.append((cand.island, cand.cell, result.evicted.fitness, cand.fitness))
        return result

    def select_parent(self, island: int) -> Candidate:
        grid = self.grids[island]
        return select_parent(grid.members(), grid.elites, self.cfg, self.rng)

    def context(self, parent: Candidate) -> MutationContext:
        return assemble_context(parent, self.members(parent.island), self.cfg, self.rng, self.candidates)

    def best(self) -> Candidate | None:
        scored = [c for c in self.candidates.values() if c.fitness is not None]
        if not scored:
            return None
        return max(scored, key=lambda c: c.fitness)  # first max wins: earliest id

    def migrate(self, step: int) -> list[MigrationEvent]:
        k = self.cfg.islands
        if k < 2:
            return []
        outgoing: list[tuple[int, Candidate]] = []
        for i, grid in enumerate(self.grids):
            if not len(grid):
                continue
            n = migrant_count(len(grid), self.cfg.migration_fraction)
            ranked = sorted(grid.members(), key=lambda c: (-c.fitness, c.id))
            outgoing.extend((i, c) for c in [c for c in ranked if not c.migrated][:n])
        events = []
        for src, cand in outgoing:
            cand.migrated = True
            for dst in ring_neighbors(src, k):
                copy = Candidate(
                    id=self.new_id(),
                    program=cand.program,
                    island=dst,
                    metrics=cand.metrics,
                    parent_id=cand.id,
                    generation=cand.generation,
                    migrated=True,
                    step=step,
                    origin="migration",
                )
                result = self.insert(copy)
                events.append(MigrationEvent(step, src, cand.id, dst, copy.id, result.status))
        return events
