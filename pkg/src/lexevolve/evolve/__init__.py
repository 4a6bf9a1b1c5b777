"""Island + MAP-Elites program evolution with SEARCH/REPLACE mutations."""

from .database import (
    Candidate,
    EvolveConfig,
    IslandGrid,
    MutationContext,
    Population,
    assemble_context,
    cell_of,
    select_parent,
    try_insert,
)
from .diff import (
    AmbiguousMatchError,
    DiffError,
    DiffParseError,
    NoMatchError,
    NoOpError,
    apply_diff,
    format_diff,
    parse_diff,
)
from .evaluators import (
    EvaluationError,
    MarkerCountEvaluator,
    ScorerProgramEvaluator,
    SubprocessEvaluator,
    scorer_program,
)
from .loop import EvolutionResult, LineageLog, StepRecord, evolve_loop, write_trajectory
from .mutators import (
    MarkerMutator,
    MutatorConfigError,
    MutatorError,
    OpenAIChatMutator,
    ParamJitterMutator,
    ScriptedMutator,
    render_prompt,
)
