"""Program evaluators: program text in, :class:`EvalReport` out."""

from __future__ import annotations

import json
import subprocess
from typing import Protocol, Sequence

from ..corpus import Dataset
from ..evaluate import EvalReport, evaluate
from ..metrics import EXPONENTIAL


class EvaluationError(RuntimeError):
    pass


class Evaluator(Protocol):
    def evaluate(self, program: str) -> EvalReport: ...


class MarkerCountEvaluator:
    """Toy objective: fitness is the number of whitespace tokens equal to ``marker``."""

    def __init__(self, marker: str = "MARK") -> None:
        self.marker = marker

    def evaluate(self, program: str) -> EvalReport:
        count = sum(1 for tok in program.split() if tok == self.marker)
        return EvalReport(fitness=float(count), extra={"markers": count})


def scorer_program(scorer: str, params: dict | None = None) -> str:
    """Render a scorer configuration as an editable program text (one parameter per line)."""
    return json.dumps({"scorer": scorer, "params": params or {}}, indent=2, sort_keys=True) + "\n"


class ScorerProgramEvaluator:
    """Treats the program as a JSON scorer configuration and evaluates it on datasets."""

    def __init__(self, datasets: Sequence[Dataset], gain: str = EXPONENTIAL) -> None:
        if not datasets:
            raise ValueError("need at least one dataset to evaluate on")
        self.datasets = list(datasets)
        self.gain = gain

    def evaluate(self, program: str) -> EvalReport:
        try:
            spec = json.loads(program)
            scorer = spec["scorer"]
            params = spec.get("params", {})
        except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
            raise EvaluationError(f"program is not a valid scorer configuration: {exc}") from exc
        try:
            return evaluate(scorer, self.datasets, params, self.gain)
        except ValueError as exc:
            raise EvaluationError(str(exc)) from exc


class SubprocessEvaluator:
    """Runs an external command with the program on stdin; expects an EvalReport JSON on stdout.

    No sandboxing is applied.
    """

    def __init__(self, command: Sequence[str], timeout: float | None = 600.0) -> None:
        if not command:
            raise ValueError("empty evaluator command")
        self.command = list(command)
        self.timeout = timeout

    def evaluate(self, program: str) -> EvalReport:
        try:
            proc = subprocess.run(
                self.command, input=program, capture_output=True, text=True, timeout=self.timeout
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise EvaluationError(f"evaluator command failed: {exc}") from exc
        if proc.returncode != 0:
            raise EvaluationError(f"evaluator exited with {proc.returncode}: {proc.stderr.strip()[:500]}")
        try:
            return EvalReport.from_dict(json.loads(proc.stdout))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise EvaluationError(f"evaluator output is not an EvalReport: {exc}") from exc
