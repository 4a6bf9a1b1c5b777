import json
import sys

import pytest

from lexevolve.evaluate import evaluate
from lexevolve.evolve.evaluators import (
    EvaluationError,
    MarkerCountEvaluator,
    ScorerProgramEvaluator,
    SubprocessEvaluator,
    scorer_program,
)


def test_marker_count():
    assert MarkerCountEvaluator().evaluate("MARK x MARK\nMARKS").fitness == 2.0


def test_scorer_program_matches_direct_evaluation(toy_dataset):
    ev = ScorerProgramEvaluator([toy_dataset])
    report = ev.evaluate(scorer_program("bm25", {"k1": 1.2}))
    assert report.fitness == evaluate("bm25", [toy_dataset], {"k1": 1.2}).fitness


@pytest.mark.parametrize(
    "program", ["not json", json.dumps({"params": {}}), scorer_program("nope"), scorer_program("bm25", {"zz": 1})]
)
def test_scorer_program_errors(toy_dataset, program):
    with pytest.raises(EvaluationError):
        ScorerProgramEvaluator([toy_dataset]).evaluate(program)


SCRIPT = "import json,sys; p=sys.stdin.read(); print(json.dumps({'fitness': float(len(p))}))"


def test_subprocess_evaluator():
    assert SubprocessEvaluator([sys.executable, "-c", SCRIPT]).evaluate("abc").fitness == 3.0


@pytest.mark.parametrize(
    "cmd", [[sys.executable, "-c", "import sys; sys.exit(3)"], [sys.executable, "-c", "print('nope')"], ["/no/such/bin"]]
)
def test_subprocess_failures(cmd):
    with pytest.raises(EvaluationError):
        SubprocessEvaluator(cmd).evaluate("x")
