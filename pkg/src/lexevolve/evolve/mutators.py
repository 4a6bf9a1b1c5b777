"""Mutation proposers.

A mutator turns a :class:`MutationContext` into SEARCH/REPLACE diff text.
"""

from __future__ import annotations

import json
import logging
import math
import os
import random
import re
import time
from itertools import cycle
from typing import Callable, Iterable, Protocol

import httpx

from .database import Candidate, MutationContext
from .diff import format_diff

log = logging.getLogger(__name__)

SYSTEM_PROMPT = """\
You are improving a lexical ranking program for first-stage retrieval.
The optimization target is 0.8 * mean Recall@100 + 0.2 * mean nDCG@10 across
the evaluation datasets. Prefer principled ideas from information theory and
probabilistic retrieval over ad-hoc constants. Keep the program valid and
executable through the fixed evaluator interface.

Reply with one or more edits in exactly this format:

<<<<<<< SEARCH
exact text copied from the current program
=======
replacement text
>>>>>>> REPLACE

Each SEARCH section must match the current program exactly once."""


class MutatorError(RuntimeError):
    pass


class MutatorConfigError(ValueError):
    pass


class Mutator(Protocol):
    def propose(self, context: MutationContext) -> str: ...


def _describe(c: Candidate) -> str:
    if c.metrics is None:
        return "fitness: n/a"
    lines = [f"fitness: {c.metrics.fitness:.6f}"]
    for name, d in c.metrics.datasets.items():
        lines.append(
            f"  {name}: nDCG@10={d.ndcg10:.4f} R@100={d.recall100:.4f} "
            f"index={d.indexing_ms_per_doc:.3f}ms/doc query={d.query_ms_per_query:.2f}ms/q"
        )
    return "\n".join(lines)


def render_prompt(context: MutationContext, system_prompt: str = SYSTEM_PROMPT) -> list[dict[str, str]]:
    parts = []
    if context.top:
        parts.append("## Top programs on this island")
        for c in context.top:
            parts.append(f"### {c.id}\n{_describe(c)}\n```\n{c.program}\n```")
    if context.random:
        parts.append("## Other programs on this island")
        for c in context.random:
            parts.append(f"### {c.id}\n{_describe(c)}\n```\n{c.program}\n```")
    if context.prior_changes:
        parts.append("## Changes previously applied along this lineage (most recent first)")
        parts.extend(f"- {s}" for s in context.prior_changes)
    parts.append(f"## Current program ({context.parent.id})\n{_describe(context.parent)}")
    parts.append(f"```\n{context.parent.program}\n```")
    parts.append("Propose one improvement as SEARCH/REPLACE edits.")
    return [
        {"role": "system", "content": system_prompt},
        {"role": "user", "content": "\n\n".join(parts)},
    ]


class ScriptedMutator:
    """Replays canned diffs, or calls a function of the context."""

    def __init__(self, script: Callable[[MutationContext], str] | Iterable[str]) -> None:
        if callable(script):
            self._fn = script
        else:
            items = list(script)
            if not items:
                raise MutatorConfigError("scripted mutator needs at least one diff")
            it = cycle(items)
            self._fn = lambda ctx: next(it)
        self.calls = 0

    def propose(self, context: MutationContext) -> str:
        self.calls += 1
        return self._fn(context)


class MarkerMutator:
    """Toy mutator: inserts one more marker token before a fixed anchor line."""

    def __init__(self, marker: str = "MARK", anchor: str = "# end") -> None:
        self.marker = marker
        self.anchor = anchor

    def propose(self, context: MutationContext) -> str:
        return format_diff([(self.anchor, f"{self.marker}\n{self.anchor}")])


_NUMBER_LINE = re.compile(r'^(\s*"([A-Za-z0-9_]+)"\s*:\s*)(-?[0-9.eE+-]+)(,?)\s*$', re.MULTILINE)


class ParamJitterMutator:
    """Offline mutator for JSON scorer programs: rescales one numeric parameter."""

    def __init__(self, seed: int = 0, scale: float = 0.25) -> None:
        self.rng = random.Random(seed)
        self.scale = scale

    def propose(self, context: MutationContext) -> str:
        matches = list(_NUMBER_LINE.finditer(context.parent.program))
        if not matches:
            raise MutatorError("program has no numeric parameter lines to perturb")
        m = self.rng.choice(matches)
        value = float(m.group(3))
        factor = math.exp(self.rng.uniform(-self.scale, self.scale))
        new = round(value * factor, 6) if value else round(self.rng.uniform(0, self.scale), 6)
        if new == value:
            new = round(value + 1e-3, 6)
        return format_diff([(m.group(0), f"{m.group(1)}{new!r}{m.group(4)}")])


class OpenAIChatMutator:
    """Calls an OpenAI-compatible chat-completions endpoint."""

    def __init__(
        self,
        model: str,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        temperature: float = 0.85,
        timeout: float = 120.0,
        max_retries: int = 4,
        backoff: float = 2.0,
        system_prompt: str = SYSTEM_PROMPT,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        api_key = os.environ.get(api_key_env)
        if not api_key:
            raise MutatorConfigError(f"environment variable {api_key_env} is not set")
        self.model = model
        self.temperature = temperature
        self.max_retries = max_retries
        self.backoff = backoff
        self.system_prompt = system_prompt
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=timeout,
            transport=transport,
        )

    def _payload(self, context: MutationContext) -> dict:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "messages": render_prompt(context, self.system_prompt),
        }

    def propose(self, context: MutationContext) -> str:
        payload = self._payload(context)
        delay = 1.0
        for attempt in range(self.max_retries + 1):
            try:
                resp = self._client.post("/chat/completions", json=payload)
            except httpx.TransportError as exc:
                err: Exception = exc
            else:
                if resp.status_code == 429 or resp.status_code >= 500:
                    err = MutatorError(f"transient HTTP {resp.status_code}")
                elif resp.status_code >= 400:
                    raise MutatorError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                else:
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                        raise MutatorError("malformed chat-completions response") from exc
            if attempt == self.max_retries:
                raise MutatorError(f"giving up after {attempt + 1} attempts: {err}")
            log.warning("mutator request failed (%s); retrying in %.1fs", err, delay)
            self._sleep(delay)
            delay *= self.backoff
        raise AssertionError("unreachable")

    def close(self) -> None:
        self._client.close()
