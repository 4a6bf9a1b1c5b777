"""SEARCH/REPLACE edit blocks.

A diff is one or more blocks of the form::

    <<<<<<< SEARCH
    text to find
    =======
    replacement
    >>>>>>> REPLACE

Each search text must occur exactly once in the program at the time its
block is applied; blocks are applied in order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class DiffError(ValueError):
    pass


class DiffParseError(DiffError):
    pass


class NoMatchError(DiffError):
    pass


class AmbiguousMatchError(DiffError):
    pass


class NoOpError(DiffError):
    pass


@dataclass(frozen=True)
class EditBlock:
    search: str
    replace: str


_BLOCK = re.compile(
    r"^<{7} SEARCH[ \t]*\n(.*?)^={7}[ \t]*\n(.*?)^>{7} REPLACE[ \t]*$",
    re.DOTALL | re.MULTILINE,
)


def _strip_final_newline(s: str) -> str:
    return s[:-1] if s.endswith("\n") else s


def parse_diff(text: str) -> list[EditBlock]:
    blocks = [
        EditBlock(_strip_final_newline(m.group(1)), _strip_final_newline(m.group(2)))
        for m in _BLOCK.finditer(text)
    ]
    if not blocks:
        raise DiffParseError("no SEARCH/REPLACE blocks found")
    for i, b in enumerate(blocks):
        if not b.search:
            raise DiffParseError(f"block {i + 1} has an empty SEARCH section")
    return blocks


def format_diff(blocks: list[EditBlock] | list[tuple[str, str]]) -> str:
    parts = []
    for b in blocks:
        search, replace = (b.search, b.replace) if isinstance(b, EditBlock) else b
        parts.append(f"<<<<<<< SEARCH\n{search}\n=======\n{replace}\n>>>>>>> REPLACE")
    return "\n".join(parts) + "\n"


def apply_blocks(program: str, blocks: list[EditBlock]) -> str:
    out = program
    for i, b in enumerate(blocks, start=1):
        pos = out.find(b.search)
        if pos < 0:
            raise NoMatchError(f"block {i}: search text not found: {b.search[:60]!r}")
        # Overlapping occurrences count as ambiguous too.
        if out.find(b.search, pos + 1) >= 0:
            raise AmbiguousMatchError(f"block {i}: search text occurs more than once: {b.search[:60]!r}")
        out = out[:pos] + b.replace + out[pos + len(b.search) :]
    if out == program:
        raise NoOpError("diff leaves the program unchanged")
    return out


def apply_diff(program: str, diff: str | list[EditBlock]) -> str:
    blocks = parse_diff(diff) if isinstance(diff, str) else diff
    return apply_blocks(program, blocks)


def summarize_diff(blocks: list[EditBlock], width: int = 80) -> str:
    """One line per block, for the prior-changes section of a prompt."""

    def short(s: str) -> str:
        s = " ".join(s.split())
        return s if len(s) <= width else s[: width - 3] + "..."

    return "; ".join(f"{short(b.search)!r} -> {short(b.replace)!r}" for b in blocks)
