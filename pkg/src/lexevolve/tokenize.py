"""Tokenizers for the four parallel token channels.

The base channel lowercases and splits on anything that is not a letter or
digit. The other three channels are derived from base tokens.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

PREFIX_LEN = 5
MICRO_N = 3
BIGRAM_SEP = "_"

# \w minus underscore: unicode letters and digits.
_ALNUM_RUN = re.compile(r"[^\W_]+")


class TokenChannel(str, enum.Enum):
    BASE = "base"
    PREFIX = "prefix"
    BIGRAM = "bigram"
    MICRO = "micro"


ALL_CHANNELS: tuple[TokenChannel, ...] = tuple(TokenChannel)


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    channel: TokenChannel = TokenChannel.BASE

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize_base(text: str) -> TokenStream:
    return TokenStream(tuple(_ALNUM_RUN.findall(text.lower())), TokenChannel.BASE)


def tokenize_prefix(base: TokenStream) -> TokenStream:
    return TokenStream(tuple(t[:PREFIX_LEN] for t in base.tokens), TokenChannel.PREFIX)


def tokenize_bigram(base: TokenStream) -> TokenStream:
    toks = base.tokens
    return TokenStream(
        tuple(a + BIGRAM_SEP + b for a, b in zip(toks, toks[1:])), TokenChannel.BIGRAM
    )


def tokenize_micro(base: TokenStream) -> TokenStream:
    out: list[str] = []
    for tok in base.tokens:
        if len(tok) < MICRO_N:
            out.append(tok)
        else:
            out.extend(tok[i : i + MICRO_N] for i in range(len(tok) - MICRO_N + 1))
    return TokenStream(tuple(out), TokenChannel.MICRO)


_DERIVED = {
    TokenChannel.PREFIX: tokenize_prefix,
    TokenChannel.BIGRAM: tokenize_bigram,
    TokenChannel.MICRO: tokenize_micro,
}


def tokenize(text: str, channel: TokenChannel | str = TokenChannel.BASE) -> TokenStream:
    """Tokenize ``text`` into the given channel."""
    channel = TokenChannel(channel)
    base = tokenize_base(text)
    if channel is TokenChannel.BASE:
        return base
    return _DERIVED[channel](base)


def tokenize_channels(text: str, channels) -> dict[TokenChannel, TokenStream]:
    base = tokenize_base(text)
    out = {}
    for ch in channels:
        ch = TokenChannel(ch)
        out[ch] = base if ch is TokenChannel.BASE else _DERIVED[ch](base)
    return out
