import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexevolve.tokenize import (
    TokenChannel,
    TokenStream,
    tokenize,
    tokenize_base,
    tokenize_bigram,
    tokenize_micro,
    tokenize_prefix,
)


def base(*tokens):
    return TokenStream(tuple(tokens))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Hello, World!", ["hello", "world"]),
        ("", []),
        ("TF-IDF 2024", ["tf", "idf", "2024"]),
        ("snake_case__x", ["snake", "case", "x"]),
        ("Ünïcode façade", ["ünïcode", "façade"]),
    ],
)
def test_base(text, expected):
    assert list(tokenize_base(text)) == expected


@pytest.mark.parametrize(
    "tokens, expected",
    [(["information"], ["infor"]), (["cat"], ["cat"]), (["retrieval", "retrieve"], ["retri", "retri"])],
)
def test_prefix(tokens, expected):
    assert list(tokenize_prefix(base(*tokens))) == expected


@pytest.mark.parametrize("tokens, expected", [(["a", "b", "c"], ["a_b", "b_c"]), (["solo"], []), ([], [])])
def test_bigram(tokens, expected):
    assert list(tokenize_bigram(base(*tokens))) == expected


@pytest.mark.parametrize(
    "tokens, expected",
    [(["cats"], ["cat", "ats"]), (["ox"], ["ox"]), (["abcde"], ["abc", "bcd", "cde"])],
)
def test_micro(tokens, expected):
    assert list(tokenize_micro(base(*tokens))) == expected


def test_micro_grams_stay_within_tokens():
    assert list(tokenize("ab cd", TokenChannel.MICRO)) == ["ab", "cd"]


text = st.text(max_size=80)


@given(text)
def test_channel_invariants(s):
    b = tokenize_base(s)
    assert all(b.tokens)
    assert len(tokenize_bigram(b)) == max(0, len(b) - 1)
    assert all(len(t) <= 5 for t in tokenize_prefix(b))
    micro = tokenize_micro(b)
    assert len(micro) == sum(len(t) - 2 if len(t) >= 3 else 1 for t in b)
    assert all(micro.tokens)
    assert tokenize_base(s) == b  # deterministic


@given(text)
def test_base_tokens_never_contain_bigram_separator(s):
    assert all("_" not in t for t in tokenize_base(s))
