"""Lexical ranking functions, BEIR-style evaluation and an evolutionary search harness."""

__version__ = "0.1.0"
