"""The COPri Model Language: a declarative text format for privacy requirements models."""

from __future__ import annotations

from ..model import ModelGraph
from .ast import Ast
from .lexer import Token, TokenType, tokenize
from .lower import lower
from .parser import parse, parse_text
from .printer import format_ast


def parse_model(text: str, file: str = "<input>") -> ModelGraph:
    """Tokenize, parse and lower ``text`` into a finalized model graph.

    Raises :class:`~copri_lint.diagnostics.DiagnosticError` with every lexical,
    syntactic and model diagnostic, sorted by position.
    """
    tree, diagnostics = parse_text(text, file)
    return lower(tree, diagnostics)


__all__ = [
    "Ast",
    "Token",
    "TokenType",
    "format_ast",
    "lower",
    "parse",
    "parse_model",
    "parse_text",
    "tokenize",
]
