"""Tokenizer for the COPri Model Language (CML)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..diagnostics import Diagnostic, SourceSpan, error


class TokenType(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    STRING = "string"
    PUNCT = "punctuation"
    EOF = "end of input"


KEYWORDS = frozenset(
    """
    model role agent goal info use permission provision delegate adopt trust
    monitor vulnerability threat attackmethod privacygoal policy mechanism
    requirement describes situation
    is_a plays aimedBy and or personal public owner sensitivity partOf
    produce read modify collect need required optional purpose compatible
    incompatible over heldBy of from to confidential nonconfidential on level
    distrust by intentional incidental threatens exploits actor method
    probability impact severity mitigates realizedBy capability anonymize
    unlink other appliedTo confidentiality anonymity unlinkability
    unobservability notice transparency accountability concerning
    interpretedBy determines
    """.split()
)

# keywords that may begin a declaration
STATEMENT_KEYWORDS = frozenset(
    """
    model role agent goal info use permission provision delegate adopt trust
    monitor vulnerability threat attackmethod privacygoal policy mechanism
    requirement describes situation
    """.split()
)


@dataclass(frozen=True, slots=True)
class Token:
    type: TokenType
    value: str
    span: SourceSpan

    def __str__(self) -> str:
        if self.type is TokenType.EOF:
            return "end of input"
        if self.type is TokenType.STRING:
            return "string literal"
        return f"'{self.value}'"


_WORD = re.compile(r"[A-Za-z0-9_]+")
_SPACE = re.compile(r"[ \t\r\f\v]+")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def tokenize(text: str, file: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    """Split ``text`` into tokens.

    Returns the tokens (always ending with an EOF token) and any lexical
    diagnostics.  Illegal characters are reported and skipped; an
    unterminated string is reported and ends at the end of its line.
    """
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    line = 1
    line_start = 0
    pos = 0
    n = len(text)

    def span(start: int, length: int) -> SourceSpan:
        return SourceSpan(file, line, start - line_start + 1, max(length, 1))

    while pos < n:
        ch = text[pos]
        if ch == "\n":
            line += 1
            pos += 1
            line_start = pos
            continue
        m = _SPACE.match(text, pos)
        if m:
            pos = m.end()
            continue
        if text.startswith("//", pos):
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        m = _WORD.match(text, pos)
        if m:
            word = m.group()
            kind = TokenType.KEYWORD if word in KEYWORDS else TokenType.IDENT
            tokens.append(Token(kind, word, span(pos, len(word))))
            pos = m.end()
            continue
        if ch in "{}[],":
            tokens.append(Token(TokenType.PUNCT, ch, span(pos, 1)))
            pos += 1
            continue
        if ch == '"':
            start = pos
            pos += 1
            chars: list[str] = []
            closed = False
            while pos < n and text[pos] != "\n":
                c = text[pos]
                if c == '"':
                    closed = True
                    pos += 1
                    break
                if c == "\\" and pos + 1 < n and text[pos + 1] in _ESCAPES:
                    chars.append(_ESCAPES[text[pos + 1]])
                    pos += 2
                    continue
                chars.append(c)
                pos += 1
            if closed:
                tokens.append(Token(TokenType.STRING, "".join(chars), span(start, pos - start)))
            else:
                diagnostics.append(error("UnterminatedString", "string literal is not terminated", span(start, pos - start)))
            continue
        diagnostics.append(error("IllegalCharacter", f"illegal character {ch!r}", span(pos, 1)))
        pos += 1

    tokens.append(Token(TokenType.EOF, "", span(pos, 1)))
    return tokens, diagnostics
