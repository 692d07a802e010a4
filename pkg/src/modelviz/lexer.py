"""Hand-rolled lexer for the input language.

Logical operators are accepted both as unicode and as ASCII digraphs; the
longest match wins.  Note that ``<=`` is reverse implication while ``=<``
is less-or-equal, following the usual FO input convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import LexError

KEYWORDS = {
    "vocabulary", "LTCvocabulary", "theory", "structure", "procedure",
    "type", "isa", "constructed", "from", "extern", "partial",
    "true", "false",
}

AGGREGATE_NAMES = {"sum", "card", "min", "max", "prod"}

# multi-char operators first; single chars after (maximal munch)
_OPERATORS = [
    ("<=>", "EQUIV"),
    ("=>", "IMPLIES"),
    ("<=", "IMPLIEDBY"),
    ("<-", "RULEARROW"),
    ("=<", "LE"),
    (">=", "GE"),
    ("~=", "NEQ"),
    ("::", "DOUBLECOLON"),
    ("..", "DOTDOT"),
    ("⇔", "EQUIV"),
    ("⇒", "IMPLIES"),
    ("⇐", "IMPLIEDBY"),
    ("←", "RULEARROW"),
    ("≤", "LE"),
    ("≥", "GE"),
    ("≠", "NEQ"),
    ("∧", "AND"),
    ("∨", "OR"),
    ("¬", "NOT"),
    ("∀", "FORALL"),
    ("∃", "EXISTS"),
    ("&", "AND"),
    ("|", "OR"),
    ("~", "NOT"),
    ("!", "FORALL"),
    ("?", "EXISTS"),
    ("{", "LBRACE"),
    ("}", "RBRACE"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    ("[", "LBRACKET"),
    ("]", "RBRACKET"),
    (",", "COMMA"),
    (";", "SEMI"),
    (".", "DOT"),
    (":", "COLON"),
    ("=", "EQ"),
    ("<", "LT"),
    (">", "GT"),
    ("+", "PLUS"),
    ("-", "MINUS"),
    ("*", "STAR"),
]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r} @ {self.line}:{self.column})"


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int):
        chunk = self.text[self.pos:self.pos + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.col = n - chunk.rfind("\n")
        else:
            self.col += n
        self.pos += n

    def _skip_trivia(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance(1)
            elif self.text.startswith("//", self.pos):
                end = self.text.find("\n", self.pos)
                self._advance((end if end != -1 else len(self.text)) - self.pos)
            else:
                return

    def next_token(self) -> Token:
        self._skip_trivia()
        line, col, offset = self.line, self.col, self.pos
        if self.pos >= len(self.text):
            return Token("EOF", "", line, col, offset)
        c = self.text[self.pos]
        if c == '"':
            return self._string(line, col, offset)
        if c.isdigit():
            end = self.pos
            while end < len(self.text) and self.text[end].isdigit():
                end += 1
            text = self.text[self.pos:end]
            self._advance(end - self.pos)
            return Token("INT", text, line, col, offset)
        if c.isalpha() or c == "_":
            end = self.pos
            while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
                end += 1
            text = self.text[self.pos:end]
            self._advance(end - self.pos)
            kind = "KEYWORD" if text in KEYWORDS else "IDENT"
            return Token(kind, text, line, col, offset)
        for op, kind in _OPERATORS:
            if self.text.startswith(op, self.pos):
                self._advance(len(op))
                return Token(kind, op, line, col, offset)
        raise LexError(f"unexpected character {c!r}", line, col)

    def _string(self, line: int, col: int, offset: int) -> Token:
        i = self.pos + 1
        out = []
        while i < len(self.text):
            c = self.text[i]
            if c == '"':
                text = "".join(out)
                self._advance(i + 1 - self.pos)
                return Token("STRING", text, line, col, offset)
            if c == "\\":
                if i + 1 >= len(self.text):
                    break
                esc = self.text[i + 1]
                if esc == "n":
                    out.append("\n")
                elif esc == "t":
                    out.append("\t")
                elif esc in ('"', "\\"):
                    out.append(esc)
                else:
                    raise LexError(f"unknown escape \\{esc}", line, col)
                i += 2
                continue
            if c == "\n":
                break
            out.append(c)
            i += 1
        raise LexError("unterminated string literal", line, col)

    def consume_raw_block(self) -> None:
        """Skip a balanced ``{ ... }`` region at the character level.

        Used for script blocks, whose content is opaque to this language.
        Understands nested braces, double- and single-quoted strings, and
        ``//`` / ``--`` line comments, so paper-style blocks load verbatim.
        """
        self._skip_trivia()
        if self.pos >= len(self.text) or self.text[self.pos] != "{":
            raise LexError("expected '{' to open a script block", self.line, self.col)
        depth = 0
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == "{":
                depth += 1
                self._advance(1)
            elif c == "}":
                depth -= 1
                self._advance(1)
                if depth == 0:
                    return
            elif c in ('"', "'"):
                self._skip_quoted(c)
            elif self.text.startswith("//", self.pos) or self.text.startswith("--", self.pos):
                end = self.text.find("\n", self.pos)
                self._advance((end if end != -1 else len(self.text)) - self.pos)
            else:
                self._advance(1)
        raise LexError("unterminated script block", self.line, self.col)

    def _skip_quoted(self, quote: str):
        start_line, start_col = self.line, self.col
        self._advance(1)
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == "\\":
                self._advance(2)
                continue
            self._advance(1)
            if c == quote:
                return
            if c == "\n":
                break
        raise LexError("unterminated string in script block", start_line, start_col)


def tokenize(text: str) -> list[Token]:
    """Convenience: tokenize text that contains no script blocks."""
    lexer = Lexer(text)
    out = []
    while True:
        tok = lexer.next_token()
        out.append(tok)
        if tok.kind == "EOF":
            return out
