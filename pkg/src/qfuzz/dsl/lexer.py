from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import SourceSpan

KEYWORDS = {"procedure", "qureg", "if", "else", "measure", "print", "int", "Mix"}
GATE_NAMES = {"X", "Y", "Z", "H", "S", "T"}

# order matters: "==" before "="
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<op>==|[(){}\[\];=+\-*/])
    """,
    re.VERBOSE,
)

_OP_KINDS = {
    "(": "lparen", ")": "rparen", "{": "lbrace", "}": "rbrace",
    "[": "lbrack", "]": "rbrack", ";": "semi", "=": "assign", "==": "eqeq",
    "+": "plus", "-": "minus", "*": "star", "/": "slash",
}


class LexError(SyntaxError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan
    value: object = None


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def tokenize(text: str) -> list[Token]:
    """Split source into tokens, dropping whitespace and ``//`` comments.

    Keywords get kind ``kw_<word>``, gate letters kind ``gate``. The list
    always ends with an ``eof`` token.
    """
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1)
        if m is None:
            if text[pos] == '"':
                raise LexError("unterminated string literal", span)
            raise LexError(f"illegal character {text[pos]!r}", span)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            if lexeme in KEYWORDS:
                tokens.append(Token(f"kw_{lexeme}", lexeme, span))
            elif lexeme in GATE_NAMES:
                tokens.append(Token("gate", lexeme, span))
            else:
                tokens.append(Token("ident", lexeme, span, lexeme))
        elif kind == "int":
            tokens.append(Token("int", lexeme, span, int(lexeme)))
        elif kind == "string":
            tokens.append(Token("string", lexeme, span, _unescape(lexeme[1:-1])))
        elif kind == "op":
            tokens.append(Token(_OP_KINDS[lexeme], lexeme, span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, pos - line_start + 1)))
    return tokens
