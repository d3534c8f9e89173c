"""Lexer for .mg sources.

Tokens carry spans.  `//` and `/* */` comments are skipped; keywords are
reserved and lexed as their own kinds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .ast_nodes import KEYWORDS
from .diagnostics import Diagnostic, Span, error


class TokenKind(Enum):
    IDENT = auto()
    KEYWORD = auto()
    LBRACE = auto()
    RBRACE = auto()
    LPAREN = auto()
    RPAREN = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    COMMA = auto()
    SEMI = auto()
    COLON = auto()
    DOT = auto()
    ASSIGN = auto()  # =
    EQEQ = auto()  # ==
    ARROW = auto()  # =>
    BANG = auto()  # !
    ANDAND = auto()  # &&
    EOF = auto()


@dataclass
class Token:
    kind: TokenKind
    text: str
    span: Span


_PUNCT = {
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    ",": TokenKind.COMMA,
    ";": TokenKind.SEMI,
    ":": TokenKind.COLON,
    ".": TokenKind.DOT,
    "!": TokenKind.BANG,
}


def tokenize(text: str, path: str) -> tuple[list[Token], list[Diagnostic]]:
    """Lex `text`; returns the token list (always EOF-terminated) and diagnostics."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def span(start_line: int, start_col: int) -> Span:
        return Span(path, start_line, start_col, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if text.startswith("/*", i):
            sl, sc = line, col
            i += 2
            col += 2
            closed = False
            while i < n:
                if text.startswith("*/", i):
                    i += 2
                    col += 2
                    closed = True
                    break
                if text[i] == "\n":
                    i += 1
                    line += 1
                    col = 1
                else:
                    i += 1
                    col += 1
            if not closed:
                diags.append(error("UnterminatedComment", "block comment never closed", span(sl, sc)))
            continue
        sl, sc = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            # Backend names such as C++ are the one place a '+' suffix occurs.
            while j < n and text[j] == "+":
                j += 1
            word = text[i:j]
            col += j - i
            i = j
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, span(sl, sc)))
            continue
        if ch == "=":
            if text.startswith("==", i):
                i += 2
                col += 2
                tokens.append(Token(TokenKind.EQEQ, "==", span(sl, sc)))
            elif text.startswith("=>", i):
                i += 2
                col += 2
                tokens.append(Token(TokenKind.ARROW, "=>", span(sl, sc)))
            else:
                i += 1
                col += 1
                tokens.append(Token(TokenKind.ASSIGN, "=", span(sl, sc)))
            continue
        if ch == "&":
            if text.startswith("&&", i):
                i += 2
                col += 2
                tokens.append(Token(TokenKind.ANDAND, "&&", span(sl, sc)))
            else:
                i += 1
                col += 1
                diags.append(error("UnexpectedCharacter", "stray '&' (did you mean '&&'?)", span(sl, sc)))
            continue
        if ch in _PUNCT:
            i += 1
            col += 1
            tokens.append(Token(_PUNCT[ch], ch, span(sl, sc)))
            continue
        i += 1
        col += 1
        diags.append(error("UnexpectedCharacter", f"unexpected character {ch!r}", span(sl, sc)))

    tokens.append(Token(TokenKind.EOF, "", Span(path, line, col, line, col)))
    return tokens, diags
