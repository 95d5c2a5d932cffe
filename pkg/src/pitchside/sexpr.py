"""S-expression reader and writer.

Every text format in this project (setplays, strategies, strategic maps,
flux maps, scenarios, match configs, service bodies) is an S-expression
document.  This module provides the shared reader/writer; each format
implements its own schema layer and canonical printer on top.

Atoms are mapped to Python values: integers, floats, symbols (plain
``str``) and double-quoted strings (``Text``).  Lists become Python
lists.  Comments run from ``;`` to end of line.
"""

from __future__ import annotations

import re


class Text(str):
    """A double-quoted string atom (as opposed to a bare symbol)."""

    __slots__ = ()


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_INT_RE = re.compile(r"[+-]?\d+$")
_FLOAT_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")
_DELIMS = {"(", ")", '"', ";"}


def _classify(token: str):
    if _INT_RE.match(token):
        return int(token)
    if ("." in token or "e" in token or "E" in token) and _FLOAT_RE.match(token):
        return float(token)
    return token


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == ";":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def read_all(self) -> list:
        forms = []
        while True:
            self._skip_ws()
            if self.pos >= len(self.text):
                return forms
            forms.append(self.read_form())

    def read_form(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "(":
            return self._read_list()
        if ch == ")":
            raise self.error("unbalanced parenthesis: unexpected ')'")
        if ch == '"':
            return self._read_string()
        return self._read_atom()

    def _read_list(self) -> list:
        open_line, open_col = self.line, self.col
        self._advance()  # consume '('
        items = []
        while True:
            self._skip_ws()
            if self.pos >= len(self.text):
                raise ParseError(
                    "unbalanced parenthesis: '(' was never closed", open_line, open_col
                )
            if self.text[self.pos] == ")":
                self._advance()
                return items
            items.append(self.read_form())

    def _read_string(self) -> Text:
        open_line, open_col = self.line, self.col
        self._advance()  # consume '"'
        chars = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError("unterminated string", open_line, open_col)
            ch = self.text[self.pos]
            if ch == '"':
                self._advance()
                return Text("".join(chars))
            if ch == "\\":
                self._advance()
                if self.pos >= len(self.text):
                    raise ParseError("unterminated string escape", self.line, self.col)
                ch = self.text[self.pos]
            chars.append(ch)
            self._advance()

    def _read_atom(self):
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace() or ch in _DELIMS:
                break
            self._advance()
        return _classify(self.text[start : self.pos])


def parse(text: str) -> list:
    """Parse a document into a list of top-level forms."""
    return _Reader(text).read_all()


def parse_one(text: str):
    """Parse a document expected to hold exactly one top-level form."""
    forms = parse(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def fmt_num(value) -> str:
    """General numeric atom formatting (ids, weights, scalars)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not S-expression atoms")
    if isinstance(value, int):
        return str(value)
    return f"{value:.6g}"


def fmt_coord(value: float) -> str:
    """Coordinate formatting: exactly 3 decimal places, no negative zero."""
    s = f"{value:.3f}"
    return "0.000" if s == "-0.000" else s


def dumps(form) -> str:
    """Write a form on a single line (used for small payloads)."""
    if isinstance(form, Text):
        escaped = form.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(form, str):
        return form
    if isinstance(form, (int, float)):
        return fmt_num(form)
    if isinstance(form, (list, tuple)):
        return "(" + " ".join(dumps(f) for f in form) + ")"
    raise TypeError(f"cannot write {type(form).__name__} as S-expression")


class FormWalker:
    """Positional/keyword accessor over a parsed list form.

    Schema layers use this to consume ``(head :kw value ...)`` shapes with
    uniform error reporting.
    """

    def __init__(self, form, what: str):
        if not isinstance(form, list) or not form:
            raise ParseError(f"expected a ({what} ...) form", 1, 1)
        self.form = form
        self.what = what

    @property
    def head(self):
        return self.form[0]

    def require_head(self, name: str) -> None:
        if self.head != name:
            raise ParseError(f"expected ({name} ...), found ({self.head} ...)", 1, 1)

    def keyword(self, name: str, default=_Reader):  # _Reader as "no default" marker
        """Value following ``:name``; raises unless a default is supplied."""
        key = ":" + name
        for i, item in enumerate(self.form):
            if item == key:
                if i + 1 >= len(self.form):
                    raise ParseError(f"{self.what}: {key} is missing a value", 1, 1)
                return self.form[i + 1]
        if default is _Reader:
            raise ParseError(f"{self.what}: required keyword {key} not found", 1, 1)
        return default

    def sublists(self, head: str) -> list:
        """All child forms whose head symbol is ``head``."""
        return [f for f in self.form if isinstance(f, list) and f and f[0] == head]
