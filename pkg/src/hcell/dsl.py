"""S-expression syntax for group expressions.

    (finite {"domain": [...], "gens": [[...], ...]})
    (dp e1 e2 ...)
    (wr e)
    (cons :y0 ["z"] :parts [{...}, {...}] :h {...})

Group and list arguments are JSON; ``;`` starts a comment.
"""

from __future__ import annotations

import json

from .expr import Cons, DirectProduct, Finite, WreathOmega
from .permcore import FinPermGroup, label_str


class ParseError(ValueError):
    def __init__(self, line: int, col: int, expected, found: str):
        self.line, self.col = line, col
        self.expected = sorted(expected)
        self.found = found
        super().__init__(f"line {line}, column {col}: expected one of {self.expected}, found {found!r}")


_decoder = json.JSONDecoder()


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, expected):
        self.skip()
        found = self.text[self.pos:self.pos + 10] or "end of input"
        raise ParseError(*self.where(), expected, found)

    def skip(self):
        t = self.text
        while self.pos < len(t):
            if t[self.pos].isspace():
                self.pos += 1
            elif t[self.pos] == ";":
                while self.pos < len(t) and t[self.pos] != "\n":
                    self.pos += 1
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos:self.pos + 1]

    def expect(self, token: str):
        self.skip()
        if not self.text.startswith(token, self.pos):
            self.fail({token})
        self.pos += len(token)

    def word(self, options):
        self.skip()
        end = self.pos
        while end < len(self.text) and (self.text[end].isalnum() or self.text[end] in ":-_"):
            end += 1
        w = self.text[self.pos:end]
        if w not in options:
            self.fail(options)
        self.pos = end
        return w

    def json_value(self, kind, what):
        self.skip()
        start = self.pos
        try:
            value, end = _decoder.raw_decode(self.text, self.pos)
        except json.JSONDecodeError:
            self.fail({what})
        if not isinstance(value, kind):
            self.fail({what})
        self.pos = end
        return value, start


def _group(reader: _Reader, value, start) -> FinPermGroup:
    try:
        return FinPermGroup.from_json(value)
    except (KeyError, ValueError, TypeError) as exc:
        line, col = reader.where(start)
        raise ParseError(line, col, {"group json"}, str(exc)) from None


def _expr(r: _Reader):
    r.expect("(")
    head = r.word({"finite", "dp", "wr", "cons"})
    if head == "finite":
        out = Finite(_group(r, *r.json_value(dict, "group json")))
    elif head == "wr":
        out = WreathOmega(_expr(r))
    elif head == "dp":
        parts = [_expr(r)]
        while r.peek() == "(":
            parts.append(_expr(r))
        out = DirectProduct(tuple(parts))
    else:
        r.word({":y0"})
        y0, _ = r.json_value(list, "label list")
        r.word({":parts"})
        raw, start = r.json_value(list, "group json list")
        parts = [_group(r, p, start) for p in raw]
        r.word({":h"})
        h = _group(r, *r.json_value(dict, "group json"))
        out = Cons(tuple(y0), tuple(parts), h)
    r.expect(")")
    return out


def parse(text: str):
    r = _Reader(text)
    e = _expr(r)
    if r.peek():
        r.fail({"end of input"})
    return e


def _group_text(g: FinPermGroup) -> str:
    return g.dumps()


def print_expr(e) -> str:
    if isinstance(e, Finite):
        return f"(finite {_group_text(e.group)})"
    if isinstance(e, WreathOmega):
        return f"(wr {print_expr(e.inner)})"
    if isinstance(e, DirectProduct):
        return "(dp " + " ".join(print_expr(p) for p in e.parts) + ")"
    if isinstance(e, Cons):
        y0 = json.dumps([label_str(x) for x in e.y0], separators=(",", ":"))
        parts = "[" + ",".join(_group_text(p) for p in e.parts) + "]"
        return f"(cons :y0 {y0} :parts {parts} :h {_group_text(e.h)})"
    raise TypeError(f"not a group expression: {e!r}")
