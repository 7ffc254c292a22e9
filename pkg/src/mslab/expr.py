"""A small expression language for multiplier symbols.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" unary ] ;            (* right associative *)
    atom    = number | ident | ident "(" expr ")" | "(" expr ")" ;
    ident   = "r2" | "xi1" | "xi2" | "pi" | "e" ;
    func    = "exp" | "log" | "sqrt" | "abs" | "sin" | "cos" ;

``r2`` is ``|xi1|^2 + |xi2|^2`` (or ``|xi|^2`` for a one-argument symbol);
``xi1``/``xi2`` are the first coordinates of the two frequency arguments.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

VARIABLES = ("r2", "xi1", "xi2")
CONSTANTS = {"pi": np.pi, "e": np.e}
FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
}


class ExprError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            off = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {src[off]!r}", off)
        kind = m.lastgroup
        out.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(Token("eof", "", len(src)))
    return out


# AST nodes are tuples: ("num", v) ("var", name) ("neg", a) ("bin", op, a, b) ("call", f, a)

class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail(f"expected {text!r}")
        self.take()

    def fail(self, what: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ExprSyntaxError(f"{what}, found {found}", t.offset)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail("expected operator")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            inner = self.unary()
            return ("neg", inner) if op == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return ("num", float(t.text))
        if t.kind == "id":
            self.take()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise UnknownIdentifierError(f"unknown function {t.text!r}", t.offset)
                self.take()
                arg = self.expr()
                self.expect(")")
                return ("call", t.text, arg)
            if t.text in CONSTANTS:
                return ("num", CONSTANTS[t.text])
            if t.text in VARIABLES:
                return ("var", t.text)
            raise UnknownIdentifierError(f"unknown identifier {t.text!r}", t.offset)
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a number, identifier or '('")


def parse(src: str):
    return _Parser(src).parse()


def free_variables(node) -> set[str]:
    kind = node[0]
    if kind == "var":
        return {node[1]}
    if kind == "num":
        return set()
    if kind == "neg":
        return free_variables(node[1])
    if kind == "call":
        return free_variables(node[2])
    return free_variables(node[2]) | free_variables(node[3])


def evaluate(node, env: dict):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "var":
        return env[node[1]]
    if kind == "neg":
        return -evaluate(node[1], env)
    if kind == "call":
        with np.errstate(all="ignore"):
            return FUNCTIONS[node[1]](evaluate(node[2], env))
    a = evaluate(node[2], env)
    b = evaluate(node[3], env)
    op = node[1]
    with np.errstate(all="ignore"):
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        return np.power(a, b)
