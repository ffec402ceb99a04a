"""Recursive-descent parser with name binding for the quantum while-language.

Grammar::

    program := "procedure" ident "(" ")" block
    block   := "{" stmt* "}"
    stmt    := "qureg" ident "[" int "]" ";"
             | GATE "(" regref ")" ";"
             | "Mix" "(" ident ")" ";"
             | "if" "(" "measure" "(" ident ")" "==" int ")" block ("else" block)?
             | "print" string ";"
             | "int" ident "=" expr ";"
             | ident "=" expr ";"
    regref  := ident | ident "[" int "]"
    expr    := term (("+" | "-") term)*
    term    := atom (("*" | "/") atom)*
    atom    := int | ident | "(" expr ")"
"""
from __future__ import annotations

from .ast import (
    Assign, BinOp, CmpOp, GateApply, IfMeasure, IntDecl, IntLit, MixApply,
    Print, Program, QuregDecl, SourceSpan, VarRef,
)
from .lexer import Token, tokenize
from ..statevec import GateKind

INT64_MAX = 2**63 - 1
MAX_QUBITS = 30


class ParseError(SyntaxError):
    """Syntax error; ``span`` locates the offending token."""

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span


class BindingError(ParseError):
    """Well-formed syntax that refers to something undeclared or out of range."""


_DESCRIBE = {
    "lparen": "'('", "rparen": "')'", "lbrace": "'{'", "rbrace": "'}'",
    "lbrack": "'['", "rbrack": "']'", "semi": "';'", "assign": "'='",
    "eqeq": "'=='", "ident": "identifier", "int": "integer", "string": "string",
    "gate": "gate name", "eof": "end of input",
}


def _describe(kind: str) -> str:
    if kind.startswith("kw_"):
        return repr(kind[3:])
    return _DESCRIBE.get(kind, kind)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.register: QuregDecl | None = None
        self.scopes: list[set[str]] = []

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _error_span(self) -> SourceSpan:
        # keep EOF errors pointing at real input
        if self.tok.kind == "eof" and self.pos > 0:
            return self.tokens[self.pos - 1].span
        return self.tok.span

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = _describe(tok.kind) if tok.kind == "eof" else repr(tok.text)
            raise ParseError(f"expected {what or _describe(kind)}, found {found}", self._error_span())
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            self.pos += 1
            return self.tokens[self.pos - 1]
        return None

    def int_literal(self) -> tuple[int, Token]:
        tok = self.expect("int")
        if tok.value > INT64_MAX:
            raise ParseError(f"integer literal {tok.text} exceeds 64-bit range", tok.span)
        return tok.value, tok

    # -- binding ---------------------------------------------------------

    def use_register(self, tok: Token) -> QuregDecl:
        reg = self.register
        if reg is None:
            raise BindingError(f"register {tok.text!r} used before any qureg declaration", tok.span)
        if tok.value != reg.name:
            raise BindingError(f"undeclared register {tok.text!r}", tok.span)
        return reg

    def lookup_var(self, tok: Token) -> None:
        if not any(tok.value in scope for scope in self.scopes):
            raise BindingError(f"undeclared variable {tok.text!r}", tok.span)

    # -- grammar ---------------------------------------------------------

    def program(self) -> Program:
        start = self.expect("kw_procedure")
        name = self.expect("ident", "procedure name").value
        self.expect("lparen")
        self.expect("rparen")
        body = self.block(top_level=True)
        self.expect("eof")
        return Program(name, body, start.span)

    def block(self, top_level: bool = False) -> tuple:
        self.expect("lbrace")
        self.scopes.append(set())
        stmts = []
        while self.tok.kind not in ("rbrace", "eof"):
            stmts.append(self.stmt(top_level))
        self.expect("rbrace")
        self.scopes.pop()
        return tuple(stmts)

    def stmt(self, top_level: bool):
        tok = self.tok
        kind = tok.kind
        if kind == "kw_qureg":
            return self.qureg_decl(top_level)
        if kind == "gate":
            return self.gate_apply()
        if kind == "kw_Mix":
            self.pos += 1
            self.expect("lparen")
            reg = self.use_register(self.expect("ident", "register name"))
            self.expect("rparen")
            self.expect("semi")
            return MixApply(reg.name, tok.span)
        if kind == "kw_if":
            return self.if_measure()
        if kind == "kw_print":
            self.pos += 1
            text = self.expect("string").value
            self.expect("semi")
            return Print(text, tok.span)
        if kind == "kw_int":
            self.pos += 1
            name_tok = self.expect("ident", "variable name")
            self.expect("assign")
            value = self.expr()
            self.expect("semi")
            scope = self.scopes[-1]
            if name_tok.value in scope:
                raise BindingError(f"variable {name_tok.text!r} already declared", name_tok.span)
            if self.register is not None and name_tok.value == self.register.name:
                raise BindingError(f"{name_tok.text!r} is already the register name", name_tok.span)
            scope.add(name_tok.value)
            return IntDecl(name_tok.value, value, tok.span)
        if kind == "ident":
            self.pos += 1
            self.lookup_var(tok)
            self.expect("assign")
            value = self.expr()
            self.expect("semi")
            return Assign(tok.value, value, tok.span)
        found = _describe("eof") if kind == "eof" else repr(tok.text)
        raise ParseError(f"expected a statement, found {found}", self._error_span())

    def qureg_decl(self, top_level: bool) -> QuregDecl:
        tok = self.expect("kw_qureg")
        name_tok = self.expect("ident", "register name")
        self.expect("lbrack")
        width, width_tok = self.int_literal()
        self.expect("rbrack")
        self.expect("semi")
        if self.register is not None:
            raise BindingError("only one qureg declaration is allowed per program", tok.span)
        if not top_level:
            raise BindingError("qureg must be declared at the top level of the procedure", tok.span)
        if not 1 <= width <= MAX_QUBITS:
            raise BindingError(f"register width must be in 1..{MAX_QUBITS}, got {width}", width_tok.span)
        if any(name_tok.value in scope for scope in self.scopes):
            raise BindingError(f"{name_tok.text!r} is already a variable name", name_tok.span)
        self.register = QuregDecl(name_tok.value, width, tok.span)
        return self.register

    def gate_apply(self) -> GateApply:
        tok = self.expect("gate")
        self.expect("lparen")
        reg = self.use_register(self.expect("ident", "register name"))
        qubit = None
        if self.accept("lbrack"):
            qubit, qtok = self.int_literal()
            if qubit >= reg.n_qubits:
                raise BindingError(
                    f"qubit index {qubit} out of range for {reg.name}[{reg.n_qubits}]", qtok.span
                )
            self.expect("rbrack")
        self.expect("rparen")
        self.expect("semi")
        return GateApply(GateKind(tok.text), reg.name, qubit, tok.span)

    def if_measure(self) -> IfMeasure:
        tok = self.expect("kw_if")
        self.expect("lparen")
        mtok = self.expect("kw_measure")
        self.expect("lparen")
        reg = self.use_register(self.expect("ident", "register name"))
        self.expect("rparen")
        self.expect("eqeq", "'==' (only equality comparison is supported)")
        target, ttok = self.int_literal()
        if target >= 1 << reg.n_qubits:
            raise BindingError(
                f"target {target} does not fit in a {reg.n_qubits}-qubit register", ttok.span
            )
        self.expect("rparen")
        then = self.block()
        orelse = self.block() if self.accept("kw_else") else None
        return IfMeasure(reg.name, CmpOp.EQ, target, then, orelse, tok.span, mtok.span)

    def expr(self):
        left = self.term()
        while self.tok.kind in ("plus", "minus"):
            op = self.tok
            self.pos += 1
            left = BinOp(op.text, left, self.term(), op.span)
        return left

    def term(self):
        left = self.atom()
        while self.tok.kind in ("star", "slash"):
            op = self.tok
            self.pos += 1
            left = BinOp(op.text, left, self.atom(), op.span)
        return left

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            value, _ = self.int_literal()
            return IntLit(value, tok.span)
        if tok.kind == "ident":
            self.pos += 1
            self.lookup_var(tok)
            return VarRef(tok.value, tok.span)
        if self.accept("lparen"):
            inner = self.expr()
            self.expect("rparen")
            return inner
        found = _describe("eof") if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"expected an expression, found {found}", self._error_span())


def parse(text: str) -> Program:
    """Parse and bind a program. Raises ParseError / BindingError / LexError."""
    return _Parser(tokenize(text)).program()


def parse_file(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
