from .ast import (
    Assign, BinOp, CmpOp, Expr, GateApply, IfMeasure, IntDecl, IntLit, MixApply,
    Print, Program, QuregDecl, SourceSpan, Stmt, VarRef, walk,
)
from .lexer import LexError, Token, tokenize
from .parser import BindingError, ParseError, parse, parse_file
from .printer import pretty_print

__all__ = [
    "Assign", "BinOp", "BindingError", "CmpOp", "Expr", "GateApply", "IfMeasure",
    "IntDecl", "IntLit", "LexError", "MixApply", "ParseError", "Print", "Program",
    "QuregDecl", "SourceSpan", "Stmt", "Token", "VarRef", "parse", "parse_file",
    "pretty_print", "tokenize", "walk",
]
