"""AST node types. Spans are excluded from equality so reformatted programs compare equal."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from ..statevec import GateKind


@dataclass(frozen=True, order=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


NO_SPAN = SourceSpan(0, 0)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


# -- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class VarRef:
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: Expr
    right: Expr
    span: SourceSpan = _span()


Expr = Union[IntLit, VarRef, BinOp]


# -- statements ---------------------------------------------------------------

class CmpOp(enum.Enum):
    EQ = "=="


@dataclass(frozen=True)
class QuregDecl:
    name: str
    n_qubits: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class GateApply:
    gate: GateKind
    register: str
    qubit: Optional[int]  # None targets every qubit of the register
    span: SourceSpan = _span()


@dataclass(frozen=True)
class MixApply:
    register: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IfMeasure:
    register: str
    cmp: CmpOp
    target: int
    then: tuple[Stmt, ...]
    orelse: Optional[tuple[Stmt, ...]] = None
    span: SourceSpan = _span()
    # position of the `measure` keyword inside the condition
    measure_span: SourceSpan = _span()


@dataclass(frozen=True)
class Print:
    text: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IntDecl:
    name: str
    value: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    span: SourceSpan = _span()


Stmt = Union[QuregDecl, GateApply, MixApply, IfMeasure, Print, IntDecl, Assign]


@dataclass(frozen=True)
class Program:
    name: str
    body: tuple[Stmt, ...]
    span: SourceSpan = _span()

    @property
    def register(self) -> Optional[QuregDecl]:
        for stmt in self.body:
            if isinstance(stmt, QuregDecl):
                return stmt
        return None


def walk(stmts):
    """Yield every statement in program order, descending into branches."""
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, IfMeasure):
            yield from walk(stmt.then)
            if stmt.orelse is not None:
                yield from walk(stmt.orelse)
