from __future__ import annotations

from .ast import (
    Assign, BinOp, GateApply, IfMeasure, IntDecl, IntLit, MixApply, Print,
    Program, QuregDecl, VarRef,
)

INDENT = "    "
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def format_expr(e, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, VarRef):
        return e.name
    prec = _PREC[e.op]
    text = f"{format_expr(e.left, prec)}{e.op}{format_expr(e.right, prec, right=True)}"
    # operators are left-associative, so an equal-precedence right child needs parens
    if prec < parent_prec or (right and prec == parent_prec):
        return f"({text})"
    return text


def _quote(text: str) -> str:
    body = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def _stmt_lines(stmt, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, QuregDecl):
        return [f"{pad}qureg {stmt.name}[{stmt.n_qubits}];"]
    if isinstance(stmt, GateApply):
        ref = stmt.register if stmt.qubit is None else f"{stmt.register}[{stmt.qubit}]"
        return [f"{pad}{stmt.gate.value}({ref});"]
    if isinstance(stmt, MixApply):
        return [f"{pad}Mix({stmt.register});"]
    if isinstance(stmt, Print):
        return [f"{pad}print {_quote(stmt.text)};"]
    if isinstance(stmt, IntDecl):
        return [f"{pad}int {stmt.name}={format_expr(stmt.value)};"]
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.name}={format_expr(stmt.value)};"]
    if isinstance(stmt, IfMeasure):
        lines = [f"{pad}if (measure({stmt.register})=={stmt.target}) {{"]
        for inner in stmt.then:
            lines += _stmt_lines(inner, depth + 1)
        if stmt.orelse is not None:
            lines.append(f"{pad}}} else {{")
            for inner in stmt.orelse:
                lines += _stmt_lines(inner, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    raise TypeError(f"not a statement: {stmt!r}")


def pretty_print(p: Program) -> str:
    """Canonical source text for ``p``; parsing it yields an equal Program."""
    lines = [f"procedure {p.name}(){{"]
    for stmt in p.body:
        lines += _stmt_lines(stmt, 1)
    lines.append("}")
    return "\n".join(lines) + "\n"
