"""Static extraction of measurement sites and the branches they guard."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .dsl.ast import NO_SPAN, CmpOp, IfMeasure, Program, SourceSpan, walk


class BranchKind(enum.Enum):
    SENSITIVE_THEN = "sensitive-then"
    SENSITIVE_ELSE = "sensitive-else"
    PROGRAM_EXIT = "program-exit"


@dataclass(frozen=True)
class BranchId:
    ordinal: int
    kind: BranchKind
    span: SourceSpan
    site_id: Optional[int] = None


@dataclass(frozen=True)
class SensitiveSite:
    site_id: int
    register: str
    width: int
    predicate_op: CmpOp
    target_value: int
    then_branch_id: BranchId
    # an `if` without `else` still has a fall-through arm, so this is always set
    else_branch_id: Optional[BranchId]
    span: SourceSpan
    node: IfMeasure


@dataclass(frozen=True)
class KetInfo:
    register: str
    width: int


@dataclass(frozen=True)
class SensitivityReport:
    sites: tuple[SensitiveSite, ...]
    branches: tuple[BranchId, ...]
    ket_info: Optional[KetInfo]

    @property
    def exit_branch(self) -> BranchId:
        return self.branches[-1]

    def site(self, site_id: int) -> SensitiveSite:
        for s in self.sites:
            if s.site_id == site_id:
                return s
        raise IndexError(f"no sensitive site {site_id} (program has {len(self.sites)})")

    def to_dict(self) -> dict:
        return {
            "ket": None if self.ket_info is None else {
                "register": self.ket_info.register, "width": self.ket_info.width,
            },
            "sites": [
                {
                    "site_id": s.site_id,
                    "register": s.register,
                    "width": s.width,
                    "op": s.predicate_op.value,
                    "target": s.target_value,
                    "spans": {
                        "if": _span_dict(s.span),
                        "then": _span_dict(s.then_branch_id.span),
                        "else": _span_dict(s.else_branch_id.span),
                    },
                }
                for s in self.sites
            ],
            "branches": [
                {"id": b.ordinal, "kind": b.kind.value, "site_id": b.site_id, "span": _span_dict(b.span)}
                for b in self.branches
            ],
        }


def _span_dict(span: SourceSpan) -> dict:
    return {"line": span.line, "column": span.column}


def _block_span(block, fallback: SourceSpan) -> SourceSpan:
    return block[0].span if block else fallback


def extract_sensitive(p: Program) -> SensitivityReport:
    """One site per ``if (measure(..)==..)`` in source order.

    Branch ordinals are then/else pairs per site followed by program-exit.
    """
    decl = p.register
    sites = []
    branches = []
    for node in walk(p.body):
        if not isinstance(node, IfMeasure):
            continue
        site_id = len(sites)
        then_b = BranchId(len(branches), BranchKind.SENSITIVE_THEN,
                          _block_span(node.then, node.span), site_id)
        else_b = BranchId(len(branches) + 1, BranchKind.SENSITIVE_ELSE,
                          _block_span(node.orelse or (), node.span), site_id)
        branches += [then_b, else_b]
        sites.append(SensitiveSite(
            site_id=site_id,
            register=node.register,
            width=decl.n_qubits,
            predicate_op=node.cmp,
            target_value=node.target,
            then_branch_id=then_b,
            else_branch_id=else_b,
            span=node.span,
            node=node,
        ))
    end_span = p.body[-1].span if p.body else p.span
    branches.append(BranchId(len(branches), BranchKind.PROGRAM_EXIT, end_span))
    ket = KetInfo(decl.name, decl.n_qubits) if decl is not None else None
    return SensitivityReport(tuple(sites), tuple(branches), ket)


def locate_site(p: Program, site: SensitiveSite) -> IfMeasure:
    """Return the ``IfMeasure`` node of ``p`` that ``site`` describes.

    Sites are matched by ordinal and structure, so a site extracted from an
    equal program (e.g. a re-parse) is accepted.
    """
    nodes = [n for n in walk(p.body) if isinstance(n, IfMeasure)]
    if not 0 <= site.site_id < len(nodes) or nodes[site.site_id] != site.node:
        raise ValueError(f"site {site.site_id} does not belong to program {p.name!r}")
    return nodes[site.site_id]


class HookKind(enum.Enum):
    INPUT_READ = "input-matrix-read"
    KET_TRANSFORM = "ket-transform"
    KET_BEFORE_MEASURE = "ket-before-measurement"
    MEASURE_RESULT = "measurement-result"


@dataclass(frozen=True)
class Hook:
    order: int
    kind: HookKind
    span: SourceSpan
    site_id: int


def instrumentation_points(p: Program, site: SensitiveSite) -> list[Hook]:
    """The four places an interpreter reports sensitive information for ``site``.

    Input read fires before the first statement, the ket transform at the
    register declaration, the pre-measurement ket just before the ``if``, and
    the measurement result at the ``measure`` call.
    """
    locate_site(p, site)
    first = p.body[0].span if p.body else p.span
    decl = p.register
    return [
        Hook(1, HookKind.INPUT_READ, first, site.site_id),
        Hook(2, HookKind.KET_TRANSFORM, decl.span if decl is not None else first, site.site_id),
        Hook(3, HookKind.KET_BEFORE_MEASURE, site.span, site.site_id),
        Hook(4, HookKind.MEASURE_RESULT,
             site.node.measure_span if site.node.measure_span != NO_SPAN else site.span,
             site.site_id),
    ]
