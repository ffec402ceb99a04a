import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GOLDEN_DIR, PROGRAMS_DIR
from qfuzz.dsl import (
    Assign, BinOp, BindingError, CmpOp, GateApply, IfMeasure, IntDecl, IntLit, LexError,
    MixApply, ParseError, Print, Program, QuregDecl, VarRef, parse, parse_file, pretty_print,
    tokenize,
)
from qfuzz.statevec import GateKind


def kinds(text):
    return [(t.kind, t.value) if t.kind in ("ident", "int") else t.kind for t in tokenize(text)][:-1]


def test_lexer_examples():
    assert kinds("qureg q[5];") == ["kw_qureg", ("ident", "q"), "lbrack", ("int", 5), "rbrack", "semi"]
    assert kinds("measure(q)==5") == ["kw_measure", "lparen", ("ident", "q"), "rparen", "eqeq", ("int", 5)]
    toks = tokenize("int i=1/0; //bug")
    assert [t.kind for t in toks] == ["kw_int", "ident", "assign", "int", "slash", "int", "semi", "eof"]


def test_lexer_spans():
    toks = tokenize("a\n  b")
    assert (toks[0].span.line, toks[0].span.column) == (1, 1)
    assert (toks[1].span.line, toks[1].span.column) == (2, 3)


def test_lexer_errors():
    with pytest.raises(LexError) as e:
        tokenize("qureg q[5] @")
    assert (e.value.span.line, e.value.span.column) == (1, 12)
    with pytest.raises(LexError, match="unterminated"):
        tokenize('print "oops;')


def test_parse_motivating(motivating):
    expected = Program("example", (
        QuregDecl("q", 5),
        MixApply("q"),
        IfMeasure("q", CmpOp.EQ, 5, (
            Print("crash"),
            IntDecl("i", BinOp("/", IntLit(1), IntLit(0))),
        )),
        Print("safe"),
    ))
    assert motivating == expected
    assert motivating.body[2].span.line == 7
    assert motivating.body[2].measure_span.line == 7


def test_parse_empty():
    p = parse("procedure t(){}")
    assert p == Program("t", ())
    assert pretty_print(p) == "procedure t(){\n}\n"


def test_parse_gate_forms():
    p = parse("procedure t(){ qureg r[3]; H(r); T(r[2]); }")
    assert p.body[1] == GateApply(GateKind.H, "r", None)
    assert p.body[2] == GateApply(GateKind.T, "r", 2)


def test_parse_else_and_expressions():
    p = parse("""procedure t(){ qureg q[2]; int a=1; int b=(a+2)*3-4/2;
        if (measure(q)==3) { a=b; } else { print "no"; } }""")
    assert p.body[2].value == BinOp("-", BinOp("*", BinOp("+", VarRef("a"), IntLit(2)), IntLit(3)),
                                     BinOp("/", IntLit(4), IntLit(2)))
    assert p.body[3].then == (Assign("a", VarRef("b")),)
    assert p.body[3].orelse == (Print("no"),)


@pytest.mark.parametrize("src, needle", [
    ("procedure t(){ qureg q[2]; H(q[3]); }", "out of range"),
    ("procedure t(){ H(q); }", "before any qureg"),
    ("procedure t(){ qureg q[2]; qureg r[2]; }", "one"),
    ("procedure t(){ qureg q[0]; }", "1"),
    ("procedure t(){ qureg q[2]; if (measure(q)==4) { } }", "does not fit"),
    ("procedure t(){ int a=b; }", "undeclared"),
    ("procedure t(){ int a=1; int a=2; }", "a"),
    ("procedure t(){ x=1; }", "undeclared"),
    ("procedure t(){ qureg q[2]; Mix(r); }", "undeclared"),
])
def test_binding_errors(src, needle):
    with pytest.raises(BindingError, match=needle):
        parse(src)


def test_block_scoping():
    with pytest.raises(BindingError):
        parse("procedure t(){ qureg q[1]; if (measure(q)==1) { int a=1; } a=2; }")


@pytest.mark.parametrize("src", [
    "procedure t(){ qureg q[2] }",
    "procedure t(){ qureg q[2];",
    "procedure (){}",
    "procedure t(){ if (measure(q)) {} }",
    "procedure t(){ int a=; }",
    "procedure t(){ print 5; }",
    "procedure t(){} extra",
    "procedure t(){ int a=99999999999999999999; }",
])
def test_syntax_errors_have_spans(src):
    with pytest.raises(ParseError) as e:
        parse(src)
    span = e.value.span
    lines = src.split("\n")
    assert 1 <= span.line <= len(lines)
    assert 1 <= span.column <= len(lines[span.line - 1]) + 1


def test_round_trip_motivating(motivating):
    text = pretty_print(motivating)
    assert parse(text) == motivating
    assert pretty_print(parse(text)) == text


@pytest.mark.parametrize("path", sorted(PROGRAMS_DIR.glob("*.qpl")) + sorted(GOLDEN_DIR.glob("*.qpl")),
                         ids=lambda p: p.name)
def test_round_trip_corpus(path):
    p = parse_file(path)
    assert parse(pretty_print(p)) == p


def test_printer_parenthesizes():
    p = parse("procedure t(){ int a=1-(2-3); int b=(1-2)-3; int c=2*(3+4); }")
    text = pretty_print(p)
    assert "int a=1-(2-3);" in text
    assert "int b=1-2-3;" in text
    assert "int c=2*(3+4);" in text


def test_string_escapes():
    p = parse('procedure t(){ print "a\\"b\\\\c"; }')
    assert p.body[0].text == 'a"b\\c'
    assert parse(pretty_print(p)) == p


# -- generated programs -------------------------------------------------------

def _expr(depth):
    leaf = st.integers(0, 50).map(IntLit)
    if depth == 0:
        return leaf
    sub = _expr(depth - 1)
    return st.one_of(leaf, st.builds(BinOp, st.sampled_from("+-*/"), sub, sub))


@st.composite
def programs(draw):
    n = draw(st.integers(1, 4))
    body = [QuregDecl("q", n)]

    def stmts(depth, declared):
        out = []
        for _ in range(draw(st.integers(0, 4))):
            kind = draw(st.sampled_from(["gate", "mix", "print", "int", "if"] if depth < 2 else
                                        ["gate", "mix", "print", "int"]))
            if kind == "gate":
                q = draw(st.one_of(st.none(), st.integers(0, n - 1)))
                out.append(GateApply(draw(st.sampled_from(list(GateKind))), "q", q))
            elif kind == "mix":
                out.append(MixApply("q"))
            elif kind == "print":
                out.append(Print(draw(st.text("abc \"\\", max_size=5))))
            elif kind == "int":
                name = f"v{len(declared)}"
                declared = declared + [name]
                out.append(IntDecl(name, draw(_expr(2))))
            else:
                then = tuple(stmts(depth + 1, list(declared)))
                orelse = draw(st.one_of(st.none(), st.just(0)))
                orelse = None if orelse is None else tuple(stmts(depth + 1, list(declared)))
                out.append(IfMeasure("q", CmpOp.EQ, draw(st.integers(0, 2**n - 1)), then, orelse))
        return out

    body += stmts(0, [])
    return Program("gen", tuple(body))


@settings(max_examples=150, deadline=None)
@given(programs())
def test_round_trip_generated(p):
    assert parse(pretty_print(p)) == p
