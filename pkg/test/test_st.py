# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Structured Text: parsing, canonical printing, identifier resolution. """
import random

import pytest

from sfctools.model import (DiagCode, VariableDecl)
from sfctools.st import (tokenize, parse_statements, parse_expression, render_st, ast_shape, SymbolTable,
                         check_symbols, check_chart_st)
from sfctools.st.ast import (StatementList, Assign, Unary, Binary, Name, Literal)
from sfctools.st.parser import MAX_NESTING
from sfctools.sfc_exceptions import ParseError

import chart_factory
from chart_factory import make_chart

# (source, canonical rendering)
PROGRAMS = [
    ("x := 1;", "x := 1;\n"),
    ("x:=a+b*c;", "x := (a + (b * c));\n"),
    ("x := (a + b) * c;", "x := ((a + b) * c);\n"),
    ("x := a - b - c;", "x := ((a - b) - c);\n"),
    ("x := a ** b ** c;", "x := ((a ** b) ** c);\n"),
    ("x := -a ** 2;", "x := ((-a) ** 2);\n"),
    ("x := - - a;", "x := (-(-a));\n"),
    ("b := NOT a AND c;", "b := ((NOT a) AND c);\n"),
    ("b := a & c OR d XOR e;", "b := ((a AND c) OR (d XOR e));\n"),
    ("b := a = 1 AND c <> 2;", "b := ((a = 1) AND (c <> 2));\n"),
    ("x := nCount >= 3 XOR y;", "x := ((nCount >= 3) XOR y);\n"),
    ("n := n MOD 3 / 2;", "n := ((n MOD 3) / 2);\n"),
    ("IF a THEN x := 1; ELSIF b THEN x := 2; ELSE x := 3; END_IF;",
     "IF a THEN\n    x := 1;\nELSIF b THEN\n    x := 2;\nELSE\n    x := 3;\nEND_IF;\n"),
    ("if a then x := 1; end_if", "IF a THEN\n    x := 1;\nEND_IF;\n"),
    ("CASE n OF 1: x := 1; 2, 3: x := 2; 4..6: x := 3; ELSE x := 0; END_CASE;",
     "CASE n OF\n    1:\n        x := 1;\n    2, 3:\n        x := 2;\n    4..6:\n        x := 3;\nELSE\n"
     "    x := 0;\nEND_CASE;\n"),
    ("CASE eMode OF Idle: x := 0; Run, Jog: x := 1; END_CASE",
     "CASE eMode OF\n    Idle:\n        x := 0;\n    Run, Jog:\n        x := 1;\nEND_CASE;\n"),
    ("CASE n OF -1: x := 0; END_CASE;", "CASE n OF\n    -1:\n        x := 0;\nEND_CASE;\n"),
    ("FOR i := 1 TO 10 BY 2 DO a[i] := 0; END_FOR;", "FOR i := 1 TO 10 BY 2 DO\n    a[i] := 0;\nEND_FOR;\n"),
    ("FOR i := 0 TO n - 1 DO sum := sum + a[i]; END_FOR",
     "FOR i := 0 TO (n - 1) DO\n    sum := (sum + a[i]);\nEND_FOR;\n"),
    ("WHILE n > 0 DO n := n - 1; IF n = 5 THEN EXIT; END_IF; END_WHILE;",
     "WHILE (n > 0) DO\n    n := (n - 1);\n    IF (n = 5) THEN\n        EXIT;\n    END_IF;\nEND_WHILE;\n"),
    ("REPEAT n := n + 1; UNTIL n >= 10 END_REPEAT;", "REPEAT\n    n := (n + 1);\nUNTIL (n >= 10)\nEND_REPEAT;\n"),
    ("RETURN;", "RETURN;\n"),
    ("x := 1;;", "x := 1;\n;\n"),
    ("tDelay(IN := xStart, PT := T#5s);", "tDelay(IN := xStart, PT := T#5s);\n"),
    ("tDelay(IN := TRUE, Q => xDone, ET => tElapsed);", "tDelay(IN := TRUE, Q => xDone, ET => tElapsed);\n"),
    ("x := MAX(a, b, 3);", "x := MAX(a, b, 3);\n"),
    ("rTemp := INT_TO_REAL(nRaw) * 0.1;", "rTemp := (INT_TO_REAL(nRaw) * 0.1);\n"),
    ("stMotor.xRun := stMotor.xReady AND NOT stMotor.xFault;",
     "stMotor.xRun := (stMotor.xReady AND (NOT stMotor.xFault));\n"),
    ("aMatrix[i, j + 1] := 16#FF;", "aMatrix[i, (j + 1)] := 16#FF;\n"),
    ("%QX0.1 := %IX0.0;", "%QX0.1 := %IX0.0;\n"),
    ("sMsg := 'it$'s'; (* comment\n spanning lines *) n := 1; // tail", "sMsg := 'it$'s';\nn := 1;\n"),
    ("x := 2#1010 + INT#5;", "x := (2#1010 + INT#5);\n"),
]

FUZZ_PIECES = ('x', 'y', ':=', '1', '2.5', '+', '-', '*', '**', '(', ')', ';', ',', ':', '..', 'IF', 'THEN',
               'ELSE', 'END_IF', 'CASE', 'OF', 'END_CASE', 'FOR', 'TO', 'DO', 'END_FOR', 'NOT', 'AND', '=>', "'",
               "'s'", '(*', '*)', '#', 'T#1s', '@', 'ä', '\n', ' ', '[', ']', 'TRUE', '%IX0.0', '.', 'a[', '\u2028')


@pytest.mark.parametrize('source, expected', PROGRAMS)
def test_canonical_rendering(source, expected):
    ast = parse_statements(source)
    assert render_st(ast) == expected
    reparsed = parse_statements(expected)
    assert ast_shape(reparsed) == ast_shape(ast)
    assert render_st(reparsed) == expected


def test_precedence_rendering():
    assert render_st(parse_expression("NOT bBusy AND (nCount >= 3)")) == "((NOT bBusy) AND (nCount >= 3))"


def test_expression_tree():
    node = parse_expression("a OR b AND c")
    assert isinstance(node, Binary) and node.op == 'OR'
    assert ast_shape(node.right) == ('Binary', 'AND', ('Name', 'b'), ('Name', 'c'))
    assert node.span == (0, 12)
    assert isinstance(parse_expression("-x"), Unary)


def test_spans_are_byte_offsets():
    ast = parse_statements("s := 'ä'; n := 1;")
    second = ast.statements[1]
    assert isinstance(second, Assign)
    assert second.span == (11, 18)
    assert second.target == Name('n', (11, 12))
    assert second.value == Literal('integer', '1', (16, 17))


def test_blank_input():
    assert parse_statements('') == StatementList((), (0, 0))
    assert parse_statements('  (* nothing *)\n// here\n').statements == ()


def test_tokens():
    assert [t.type for t in tokenize("IF x >= T#1s THEN")] == ['IF', 'IDENT', 'GE', 'TIME', 'THEN', 'EOF']
    assert [t.type for t in tokenize("4..6")] == ['INTEGER', 'DOTDOT', 'INTEGER', 'EOF']
    assert tokenize("end_if")[0].type == 'END_IF'
    assert [t.type for t in tokenize("x.1.2 := 1.5")] == ['IDENT', 'DOT', 'INTEGER', 'DOT', 'INTEGER', 'ASSIGN', 'REAL',
                                                          'EOF']


@pytest.mark.parametrize('source, position, found', [
    ("x := 1", 6, 'end of input'),
    ("x := a b;", 7, "'b'"),
    ("IF a THEN x := 1;", 17, 'end of input'),
    ("x := 1; @", 8, "'@'"),
    ("x := 'abc", 5, 'unterminated string'),
    ("(* open", 0, 'unterminated comment'),
    ("x := 'ä'; y := ;", 16, "';'"),
    ("x := f(a,);", 9, "')'"),
    ("CASE n OF END_CASE;", 10, "'END_CASE'"),
    ("x + 1;", 2, "'+'"),
])
def test_syntax_errors(source, position, found):
    with pytest.raises(ParseError) as info:
        parse_statements(source)
    assert info.value.position == position
    assert info.value.found == found
    assert info.value.expected


@pytest.mark.parametrize('source, found, end', [
    ("a ++ b", "'++'", 4),
    ("a + * b", "'+ *'", 5),
    ("a and OR b", "'and OR'", 8),
])
def test_double_operator_position(source, found, end):
    with pytest.raises(ParseError) as info:
        parse_expression(source)
    assert (info.value.position, info.value.found, info.value.end) == (2, found, end)
    assert info.value.expected == ('expression',)
    assert render_st(parse_expression("a + -b")) == "(a + (-b))"


def test_trailing_expression_input():
    with pytest.raises(ParseError) as info:
        parse_expression("a b")
    assert info.value.position == 2
    assert info.value.expected == ('end of input',)


def test_nesting_limit():
    deep = MAX_NESTING + 6
    with pytest.raises(ParseError) as info:
        parse_statements("x := " + "(" * deep + "1" + ")" * deep + ";")
    assert "nesting deeper than" in info.value.found
    with pytest.raises(ParseError):
        parse_expression("NOT " * 500 + "x")
    with pytest.raises(ParseError):
        parse_statements("IF a THEN " * deep + "x := 1;" + " END_IF;" * deep)
    for source in ("a[" * deep + "1" + "]" * deep, "f(" * deep + ")" * deep, "x" + ".y" * 500, "a" + "[1]" * 500):
        with pytest.raises(ParseError) as info:
            parse_expression(source)
        assert "nesting deeper than" in info.value.found
    shallow = MAX_NESTING // 2
    assert render_st(parse_expression("(" * shallow + "1" + ")" * shallow)) == "1"
    assert render_st(parse_expression("a[" * shallow + "1" + "]" * shallow)) == "a[" * shallow + "1" + "]" * shallow
    assert render_st(parse_expression("x.1.2")) == "x.1.2"


def test_fuzz_only_parse_errors():
    rng = random.Random(20251018)
    parsed = 0
    for _ in range(3000):
        source = ' '.join(rng.choice(FUZZ_PIECES) for _ in range(rng.randint(1, 30)))
        size = len(source.encode('utf-8'))
        for parse in (parse_statements, parse_expression):
            try:
                ast = parse(source)
            except ParseError as exc:
                assert 0 <= exc.position <= exc.end <= size
                continue
            parsed += 1
            assert ast_shape(parse(render_st(ast))) == ast_shape(ast)
    assert parsed > 0


VARIABLES = [VariableDecl('xStart', 'BOOL', None, 'input'), VariableDecl('xOut', 'BOOL', None, 'output'),
             VariableDecl('nCount', 'INT', '0', 'local')]


@pytest.fixture
def table():
    table, diagnostics = SymbolTable.from_variables(VARIABLES)
    assert diagnostics == []
    return table


@pytest.mark.parametrize('source', [
    "xOut := xStart AND nCount > 3;",
    "XOUT := xstart;",
    "nCount := MAX(nCount, 3) + REAL_TO_INT(INT_TO_REAL(1));",
    "CASE nCount OF Idle, Busy: xOut := TRUE; END_CASE;",
    "%QX0.0 := xStart;",
    "nCount := INT#5;",
    "TON(IN := xStart, PT := T#2s);",
])
def test_symbols_resolved(table, source):
    assert check_symbols(parse_statements(source), table) == []


def test_undeclared_identifiers(table):
    diagnostics = check_symbols(parse_statements("xOut := xStrat OR yMissing;"), table)
    assert [(d.code, d.element, d.span) for d in diagnostics] == [
        (DiagCode.UNDECLARED, 'xStrat', (8, 14)), (DiagCode.UNDECLARED, 'yMissing', (18, 26))]


@pytest.mark.parametrize('source, flagged', [
    ("nCount := MAX;", ['MAX']),
    ("tDelay(IN := xStart);", ['tDelay']),
    ("xOut := stMotor.xRun;", ['stMotor']),
    ("xOut := S1.X;", ['S1']),
])
def test_flagged_names(table, source, flagged):
    assert [d.element for d in check_symbols(parse_statements(source), table)] == flagged


def test_extra_names_and_builtins(table):
    ast = parse_statements("xOut := S1.X; nCount := Scale(nCount);")
    assert check_symbols(ast, table, builtins={'scale'}, extra_names=['s1']) == []


def test_section_collision():
    _, diagnostics = SymbolTable.from_variables(VARIABLES + [VariableDecl('XSTART', 'INT', None, 'local')])
    assert [(d.code, d.element) for d in diagnostics] == [(DiagCode.DUPLICATE_NAME, 'XSTART')]


def test_check_chart_st():
    sfc = make_chart('Main', [('S0', [('xGo AND S1.X', 'S1')]), ('S1', [('xBad', 'S0', True)])],
                     variables=[VariableDecl('xGo', 'BOOL', None, 'input')],
                     actions={'S0': 'x := ;', 'S1': 'xOut := 1;'})
    diagnostics = check_chart_st(sfc)
    assert [(d.code, d.element) for d in diagnostics] == [
        (DiagCode.ST_SYNTAX, 'S0'), (DiagCode.UNDECLARED, 'S1: xOut'), (DiagCode.UNDECLARED, 'S1->S0: xBad')]
    assert diagnostics[0].span == (5, 6)


def test_deep_subscript_is_syntax_error():
    sfc = make_chart('Main', [('S0', [('x', 'S1')]), ('S1', [])],
                     variables=[VariableDecl('x', 'BOOL', None, 'input'), VariableDecl('a', 'INT', None, 'local')],
                     actions={'S1': 'a := ' + 'a[' * 120 + '1' + ']' * 120 + ';'})
    diagnostics = check_chart_st(sfc)
    assert [(d.code, d.element) for d in diagnostics] == [(DiagCode.ST_SYNTAX, 'S1')]


def test_parallel_guard_checked_once():
    sfc = make_chart('Main', [('S0', [('xMissing', 'A'), ('xMissing', 'B')]), ('A', []), ('B', [])],
                     variables=[])
    assert [d.element for d in check_chart_st(sfc)] == ['S0->A: xMissing']


@pytest.mark.parametrize('seed', range(40))
def test_generated_charts_clean(seed):
    assert check_chart_st(chart_factory.random_chart(seed)) == []
