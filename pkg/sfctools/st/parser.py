# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Recursive-descent parser for the Structured Text subset used in SFC actions and transition conditions.

Supported: assignments, IF/ELSIF/ELSE, CASE (integer, range and enumeration labels), FOR, WHILE, REPEAT, EXIT,
RETURN, empty statements, procedure/function-block calls with positional, named (`:=`) and output (`=>`)
arguments, member access, array subscripts.  The `;` after END_IF/END_CASE/END_FOR/END_WHILE/END_REPEAT is
optional.

Expression precedence, loosest first: OR, XOR, AND (`&`), comparison (`= <> < > <= >=`), `+ -`, `* / MOD`, `**`,
unary (`NOT`, `-`), primary.  Binary operators associate to the left.
"""
from sfctools.sfc_exceptions import ParseError
from sfctools.st.lexer import (tokenize, describe)
from sfctools.st.ast import (Literal, Name, Member, Index, Call, Arg, Unary, Binary, Range, Assign, CallStmt, If,
                             CaseClause, Case, For, While, Repeat, Exit, Return, Empty, StatementList)

__all__ = ['parse_statements', 'parse_expression', 'MAX_NESTING']

MAX_NESTING = 64

STATEMENT_START = ('IDENT', 'DIRECT', 'IF', 'CASE', 'FOR', 'WHILE', 'REPEAT', 'EXIT', 'RETURN', 'SEMI')
BINARY_LEVELS = (
    {'OR': 'OR'},
    {'XOR': 'XOR'},
    {'AND': 'AND', 'AMPERSAND': 'AND'},
    {'EQ': '=', 'NE': '<>', 'LT': '<', 'GT': '>', 'LE': '<=', 'GE': '>='},
    {'PLUS': '+', 'MINUS': '-'},
    {'TIMES': '*', 'DIVIDE': '/', 'MOD': 'MOD'},
    {'POWER': '**'},
)
BINARY_OPERATORS = frozenset(t for level in BINARY_LEVELS for t in level) - {'MINUS'}
LITERAL_KINDS = {'INTEGER': 'integer', 'REAL': 'real', 'TIME': 'time', 'TYPED': 'typed', 'STRING': 'string',
                 'TRUE': 'bool', 'FALSE': 'bool'}
EXPRESSION = 'expression'
STATEMENT = 'statement'


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        self.depth = 0

    @property
    def tok(self):
        return self.tokens[self.pos]

    def peek(self, offset=1):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *types):
        return self.tok.type in types

    def advance(self):
        tok = self.tok
        if tok.type != 'EOF':
            self.pos += 1
        return tok

    def fail(self, *expected):
        tok = self.tok
        found = describe('EOF') if tok.type == 'EOF' else repr(tok.value)
        raise ParseError(tok.start, [e if e in (STATEMENT, EXPRESSION) else describe(e) for e in expected], found,
                         tok.end)

    def expect(self, *types):
        if not self.at(*types):
            self.fail(*types)
        return self.advance()

    def span(self, start):
        """ Span from byte offset `start` to the end of the last consumed token. """
        return start, self.tokens[self.pos - 1].end

    def nest(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            tok = self.tok
            raise ParseError(tok.start, ("shallower nesting",), "nesting deeper than {}".format(MAX_NESTING),
                             tok.end)

    # ---- statements

    def statements(self, *terminators):
        """ Statements up to (not including) one of the terminator tokens. """
        body = []
        while self.at(*STATEMENT_START):
            body.append(self.statement())
        if not self.at(*terminators):
            self.fail(STATEMENT, *terminators)
        return tuple(body)

    def end_keyword(self, keyword):
        self.expect(keyword)
        if self.at('SEMI'):
            self.advance()

    def statement(self):
        self.nest()
        start = self.tok.start
        kind = self.tok.type
        if kind == 'IF':
            node = self.if_statement(start)
        elif kind == 'CASE':
            node = self.case_statement(start)
        elif kind == 'FOR':
            node = self.for_statement(start)
        elif kind == 'WHILE':
            self.advance()
            cond = self.expression()
            self.expect('DO')
            body = self.statements('END_WHILE')
            self.end_keyword('END_WHILE')
            node = While(cond, body, self.span(start))
        elif kind == 'REPEAT':
            self.advance()
            body = self.statements('UNTIL')
            self.advance()
            cond = self.expression()
            self.end_keyword('END_REPEAT')
            node = Repeat(body, cond, self.span(start))
        elif kind in ('EXIT', 'RETURN'):
            self.advance()
            self.expect('SEMI')
            node = (Exit if kind == 'EXIT' else Return)(self.span(start))
        elif kind == 'SEMI':
            self.advance()
            node = Empty(self.span(start))
        else:
            node = self.simple_statement(start)
        self.depth -= 1
        return node

    def simple_statement(self, start):
        target = self.designator()
        if self.at('ASSIGN'):
            if isinstance(target, Call):
                self.fail('SEMI')
            self.advance()
            value = self.expression()
            self.expect('SEMI')
            return Assign(target, value, self.span(start))
        if isinstance(target, Call):
            self.expect('SEMI')
            return CallStmt(target, self.span(start))
        return self.fail('ASSIGN', 'LPAREN', 'DOT', 'LBRACKET')

    def if_statement(self, start):
        branches = []
        self.advance()
        while True:
            cond = self.expression()
            self.expect('THEN')
            branches.append((cond, self.statements('ELSIF', 'ELSE', 'END_IF')))
            if not self.at('ELSIF'):
                break
            self.advance()
        else_body = None
        if self.at('ELSE'):
            self.advance()
            else_body = self.statements('END_IF')
        self.end_keyword('END_IF')
        return If(tuple(branches), else_body, self.span(start))

    def case_statement(self, start):
        self.advance()
        selector = self.expression()
        self.expect('OF')
        clauses = []
        while self.label_ahead():
            clause_start = self.tok.start
            labels = [self.case_label()]
            while self.at('COMMA'):
                self.advance()
                labels.append(self.case_label())
            self.expect('COLON')
            body = []
            while self.at(*STATEMENT_START) and not self.label_ahead():
                body.append(self.statement())
            clauses.append(CaseClause(tuple(labels), tuple(body), self.span(clause_start)))
        if not clauses:
            self.fail('INTEGER', 'IDENT')
        else_body = None
        if self.at('ELSE'):
            self.advance()
            else_body = self.statements('END_CASE')
        if not self.at('END_CASE'):
            self.fail(STATEMENT, 'INTEGER', 'ELSE', 'END_CASE')
        self.end_keyword('END_CASE')
        return Case(selector, tuple(clauses), else_body, self.span(start))

    def label_ahead(self):
        """ True if a CASE label (rather than a statement) starts here. """
        if self.at('INTEGER', 'MINUS', 'TYPED'):
            return True
        return self.at('IDENT') and self.peek().type in ('COLON', 'COMMA', 'DOTDOT')

    def case_value(self):
        start = self.tok.start
        if self.at('MINUS'):
            self.advance()
            tok = self.expect('INTEGER')
            return Literal('integer', '-' + tok.value, self.span(start))
        if self.at('IDENT'):
            return Name(self.advance().value, self.span(start))
        tok = self.expect('INTEGER', 'TYPED')
        return Literal(LITERAL_KINDS[tok.type], tok.value, self.span(start))

    def case_label(self):
        start = self.tok.start
        low = self.case_value()
        if not self.at('DOTDOT'):
            return low
        self.advance()
        return Range(low, self.case_value(), self.span(start))

    def for_statement(self, start):
        self.advance()
        tok = self.expect('IDENT')
        var = Name(tok.value, (tok.start, tok.end))
        self.expect('ASSIGN')
        first = self.expression()
        self.expect('TO')
        last = self.expression()
        step = None
        if self.at('BY'):
            self.advance()
            step = self.expression()
        self.expect('DO')
        body = self.statements('END_FOR')
        self.end_keyword('END_FOR')
        return For(var, first, last, step, body, self.span(start))

    # ---- expressions

    def expression(self, level=0):
        if level == len(BINARY_LEVELS):
            return self.unary()
        start = self.tok.start
        operators = BINARY_LEVELS[level]
        left = self.expression(level + 1)
        while self.tok.type in operators:
            op_tok = self.advance()
            if self.tok.type in BINARY_OPERATORS:
                spacing = '' if op_tok.end == self.tok.start else ' '
                raise ParseError(op_tok.start, (EXPRESSION,), repr(op_tok.value + spacing + self.tok.value),
                                 self.tok.end)
            op = operators[op_tok.type]
            right = self.expression(level + 1)
            left = Binary(op, left, right, self.span(start))
        return left

    def unary(self):
        start = self.tok.start
        if self.at('NOT', 'MINUS'):
            self.nest()
            op = 'NOT' if self.advance().type == 'NOT' else '-'
            node = Unary(op, self.unary(), self.span(start))
            self.depth -= 1
            return node
        return self.primary()

    def primary(self):
        start = self.tok.start
        tok = self.tok
        if tok.type in LITERAL_KINDS:
            self.advance()
            return Literal(LITERAL_KINDS[tok.type], tok.value, self.span(start))
        if tok.type == 'LPAREN':
            self.nest()
            self.advance()
            node = self.expression()
            self.expect('RPAREN')
            self.depth -= 1
            return node
        if tok.type in ('IDENT', 'DIRECT'):
            return self.designator()
        return self.fail(EXPRESSION)

    def designator(self):
        """ Identifier followed by any number of member accesses, subscripts and call argument lists. """
        start = self.tok.start
        tok = self.expect('IDENT', 'DIRECT')
        node = Name(tok.value, self.span(start))
        if tok.type == 'DIRECT':
            return node
        levels = 0
        while self.at('DOT', 'LBRACKET', 'LPAREN'):
            self.nest()
            levels += 1
            if self.at('DOT'):
                self.advance()
                node = Member(node, self.expect('IDENT', 'INTEGER').value, self.span(start))
            elif self.at('LBRACKET'):
                self.advance()
                indices = [self.expression()]
                while self.at('COMMA'):
                    self.advance()
                    indices.append(self.expression())
                self.expect('RBRACKET')
                node = Index(node, tuple(indices), self.span(start))
            else:
                node = Call(node, self.arguments(), self.span(start))
        self.depth -= levels
        return node

    def arguments(self):
        self.expect('LPAREN')
        args = []
        if not self.at('RPAREN'):
            args.append(self.argument())
            while self.at('COMMA'):
                self.advance()
                args.append(self.argument())
        self.expect('RPAREN')
        return tuple(args)

    def argument(self):
        start = self.tok.start
        if self.at('IDENT') and self.peek().type in ('ASSIGN', 'OUTPUT_ASSIGN'):
            name = self.advance().value
            output = self.advance().type == 'OUTPUT_ASSIGN'
            value = self.designator() if output else self.expression()
            return Arg(name, value, output, self.span(start))
        value = self.expression()
        return Arg(None, value, False, self.span(start))


def parse_statements(text):
    """
    Parses an ST statement sequence (an action body).

    :param text: ST source
    :type  text: str

    :return: Statement list (empty for blank input)
    :rtype:  StatementList

    :raises ParseError: Syntax error; `position`/`end` delimit the offending token, `expected` lists what would
                        have been accepted there
    """
    parser = _Parser(text)
    statements = parser.statements('EOF')
    span = (statements[0].span[0], statements[-1].span[1]) if statements else (0, 0)
    return StatementList(statements, span)


def parse_expression(text):
    """
    Parses a single ST expression (a transition condition); no boolean typing is enforced.

    :raises ParseError: Syntax error, including trailing input after a complete expression
    """
    parser = _Parser(text)
    node = parser.expression()
    parser.expect('EOF')
    return node
