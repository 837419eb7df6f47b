# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Identifier resolution of ST fragments against a chart's variable interface.

No type checking is done: every name occurrence must resolve to a declared variable (any section; outputs are
readable), to an extra name supplied by the caller (e.g. step names for `S1.X`/`S1.T` step flags), or, in call
position only, to a builtin function or function block.
"""
import re
from collections.abc import Mapping

from sfctools.model import (Diagnostic, DiagCode, group_edges)
from sfctools.sfc_exceptions import ParseError
from sfctools.st.ast import (walk, Name, Call, Case, Range)
from sfctools.st.parser import (parse_statements, parse_expression)

__all__ = ['DEFAULT_BUILTINS', 'SymbolTable', 'check_symbols', 'check_chart_st']

DEFAULT_BUILTINS = frozenset((
    # standard function blocks
    'TON', 'TOF', 'TP', 'CTU', 'CTD', 'CTUD', 'R_TRIG', 'F_TRIG', 'SR', 'RS',
    # standard functions
    'ABS', 'SQRT', 'LN', 'LOG', 'EXP', 'SIN', 'COS', 'TAN', 'ASIN', 'ACOS', 'ATAN', 'ADD', 'SUB', 'MUL', 'DIV',
    'MAX', 'MIN', 'LIMIT', 'SEL', 'MUX', 'MOVE', 'LEN', 'LEFT', 'RIGHT', 'MID', 'CONCAT', 'INSERT', 'DELETE',
    'REPLACE', 'FIND', 'SHL', 'SHR', 'ROL', 'ROR', 'TRUNC',
))
CONVERSION_RE = re.compile(r'[A-Z]+_TO_[A-Z]+\Z')


class SymbolTable(Mapping):
    """
    Case-insensitive map: identifier => `VariableDecl`, merged over the input, output and local sections.
    """
    def __init__(self, variables=()):
        self._decls = {}
        for var in variables:
            self._decls.setdefault(var.name.upper(), var)

    @classmethod
    def from_variables(cls, variables):
        """
        Builds a table and reports names declared in more than one section (first declaration wins).

        :return: (table, diagnostics)
        :rtype:  tuple(SymbolTable, list(Diagnostic))
        """
        seen = {}
        diagnostics = []
        for var in variables:
            first = seen.setdefault(var.name.upper(), var)
            if first is not var and first.section != var.section:
                diagnostics.append(Diagnostic(DiagCode.DUPLICATE_NAME, var.name,
                                              "declared in both {} and {} sections".format(first.section,
                                                                                           var.section)))
        return cls(variables), diagnostics

    def __getitem__(self, name):
        return self._decls[name.upper()]

    def __iter__(self):
        return iter(self._decls)

    def __len__(self):
        return len(self._decls)

    def __contains__(self, name):
        return isinstance(name, str) and name.upper() in self._decls


def _skipped_names(ast):
    """ Ids of Name nodes that are not variable references: case enumeration labels. """
    skipped = set()
    for node in walk(ast):
        if isinstance(node, Case):
            for clause in node.clauses:
                for label in clause.labels:
                    for part in ((label.low, label.high) if isinstance(label, Range) else (label,)):
                        if isinstance(part, Name):
                            skipped.add(id(part))
    return skipped


def check_symbols(ast, table, builtins=DEFAULT_BUILTINS, extra_names=()):
    """
    Resolves every identifier occurrence of a parsed fragment.

    :param ast:         Parsed statement list or expression
    :type  ast:         namedtuple
    :param table:       Declared variables
    :type  table:       SymbolTable
    :param builtins:    Callable names never flagged in call position (case-insensitive)
    :type  builtins:    Iterable(str)
    :param extra_names: Additional readable names (case-insensitive)
    :type  extra_names: Iterable(str)

    :return: One UndeclaredIdentifier diagnostic per unresolved occurrence, in source order
    :rtype:  list(Diagnostic)

    .. note::
     * Member fields, named-argument names, enumeration case labels, typed-literal type names and direct
       addresses are not resolved.
     * Type conversion functions (`INT_TO_REAL` etc.) count as builtins.
    """
    builtins = {b.upper() for b in builtins}
    extra = {n.upper() for n in extra_names}
    skipped = _skipped_names(ast)
    callees = {id(node.func) for node in walk(ast) if isinstance(node, Call)}
    diagnostics = []
    for node in walk(ast):
        if not isinstance(node, Name) or id(node) in skipped or node.name.startswith('%'):
            continue
        upper = node.name.upper()
        if node.name in table or upper in extra:
            continue
        if id(node) in callees and (upper in builtins or CONVERSION_RE.match(upper)):
            continue
        diagnostics.append(Diagnostic(DiagCode.UNDECLARED, node.name,
                                      "identifier '{}' is not declared".format(node.name), span=node.span))
    return sorted(diagnostics, key=lambda d: d.span)


def check_chart_st(sfc, builtins=DEFAULT_BUILTINS):
    """
    Parses and resolves every action and transition condition of a chart.

    :param sfc:      Chart
    :type  sfc:      ReducedSfc
    :param builtins: See `check_symbols()`

    :return: Diagnostics: section collisions, then per step (chart order) its action, then its guards; guard
             diagnostics name the first edge of each group ("S1->S2"), action diagnostics the step
    :rtype:  list(Diagnostic)
    """
    table, diagnostics = SymbolTable.from_variables(sfc.variables)
    steps = sfc.step_names
    for step in sfc.steps:
        fragments = []
        if step.action is not None:
            fragments.append((step.name, step.action, parse_statements))
        for group in group_edges(step):
            fragments.append(("{}->{}".format(step.name, group.edges[0].target), group.edges[0].guard,
                              parse_expression))
        for element, text, parse in fragments:
            try:
                ast = parse(text)
            except ParseError as exc:
                diagnostics.append(Diagnostic(DiagCode.ST_SYNTAX, element, str(exc), span=exc.span))
                continue
            diagnostics.extend(d._replace(element="{}: {}".format(element, d.element))
                               for d in check_symbols(ast, table, builtins, extra_names=steps))
    return diagnostics

