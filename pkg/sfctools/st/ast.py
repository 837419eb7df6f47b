# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Structured Text syntax tree.

Every node is a namedtuple whose last field is `span`: the (start, end) byte offsets of the source text it was
parsed from.  Operators are stored in canonical upper-case spelling (`&` is stored as `AND`).
"""
from collections import namedtuple

__all__ = ['Literal', 'Name', 'Member', 'Index', 'Call', 'Arg', 'Unary', 'Binary', 'Range', 'Assign', 'CallStmt',
           'If', 'CaseClause', 'Case', 'For', 'While', 'Repeat', 'Exit', 'Return', 'Empty', 'StatementList',
           'walk', 'ast_shape', 'render_st']


def _node(name, fields, doc):
    cls = namedtuple(name, fields + " span")
    cls.__doc__ = doc
    return cls


# Expressions.
Literal = _node('Literal', "kind text", """ Literal; `kind` in bool, integer, real, time, typed, string. """)
Name = _node('Name', "name", """ Identifier (or opaque direct address such as %IX0.0). """)
Member = _node('Member', "base field", """ Member access `base.field`. """)
Index = _node('Index', "base indices", """ Array subscript `base[i, j]`. """)
Call = _node('Call', "func args", """ Function or function-block call. """)
Arg = _node('Arg', "name value output", """ Call argument; `name` None => positional; `output` => `name => var`. """)
Unary = _node('Unary', "op operand", """ NOT or arithmetic negation ('-'). """)
Binary = _node('Binary', "op left right", """ Binary operation. """)
Range = _node('Range', "low high", """ CASE label range `low..high`. """)

# Statements.
Assign = _node('Assign', "target value", """ Assignment `target := value`. """)
CallStmt = _node('CallStmt', "call", """ Call used as a statement. """)
If = _node('If', "branches else_body", """ IF/ELSIF chain: branches are (condition, statements) pairs. """)
CaseClause = _node('CaseClause', "labels body", """ One CASE selection: labels and statements. """)
Case = _node('Case', "selector clauses else_body", """ CASE statement. """)
For = _node('For', "var start stop step body", """ FOR loop; `step` None => BY omitted. """)
While = _node('While', "cond body", """ WHILE loop. """)
Repeat = _node('Repeat', "body cond", """ REPEAT ... UNTIL loop. """)
Exit = _node('Exit', "", """ EXIT. """)
Return = _node('Return', "", """ RETURN. """)
Empty = _node('Empty', "", """ Empty statement (lone ';'). """)
StatementList = _node('StatementList', "statements", """ Statement sequence (a whole action body). """)

NODE_TYPES = (Literal, Name, Member, Index, Call, Arg, Unary, Binary, Range, Assign, CallStmt, If, CaseClause, Case,
              For, While, Repeat, Exit, Return, Empty, StatementList)


def _is_node(value):
    return isinstance(value, NODE_TYPES)


def walk(node):
    """ Yields a node and all nodes below it, pre-order. """
    stack = [node]
    while stack:
        item = stack.pop()
        if _is_node(item):
            yield item
            children = item[:-1]
        elif isinstance(item, tuple):
            children = item
        else:
            continue
        stack.extend(reversed(children))


def ast_shape(node):
    """
    Span-free comparison form of a tree: nested tuples of (node type name, field values...).

    .. note::
     * Two trees have equal shapes iff they differ at most in source positions.
    """
    if _is_node(node):
        return (type(node).__name__,) + tuple(ast_shape(v) for v in node[:-1])
    if isinstance(node, tuple):
        return tuple(ast_shape(v) for v in node)
    return node


def _expr(node):
    if isinstance(node, Literal):
        return node.text
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Member):
        return "{}.{}".format(_expr(node.base), node.field)
    if isinstance(node, Index):
        return "{}[{}]".format(_expr(node.base), ', '.join(_expr(i) for i in node.indices))
    if isinstance(node, Call):
        return "{}({})".format(_expr(node.func), ', '.join(_arg(a) for a in node.args))
    if isinstance(node, Unary):
        return "({} {})".format(node.op, _expr(node.operand)) if node.op == 'NOT' \
            else "(-{})".format(_expr(node.operand))
    if isinstance(node, Binary):
        return "({} {} {})".format(_expr(node.left), node.op, _expr(node.right))
    if isinstance(node, Range):
        return "{}..{}".format(_expr(node.low), _expr(node.high))
    raise TypeError("not an expression node: {!r}".format(node))


def _arg(arg):
    if arg.name is None:
        return _expr(arg.value)
    return "{} {} {}".format(arg.name, '=>' if arg.output else ':=', _expr(arg.value))


def _block(statements, depth):
    lines = []
    for stmt in statements:
        lines.extend(_statement(stmt, depth))
    return lines


def _statement(node, depth):
    pad = '    ' * depth
    if isinstance(node, Assign):
        return ["{}{} := {};".format(pad, _expr(node.target), _expr(node.value))]
    if isinstance(node, CallStmt):
        return ["{}{};".format(pad, _expr(node.call))]
    if isinstance(node, If):
        lines = []
        for number, (cond, body) in enumerate(node.branches):
            lines.append("{}{} {} THEN".format(pad, 'ELSIF' if number else 'IF', _expr(cond)))
            lines.extend(_block(body, depth + 1))
        if node.else_body is not None:
            lines.append(pad + 'ELSE')
            lines.extend(_block(node.else_body, depth + 1))
        return lines + [pad + 'END_IF;']
    if isinstance(node, Case):
        lines = ["{}CASE {} OF".format(pad, _expr(node.selector))]
        for clause in node.clauses:
            lines.append("{}{}:".format(pad + '    ', ', '.join(_expr(label) for label in clause.labels)))
            lines.extend(_block(clause.body, depth + 2))
        if node.else_body is not None:
            lines.append(pad + 'ELSE')
            lines.extend(_block(node.else_body, depth + 1))
        return lines + [pad + 'END_CASE;']
    if isinstance(node, For):
        step = '' if node.step is None else " BY {}".format(_expr(node.step))
        return (["{}FOR {} := {} TO {}{} DO".format(pad, _expr(node.var), _expr(node.start), _expr(node.stop), step)]
                + _block(node.body, depth + 1) + [pad + 'END_FOR;'])
    if isinstance(node, While):
        return (["{}WHILE {} DO".format(pad, _expr(node.cond))] + _block(node.body, depth + 1)
                + [pad + 'END_WHILE;'])
    if isinstance(node, Repeat):
        return ([pad + 'REPEAT'] + _block(node.body, depth + 1)
                + ["{}UNTIL {}".format(pad, _expr(node.cond)), pad + 'END_REPEAT;'])
    if isinstance(node, Exit):
        return [pad + 'EXIT;']
    if isinstance(node, Return):
        return [pad + 'RETURN;']
    if isinstance(node, Empty):
        return [pad + ';']
    raise TypeError("not a statement node: {!r}".format(node))


def render_st(node):
    """
    Canonical re-print: fully parenthesized expressions, one statement per line, four-space indentation,
    upper-case keywords.

    :param node: Statement list, single statement or expression
    :type  node: namedtuple

    :return: ST source text (statement lists end with a newline; expressions do not)
    :rtype:  str
    """
    if isinstance(node, StatementList):
        return ''.join(line + '\n' for line in _block(node.statements, 0))
    if isinstance(node, (Assign, CallStmt, If, Case, For, While, Repeat, Exit, Return, Empty)):
        return ''.join(line + '\n' for line in _statement(node, 0))
    return _expr(node)
