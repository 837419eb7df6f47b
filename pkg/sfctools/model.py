# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Reduced SFC data model.

A chart (`ReducedSfc`) is a POU name, a variable interface and an ordered list of steps; each step carries its
ST action, an optional comment and an ordered list of guarded child edges.  Divergence and convergence structure
is not stored: it is inferred from guard text (see `branch_groups()` and `sfctools.codecs.normalize`).

.. note::
 * All types are immutable (tuples throughout); all operations are pure.
 * Edge order is significant and preserved by every codec; no priority semantics are attached to it.
"""
import re
from collections import namedtuple
from collections.abc import Mapping
from enum import Enum

from sfctools.sfc_exceptions import ChartValidationError

__all__ = ['SECTIONS', 'Severity', 'DiagCode', 'Diagnostic', 'VariableDecl', 'Edge', 'StepNode', 'ReducedSfc',
           'BranchKind', 'BranchGroup', 'BranchGrouping', 'StatsRecord', 'is_iec_identifier', 'group_edges',
           'validate_reduced', 'branch_groups', 'topology_stats']

SECTIONS = ('input', 'output', 'local')

IDENTIFIER_RE = re.compile(r'[A-Za-z_][A-Za-z0-9_]*\Z')


def is_iec_identifier(text):
    """
    Determines whether text satisfies IEC 61131-3 identifier lexical rules.

    .. note::
     * Letter or underscore start, then letters/digits/underscores; no double underscore, no trailing underscore.
    """
    return (isinstance(text, str) and bool(IDENTIFIER_RE.match(text))
            and '__' not in text and not text.endswith('_'))


class Severity(Enum):
    """ Diagnostic severity. """
    ERROR = 'error'
    WARNING = 'warning'


class DiagCode(Enum):
    """ Diagnostic codes shared by validation, safety and ST checks. """
    INIT_STEP = 'InitStepError'
    TRANSITION = 'TransitionError'
    DUPLICATE_NAME = 'DuplicateName'
    BAD_IDENTIFIER = 'BadIdentifier'
    ILLEGAL_JUMP = 'IllegalJump'
    BAD_CONNECTIVITY = 'BadConnectivity'
    UNDECLARED = 'UndeclaredIdentifier'
    ST_SYNTAX = 'StSyntaxError'


class Diagnostic(namedtuple('Diagnostic', "code element message severity span",
                            defaults=(Severity.ERROR, None))):
    """
    One finding about a chart or an ST fragment.

    :ivar code:     Diagnostic code
    :ivar element:  Name of the offending element (step, edge "S1->S2", variable, identifier)
    :ivar message:  Human-readable explanation
    :ivar severity: ERROR or WARNING
    :ivar span:     (start, end) byte offsets into the source text the diagnostic refers to, if any
    """
    __slots__ = ()

    @property
    def is_error(self):
        """ True if this diagnostic blocks further processing. """
        return self.severity is Severity.ERROR

    def __str__(self):
        return "{}: {}: {}".format(self.code.value, self.element, self.message)

    def render(self, filename, source=None):
        """
        Renders the diagnostic in compiler style (`file:line:col: code: message`).

        :param filename: Name reported for the source
        :type  filename: str
        :param source:   Source text the span refers to (None => no line/column available)
        :type  source:   Union(str, None)
        """
        if self.span is None or source is None:
            return "{}: {}: {}: {}".format(filename, self.code.value, self.element, self.message)
        data = source.encode('utf-8')
        start = min(self.span[0], len(data))
        line = data.count(b'\n', 0, start) + 1
        col = start - (data.rfind(b'\n', 0, start) + 1) + 1
        return "{}:{}:{}: {}: {}".format(filename, line, col, self.code.value, self.message)


class VariableDecl(namedtuple('VariableDecl', "name data_type default_value section",
                              defaults=(None, 'local'))):
    """ Variable interface entry: name, ST type name, optional ST literal default, section. """
    __slots__ = ()

    def __new__(cls, name, data_type, default_value=None, section='local'):
        if section not in SECTIONS:
            raise ValueError("variable section must be one of {}, not {!r}".format(SECTIONS, section))
        return super().__new__(cls, name, data_type, default_value, section)


class Edge(namedtuple('Edge', "guard target is_jump", defaults=(False,))):
    """ Guarded child edge of a step; `is_jump` marks a child reached through a jump step. """
    __slots__ = ()


class StepNode(namedtuple('StepNode', "name is_initial action comment children",
                          defaults=(False, None, None, ()))):
    """
    Chart step.

    .. note::
     * `action` None (no action block) is distinct from '' (empty action block).
    """
    __slots__ = ()

    def __new__(cls, name, is_initial=False, action=None, comment=None, children=()):
        return super().__new__(cls, name, bool(is_initial), action, comment, tuple(children))


class ReducedSfc(namedtuple('ReducedSfc', "pou_name variables steps", defaults=((), ()))):
    """
    Reduced SFC chart: one POU.

    .. note::
     * Variables are kept grouped by section (input, output, local), preserving order within a section, which is
       the order every codec produces.
    """
    __slots__ = ()

    def __new__(cls, pou_name, variables=(), steps=()):
        variables = tuple(sorted(variables, key=lambda v: SECTIONS.index(v.section)))
        return super().__new__(cls, pou_name, variables, tuple(steps))

    @property
    def step_names(self):
        """ Step names in chart order. """
        return [s.name for s in self.steps]

    def step(self, name):
        """ Returns the first step named `name`, or None. """
        return next((s for s in self.steps if s.name == name), None)

    def section(self, section):
        """ Variables of one section, in order. """
        return [v for v in self.variables if v.section == section]


class BranchKind(Enum):
    """ Role of a group of outgoing edges. """
    PARALLEL = 'parallel'
    ALTERNATIVE = 'alternative'


BranchGroup = namedtuple('BranchGroup', "kind guard indices edges")
BranchGroup.__doc__ = """ Outgoing edges of one step sharing (trimmed) guard text; indices are child positions. """

StatsRecord = namedtuple('StatsRecord', "steps edges jumps parallel_groups max_out_degree")
StatsRecord.__doc__ = """ Chart topology counts. """


class BranchGrouping(Mapping):
    """ Read-only mapping: source step name => tuple of `BranchGroup`, in chart order. """
    def __init__(self, groups):
        self._groups = dict(groups)

    def __getitem__(self, step_name):
        return self._groups[step_name]

    def __iter__(self):
        return iter(self._groups)

    def __len__(self):
        return len(self._groups)

    @property
    def parallel_count(self):
        """ Total number of parallel groups over all steps. """
        return sum(1 for groups in self._groups.values() for g in groups if g.kind is BranchKind.PARALLEL)


def group_edges(step):
    """
    Partitions the outgoing edges of one step: edges with identical guard text (after trimming surrounding
    whitespace) form a parallel group if there are two or more of them, otherwise an alternative singleton.

    :return: Groups ordered by first occurrence; indices within a group in chart order
    :rtype:  tuple(BranchGroup)
    """
    by_guard = {}
    for index, edge in enumerate(step.children):
        by_guard.setdefault(edge.guard.strip(), []).append(index)
    return tuple(BranchGroup(BranchKind.PARALLEL if len(indices) > 1 else BranchKind.ALTERNATIVE,
                             guard, tuple(indices), tuple(step.children[i] for i in indices))
                 for guard, indices in by_guard.items())


def validate_reduced(sfc, strict=True):
    """
    Checks all chart invariants.

    :param sfc:    Chart to check (may be arbitrarily invalid)
    :type  sfc:    ReducedSfc
    :param strict: False => multiple initial steps are only a warning (IEC permits them)
    :type  strict: bool

    :return: Diagnostics, deterministic order: initial steps, identifiers, duplicates, edge targets
    :rtype:  list(Diagnostic)
    """
    diagnostics = []
    initial = [s.name for s in sfc.steps if s.is_initial]
    if not initial:
        diagnostics.append(Diagnostic(DiagCode.INIT_STEP, sfc.pou_name, "chart has no initial step"))
    elif len(initial) > 1:
        diagnostics.append(Diagnostic(DiagCode.INIT_STEP, ', '.join(initial),
                                      "chart has {} initial steps".format(len(initial)),
                                      Severity.ERROR if strict else Severity.WARNING))

    if not is_iec_identifier(sfc.pou_name):
        diagnostics.append(Diagnostic(DiagCode.BAD_IDENTIFIER, sfc.pou_name, "POU name is not an IEC identifier"))
    for var in sfc.variables:
        if not is_iec_identifier(var.name):
            diagnostics.append(Diagnostic(DiagCode.BAD_IDENTIFIER, var.name,
                                          "{} variable name is not an IEC identifier".format(var.section)))
    for step in sfc.steps:
        if not is_iec_identifier(step.name):
            diagnostics.append(Diagnostic(DiagCode.BAD_IDENTIFIER, step.name, "step name is not an IEC identifier"))

    seen = set()
    for var in sfc.variables:
        if (var.section, var.name) in seen:
            diagnostics.append(Diagnostic(DiagCode.DUPLICATE_NAME, var.name,
                                          "{} variable declared more than once".format(var.section)))
        seen.add((var.section, var.name))
    seen = set()
    for step in sfc.steps:
        if step.name in seen:
            diagnostics.append(Diagnostic(DiagCode.DUPLICATE_NAME, step.name, "step name used more than once"))
        seen.add(step.name)

    for step in sfc.steps:
        for edge in step.children:
            element = "{}->{}".format(step.name, edge.target)
            if not edge.guard.strip():
                diagnostics.append(Diagnostic(DiagCode.TRANSITION, element, "transition has an empty guard"))
            if edge.target not in seen:
                diagnostics.append(Diagnostic(DiagCode.TRANSITION, element,
                                              "transition target '{}' is not a step".format(edge.target)))
    return diagnostics


def branch_groups(sfc):
    """
    Infers parallel and alternative branching for every step of a valid chart.

    :raises ChartValidationError: Chart has validation errors (callers validate first)
    """
    errors = [d for d in validate_reduced(sfc, strict=False) if d.is_error]
    if errors:
        raise ChartValidationError(errors)
    return BranchGrouping((step.name, group_edges(step)) for step in sfc.steps)


def topology_stats(sfc):
    """ Counts steps, edges, jumps, parallel groups and the maximum out-degree of a chart as stored. """
    edges = [e for s in sfc.steps for e in s.children]
    return StatsRecord(steps=len(sfc.steps),
                       edges=len(edges),
                       jumps=sum(1 for e in edges if e.is_jump),
                       parallel_groups=sum(1 for s in sfc.steps for g in group_edges(s)
                                           if g.kind is BranchKind.PARALLEL),
                       max_out_degree=max((len(s.children) for s in sfc.steps), default=0))
