# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Reduced chart model: validation, branch grouping, topology statistics. """
import pytest

from sfctools.model import (Severity, DiagCode, Diagnostic, VariableDecl, Edge, StepNode, ReducedSfc, BranchKind,
                            is_iec_identifier, group_edges, validate_reduced, branch_groups, topology_stats)
from sfctools.sfc_exceptions import ChartValidationError

import chart_factory
from chart_factory import make_chart


def fan_out(guards):
    """ S0 with one edge per guard, each to its own target step. """
    targets = ['T{}'.format(n) for n in range(len(guards))]
    return make_chart('Fan', [('S0', list(zip(guards, targets)))] + [(t, []) for t in targets])


@pytest.mark.parametrize('text, expected', [
    ('xStart', True), ('_tmp1', True), ('S0', True), ('a__b', False), ('trailing_', False), ('1abc', False),
    ('', False), ('has space', False), ('Größe', False), (None, False),
])
def test_iec_identifier(text, expected):
    assert is_iec_identifier(text) is expected


def test_minimal_chart_valid():
    sfc = make_chart('Main', [('S0', [('xGo', 'S1')]), ('S1', [])])
    assert validate_reduced(sfc) == []


def test_no_initial_step():
    sfc = make_chart('Main', [('S0', [('xGo', 'S1')]), ('S1', [])], initial=[])
    assert [d.code for d in validate_reduced(sfc)] == [DiagCode.INIT_STEP]


def test_dangling_target():
    sfc = make_chart('Main', [('S0', [('xGo', 'S1')]), ('S1', [('xBack', 'S9')])])
    diagnostics = validate_reduced(sfc)
    assert [(d.code, d.element) for d in diagnostics] == [(DiagCode.TRANSITION, 'S1->S9')]


def test_multiple_initial_steps_strictness():
    sfc = make_chart('Main', [('S0', [('xGo', 'S1')]), ('S1', [])], initial=['S0', 'S1'])
    strict = validate_reduced(sfc, strict=True)
    lenient = validate_reduced(sfc, strict=False)
    assert [d.code for d in strict] == [DiagCode.INIT_STEP] and strict[0].is_error
    assert lenient[0].severity is Severity.WARNING and not lenient[0].is_error


def test_diagnostic_order_and_purity():
    sfc = ReducedSfc('bad name', [VariableDecl('x', 'BOOL', None, 'input'), VariableDecl('x', 'BOOL', None, 'input')],
                     [StepNode('S0', False, children=[Edge(' ', 'S1')]), StepNode('S0'), StepNode('9lives')])
    diagnostics = validate_reduced(sfc)
    assert [d.code for d in diagnostics] == [DiagCode.INIT_STEP, DiagCode.BAD_IDENTIFIER, DiagCode.BAD_IDENTIFIER,
                                             DiagCode.DUPLICATE_NAME, DiagCode.DUPLICATE_NAME, DiagCode.TRANSITION,
                                             DiagCode.TRANSITION]
    assert validate_reduced(sfc) == diagnostics


def test_variable_section_checked():
    with pytest.raises(ValueError):
        VariableDecl('x', 'BOOL', None, 'global')


def test_variables_grouped_by_section():
    sfc = ReducedSfc('Main', [VariableDecl('l', 'INT', '0', 'local'), VariableDecl('o', 'BOOL'),
                              VariableDecl('i', 'BOOL', None, 'input'), VariableDecl('o2', 'BOOL', None, 'output')],
                     [StepNode('S0', True)])
    assert [v.name for v in sfc.variables] == ['i', 'o2', 'l', 'o']
    assert [v.name for v in sfc.section('local')] == ['l', 'o']


def test_empty_action_distinct_from_none():
    assert StepNode('S0', action='') != StepNode('S0')
    assert StepNode('S0').action is None


def test_diagnostic_render():
    diag = Diagnostic(DiagCode.ST_SYNTAX, 'S1', "unexpected ';'", span=(10, 11))
    assert diag.render('chart.red', 'ab\ncdé\nxy;') == "chart.red:3:3: StSyntaxError: unexpected ';'"
    assert diag.render('chart.red') == "chart.red: StSyntaxError: S1: unexpected ';'"
    assert str(diag) == "StSyntaxError: S1: unexpected ';'"


def test_parallel_and_alternative_groups():
    groups = branch_groups(fan_out(['x', 'x', 'y']))['S0']
    assert [(g.kind, g.indices) for g in groups] == [(BranchKind.PARALLEL, (0, 1)), (BranchKind.ALTERNATIVE, (2,))]


def test_single_edge_alternative():
    groups = branch_groups(fan_out(['x']))['S0']
    assert [(g.kind, g.indices) for g in groups] == [(BranchKind.ALTERNATIVE, (0,))]


def test_interleaved_parallel_groups():
    grouping = branch_groups(fan_out(['a', 'b', 'a', 'b']))
    assert [(g.kind, g.guard, g.indices) for g in grouping['S0']] == [
        (BranchKind.PARALLEL, 'a', (0, 2)), (BranchKind.PARALLEL, 'b', (1, 3))]
    assert grouping.parallel_count == 2


def test_guard_whitespace_trimmed():
    groups = group_edges(fan_out(['  x', 'x  ']).steps[0])
    assert [g.kind for g in groups] == [BranchKind.PARALLEL]


def test_branch_groups_rejects_invalid():
    with pytest.raises(ChartValidationError) as info:
        branch_groups(make_chart('Main', [('S0', [('x', 'S7')])]))
    assert info.value.diagnostics[0].code is DiagCode.TRANSITION


@pytest.mark.parametrize('seed', range(40))
def test_groups_partition_edges(seed):
    sfc = chart_factory.random_chart(seed)
    grouping = branch_groups(sfc)
    for step in sfc.steps:
        indices = sorted(i for g in grouping[step.name] for i in g.indices)
        assert indices == list(range(len(step.children)))
        for group in grouping[step.name]:
            assert len({step.children[i].guard.strip() for i in group.indices}) == 1


@pytest.mark.parametrize('seed', range(10))
def test_grouping_invariant_under_renaming(seed):
    sfc = chart_factory.random_chart(seed)
    rename = {name: 'Step_{}'.format(n) for n, name in enumerate(reversed(sfc.step_names))}
    renamed = sfc._replace(steps=tuple(
        s._replace(name=rename[s.name], children=tuple(e._replace(target=rename[e.target]) for e in s.children))
        for s in sfc.steps))
    kinds = [[(g.kind, g.indices) for g in groups] for groups in branch_groups(sfc).values()]
    assert kinds == [[(g.kind, g.indices) for g in groups] for groups in branch_groups(renamed).values()]


def test_stats_minimal():
    stats = topology_stats(make_chart('Main', [('S0', [('xGo', 'S1')]), ('S1', [])]))
    assert (stats.steps, stats.edges, stats.jumps, stats.parallel_groups, stats.max_out_degree) == (2, 1, 0, 0, 1)


def test_stats_parallel_pair(parallel_pair):
    stats = topology_stats(parallel_pair)
    assert stats.parallel_groups == 1
    assert stats.edges == 6
    assert stats.max_out_degree == 2


@pytest.mark.parametrize('seed', range(20))
def test_stats_recount(seed):
    sfc = chart_factory.random_chart(seed, min_steps=10, max_steps=10)
    edges = jumps = parallel = widest = 0
    for step in sfc.steps:
        edges += len(step.children)
        widest = max(widest, len(step.children))
        guards = {}
        for edge in step.children:
            jumps += edge.is_jump
            guards[edge.guard.strip()] = guards.get(edge.guard.strip(), 0) + 1
        parallel += sum(1 for count in guards.values() if count > 1)
    assert topology_stats(sfc) == (10, edges, jumps, parallel, widest)
