# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Reduced chart <=> normalized graph. """
import pytest

from sfctools.codecs.normalize import (NodeKind, TransitionInfo, normalize, denormalize, check_graph,
                                       graph_transitions)
from sfctools.sfc_exceptions import (NormalizationError, ChartValidationError)

import chart_factory
from chart_factory import make_chart

K = NodeKind


def replace_node(graph, node_id, **fields):
    return graph._replace(nodes=tuple(n._replace(**fields) if n.id == node_id else n for n in graph.nodes))


@pytest.mark.parametrize('batch', range(10))
def test_round_trip(batch):
    for seed in range(batch * 20, batch * 20 + 20):
        sfc = chart_factory.random_chart(seed)
        graph = normalize(sfc)
        check_graph(graph)
        assert denormalize(graph) == sfc


def test_parallel_target_numbered_before_divergence():
    sfc = chart_factory.parallel_loop_chart()
    graph = normalize(sfc)
    assert graph.names == {1: 'A', 3: 'P', 6: 'B'}
    assert graph.initial_id == 6
    assert graph.children_map()[5] == [1, 6]
    assert graph_transitions(graph) == [TransitionInfo(2, 'g', (6,), (3,), False),
                                        TransitionInfo(4, 'x', (3,), (1, 6), False)]
    assert denormalize(graph) == sfc


@pytest.mark.parametrize('seed', range(40))
def test_round_trip_loop_back(seed):
    sfc = chart_factory.random_chart(seed, loop_back=True)
    graph = normalize(sfc)
    check_graph(graph)
    assert denormalize(graph) == sfc


def test_parallel_pair_graph(parallel_pair):
    graph = normalize(parallel_pair)
    assert [(n.id, n.kind, n.parents) for n in graph.nodes] == [
        (1, K.INITIAL_STEP, ()), (2, K.TRANSITION, (1,)), (3, K.SIMULTANEOUS_DIVERGENCE, (2,)), (4, K.STEP, (3,)),
        (5, K.TRANSITION, (4,)), (6, K.STEP, (5,)), (7, K.SIMULTANEOUS_CONVERGENCE, (6, 12)), (8, K.TRANSITION, (7,)),
        (9, K.STEP, (8,)), (10, K.STEP, (3,)), (11, K.TRANSITION, (10,)), (12, K.STEP, (11,))]
    assert graph.names == {1: 'S0', 4: 'A1', 6: 'A2', 9: 'S2', 10: 'B1', 12: 'B2'}
    assert graph.step_order == (1, 4, 6, 10, 12, 9)
    assert graph.initial_id == 1
    assert graph_transitions(graph) == [
        TransitionInfo(2, 'xStart', (1,), (4, 10), False), TransitionInfo(5, 'xA', (4,), (6,), False),
        TransitionInfo(8, 'xDone', (6, 12), (9,), False), TransitionInfo(11, 'xB', (10,), (12,), False)]


def test_choice_graph(choice):
    graph = normalize(choice)
    kinds = {n.id: n.kind for n in graph.nodes}
    assert kinds[2] is K.SELECTION_DIVERGENCE and kinds[6] is K.SELECTION_CONVERGENCE
    assert graph.node(6).parents == (5, 10)
    assert [(t.id, t.sources, t.targets) for t in graph_transitions(graph)] == [
        (3, (1,), (4,)), (5, (4,), (7,)), (8, (1,), (9,)), (10, (9,), (7,))]


def test_jump_graph(cycle):
    graph = normalize(cycle)
    jump = graph.node(7)
    assert jump.kind is K.JUMP_STEP and jump.target == 'S0' and jump.parents == (6,)
    assert graph_transitions(graph)[-1] == TransitionInfo(6, 'xAgain', (5,), (1,), True)


def test_actions_and_comments_carried():
    sfc = make_chart('Main', [('S0', [('x', 'S1')]), ('S1', [])], actions={'S0': ''}, comments={'S1': 'done'})
    graph = normalize(sfc)
    assert graph.actions == {1: ''}
    assert graph.comments == {3: 'done'}
    assert denormalize(graph) == sfc


def test_unreached_steps_numbered_after_reachable():
    sfc = make_chart('Orphan', [('S2', [('b', 'S1')]), ('S0', [('a', 'S1')]), ('S1', [])], initial='S0')
    graph = normalize(sfc)
    assert graph.names[1] == 'S0'
    assert graph.step_id('S2') == max(graph.names)
    assert denormalize(graph) == sfc


@pytest.mark.parametrize('spec, node, message', [
    ([('S0', [('x', 'A'), (' x', 'B')]), ('A', []), ('B', [])], 'S0->A', "guard whitespace"),
    ([('S0', [('x', 'A'), ('x', 'B', True)]), ('A', []), ('B', [])], 'S0->A', "mixes jump"),
    ([('S0', [('x', 'A', True), ('x', 'S0', True)]), ('A', [])], 'S0->A', "contains a jump"),
    ([('S0', [('x', 'A'), ('x', 'A')]), ('A', [])], 'S0->A', "targets one step twice"),
    ([('S0', [('a', 'A'), ('b', 'B')]), ('A', [('x', 'C')]), ('B', [('x', 'C'), ('x', 'D')]), ('C', []), ('D', [])],
     'B->C', "different targets"),
    ([('S0', [('x', 'A'), ('y', 'B'), ('x', 'C')]), ('A', []), ('B', []), ('C', [])], 'S0->A', "not adjacent"),
    ([('S0', [('s', 'A'), ('s', 'B')]), ('A', [('x', 'C'), ('y', 'D')]), ('B', [('x', 'C')]), ('C', []), ('D', [])],
     'A', "alternative branches"),
    ([('S0', [('s', 'A'), ('s', 'B')]), ('A', [('x', 'C')]), ('B', [('x', 'C')]), ('C', [('y', 'A')])],
     'A', "entered by another transition"),
])
def test_not_normalizable(spec, node, message):
    with pytest.raises(NormalizationError) as info:
        normalize(make_chart('Bad', spec))
    assert info.value.node == node
    assert message in str(info.value)


def test_invalid_chart_rejected():
    with pytest.raises(ChartValidationError):
        normalize(make_chart('Bad', [('S0', [('x', 'S7')])]))


def test_check_graph_blank_guard(parallel_pair):
    graph = replace_node(normalize(parallel_pair), 8, guard='  ')
    with pytest.raises(NormalizationError) as info:
        denormalize(graph)
    assert info.value.node == 8


def test_check_graph_jump_target(cycle):
    with pytest.raises(NormalizationError) as info:
        denormalize(replace_node(normalize(cycle), 7, target='S9'))
    assert info.value.node == 7


def test_check_graph_alternation(linear3):
    graph = normalize(linear3)
    with pytest.raises(NormalizationError) as info:
        check_graph(replace_node(graph, 2, parents=(2,)))
    assert info.value.node == 2
    assert "cannot follow" in str(info.value)


def test_check_graph_initial_step(linear3):
    graph = replace_node(normalize(linear3), 1, kind=K.STEP)
    with pytest.raises(NormalizationError):
        denormalize(graph)
    lenient = denormalize(graph, strict=False)
    assert not any(s.is_initial for s in lenient.steps)
