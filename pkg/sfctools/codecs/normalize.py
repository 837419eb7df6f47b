# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Conversion between the reduced chart and the normalized (PLCopen-style) graph, in which branching is expressed only
through explicit divergence/convergence nodes.

Inference rules (reduced => graph):
 * Outgoing edges of one step with identical guard text form a parallel group: one Transition followed by one
   SimultaneousDivergence.  Several groups/edges leaving one step: a SelectionDivergence followed by one
   Transition per branch.
 * Edges with identical guard text from several steps into one target: one SimultaneousConvergence followed by one
   Transition.  Several transitions into one target: a SelectionConvergence.
 * Jump edges end in JumpStep nodes.

Both rules together identify each transition with a set of reduced edges, namely the full product of its source
steps and target steps; charts whose edges do not decompose that way are rejected (`NormalizationError`).

Node ids are assigned in depth-first order from the initial step, children in edge order; the target steps of each
parallel group then trade ids so that they ascend in edge order.  The order of a node's children is the order of
their ids.  Step order of the chart travels separately (`step_order`).
"""
from collections import namedtuple
from enum import Enum

from sfctools.model import (StepNode, Edge, ReducedSfc, validate_reduced)
from sfctools.sfc_exceptions import (NormalizationError, ChartValidationError)

__all__ = ['NodeKind', 'GraphNode', 'NormalizedGraph', 'TransitionInfo', 'normalize', 'denormalize', 'check_graph',
           'graph_transitions']


class NodeKind(Enum):
    """ Normalized graph node kinds (PLCopen SFC element names). """
    STEP = 'step'
    INITIAL_STEP = 'initialStep'
    TRANSITION = 'transition'
    SELECTION_DIVERGENCE = 'selectionDivergence'
    SELECTION_CONVERGENCE = 'selectionConvergence'
    SIMULTANEOUS_DIVERGENCE = 'simultaneousDivergence'
    SIMULTANEOUS_CONVERGENCE = 'simultaneousConvergence'
    JUMP_STEP = 'jumpStep'


STEP_KINDS = (NodeKind.STEP, NodeKind.INITIAL_STEP)


class GraphNode(namedtuple('GraphNode', "id kind parents guard target", defaults=((), None, None))):
    """ Graph node; `guard` is set for transitions, `target` (step name) for jump steps. """
    __slots__ = ()

    def __new__(cls, id, kind, parents=(), guard=None, target=None):  # pylint:disable=redefined-builtin
        return super().__new__(cls, id, kind, tuple(parents), guard, target)

    @property
    def is_step(self):
        """ True for steps (initial or not). """
        return self.kind in STEP_KINDS


class NormalizedGraph(namedtuple('NormalizedGraph', "pou_name variables nodes names actions comments step_order")):
    """
    Normalized SFC graph.

    :ivar nodes:      Nodes, ordered by id
    :ivar names:      step id => step name
    :ivar actions:    step id => ST action text (absent => no action block)
    :ivar comments:   step id => step comment
    :ivar step_order: Step ids in chart order
    """
    __slots__ = ()

    def node(self, node_id):
        """ Returns the node with a given id. """
        return self._index()[node_id]

    def _index(self):
        return {n.id: n for n in self.nodes}

    def children_map(self):
        """ node id => ids of the nodes listing it as a parent, ascending. """
        children = {n.id: [] for n in self.nodes}
        for node in self.nodes:
            for parent in node.parents:
                if parent in children:
                    children[parent].append(node.id)
        return children

    @property
    def initial_id(self):
        """ Id of the initial step (None if absent). """
        return next((n.id for n in self.nodes if n.kind is NodeKind.INITIAL_STEP), None)

    def step_id(self, name):
        """ Id of the step with a given name (None if absent). """
        return next((i for i, n in self.names.items() if n == name), None)


TransitionInfo = namedtuple('TransitionInfo', "id guard sources targets jump")
TransitionInfo.__doc__ = """ Transition resolved to source step ids and target step ids (jump => via a jump step). """

# (Internal) reduced edges grouped into one transition.
_Component = namedtuple('_Component', "guard sources targets jump edges")


class _DisjointSets:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, item):
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, first, second):
        first, second = self.find(first), self.find(second)
        if first != second:
            self.parent[max(first, second)] = min(first, second)


def _components(sfc):
    """ Groups reduced edges into transitions and checks that they decompose as source x target products. """
    edges = [(step.name, index, edge) for step in sfc.steps for index, edge in enumerate(step.children)]
    sets = _DisjointSets(len(edges))
    first_by_key = {}
    for number, (source, _, edge) in enumerate(edges):
        guard = edge.guard.strip()
        for key in (('out', source, guard), ('in', edge.target, guard, edge.is_jump)):
            sets.union(number, first_by_key.setdefault(key, number))

    grouped = {}
    for number in range(len(edges)):
        grouped.setdefault(sets.find(number), []).append(number)

    components = []
    for members in grouped.values():  # (ordered by first member: chart order)
        member_edges = [edges[m] for m in members]
        first_source = member_edges[0][0]
        sources = list(dict.fromkeys(source for source, _, _ in member_edges))
        targets = [edge.target for source, _, edge in member_edges if source == first_source]
        element = "{}->{}".format(first_source, member_edges[0][2].target)
        if len({edge.guard for _, _, edge in member_edges}) > 1:
            raise NormalizationError(element, "edges of one transition differ in guard whitespace")
        jump = member_edges[0][2].is_jump
        if any(edge.is_jump != jump for _, _, edge in member_edges):
            raise NormalizationError(element, "transition mixes jump and non-jump targets")
        if jump and len(targets) > 1:
            raise NormalizationError(element, "parallel group contains a jump")
        if len(set(targets)) != len(targets):
            raise NormalizationError(element, "parallel group targets one step twice")
        for source in sources:
            mine = [(index, edge.target) for src, index, edge in member_edges if src == source]
            if [t for _, t in mine] != targets:
                raise NormalizationError("{}->{}".format(source, mine[0][1]),
                                         "steps feeding one convergence branch to different targets")
            if mine[-1][0] - mine[0][0] != len(mine) - 1:
                raise NormalizationError("{}->{}".format(source, mine[0][1]),
                                         "parallel group edges are not adjacent in child order")
        components.append(_Component(member_edges[0][2].guard, tuple(sources), tuple(targets), jump,
                                     tuple((source, index) for source, index, _ in member_edges)))
    return components


def normalize(sfc):
    """
    Converts a valid reduced chart into the normalized graph.

    :param sfc: Chart (must pass strict validation)
    :type  sfc: ReducedSfc

    :return: Normalized graph
    :rtype:  NormalizedGraph

    :raises ChartValidationError: Chart invalid
    :raises NormalizationError:   Edges not expressible by divergence/convergence nodes
    """
    diagnostics = validate_reduced(sfc, strict=True)
    if diagnostics:
        raise ChartValidationError(diagnostics)

    components = _components(sfc)
    outgoing = {s.name: [] for s in sfc.steps}
    incoming = {s.name: [] for s in sfc.steps}
    for number, comp in enumerate(components):
        for source in comp.sources:
            outgoing[source].append(number)
        if not comp.jump:
            for target in comp.targets:
                incoming[target].append(number)
    for name, numbers in outgoing.items():
        numbers.sort(key=lambda n, s=name: min(i for src, i in components[n].edges if src == s))
        if len(numbers) > 1 and any(len(components[n].sources) > 1 for n in numbers):
            raise NormalizationError(name, "step with alternative branches also feeds a simultaneous convergence")
    for name, numbers in incoming.items():
        if len(numbers) > 1 and any(len(components[n].targets) > 1 for n in numbers):
            raise NormalizationError(name, "parallel branch step also entered by another transition")

    ids = _assign_ids(sfc, components, outgoing, incoming)
    nodes = []
    for key, node_id in ids.items():
        kind, ref = key
        if kind == 'step':
            step = sfc.step(ref)
            inc = incoming[ref]
            if len(inc) > 1:
                parents = [ids[('selconv', ref)]]
            elif inc:
                comp = components[inc[0]]
                parents = [ids[('simdiv' if len(comp.targets) > 1 else 'trans', inc[0])]]
            else:
                parents = []
            nodes.append(GraphNode(node_id, NodeKind.INITIAL_STEP if step.is_initial else NodeKind.STEP, parents))
        elif kind == 'seldiv':
            nodes.append(GraphNode(node_id, NodeKind.SELECTION_DIVERGENCE, [ids[('step', ref)]]))
        elif kind == 'selconv':
            nodes.append(GraphNode(node_id, NodeKind.SELECTION_CONVERGENCE, [ids[('trans', n)] for n in incoming[ref]]))
        elif kind == 'simconv':
            nodes.append(GraphNode(node_id, NodeKind.SIMULTANEOUS_CONVERGENCE,
                                   [ids[('step', s)] for s in components[ref].sources]))
        elif kind == 'trans':
            comp = components[ref]
            if len(comp.sources) > 1:
                parent = ids[('simconv', ref)]
            else:
                source = comp.sources[0]
                parent = ids[('seldiv', source)] if len(outgoing[source]) > 1 else ids[('step', source)]
            nodes.append(GraphNode(node_id, NodeKind.TRANSITION, [parent], guard=comp.guard))
        elif kind == 'simdiv':
            nodes.append(GraphNode(node_id, NodeKind.SIMULTANEOUS_DIVERGENCE, [ids[('trans', ref)]]))
        else:
            nodes.append(GraphNode(node_id, NodeKind.JUMP_STEP, [ids[('trans', ref)]],
                                   target=components[ref].targets[0]))
    nodes.sort(key=lambda n: n.id)

    step_ids = {s.name: ids[('step', s.name)] for s in sfc.steps}
    return NormalizedGraph(pou_name=sfc.pou_name, variables=sfc.variables, nodes=tuple(nodes),
                           names={i: n for n, i in step_ids.items()},
                           actions={step_ids[s.name]: s.action for s in sfc.steps if s.action is not None},
                           comments={step_ids[s.name]: s.comment for s in sfc.steps if s.comment is not None},
                           step_order=tuple(step_ids[s.name] for s in sfc.steps))


def _assign_ids(sfc, components, outgoing, incoming):
    """ Depth-first, pre-order id assignment from the initial step; unreached steps are visited afterwards. """
    ids = {}

    def assign(key):
        if key in ids:
            return False
        ids[key] = len(ids) + 1
        return True

    def run(stack):
        while stack:
            kind, ref = stack.pop()
            if kind == 'step':
                if not assign(('step', ref)):
                    continue
                if len(outgoing[ref]) > 1:
                    assign(('seldiv', ref))
                stack.extend(('trans', n) for n in reversed(outgoing[ref]))
            elif kind == 'trans':
                if ('trans', ref) in ids:
                    continue
                comp = components[ref]
                if len(comp.sources) > 1:
                    assign(('simconv', ref))
                assign(('trans', ref))
                if comp.jump:
                    assign(('jump', ref))
                    continue
                if len(comp.targets) > 1:
                    assign(('simdiv', ref))
                stack.extend(('target', t) for t in reversed(comp.targets))
            else:
                if len(incoming[ref]) > 1:
                    assign(('selconv', ref))
                stack.append(('step', ref))

    initial = next(s.name for s in sfc.steps if s.is_initial)
    run([('step', initial)])
    parallel_entries = {t for c in components if len(c.targets) > 1 and not c.jump for t in c.targets}
    while True:
        remaining = [s.name for s in sfc.steps if ('step', s.name) not in ids]
        if not remaining:
            break
        root = next((name for name in remaining if not incoming[name]),
                    next((name for name in remaining if name not in parallel_entries), remaining[0]))
        run([('step', root)])

    # Parallel targets ascend in edge order, also when one was numbered before its divergence.
    for comp in components:
        if len(comp.targets) > 1 and not comp.jump:
            keys = [('step', t) for t in comp.targets]
            for key, node_id in zip(keys, sorted(ids[k] for k in keys)):
                ids[key] = node_id
    return ids


def check_graph(graph, strict=True):
    """
    Checks the normalized-graph invariants: one initial step, arity per node kind, and alternation of steps and
    transitions through divergence/convergence nodes.

    :param strict: False => the initial-step count is left to chart validation (imported graphs)

    :raises NormalizationError: First violation found, naming the node id
    """
    index = {n.id: n for n in graph.nodes}
    children = graph.children_map()
    initial = [n.id for n in graph.nodes if n.kind is NodeKind.INITIAL_STEP]
    if strict and len(initial) != 1:
        raise NormalizationError(initial[1] if initial else 0,
                                 "graph has {} initial steps".format(len(initial)))
    transitions = (NodeKind.TRANSITION,)
    allowed_parents = {
        NodeKind.STEP: (NodeKind.TRANSITION, NodeKind.SELECTION_CONVERGENCE, NodeKind.SIMULTANEOUS_DIVERGENCE),
        NodeKind.INITIAL_STEP: (NodeKind.TRANSITION, NodeKind.SELECTION_CONVERGENCE,
                                NodeKind.SIMULTANEOUS_DIVERGENCE),
        NodeKind.TRANSITION: STEP_KINDS + (NodeKind.SELECTION_DIVERGENCE, NodeKind.SIMULTANEOUS_CONVERGENCE),
        NodeKind.SELECTION_DIVERGENCE: STEP_KINDS,
        NodeKind.SELECTION_CONVERGENCE: transitions,
        NodeKind.SIMULTANEOUS_DIVERGENCE: transitions,
        NodeKind.SIMULTANEOUS_CONVERGENCE: STEP_KINDS,
        NodeKind.JUMP_STEP: transitions,
    }
    # kind => (min parents, max parents, min children, max children)
    arity = {
        NodeKind.STEP: (0, 1, 0, 1),
        NodeKind.INITIAL_STEP: (0, 1, 0, 1),
        NodeKind.TRANSITION: (1, 1, 1, 1),
        NodeKind.SELECTION_DIVERGENCE: (1, 1, 2, None),
        NodeKind.SELECTION_CONVERGENCE: (2, None, 1, 1),
        NodeKind.SIMULTANEOUS_DIVERGENCE: (1, 1, 2, None),
        NodeKind.SIMULTANEOUS_CONVERGENCE: (2, None, 1, 1),
        NodeKind.JUMP_STEP: (1, 1, 0, 0),
    }
    names = set(graph.names.values())
    for node in graph.nodes:
        for parent in node.parents:
            if parent not in index:
                raise NormalizationError(node.id, "parent {} does not exist".format(parent))
            if index[parent].kind not in allowed_parents[node.kind]:
                raise NormalizationError(node.id, "{} cannot follow {}".format(node.kind.value,
                                                                                index[parent].kind.value))
        low_p, high_p, low_c, high_c = arity[node.kind]
        for count, low, high, what in ((len(node.parents), low_p, high_p, 'parents'),
                                       (len(children[node.id]), low_c, high_c, 'children')):
            if count < low or (high is not None and count > high):
                raise NormalizationError(node.id, "{} has {} {}".format(node.kind.value, count, what))
        if node.is_step and node.id not in graph.names:
            raise NormalizationError(node.id, "step has no name")
        if node.kind is NodeKind.JUMP_STEP and node.target not in names:
            raise NormalizationError(node.id, "jump target '{}' is not a step".format(node.target))
        if node.kind is NodeKind.TRANSITION and not (node.guard or '').strip():
            raise NormalizationError(node.id, "transition has no condition")
    step_ids = sorted(n.id for n in graph.nodes if n.is_step)
    if sorted(graph.step_order) != step_ids:
        raise NormalizationError(0, "step order does not list every step exactly once")
    for step_id in list(graph.actions) + list(graph.comments):
        if step_id not in index or not index[step_id].is_step:
            raise NormalizationError(step_id, "action or comment attached to a non-step node")


def graph_transitions(graph):
    """
    Resolves every transition of a (checked) graph to its source and target steps.

    :return: Transitions ordered by node id
    :rtype:  list(TransitionInfo)
    """
    index = {n.id: n for n in graph.nodes}
    children = graph.children_map()
    result = []
    for node in graph.nodes:
        if node.kind is not NodeKind.TRANSITION:
            continue
        parent = index[node.parents[0]]
        if parent.kind is NodeKind.SIMULTANEOUS_CONVERGENCE:
            sources = parent.parents
        elif parent.kind is NodeKind.SELECTION_DIVERGENCE:
            sources = parent.parents
        else:
            sources = (parent.id,)
        child = index[children[node.id][0]]
        jump = False
        if child.kind is NodeKind.SIMULTANEOUS_DIVERGENCE:
            targets = tuple(children[child.id])
        elif child.kind is NodeKind.SELECTION_CONVERGENCE:
            targets = tuple(children[child.id])
        elif child.kind is NodeKind.JUMP_STEP:
            targets, jump = (graph.step_id(child.target),), True
        else:
            targets = (child.id,)
        result.append(TransitionInfo(node.id, node.guard, tuple(sources), targets, jump))
    return result


def denormalize(graph, strict=True):
    """
    Elides divergence/convergence nodes into guarded child edges.

    :param graph:  Normalized graph
    :type  graph:  NormalizedGraph
    :param strict: See `check_graph()`
    :type  strict: bool

    :return: Reduced chart
    :rtype:  ReducedSfc

    :raises NormalizationError: Graph violates alternation or arity invariants (names the node id)
    """
    check_graph(graph, strict=strict)
    index = {n.id: n for n in graph.nodes}
    children = graph.children_map()
    by_id = {t.id: t for t in graph_transitions(graph)}

    steps = []
    for step_id in graph.step_order:
        outgoing = []
        for child_id in children[step_id]:
            child = index[child_id]
            if child.kind is NodeKind.SELECTION_DIVERGENCE:
                outgoing.extend(children[child_id])
            elif child.kind is NodeKind.SIMULTANEOUS_CONVERGENCE:
                outgoing.extend(children[child_id])
            else:
                outgoing.append(child_id)
        edges = [Edge(by_id[t].guard, graph.names[target], by_id[t].jump)
                 for t in outgoing for target in by_id[t].targets]
        steps.append(StepNode(graph.names[step_id], index[step_id].kind is NodeKind.INITIAL_STEP,
                              graph.actions.get(step_id), graph.comments.get(step_id), edges))
    return ReducedSfc(graph.pou_name, graph.variables, steps)
