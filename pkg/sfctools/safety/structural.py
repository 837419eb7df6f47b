# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Structural safety checks: validation, normalizability, pairing of simultaneous divergences with convergences, and
jump legality with respect to parallel regions.

A step's parallel region is the stack of (simultaneous divergence id, branch index) pairs enclosing it, computed by
propagation from the root steps: a divergence pushes one level per branch, a convergence pops the level of its
parents (which must be the complete set of branches of one divergence).  A jump is legal iff it leaves from the
region of its target step.
"""
from collections import deque

from sfctools.model import (Diagnostic, DiagCode, validate_reduced)
from sfctools.codecs.normalize import (NodeKind, normalize)
from sfctools.sfc_exceptions import NormalizationError

__all__ = ['structural_check', 'region_diagnostics', 'parallel_regions']


def parallel_regions(graph):
    """
    Computes the parallel region of every node reachable from a root step.

    :param graph: Normalized graph
    :type  graph: NormalizedGraph

    :return: (node id => region tuple, connectivity diagnostics)
    :rtype:  tuple(dict, list(Diagnostic))
    """
    index = {n.id: n for n in graph.nodes}
    children = graph.children_map()
    regions = {}
    diagnostics = []
    conflicting = set()
    queue = deque()

    def describe(node_id):
        node = index[node_id]
        return graph.names[node_id] if node.is_step else "{} {}".format(node.kind.value, node_id)

    def reach(node_id, region):
        if node_id not in regions:
            regions[node_id] = region
            queue.append(node_id)
        elif regions[node_id] != region and node_id not in conflicting:
            conflicting.add(node_id)
            diagnostics.append(Diagnostic(DiagCode.BAD_CONNECTIVITY, describe(node_id),
                                          "reached from different parallel regions"))

    def converge(node_id):
        node = index[node_id]
        if node_id in regions or any(p not in regions for p in node.parents):
            return
        levels = [regions[p] for p in node.parents]
        base = levels[0][:-1] if levels[0] else ()
        divergences = {level[-1][0] for level in levels if level}
        branches = sorted(level[-1][1] for level in levels if level)
        if (len(divergences) != 1 or any(level[:-1] != base or not level for level in levels)
                or branches != list(range(len(children[next(iter(divergences))])))):
            diagnostics.append(Diagnostic(DiagCode.BAD_CONNECTIVITY, describe(node_id),
                                          "does not join all branches of one simultaneous divergence"))
        reach(node_id, base)

    roots = sorted((n.id for n in graph.nodes if n.is_step and not n.parents),
                   key=lambda i: (index[i].kind is not NodeKind.INITIAL_STEP, i))
    for root in roots:
        reach(root, ())
    while queue:
        node_id = queue.popleft()
        region = regions[node_id]
        node = index[node_id]
        for number, child_id in enumerate(children[node_id]):
            if node.kind is NodeKind.SIMULTANEOUS_DIVERGENCE:
                reach(child_id, region + ((node_id, number),))
            elif index[child_id].kind is NodeKind.SIMULTANEOUS_CONVERGENCE:
                converge(child_id)
            else:
                reach(child_id, region)
    return regions, diagnostics


def region_diagnostics(graph):
    """ Connectivity and jump-legality diagnostics of a normalized graph. """
    regions, diagnostics = parallel_regions(graph)
    index = {n.id: n for n in graph.nodes}
    for node in graph.nodes:
        if node.kind is not NodeKind.JUMP_STEP or node.id not in regions:
            continue
        transition = index[node.parents[0]]
        source = transition.parents[0]
        while not index[source].is_step:
            source = index[source].parents[0]
        target = graph.step_id(node.target)
        if target in regions and regions[node.id] != regions[target]:
            diagnostics.append(Diagnostic(DiagCode.ILLEGAL_JUMP, "{}->{}".format(graph.names[source], node.target),
                                          _jump_message(regions[node.id], regions[target])))
    return diagnostics


def _jump_message(source, target):
    if len(source) > len(target) and source[:len(target)] == target:
        return "jump leaves a parallel branch without synchronization"
    if len(target) > len(source) and target[:len(source)] == source:
        return "jump enters a parallel branch from outside"
    return "jump crosses between parallel branches"


def structural_check(sfc):
    """
    Runs the structural checks on a chart, in order: chart validation (initial step, identifiers, transition
    targets), normalizability, divergence/convergence pairing and jump legality.

    :param sfc: Chart (may be invalid)
    :type  sfc: ReducedSfc

    :return: Error diagnostics (empty => structurally sound); later stages run only if earlier ones pass
    :rtype:  list(Diagnostic)
    """
    diagnostics = [d for d in validate_reduced(sfc, strict=True) if d.is_error]
    if diagnostics:
        return diagnostics
    try:
        graph = normalize(sfc)
    except NormalizationError as exc:
        return [Diagnostic(DiagCode.BAD_CONNECTIVITY, str(exc.node), str(exc).split(': ', 1)[-1])]
    return region_diagnostics(graph)
