# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Explicit-state exploration of the guard-free token semantics of a normalized graph.

Markings are bit masks over the steps (bit k <=> k-th step by ascending node id).  A transition is enabled when all
of its source steps are marked; firing it unmarks the sources and marks the targets.  Guards are ignored: every
enabled transition may fire, one per micro-step.  Exploration is breadth-first with transitions tried in node id
order, so the first token overflow found has a shortest witness.
"""
import logging
import time
from collections import (deque, namedtuple)

from sfctools.codecs.normalize import graph_transitions
from sfctools.safety.report import (Verdict, ViolationKind, Violation, SafetyReport)

__all__ = ['Replay', 'explore', 'replay', 'reachable_markings']

log = logging.getLogger(__name__)

Replay = namedtuple('Replay', "markings overflow")
Replay.__doc__ = """ Markings (frozensets of step names) visited by a replayed trace, and the step names the last
firing would have marked twice (empty if none). """

# Transition compiled to bit masks.
_Firing = namedtuple('_Firing', "id sources targets")


class _Net:
    def __init__(self, graph):
        self.step_ids = sorted(n.id for n in graph.nodes if n.is_step)
        self.bit = {step_id: 1 << k for k, step_id in enumerate(self.step_ids)}
        self.names = graph.names
        self.transitions = [_Firing(t.id, self.mask(t.sources), self.mask(t.targets))
                            for t in graph_transitions(graph)]
        self.initial = self.mask([graph.initial_id]) if graph.initial_id is not None else 0

    def mask(self, step_ids):
        value = 0
        for step_id in step_ids:
            value |= self.bit[step_id]
        return value

    def step_names(self, mask):
        return [self.names[s] for s in self.step_ids if mask & self.bit[s]]

    def enabled(self, marking):
        return [t for t in self.transitions if marking & t.sources == t.sources]


def _trace(parents, marking):
    trace = []
    while parents[marking] is not None:
        marking, transition = parents[marking]
        trace.append(transition)
    return tuple(reversed(trace))


def explore(graph, limits):
    """
    Explores all markings reachable from the initial marking.

    :param graph:  Normalized graph (satisfying the graph invariants)
    :type  graph:  NormalizedGraph
    :param limits: Exploration limits
    :type  limits: VerifyLimits

    :return: Report: Unsafe with the first (shortest) TokenOverflow found; otherwise, after a complete exploration,
             Unsafe listing unreachable steps and unattainable simultaneous convergences, or Safe; Timeout if the
             limits were hit first
    :rtype:  SafetyReport
    """
    started = time.monotonic()
    net = _Net(graph)
    parents = {net.initial: None}
    queue = deque([net.initial])
    reached = 0
    attained = set()
    verdict = None
    while queue and verdict is None:
        if time.monotonic() - started > limits.max_time:
            verdict = Verdict.TIMEOUT
            break
        marking = queue.popleft()
        reached |= marking
        for firing in net.enabled(marking):
            if bin(firing.sources).count('1') > 1:
                attained.add(firing.id)
            remaining = marking & ~firing.sources
            if remaining & firing.targets:
                witness = _trace(parents, marking) + (firing.id,)
                element = ', '.join(net.step_names(remaining & firing.targets))
                log.debug("token overflow on {} after {} firings".format(element, len(witness)))
                return SafetyReport(Verdict.UNSAFE, [Violation(ViolationKind.TOKEN_OVERFLOW, element, witness)],
                                    len(parents), time.monotonic() - started)
            successor = remaining | firing.targets
            if successor in parents:
                continue
            if len(parents) >= limits.max_states:
                verdict = Verdict.TIMEOUT
                break
            parents[successor] = (marking, firing.id)
            queue.append(successor)

    elapsed = time.monotonic() - started
    if verdict is Verdict.TIMEOUT:
        log.info("exploration stopped at {} states after {:.3f}s".format(len(parents), elapsed))
        return SafetyReport(Verdict.TIMEOUT, [], len(parents), elapsed)

    violations = [Violation(ViolationKind.UNREACHABLE_STEP, net.names[s])
                  for s in net.step_ids if not reached & net.bit[s]]
    for firing in net.transitions:
        if bin(firing.sources).count('1') > 1 and firing.id not in attained:
            violations.append(Violation(ViolationKind.UNATTAINABLE_CONVERGENCE,
                                        '+'.join(net.step_names(firing.sources))))
    return SafetyReport(Verdict.UNSAFE if violations else Verdict.SAFE, violations, len(parents), elapsed)


def replay(graph, witness):
    """
    Re-executes a firing trace from the initial marking.

    :param graph:   Normalized graph
    :type  graph:   NormalizedGraph
    :param witness: Transition node ids, in firing order
    :type  witness: Iterable(int)

    :rtype: Replay

    :raises ValueError: A transition of the trace is unknown or not enabled when due
    """
    net = _Net(graph)
    by_id = {t.id: t for t in net.transitions}
    marking = net.initial
    markings = [frozenset(net.step_names(marking))]
    overflow = frozenset()
    for number, transition_id in enumerate(witness):
        firing = by_id.get(transition_id)
        if firing is None or marking & firing.sources != firing.sources:
            raise ValueError("transition {} (firing {}) is not enabled".format(transition_id, number + 1))
        remaining = marking & ~firing.sources
        overflow = frozenset(net.step_names(remaining & firing.targets))
        marking = remaining | firing.targets
        markings.append(frozenset(net.step_names(marking)))
    return Replay(markings, overflow)


def reachable_markings(graph, max_states=None):
    """
    All markings reachable from the initial marking (as frozensets of step names), ignoring overflow; for
    cross-checking and SMV model comparison on small charts.
    """
    net = _Net(graph)
    seen = {net.initial}
    queue = deque([net.initial])
    while queue and (max_states is None or len(seen) < max_states):
        marking = queue.popleft()
        for firing in net.enabled(marking):
            successor = (marking & ~firing.sources) | firing.targets
            if successor not in seen:
                seen.add(successor)
                queue.append(successor)
    return {frozenset(net.step_names(m)) for m in seen}
