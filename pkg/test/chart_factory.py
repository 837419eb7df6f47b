# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Chart builders shared by the test modules.

`make_chart()` spells small charts out by hand; `ChartFactory` generates seeded block-structured charts (sequences
of single steps, alternative pairs and parallel pairs whose branches nest further blocks, plus jumps from top-level
steps back to earlier top-level steps).  Generated charts validate, normalize, pass the ST checks and verify Safe;
the `loop_back` variant also makes the initial step a parallel branch target and is not Safe.
"""
import random
import re

from sfctools.model import (VariableDecl, Edge, StepNode, ReducedSfc)

MAX_STEPS = 12
MAX_PARALLEL = 3
MAX_JUMPS = 2

ACTIONS = (None, '', 'xOut1 := TRUE;', 'nCount := nCount + 1;', 'IF xOut2 THEN\n    xOut3 := FALSE;\nEND_IF;',
           'xOut2 := xG1 AND NOT xOut1;')
COMMENTS = (None, 'line one\u2028line two\x85end', 'fills the hopper', 'Temperatur prüfen', 'ожидание подачи',
            '')

GUARD_NAME_RE = re.compile(r'[A-Za-z_][A-Za-z0-9_]*')


def make_chart(pou_name, spec, initial=None, variables=None, actions=None, comments=None):
    """
    Builds a chart from a compact description.

    :param spec:      [(step name, [(guard, target) or (guard, target, is_jump), ...]), ...] in chart order
    :param initial:   Initial step name(s) (None => first step)
    :param variables: Variable declarations (None => every identifier used in a guard, as a BOOL input)
    :param actions:   step name => action text
    :param comments:  step name => comment text
    """
    initial = {spec[0][0]} if initial is None else ({initial} if isinstance(initial, str) else set(initial))
    actions, comments = actions or {}, comments or {}
    steps = [StepNode(name, name in initial, actions.get(name), comments.get(name),
                      [Edge(*child) for child in children])
             for name, children in spec]
    if variables is None:
        names = []
        for _, children in spec:
            for child in children:
                names.extend(n for n in GUARD_NAME_RE.findall(child[0]) if n.upper() not in ('AND', 'OR', 'NOT'))
        variables = [VariableDecl(n, 'BOOL', 'FALSE', 'input') for n in dict.fromkeys(names)]
    return ReducedSfc(pou_name, variables, steps)


def linear_chart(count=3, pou_name='Linear'):
    """ S0 -> S1 -> ... chain of `count` steps. """
    return make_chart(pou_name, [('S{}'.format(n), [('x{}'.format(n), 'S{}'.format(n + 1))] if n + 1 < count else [])
                                 for n in range(count)])


def parallel_chart():
    """ Two-branch parallel group, synchronized at S2. """
    return make_chart('Parallel', [
        ('S0', [('xStart', 'A1'), ('xStart', 'B1')]),
        ('A1', [('xA', 'A2')]),
        ('A2', [('xDone', 'S2')]),
        ('B1', [('xB', 'B2')]),
        ('B2', [('xDone', 'S2')]),
        ('S2', []),
    ])


def choice_chart():
    """ Alternative pair joined at S3. """
    return make_chart('Choice', [
        ('S0', [('xLeft', 'L'), ('xRight', 'R')]),
        ('L', [('xL', 'S3')]),
        ('R', [('xR', 'S3')]),
        ('S3', []),
    ])


def cycle_chart():
    """ Three-step loop closed by a jump. """
    return make_chart('Cycle', [
        ('S0', [('xGo', 'S1')]),
        ('S1', [('xNext', 'S2')]),
        ('S2', [('xAgain', 'S0', True)]),
    ])


def overflow_chart():
    """ Parallel branch A jumps back to the initial step while branch B keeps its token. """
    return make_chart('Overflow', [
        ('S0', [('xStart', 'A1'), ('xStart', 'B1')]),
        ('A1', [('xA', 'A2'), ('xBack', 'S0', True)]),
        ('A2', [('xDone', 'S2')]),
        ('B1', [('xDone', 'S2')]),
        ('S2', []),
    ])


def jump_exit_chart():
    """ Branch A leaves the parallel group by a jump to the step after the synchronization. """
    return make_chart('JumpExit', [
        ('S0', [('c', 'A1'), ('c', 'B1')]),
        ('A1', [('xA', 'A2'), ('xAbort', 'S2', True)]),
        ('A2', [('d', 'S2')]),
        ('B1', [('d', 'S2')]),
        ('S2', []),
    ])


def parallel_loop_chart():
    """ Parallel group whose second branch re-enters the initial step. """
    return make_chart('Loop', [
        ('B', [('g', 'P')]),
        ('P', [('x', 'A'), ('x', 'B')]),
        ('A', []),
    ])


class ChartFactory:
    """ Seeded generator of Safe block-structured charts. """
    def __init__(self, seed, min_steps=2, max_steps=MAX_STEPS):
        self.rng = random.Random(seed)
        self.seed = seed
        self.min_steps = min(min_steps, max_steps)
        self.max_steps = max_steps
        self.names = []
        self.children = {}
        self.root = []
        self.guards = 0
        self.parallel = 0

    def new_step(self):
        name = 'S{}'.format(len(self.names))
        self.names.append(name)
        self.children[name] = []
        return name

    def new_guard(self):
        self.guards += 1
        return 'xG{}'.format(self.guards)

    def room(self, reserve):
        return self.max_steps - len(self.names) - reserve

    def block(self, tail, top, reserve=0):
        """ Appends one block after step `tail`; returns the block's last step. """
        draw = self.rng.random()
        if self.room(reserve) >= 4 and draw < 0.5:
            parallel = self.parallel < MAX_PARALLEL and draw < 0.25
            return self.branches(tail, parallel, top, reserve)
        step = self.new_step()
        self.children[tail].append(Edge(self.new_guard(), step))
        if top:
            self.root.append(step)
        return step

    def region(self, entry, reserve):
        tail = entry
        while self.room(reserve) >= 1 and self.rng.random() < 0.35:
            tail = self.block(tail, False, reserve)
        return tail

    def branches(self, tail, parallel, top, reserve):
        if parallel:
            self.parallel += 1
            split = self.new_guard()
            guards = (split, split)
        else:
            guards = (self.new_guard(), self.new_guard())
        entries = [self.new_step(), self.new_step()]
        for guard, entry in zip(guards, entries):
            self.children[tail].append(Edge(guard, entry))
        exits = [self.region(entries[0], reserve + 1), self.region(entries[1], reserve + 1)]
        join = self.new_step()
        joined = self.new_guard()
        for number, source in enumerate(exits):
            guard = joined if parallel else (joined if number == 0 else self.new_guard())
            self.children[source].append(Edge(guard, join))
        if top:
            self.root.append(join)
        return join

    def add_jumps(self):
        for _ in range(self.rng.randint(0, MAX_JUMPS)):
            if len(self.root) < 2:
                break
            source = self.rng.randrange(1, len(self.root))
            target = self.rng.randrange(source)
            self.children[self.root[source]].append(Edge(self.new_guard(), self.root[target], True))

    def close_loop(self, tail):
        """ Parallel group from `tail` to the initial step and one new step, in random edge order. """
        guard = self.new_guard()
        targets = [self.names[0], self.new_step()]
        self.rng.shuffle(targets)
        self.children[tail].extend(Edge(guard, target) for target in targets)

    def chart(self, jumps=True, loop_back=False):
        """
        Generates the chart.

        :param loop_back: True => close the chart with a parallel group re-entering the initial step (not Safe)
        """
        target = self.rng.randint(self.min_steps, self.max_steps)
        tail = self.new_step()
        self.root.append(tail)
        while len(self.names) < target:
            tail = self.block(tail, True)
        if loop_back:
            self.close_loop(tail)
        if jumps:
            self.add_jumps()
        variables = ([VariableDecl('xG{}'.format(n), 'BOOL', self.rng.choice((None, 'FALSE')), 'input')
                      for n in range(1, self.guards + 1)]
                     + [VariableDecl('xOut{}'.format(n), 'BOOL', 'FALSE', 'output') for n in range(1, 4)]
                     + [VariableDecl('nCount', 'INT', '0', 'local')])
        steps = [StepNode(name, number == 0, self.rng.choice(ACTIONS), self.rng.choice(COMMENTS),
                          self.children[name])
                 for number, name in enumerate(self.names)]
        return ReducedSfc('Chart{}'.format(self.seed), variables, steps)


def random_chart(seed, min_steps=2, max_steps=MAX_STEPS, jumps=True, loop_back=False):
    """ One generated chart per seed. """
    return ChartFactory(seed, min_steps, max_steps).chart(jumps, loop_back)
