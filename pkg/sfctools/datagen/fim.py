# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Fill-in-the-middle examples: a connected cluster of whole step entries (step, edges and action together) is cut
out of the canonical reduced document.
"""
import random
from collections import namedtuple

from sfctools.codecs.reduced import document_parts
from sfctools.sfc_exceptions import TooSmallError

__all__ = ['MaskParams', 'FimExample', 'mask_subgraph', 'fim_examples', 'step_adjacency', 'is_connected']

MAX_ATTEMPTS = 64
ENTRY_SEPARATOR = ',\n'


class MaskParams(namedtuple('MaskParams', "min_steps max_steps", defaults=(1, 3))):
    """ Masked cluster size range (in steps), 1 <= min_steps <= max_steps. """
    __slots__ = ()

    def __new__(cls, min_steps=1, max_steps=3):
        min_steps, max_steps = int(min_steps), int(max_steps)
        if not 1 <= min_steps <= max_steps:
            raise ValueError("mask size range must satisfy 1 <= min <= max: {}, {}".format(min_steps, max_steps))
        return super().__new__(cls, min_steps, max_steps)


class FimExample(namedtuple('FimExample', "prefix middle suffix masked_steps chart_id")):
    """ Masked document: `prefix + middle + suffix` is the canonical document; masked steps in chart order. """
    __slots__ = ()

    @property
    def document(self):
        """ Reconstructed canonical document. """
        return self.prefix + self.middle + self.suffix

    def as_record(self):
        """ Training record (one line of a record file). """
        return {'kind': 'fim', 'chart_id': self.chart_id, 'prefix': self.prefix, 'middle': self.middle,
                'suffix': self.suffix, 'masked_steps': list(self.masked_steps)}


def step_adjacency(sfc):
    """ Undirected step graph: step index => sorted indices of steps joined to it by an edge (self-loops dropped). """
    position = {name: k for k, name in enumerate(sfc.step_names)}
    adjacency = {k: set() for k in range(len(sfc.steps))}
    for k, step in enumerate(sfc.steps):
        for edge in step.children:
            other = position.get(edge.target)
            if other is not None and other != k:
                adjacency[k].add(other)
                adjacency[other].add(k)
    return {k: sorted(v) for k, v in adjacency.items()}


def is_connected(indices, adjacency):
    """ True if the step indices induce a connected subgraph. """
    indices = set(indices)
    if not indices:
        return False
    start = min(indices)
    seen, stack = {start}, [start]
    while stack:
        for other in adjacency[stack.pop()]:
            if other in indices and other not in seen:
                seen.add(other)
                stack.append(other)
    return seen == indices


def _random_walk(rng, adjacency, size):
    current = rng.randrange(len(adjacency))
    cluster = {current}
    for _ in range(8 * size):
        if len(cluster) == size or not adjacency[current]:
            break
        current = rng.choice(adjacency[current])
        cluster.add(current)
    return cluster if len(cluster) == size else None


def _select(sfc, rng, params):
    adjacency = step_adjacency(sfc)
    for _ in range(MAX_ATTEMPTS):
        cluster = _random_walk(rng, adjacency, rng.randint(params.min_steps, params.max_steps))
        if cluster and max(cluster) - min(cluster) == len(cluster) - 1:
            return min(cluster), max(cluster) + 1
    windows = [(first, first + size) for size in range(params.min_steps, params.max_steps + 1)
               for first in range(len(sfc.steps) - size + 1)
               if is_connected(range(first, first + size), adjacency)]
    return rng.choice(windows) if windows else None


def mask_subgraph(sfc, seed, params=None, chart_id=None):
    """
    Masks one connected cluster of steps whose entries are contiguous in the canonical document.

    :param sfc:      Valid chart
    :type  sfc:      ReducedSfc
    :param seed:     Random seed (same chart, seed and params => same example)
    :type  seed:     int
    :param params:   Cluster size range (None => 1..3 steps)
    :type  params:   Union(MaskParams, None)
    :param chart_id: Identifier recorded in the example (None => POU name)
    :type  chart_id: Union(str, None)

    :rtype: FimExample

    :raises TooSmallError: Chart has no more steps than the maximum cluster size, or no connected contiguous cluster
                           in the size range exists

    .. note::
     * Clusters come from a seeded random walk on the undirected step graph (size uniform in the range); walks
       whose steps are not adjacent in document order are re-drawn, falling back to a seeded choice among all
       qualifying windows.
    """
    params = params or MaskParams()
    chart_id = sfc.pou_name if chart_id is None else chart_id
    if len(sfc.steps) <= params.max_steps:
        raise TooSmallError("chart '{}' has {} steps; masking up to {} needs more".format(
            chart_id, len(sfc.steps), params.max_steps))
    window = _select(sfc, random.Random(seed), params)
    if window is None:
        raise TooSmallError("chart '{}' has no connected cluster of {}..{} adjacent steps".format(
            chart_id, params.min_steps, params.max_steps))

    first, stop = window
    head, entries, tail = document_parts(sfc)
    start = len(head) + sum(len(e) + len(ENTRY_SEPARATOR) for e in entries[:first])
    middle = ENTRY_SEPARATOR.join(entries[first:stop])
    document = head + ENTRY_SEPARATOR.join(entries) + tail
    return FimExample(prefix=document[:start], middle=middle, suffix=document[start + len(middle):],
                      masked_steps=tuple(sfc.step_names[first:stop]), chart_id=chart_id)


def fim_examples(sfc, count=3, seed=0, params=None, chart_id=None):
    """ `count` examples of one chart, with seeds `seed`, `seed + 1`, ... """
    return [mask_subgraph(sfc, seed + n, params, chart_id) for n in range(count)]
