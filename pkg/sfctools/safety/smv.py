# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
SMV (NuXmv/NuSMV input language) export of the guard-free token semantics explored by `explore()`.
"""
from pathlib import Path

import pystache

from sfctools.codecs.normalize import graph_transitions

__all__ = ['SMV_TEMPLATE', 'emit_smv', 'smv_context']

SMV_TEMPLATE = Path(__file__).resolve().parent.joinpath('templates', 'smv_model.mustache')


def _var(graph, step_id):
    return 's_' + graph.names[step_id]


def smv_context(graph):
    """
    Template variables for the SMV model of a graph.

    .. note::
     * Step variables follow chart order; transitions, enabling definitions and firing choices follow node id
       order.
    """
    transitions = graph_transitions(graph)
    names = {t.id: 't_{}'.format(t.id) for t in transitions}
    children = graph.children_map()

    steps = []
    invariants = []
    for step_id in graph.step_order:
        var = _var(graph, step_id)
        marking = [names[t.id] for t in transitions if step_id in t.targets]
        clearing = [names[t.id] for t in transitions if step_id in t.sources and step_id not in t.targets]
        cases = [{'condition': ' | '.join('fire = ' + n for n in fired), 'value': value}
                 for fired, value in ((marking, 'TRUE'), (clearing, 'FALSE')) if fired]
        steps.append({'var': var, 'initial': 'TRUE' if step_id == graph.initial_id else 'FALSE', 'cases': cases})
        overflowing = ['en_' + names[t.id] for t in transitions if step_id in t.targets and step_id not in t.sources]
        if overflowing:
            enabled = overflowing[0] if len(overflowing) == 1 else '({})'.format(' | '.join(overflowing))
            invariants.append({'step': graph.names[step_id], 'expr': '!({} & {})'.format(var, enabled)})

    convergences = []
    for transition in transitions:
        if len(transition.sources) > 1:
            convergences.append({'label': '+'.join(graph.names[s] for s in transition.sources),
                                 'expr': '({})'.format(' & '.join(_var(graph, s) for s in transition.sources))})
    terminals = [{'step': graph.names[s], 'expr': _var(graph, s)} for s in graph.step_order if not children[s]]

    return {
        'pou_name': graph.pou_name,
        'steps': steps,
        'choices': '{{{}}}'.format(', '.join(['none'] + [names[t.id] for t in transitions])),
        'has_transitions': bool(transitions),
        'transitions': [{'name': names[t.id],
                         'enabled': ' & '.join(_var(graph, s) for s in t.sources),
                         'separator': ' &' if number < len(transitions) - 1 else ';'}
                        for number, t in enumerate(transitions)],
        'invariants': invariants,
        'convergences': convergences,
        'terminals': terminals,
    }


def emit_smv(graph, template=None):
    """
    Renders the SMV model of a normalized graph.

    :param graph:    Normalized graph
    :type  graph:    NormalizedGraph
    :param template: Mustache template text (None => shipped template)
    :type  template: Union(str, None)

    :return: Model text: one boolean per step, an input variable choosing the fired transition, one INVARSPEC
             against double marking per step that some transition could mark twice, one `EF` spec per
             simultaneous convergence and per terminal step
    :rtype:  str
    """
    renderer = pystache.Renderer(escape=lambda text: text, missing_tags='strict')
    return renderer.render(template or SMV_TEMPLATE.read_text(encoding='utf-8'), smv_context(graph))
