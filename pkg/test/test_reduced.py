# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Canonical reduced-text codec. """
import json

import pytest

from sfctools.model import (StepNode, ReducedSfc)
from sfctools.codecs.reduced import (serialize_reduced, parse_reduced, document_parts, load_schema)
from sfctools.sfc_exceptions import (ParseError, SchemaError, ChartValidationError)

import chart_factory

MINIMAL_DOC = '''{
  "pou_name": "Main",
  "variables": {
    "input": [],
    "output": [],
    "local": []
  },
  "steps": [
    {
      "name": "S0",
      "initial": true,
      "action": null,
      "comment": null,
      "children": []
    }
  ]
}
'''


def edited(sfc, edit):
    """ Canonical document of `sfc` after `edit(obj)` has modified its decoded object. """
    obj = json.loads(serialize_reduced(sfc))
    edit(obj)
    return json.dumps(obj, indent=2, ensure_ascii=False)


def test_minimal_document():
    sfc = ReducedSfc('Main', [], [StepNode('S0', True)])
    assert serialize_reduced(sfc) == MINIMAL_DOC
    assert parse_reduced(MINIMAL_DOC) == sfc


@pytest.mark.parametrize('batch', range(10))
def test_round_trip(batch):
    for seed in range(batch * 20, batch * 20 + 20):
        sfc = chart_factory.random_chart(seed)
        doc = serialize_reduced(sfc)
        assert parse_reduced(doc) == sfc
        assert parse_reduced(doc.encode('utf-8')) == sfc
        assert serialize_reduced(parse_reduced(doc)) == doc


def test_serialize_deterministic():
    assert serialize_reduced(chart_factory.random_chart(7)) == serialize_reduced(chart_factory.random_chart(7))


def test_document_layout(parallel_pair):
    doc = serialize_reduced(parallel_pair)
    assert doc.endswith('\n  ]\n}\n') and not doc.endswith('\n\n')
    assert '\r' not in doc and '\t' not in doc
    assert list(json.loads(doc)) == ['pou_name', 'variables', 'steps']
    assert list(json.loads(doc)['steps'][0]['children'][0]) == ['target', 'guard', 'jump']


def test_non_ascii_kept_raw():
    sfc = chart_factory.make_chart('Main', [('S0', [])], comments={'S0': 'Temperatur prüfen'})
    assert '"comment": "Temperatur prüfen"' in serialize_reduced(sfc)


def test_serialize_rejects_invalid_chart():
    with pytest.raises(ChartValidationError):
        serialize_reduced(chart_factory.make_chart('Main', [('S0', [('x', 'S1')]), ('S1', [])], initial=[]))


@pytest.mark.parametrize('seed', range(20))
def test_document_parts(seed):
    sfc = chart_factory.random_chart(seed)
    head, entries, tail = document_parts(sfc)
    assert len(entries) == len(sfc.steps)
    assert head + ',\n'.join(entries) + tail == serialize_reduced(sfc)
    assert all(e.startswith('    {\n      "name": ') and e.endswith('\n    }') for e in entries)


@pytest.mark.parametrize('separator', ['\u2028', '\u2029', '\x85', '\x0b', '\x0c', '\x1c', '\x1d', '\x1e'])
def test_document_parts_with_line_separators(separator):
    sfc = chart_factory.make_chart('Main', [('S0', [('x', 'S1')]), ('S1', [])],
                                   comments={'S0': 'before' + separator + 'after', 'S1': separator})
    head, entries, tail = document_parts(sfc)
    assert head + ',\n'.join(entries) + tail == serialize_reduced(sfc)
    assert [e.count('\n') for e in entries] == [12, 6]
    assert parse_reduced(head + ',\n'.join(entries) + tail).steps[0].comment == 'before' + separator + 'after'


@pytest.mark.parametrize('edit, field', [
    (lambda obj: obj['steps'][0]['children'][0].pop('guard'), 'steps[0].children[0].guard'),
    (lambda obj: obj['steps'][0]['children'][0].update(guard=''), 'steps[0].children[0].guard'),
    (lambda obj: obj['steps'][1].update(initial='yes'), 'steps[1].initial'),
    (lambda obj: obj['steps'][0]['children'][0].update(jump=0), 'steps[0].children[0].jump'),
    (lambda obj: obj['variables']['input'][0].pop('type'), 'variables.input[0].type'),
    (lambda obj: obj['variables'].pop('local'), 'variables.local'),
    (lambda obj: obj.update(extra=1), 'extra'),
    (lambda obj: obj.update(steps=[]), 'steps'),
    (lambda obj: obj.update(pou_name=None), 'pou_name'),
])
def test_schema_errors(linear3, edit, field):
    with pytest.raises(SchemaError) as info:
        parse_reduced(edited(linear3, edit))
    assert info.value.field == field


def test_top_level_not_object():
    with pytest.raises(SchemaError) as info:
        parse_reduced('[1, 2]')
    assert info.value.field == 'document'


def test_duplicate_field():
    doc = MINIMAL_DOC.replace('"pou_name": "Main",', '"pou_name": "Main",\n  "pou_name": "Other",')
    with pytest.raises(SchemaError) as info:
        parse_reduced(doc)
    assert info.value.field == 'pou_name'


@pytest.mark.parametrize('seed', range(5))
@pytest.mark.parametrize('fraction', [0.05, 0.25, 0.5, 0.75, 0.99])
def test_truncation_reported_at_end(seed, fraction):
    doc = serialize_reduced(chart_factory.random_chart(seed))
    truncated = doc[:max(1, int(len(doc) * fraction))]
    with pytest.raises(ParseError) as info:
        parse_reduced(truncated)
    assert info.value.position == len(truncated.encode('utf-8'))
    assert info.value.found == 'end of input'
    assert info.value.expected


def test_error_position_in_bytes():
    with pytest.raises(ParseError) as info:
        parse_reduced('{"pou_name": "Größe", x}')
    assert info.value.position == 24
    assert info.value.found == "'x'"


def test_unexpected_token():
    with pytest.raises(ParseError) as info:
        parse_reduced('{"pou_name": }')
    assert info.value.position == 13
    assert info.value.expected == ('value',)


def test_trailing_data():
    with pytest.raises(ParseError) as info:
        parse_reduced(MINIMAL_DOC + 'x')
    assert info.value.position == len(MINIMAL_DOC)
    assert info.value.expected == ('end of input',)


def test_invalid_utf8():
    with pytest.raises(ParseError) as info:
        parse_reduced(b'{"pou_name": "\xff"}')
    assert info.value.position == 14


def test_free_layout_accepted(choice):
    obj = json.loads(serialize_reduced(choice))
    compact = json.dumps(obj, separators=(',', ':'))
    assert parse_reduced(compact) == choice
    reordered = json.dumps({k: obj[k] for k in reversed(list(obj))}, indent='\t')
    assert parse_reduced(reordered) == choice


def test_parse_does_not_validate():
    doc = MINIMAL_DOC.replace('"initial": true', '"initial": false')
    assert not parse_reduced(doc).steps[0].is_initial


def test_schema_file():
    schema = load_schema()
    assert schema['title'] == 'ReducedSfc'
    assert schema['required'] == ['pou_name', 'variables', 'steps']
    assert schema['additionalProperties'] is False
