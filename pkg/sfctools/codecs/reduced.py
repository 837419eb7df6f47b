# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Canonical reduced-text codec.

The canonical document is the JSON rendering of a chart with fixed field order, two-space indentation, LF line
endings, raw (unescaped) non-ASCII text and a single trailing newline::

    {
      "pou_name": "Main",
      "variables": {
        "input": [],
        "output": [],
        "local": [
          {
            "name": "xDone",
            "type": "BOOL",
            "default": "FALSE"
          }
        ]
      },
      "steps": [
        {
          "name": "S0",
          "initial": true,
          "action": "xDone := FALSE;",
          "comment": null,
          "children": [
            {
              "target": "S1",
              "guard": "xStart",
              "jump": false
            }
          ]
        },
        ...
      ]
    }

The layout is documented as a JSON schema in `reduced_schema.json` (shipped alongside).
"""
import json
from pathlib import Path

from sfctools.model import (SECTIONS, VariableDecl, Edge, StepNode, ReducedSfc, validate_reduced)
from sfctools.sfc_exceptions import (SfcError, ParseError, SchemaError, ChartValidationError)

__all__ = ['SCHEMA_FILE', 'serialize_reduced', 'parse_reduced', 'document_parts', 'load_schema']

SCHEMA_FILE = Path(__file__).resolve().parent.joinpath('reduced_schema.json')

CHART_FIELDS = ('pou_name', 'variables', 'steps')
VARIABLE_FIELDS = ('name', 'type', 'default')
STEP_FIELDS = ('name', 'initial', 'action', 'comment', 'children')
CHILD_FIELDS = ('target', 'guard', 'jump')

# Expected-set descriptions for the standard JSON decoder's error messages.
EXPECTED_BY_MESSAGE = {
    "Expecting value": ("value",),
    "Expecting ',' delimiter": ("','", "']'", "'}'"),
    "Expecting ':' delimiter": ("':'",),
    "Expecting property name enclosed in double quotes": ("'\"'", "'}'"),
    "Unterminated string starting at": ("'\"'",),
    "Invalid control character at": ("escaped character",),
    "Invalid \\escape": ("escape sequence",),
    "Invalid \\uXXXX escape": ("escape sequence",),
    "Extra data": ("end of input",),
}
KEYWORDS = ('true', 'false', 'null')


def _dumps(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _chart_object(sfc):
    return {
        'pou_name': sfc.pou_name,
        'variables': {section: [{'name': v.name, 'type': v.data_type, 'default': v.default_value}
                                for v in sfc.section(section)]
                      for section in SECTIONS},
        'steps': [_step_object(step) for step in sfc.steps],
    }


def _step_object(step):
    return {
        'name': step.name,
        'initial': step.is_initial,
        'action': step.action,
        'comment': step.comment,
        'children': [{'target': e.target, 'guard': e.guard, 'jump': e.is_jump} for e in step.children],
    }


def document_parts(sfc):
    """
    Splits the canonical document of a valid chart into the text before the first step entry, the step entries
    (in chart order, without their separators) and the text after the last step entry.

    .. note::
     * `head + ',\\n'.join(entries) + tail == serialize_reduced(sfc)`
    """
    entries = ['\n'.join('    ' + line for line in _dumps(_step_object(step)).split('\n')) for step in sfc.steps]
    document = _dumps(_chart_object(sfc)) + '\n'
    body = ',\n'.join(entries)
    tail = '\n  ]\n}\n'
    head = document[:len(document) - len(body) - len(tail)]
    if document != head + body + tail:
        raise SfcError("step entries of '{}' misaligned in canonical document".format(sfc.pou_name))
    return head, entries, tail


def serialize_reduced(sfc):
    """
    Renders a chart as its canonical reduced document.

    :param sfc: Chart to render
    :type  sfc: ReducedSfc

    :return: Canonical document text
    :rtype:  str

    :raises ChartValidationError: Chart fails strict validation
    """
    diagnostics = validate_reduced(sfc, strict=True)
    if diagnostics:
        raise ChartValidationError(diagnostics)
    return _dumps(_chart_object(sfc)) + '\n'


def _reject_duplicates(pairs):
    obj = {}
    for key, val in pairs:
        if key in obj:
            raise SchemaError(key, "field duplicated")
        obj[key] = val
    return obj


def _decode_error(text, exc):
    message = exc.msg
    position = len(text[:exc.pos].encode('utf-8'))
    size = len(text.encode('utf-8'))
    rest = text[exc.pos:].rstrip()
    if message.startswith("Unterminated string") or (message == "Expecting value" and rest and
                                                     any(k.startswith(rest) for k in KEYWORDS)):
        position = size
    found = 'end of input' if position >= size else repr(text[exc.pos])
    return ParseError(position, EXPECTED_BY_MESSAGE.get(message, ("valid JSON",)), found)


def _fields(obj, fields, path):
    if not isinstance(obj, dict):
        raise SchemaError(path or 'document', "must be an object")
    for field in fields:
        if field not in obj:
            raise SchemaError(_join(path, field), "required field missing")
    for field in obj:
        if field not in fields:
            raise SchemaError(_join(path, field), "unknown field")
    return [obj[f] for f in fields]


def _join(path, field):
    return "{}.{}".format(path, field) if path else field


def _typed(value, types, path, what):
    if not isinstance(value, types) or (bool not in types and isinstance(value, bool)):
        raise SchemaError(path, "must be {}".format(what))
    return value


def _string(value, path, optional=False, nonempty=False):
    if optional and value is None:
        return None
    _typed(value, (str,), path, "a string or null" if optional else "a string")
    if nonempty and not value:
        raise SchemaError(path, "must be a non-empty string")
    return value


def _list(value, path, nonempty=False):
    _typed(value, (list,), path, "an array")
    if nonempty and not value:
        raise SchemaError(path, "must be a non-empty array")
    return value


def _build_chart(obj):
    pou_name, variables, steps = _fields(obj, CHART_FIELDS, '')
    decls = []
    for section, entries in zip(SECTIONS, _fields(variables, SECTIONS, 'variables')):
        for index, entry in enumerate(_list(entries, 'variables.' + section)):
            path = "variables.{}[{}]".format(section, index)
            name, data_type, default = _fields(entry, VARIABLE_FIELDS, path)
            decls.append(VariableDecl(_string(name, path + '.name'), _string(data_type, path + '.type'),
                                      _string(default, path + '.default', optional=True), section))
    nodes = []
    for index, entry in enumerate(_list(steps, 'steps', nonempty=True)):
        path = "steps[{}]".format(index)
        name, initial, action, comment, children = _fields(entry, STEP_FIELDS, path)
        edges = []
        for cindex, child in enumerate(_list(children, path + '.children')):
            cpath = "{}.children[{}]".format(path, cindex)
            target, guard, jump = _fields(child, CHILD_FIELDS, cpath)
            edges.append(Edge(_string(guard, cpath + '.guard', nonempty=True), _string(target, cpath + '.target'),
                              _typed(jump, (bool,), cpath + '.jump', "a boolean")))
        nodes.append(StepNode(_string(name, path + '.name'), _typed(initial, (bool,), path + '.initial', "a boolean"),
                              _string(action, path + '.action', optional=True),
                              _string(comment, path + '.comment', optional=True), edges))
    return ReducedSfc(_string(pou_name, 'pou_name'), decls, nodes)


def parse_reduced(doc):
    """
    Parses a reduced document (canonical or with free whitespace and field order).

    :param doc: Document text or UTF-8 bytes
    :type  doc: Union(str, bytes)

    :return: Parsed chart (not validated: see `validate_reduced()`)
    :rtype:  ReducedSfc

    :raises ParseError:  Malformed syntax; position is the byte offset of the first offending byte
    :raises SchemaError: Well-formed document with a missing, duplicated, unknown or mistyped field
    """
    if isinstance(doc, (bytes, bytearray)):
        try:
            doc = bytes(doc).decode('utf-8')
        except UnicodeDecodeError as exc:
            raise ParseError(exc.start, ("UTF-8 text",), "byte 0x{:02x}".format(doc[exc.start])) from exc
    try:
        obj = json.loads(doc, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise _decode_error(doc, exc) from exc
    return _build_chart(obj)


def load_schema():
    """ Loads the JSON schema describing the canonical reduced document. """
    return json.loads(SCHEMA_FILE.read_text(encoding='utf-8'))
