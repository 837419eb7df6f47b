# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Reduced-document grammar and incremental prefix recognizer. """
import json
import random

import pytest

from sfctools.codecs.grammar import (Ref, Seq, Alt, Rep, Classification, Rejected, grammar, recognizer_start, feed,
                                     classify, expected_bytes, recognizer_accepts)
from sfctools.codecs.reduced import (serialize_reduced, parse_reduced)
from sfctools.sfc_exceptions import SchemaError

import chart_factory
from chart_factory import make_chart

# A mutated byte that is itself a legal continuation defers rejection; the longest deferral is `null` turned into
# an open string, which runs on until the line break ending the field.
MAX_DEFERRAL = 6
MUTATION_BYTES = tuple(range(0x20, 0x7F)) + (0x0A, 0x01, 0x5C, 0x80, 0xC3, 0xE0, 0xF0, 0xFF)


def document(seed, **kwargs):
    return serialize_reduced(chart_factory.random_chart(seed, **kwargs)).encode('utf-8')


def refs(node):
    if isinstance(node, Ref):
        yield node.name
    elif isinstance(node, (Seq, Alt)):
        for item in node.items:
            yield from refs(item)
    elif isinstance(node, Rep):
        yield from refs(node.item)


def test_grammar_text():
    description = grammar()
    lines = description.text().splitlines()
    assert lines[0].startswith('document ')
    assert all(line.count('::=') == 1 for line in lines)
    defined = {line.split('::=')[0].strip() for line in lines}
    assert {'document', 'step', 'child', 'variable', 'string', 'nonempty_string', 'char'} <= defined
    for _, node in description.productions:
        assert set(refs(node)) <= defined


@pytest.mark.parametrize('batch', range(10))
def test_prefixes_recognized(batch):
    for seed in range(batch * 100, batch * 100 + 100):
        doc = document(seed)
        state = recognizer_start()
        for index in range(len(doc)):
            assert classify(state) is Classification.VALID_PREFIX, (seed, index)
            state = feed(state, doc[index:index + 1])
            assert not isinstance(state, Rejected), (seed, index)
        assert classify(state) is Classification.VALID_COMPLETE
        assert state.offset == len(doc)


def test_empty_input_is_prefix():
    assert classify(recognizer_start()) is Classification.VALID_PREFIX
    assert not recognizer_accepts(b'')


def test_wrong_first_byte():
    assert feed(recognizer_start(), b'}') == Rejected(0, frozenset(b'{'))


def test_classify_rejected():
    with pytest.raises(TypeError):
        classify(Rejected(0, frozenset()))


def test_trailing_byte_rejected(linear3):
    doc = serialize_reduced(linear3).encode('utf-8')
    assert recognizer_accepts(doc)
    state = feed(recognizer_start(), doc)
    assert expected_bytes(state) == frozenset()
    assert feed(state, b'\n') == Rejected(len(doc), frozenset())


def test_unknown_field_rejected(linear3):
    doc = serialize_reduced(linear3).replace('{\n', '{\n  "extra": 1,\n', 1)
    result = feed(recognizer_start(), doc)
    assert isinstance(result, Rejected) and result.position == 5
    with pytest.raises(SchemaError):
        parse_reduced(doc)


def test_free_layout_rejected_but_parsed(choice):
    compact = json.dumps(json.loads(serialize_reduced(choice)), separators=(',', ':'))
    assert not recognizer_accepts(compact.encode('utf-8'))
    assert feed(recognizer_start(), compact).position == 1
    assert parse_reduced(compact) == choice


def test_empty_guard_rejected():
    doc = serialize_reduced(make_chart('Main', [('S0', [('x', 'S1')]), ('S1', [])]))
    mutated = doc.replace('"guard": "x"', '"guard": ""')
    result = feed(recognizer_start(), mutated)
    assert result.position == mutated.encode('utf-8').index(b'"guard": ""') + len('"guard": "')
    with pytest.raises(SchemaError):
        parse_reduced(mutated)


@pytest.mark.parametrize('text', ['tab\there', 'quote " and \\ backslash', 'bell \x07 ctl \x1f', 'Größe',
                                  'ожидание', 'emoji \U0001F527', 'del \x7f', 'line\r\nbreak'])
def test_string_escapes(text):
    sfc = make_chart('Main', [('S0', [])], comments={'S0': text}, actions={'S0': text})
    doc = serialize_reduced(sfc).encode('utf-8')
    assert recognizer_accepts(doc)
    assert parse_reduced(doc) == sfc


@pytest.mark.parametrize('escape', [b'\\/', b'\\u0041', b'\\u000A', b'\\x'])
def test_non_canonical_escapes_rejected(escape):
    doc = serialize_reduced(make_chart('Main', [('S0', [])], comments={'S0': 'ab'})).encode('utf-8')
    mutated = doc.replace(b'"ab"', b'"a' + escape + b'b"')
    assert not recognizer_accepts(mutated)


def test_invalid_utf8_rejected():
    doc = serialize_reduced(make_chart('Main', [('S0', [])], comments={'S0': 'ab'})).encode('utf-8')
    start = doc.index(b'"ab"') + 2
    for bad in (b'\xc0\xaf', b'\xed\xa0\x80', b'\xf4\x90\x80\x80', b'\x80'):
        result = feed(recognizer_start(), doc[:start] + bad + doc[start:])
        assert isinstance(result, Rejected)
        assert start <= result.position <= start + 1


@pytest.mark.parametrize('seed', range(10))
def test_feed_composes(seed):
    doc = document(seed)
    rng = random.Random(seed)
    cut = rng.randrange(len(doc))
    assert feed(feed(recognizer_start(), doc[:cut]), doc[cut:]) == feed(recognizer_start(), doc)


@pytest.mark.parametrize('seed', range(5))
def test_expected_bytes_agree_with_feed(seed):
    doc = document(seed, max_steps=4)
    rng = random.Random(seed)
    for cut in sorted(rng.sample(range(len(doc)), 8)):
        state = feed(recognizer_start(), doc[:cut])
        legal = expected_bytes(state)
        assert doc[cut] in legal
        for byte in range(256):
            accepted = not isinstance(feed(state, bytes((byte,))), Rejected)
            assert accepted is (byte in legal), (cut, byte)


def test_single_byte_mutations():
    rng = random.Random(20251018)
    exact = rejected = accepted = 0
    for seed in range(40):
        doc = document(seed, max_steps=4)
        for _ in range(25):
            index = rng.randrange(len(doc))
            byte = rng.choice([b for b in MUTATION_BYTES if b != doc[index]])
            mutated = doc[:index] + bytes((byte,)) + doc[index + 1:]
            result = feed(recognizer_start(), mutated)
            if isinstance(result, Rejected):
                rejected += 1
                assert index <= result.position <= index + MAX_DEFERRAL, (seed, index, byte)
                assert mutated[result.position] not in result.expected
                exact += result.position == index
            elif classify(result) is Classification.VALID_COMPLETE:
                accepted += 1
                text = mutated.decode('utf-8')
                assert json.dumps(json.loads(text), indent=2, ensure_ascii=False) + '\n' == text
                assert len(parse_reduced(text).steps) == len(parse_reduced(doc).steps)
            else:
                pytest.fail("mutated document neither rejected nor complete: seed {} index {}".format(seed, index))
    assert rejected > accepted
    assert exact * 2 >= rejected

