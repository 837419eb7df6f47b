# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Grammar of the canonical reduced document, and an incremental byte-level prefix recognizer for constrained
decoding.

The grammar is LL(1) at the byte level: every choice point is decided by the next input byte.  The recognizer is a
deterministic pushdown automaton driven directly by the grammar's production tree; a recognizer state is an
immutable value (stack of pending grammar frames plus consumed byte count), so states may be copied and advanced
independently, e.g. per beam.

.. note::
 * String contents are recognized by a dedicated machine implementing the canonical escaping of the reduced codec:
   raw UTF-8 for everything except `"`, `\\` and control characters; short escapes where JSON has them, otherwise
   lowercase `\\u00xx`.
 * Whitespace is fixed: non-canonical layout is rejected (the reduced parser itself is lenient).
"""
from collections import namedtuple
from enum import Enum

__all__ = ['Lit', 'Seq', 'Alt', 'Rep', 'Ref', 'Str', 'GrammarDescription', 'Classification', 'RecognizerState',
           'Rejected', 'grammar', 'recognizer_start', 'feed', 'classify', 'expected_bytes', 'recognizer_accepts']

Lit = namedtuple('Lit', "text")
Seq = namedtuple('Seq', "items")
Alt = namedtuple('Alt', "items")
Rep = namedtuple('Rep', "item")
Ref = namedtuple('Ref', "name")
Str = namedtuple('Str', "nonempty")


def _list_of(item, closing_indent):
    return Seq((Lit(b'['), Alt((Lit(b']'),
                                Seq((Lit(b'\n'), Ref(item), Rep(Seq((Lit(b',\n'), Ref(item)))),
                                     Lit(b'\n' + b' ' * closing_indent + b']')))))))


PRODUCTIONS = (
    ('document', Seq((Lit(b'{\n  "pou_name": '), Ref('string'),
                      Lit(b',\n  "variables": {\n    "input": '), Ref('variable_list'),
                      Lit(b',\n    "output": '), Ref('variable_list'),
                      Lit(b',\n    "local": '), Ref('variable_list'),
                      Lit(b'\n  },\n  "steps": [\n'), Ref('step'), Rep(Seq((Lit(b',\n'), Ref('step')))),
                      Lit(b'\n  ]\n}\n')))),
    ('variable_list', _list_of('variable', 4)),
    ('variable', Seq((Lit(b'      {\n        "name": '), Ref('string'),
                      Lit(b',\n        "type": '), Ref('string'),
                      Lit(b',\n        "default": '), Ref('optional_string'),
                      Lit(b'\n      }')))),
    ('step', Seq((Lit(b'    {\n      "name": '), Ref('string'),
                  Lit(b',\n      "initial": '), Ref('boolean'),
                  Lit(b',\n      "action": '), Ref('optional_string'),
                  Lit(b',\n      "comment": '), Ref('optional_string'),
                  Lit(b',\n      "children": '), Ref('child_list'),
                  Lit(b'\n    }')))),
    ('child_list', _list_of('child', 6)),
    ('child', Seq((Lit(b'        {\n          "target": '), Ref('string'),
                   Lit(b',\n          "guard": '), Ref('nonempty_string'),
                   Lit(b',\n          "jump": '), Ref('boolean'),
                   Lit(b'\n        }')))),
    ('optional_string', Alt((Ref('string'), Lit(b'null')))),
    ('boolean', Alt((Lit(b'true'), Lit(b'false')))),
    ('string', Str(False)),
    ('nonempty_string', Str(True)),
)
RULES = dict(PRODUCTIONS)

# String terminals, implemented natively by the string machine below.
TERMINALS = (
    ('string', '\'"\' char* \'"\''),
    ('nonempty_string', '\'"\' char+ \'"\''),
    ('char', 'unescaped | escape | utf8_multibyte'),
    ('unescaped', '[\\x20-\\x21\\x23-\\x5B\\x5D-\\x7F]'),
    ('escape', '"\\\\" ( ["\\\\\\"bfnrt] | "u000" [0-7bef] | "u001" [0-9a-f] )'),
    ('utf8_multibyte', '[\\xC2-\\xDF] cont | "\\xE0" [\\xA0-\\xBF] cont | [\\xE1-\\xEC\\xEE\\xEF] cont cont'
                       ' | "\\xED" [\\x80-\\x9F] cont | "\\xF0" [\\x90-\\xBF] cont cont'
                       ' | [\\xF1-\\xF3] cont cont cont | "\\xF4" [\\x80-\\x8F] cont cont'),
    ('cont', '[\\x80-\\xBF]'),
)

SHORT_ESCAPES = frozenset(b'"\\bfnrt')
HEX_LAST = {ord('0'): frozenset(b'01234567bef'), ord('1'): frozenset(b'0123456789abcdef')}
CONT = (0x80, 0xBF)


def _utf8_lead(byte):
    """ (continuation bytes needed, range of the first continuation byte) for a multi-byte lead, else None. """
    if 0xC2 <= byte <= 0xDF:
        return 1, CONT
    if byte == 0xE0:
        return 2, (0xA0, 0xBF)
    if 0xE1 <= byte <= 0xEC or byte in (0xEE, 0xEF):
        return 2, CONT
    if byte == 0xED:
        return 2, (0x80, 0x9F)
    if byte == 0xF0:
        return 3, (0x90, 0xBF)
    if 0xF1 <= byte <= 0xF3:
        return 3, CONT
    if byte == 0xF4:
        return 3, (0x80, 0x8F)
    return None


class GrammarDescription(namedtuple('GrammarDescription', "start productions terminals")):
    """ Context-free grammar of the canonical reduced document; terminals are bytes or byte classes. """
    __slots__ = ()

    def text(self):
        """ Renders the grammar in EBNF-like form: one production per line, `::=` separator, terminals quoted. """
        width = max(len(name) for name, _ in self.productions + self.terminals)
        lines = ["{} ::= {}".format(name.ljust(width), _render(node, top=True)) for name, node in self.productions
                 if not isinstance(node, Str)]
        lines += ["{} ::= {}".format(name.ljust(width), rhs) for name, rhs in self.terminals]
        return '\n'.join(lines) + '\n'


def _quote(data):
    out = []
    for byte in data:
        char = chr(byte)
        out.append({'\n': '\\n', '"': '\\"', '\\': '\\\\'}.get(char, char))
    return '"' + ''.join(out) + '"'


def _render(node, top=False):
    if isinstance(node, Lit):
        return _quote(node.text)
    if isinstance(node, Ref):
        return node.name
    if isinstance(node, Str):
        return 'nonempty_string' if node.nonempty else 'string'
    if isinstance(node, Rep):
        return "( {} )*".format(_render(node.item, top=True))
    if isinstance(node, Seq):
        text = ' '.join(_render(n) for n in node.items)
    else:
        text = ' | '.join(_render(n, top=True) for n in node.items)
    return text if top else "( {} )".format(text)


def grammar():
    """ Returns the grammar of the canonical reduced document. """
    return GrammarDescription('document', PRODUCTIONS, TERMINALS)


# ---------------------------------------------------------------------------------------------------------------
# FIRST sets / nullability (memoized by node value; the grammar has no left recursion).

_FIRST = {}
_NULLABLE = {}


def _nullable(node):
    if node not in _NULLABLE:
        if isinstance(node, (Lit, Str)):
            result = isinstance(node, Lit) and not node.text
        elif isinstance(node, Ref):
            result = _nullable(RULES[node.name])
        elif isinstance(node, Rep):
            result = True
        elif isinstance(node, Seq):
            result = all(_nullable(n) for n in node.items)
        else:
            result = any(_nullable(n) for n in node.items)
        _NULLABLE[node] = result
    return _NULLABLE[node]


def _first(node):
    if node not in _FIRST:
        if isinstance(node, Lit):
            result = frozenset(node.text[:1])
        elif isinstance(node, Str):
            result = frozenset(b'"')
        elif isinstance(node, Ref):
            result = _first(RULES[node.name])
        elif isinstance(node, Rep):
            result = _first(node.item)
        elif isinstance(node, Seq):
            result = frozenset()
            for item in node.items:
                result |= _first(item)
                if not _nullable(item):
                    break
        else:
            result = frozenset().union(*(_first(n) for n in node.items))
        _FIRST[node] = result
    return _FIRST[node]


# ---------------------------------------------------------------------------------------------------------------
# Recognizer.

class Classification(Enum):
    """ Status of a non-rejected recognizer state. """
    VALID_COMPLETE = 'ValidComplete'
    VALID_PREFIX = 'ValidPrefix'


RecognizerState = namedtuple('RecognizerState', "stack offset")
RecognizerState.__doc__ = """ Immutable recognizer state: pending grammar frames (top last) and bytes consumed. """

Rejected = namedtuple('Rejected', "position expected")
Rejected.__doc__ = """ Rejection: byte offset of the first unextendable position and the bytes legal there. """

# String machine sub-states.
_OPEN, _EMPTY, _TEXT, _ESCAPE = 'open', 'empty', 'text', 'escape'


def _string_step(frame, byte):
    """ Advances a string frame by one byte; returns the next frame, True (string closed) or None (rejected). """
    _, nonempty, sub = frame
    if sub == _OPEN:
        return ('S', nonempty, _EMPTY) if byte == 0x22 else None
    if isinstance(sub, tuple):
        if sub[0] == 'u':
            digits = sub[1]
            if len(digits) < 2:
                legal = byte == 0x30
            elif len(digits) == 2:
                legal = byte in (0x30, 0x31)
            else:
                legal = byte in HEX_LAST[digits[2]]
            if not legal:
                return None
            digits += bytes((byte,))
            return ('S', nonempty, _TEXT if len(digits) == 4 else ('u', digits))
        remaining, low, high = sub[1:]
        if not low <= byte <= high:
            return None
        return ('S', nonempty, _TEXT if remaining == 1 else ('c', remaining - 1) + CONT)
    if sub == _ESCAPE:
        if byte in SHORT_ESCAPES:
            return 'S', nonempty, _TEXT
        return ('S', nonempty, ('u', b'')) if byte == 0x75 else None
    if byte == 0x22:
        return None if (nonempty and sub == _EMPTY) else True
    if byte == 0x5C:
        return 'S', nonempty, _ESCAPE
    if 0x20 <= byte <= 0x7F:
        return 'S', nonempty, _TEXT
    lead = _utf8_lead(byte)
    if lead is None:
        return None
    return 'S', nonempty, ('c', lead[0]) + lead[1]


def _advance(stack, byte):
    """ Consumes one byte, mutating `stack`; returns False if the byte is not legal here. """
    while stack:
        frame = stack[-1]
        kind = frame[0]
        if kind == 'L':
            text, index = frame[1], frame[2]
            if text[index] != byte:
                return False
            if index + 1 == len(text):
                stack.pop()
            else:
                stack[-1] = ('L', text, index + 1)
            return True
        if kind == 'S':
            result = _string_step(frame, byte)
            if result is None:
                return False
            if result is True:
                stack.pop()
            else:
                stack[-1] = result
            return True

        node = stack.pop()[1]
        if isinstance(node, Lit):
            stack.append(('L', node.text, 0))
        elif isinstance(node, Str):
            stack.append(('S', node.nonempty, _OPEN))
        elif isinstance(node, Ref):
            stack.append(('N', RULES[node.name]))
        elif isinstance(node, Seq):
            stack.extend(('N', item) for item in reversed(node.items))
        elif isinstance(node, Rep):
            if byte in _first(node.item):
                stack.append(('N', node))
                stack.append(('N', node.item))
        else:
            choice = next((item for item in node.items if byte in _first(item)), None)
            if choice is None:
                return False
            stack.append(('N', choice))
    return False


def recognizer_start():
    """ Returns the state before any input. """
    return RecognizerState((('N', RULES['document']),), 0)


def expected_bytes(state):
    """ Returns the set of bytes that may legally follow the input consumed by `state`. """
    legal = set()
    for byte in range(256):
        if _advance(list(state.stack), byte):
            legal.add(byte)
    return frozenset(legal)


def feed(state, data):
    """
    Advances a recognizer state over input bytes.

    :param state: Non-rejected state
    :type  state: RecognizerState
    :param data:  Input bytes (text is encoded as UTF-8)
    :type  data:  Union(bytes, str)

    :return: Advanced state, or `Rejected` carrying the absolute offset of the first illegal byte
    :rtype:  Union(RecognizerState, Rejected)
    """
    if isinstance(data, str):
        data = data.encode('utf-8')
    stack = list(state.stack)
    for index, byte in enumerate(data):
        if not _advance(stack, byte):
            return Rejected(state.offset + index, _expected_at(state, data[:index]))
    return RecognizerState(tuple(stack), state.offset + len(data))


def _expected_at(state, consumed):
    stack = list(state.stack)
    for byte in consumed:
        _advance(stack, byte)
    return expected_bytes(RecognizerState(tuple(stack), state.offset + len(consumed)))


def classify(state):
    """ Classifies a non-rejected state: complete document, or proper prefix of one. """
    if isinstance(state, Rejected):
        raise TypeError("cannot classify a rejected input")
    complete = all(frame[0] == 'N' and _nullable(frame[1]) for frame in state.stack)
    return Classification.VALID_COMPLETE if complete else Classification.VALID_PREFIX


def recognizer_accepts(data):
    """ True if `data` is exactly a complete canonical document. """
    state = feed(recognizer_start(), data)
    return not isinstance(state, Rejected) and classify(state) is Classification.VALID_COMPLETE
