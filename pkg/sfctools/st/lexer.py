# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Structured Text tokenizer (ply).

Keywords are case-insensitive; identifiers keep their case.  Digits right after a '.' never start a real literal, so
`x.1.2` is a bit-access chain.  Token positions are byte offsets into the UTF-8 encoding of the source.
"""
# pylint:disable=invalid-name,missing-function-docstring
from collections import namedtuple

from ply import lex

from sfctools.sfc_exceptions import ParseError

__all__ = ['Token', 'KEYWORDS', 'tokenize', 'describe']

KEYWORDS = ('IF', 'THEN', 'ELSIF', 'ELSE', 'END_IF', 'CASE', 'OF', 'END_CASE', 'FOR', 'TO', 'BY', 'DO', 'END_FOR',
            'WHILE', 'END_WHILE', 'REPEAT', 'UNTIL', 'END_REPEAT', 'EXIT', 'RETURN', 'AND', 'OR', 'XOR', 'NOT',
            'MOD', 'TRUE', 'FALSE')

Token = namedtuple('Token', "type value start end")
Token.__doc__ = """ Lexical token; `start`/`end` are byte offsets. """

PUNCTUATION = {
    'ASSIGN': ':=', 'OUTPUT_ASSIGN': '=>', 'NE': '<>', 'LE': '<=', 'GE': '>=', 'EQ': '=', 'LT': '<', 'GT': '>',
    'POWER': '**', 'PLUS': '+', 'MINUS': '-', 'TIMES': '*', 'DIVIDE': '/', 'AMPERSAND': '&', 'LPAREN': '(',
    'RPAREN': ')', 'LBRACKET': '[', 'RBRACKET': ']', 'COMMA': ',', 'SEMI': ';', 'DOTDOT': '..', 'DOT': '.',
    'COLON': ':',
}
LITERALS = {'INTEGER': 'integer literal', 'REAL': 'real literal', 'TIME': 'time literal', 'TYPED': 'typed literal',
            'STRING': 'string literal', 'IDENT': 'identifier', 'DIRECT': 'direct address', 'EOF': 'end of input'}


def describe(token_type):
    """ Human-readable description of a token type (used in expected-token sets). """
    if token_type in PUNCTUATION:
        return "'{}'".format(PUNCTUATION[token_type])
    return LITERALS.get(token_type, token_type)


class _StLexer:
    """ ply rule module; function rules are tried in definition order, string rules longest first. """
    tokens = tuple(KEYWORDS) + tuple(PUNCTUATION) + tuple(t for t in LITERALS if t != 'EOF')

    t_ignore = ' \t\r\f'

    t_ASSIGN = r':='
    t_OUTPUT_ASSIGN = r'=>'
    t_NE = r'<>'
    t_LE = r'<='
    t_GE = r'>='
    t_EQ = r'='
    t_LT = r'<'
    t_GT = r'>'
    t_POWER = r'\*\*'
    t_PLUS = r'\+'
    t_MINUS = r'-'
    t_TIMES = r'\*'
    t_DIVIDE = r'/'
    t_AMPERSAND = r'&'
    t_LPAREN = r'\('
    t_RPAREN = r'\)'
    t_LBRACKET = r'\['
    t_RBRACKET = r'\]'
    t_COMMA = r','
    t_SEMI = r';'
    t_DOTDOT = r'\.\.'
    t_DOT = r'\.'
    t_COLON = r':'

    def t_block_comment(self, t):
        r'\(\*(.|\n)*?\*\)'
        t.lexer.lineno += t.value.count('\n')

    def t_open_comment(self, t):
        r'\(\*(.|\n)*'
        raise _LexError(t.lexpos, "unterminated comment")

    def t_line_comment(self, t):
        r'//[^\n]*'

    def t_newline(self, t):
        r'\n+'
        t.lexer.lineno += len(t.value)

    def t_TIME(self, t):
        r'(?i:LTIME|TIME|LT|T)\#[-+]?[0-9][0-9A-Za-z_.]*|(?i:DATE_AND_TIME|DATE|TIME_OF_DAY|TOD|DT|D)\#[0-9][0-9A-Za-z_.:\-]*'  # noqa: E501 pylint:disable=line-too-long
        return t

    def t_TYPED(self, t):
        r'[A-Za-z_][A-Za-z0-9_]*\#(?:(?:2|8|16)\#[0-9A-Fa-f_]+|[-+]?[0-9][0-9_]*(?:\.[0-9_]+)?(?:[eE][-+]?[0-9]+)?|[A-Za-z_][A-Za-z0-9_]*)'  # noqa: E501 pylint:disable=line-too-long
        return t

    def t_REAL(self, t):
        r'(?<!\.)(?:[0-9][0-9_]*\.[0-9][0-9_]*(?:[eE][-+]?[0-9]+)?|[0-9][0-9_]*[eE][-+]?[0-9]+)'
        return t

    def t_INTEGER(self, t):
        r'(?:2|8|16)\#[0-9A-Fa-f_]+|[0-9][0-9_]*'
        return t

    def t_STRING(self, t):
        r'\'(?:\$.|[^\'$\n])*\'|"(?:\$.|[^"$\n])*"'
        return t

    def t_DIRECT(self, t):
        r'%[IQM][XBWDL*]?[0-9]+(?:\.[0-9]+)*'
        return t

    def t_IDENT(self, t):
        r'[A-Za-z_][A-Za-z0-9_]*'
        upper = t.value.upper()
        if upper in KEYWORDS:
            t.type = upper
        return t

    def t_error(self, t):
        found = "unterminated string" if t.value[0] in ('\'', '"') else repr(t.value[0])
        raise _LexError(t.lexpos, found)


class _LexError(Exception):
    def __init__(self, index, found):
        self.index = index
        self.found = found
        super().__init__(index, found)


_LEXER = lex.lex(module=_StLexer(), optimize=False)


def _byte_offsets(text):
    """ Character index => byte offset table (one extra entry for end of text). """
    offsets = [0]
    for char in text:
        offsets.append(offsets[-1] + len(char.encode('utf-8')))
    return offsets


def tokenize(text):
    """
    Splits ST source into tokens, ending with an EOF token.

    :param text: ST source text
    :type  text: str

    :return: Tokens (whitespace and comments dropped)
    :rtype:  list(Token)

    :raises ParseError: Character that starts no token (including an unterminated comment or string)
    """
    offsets = _byte_offsets(text)
    lexer = _LEXER.clone()
    lexer.input(text)
    tokens = []
    try:
        for tok in iter(lexer.token, None):
            tokens.append(Token(tok.type, tok.value, offsets[tok.lexpos], offsets[tok.lexpos + len(tok.value)]))
    except _LexError as exc:
        raise ParseError(offsets[exc.index], ("token",), exc.found, offsets[exc.index + 1]) from exc
    tokens.append(Token('EOF', '', offsets[-1], offsets[-1]))
    return tokens
