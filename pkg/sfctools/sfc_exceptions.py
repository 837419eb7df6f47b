# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" SFC toolchain exception class definitions. """

__all__ = ['SfcError', 'ParseError', 'SchemaError', 'ChartValidationError', 'NormalizationError', 'XmlError',
           'UnsupportedError', 'TemplateError', 'TooSmallError', 'EmbedderError', 'RetrievalError',
           'GenerationConfigError', 'TransportError', 'ScoreError']


class SfcError(Exception):
    """ Base class for all SFC toolchain errors. """


class ParseError(SfcError):
    """
    Malformed textual input (reduced document or Structured Text).

    :ivar position: Byte offset of the first offending byte (== input length => end of input)
    :ivar expected: Sorted tuple of descriptions of what would have been acceptable at `position`
    :ivar found:    Description of what was actually found at `position`
    :ivar end:      Byte offset just past the offending token (== `position` if unknown)
    """
    def __init__(self, position, expected=(), found='end of input', end=None):
        self.position = position
        self.expected = tuple(sorted(set(expected)))
        self.found = found
        self.end = position if end is None else end
        super().__init__("at byte {}: expected {}, found {}".format(
            position, ' or '.join(self.expected) or 'nothing', found))

    @property
    def span(self):
        """ (start, end) byte span of the offending token. """
        return self.position, self.end


class SchemaError(SfcError):
    """ Well-formed input whose structure lacks, duplicates or mistypes a required field or element. """
    def __init__(self, field, message):
        self.field = field
        super().__init__("{}: {}".format(field, message))


class ChartValidationError(SfcError):
    """ Operation requires a valid chart; carries the blocking diagnostics. """
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__('; '.join(str(d) for d in self.diagnostics) or "invalid chart")


class NormalizationError(SfcError):
    """ Chart or graph topology that cannot be expressed with divergence/convergence nodes. """
    def __init__(self, node, message):
        self.node = node
        super().__init__("{}: {}".format(node, message))


class XmlError(SfcError):
    """ Malformed XML. """


class UnsupportedError(SfcError):
    """ PLCopen content outside the supported subset (e.g. non-ST bodies). """
    def __init__(self, element, message):
        self.element = element
        super().__init__("{}: {}".format(element, message))


class TemplateError(SfcError):
    """ Metadata template lacks a required fragment kind. """
    def __init__(self, kind, message=None):
        self.kind = kind
        super().__init__(message or "template has no '{}' fragment".format(kind))


class TooSmallError(SfcError):
    """ Chart too small to select a masked cluster under the given parameters. """


class EmbedderError(SfcError):
    """ Embedding could not be computed for a text. """


class RetrievalError(SfcError):
    """ Retrieval index unusable (empty, inconsistent or unreadable). """


class GenerationConfigError(SfcError):
    """ Generation configuration invalid; raised before any request is sent. """


class TransportError(SfcError):
    """ Generation endpoint unreachable or returned an unusable response. """


class ScoreError(SfcError):
    """ Record set unsuitable for metric computation. """
