# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Safety verification results: verdicts, violations, limits and failure classes.
"""
from collections import namedtuple
from enum import Enum

from sfctools.config import SfcConfig
from sfctools.model import (DiagCode, Diagnostic, Severity)

__all__ = ['Verdict', 'ViolationKind', 'FailureClass', 'Violation', 'VerifyLimits', 'SafetyReport', 'PRESETS',
           'classify_failure']


class Verdict(Enum):
    """ Outcome of a verification run. """
    SAFE = 'Safe'
    UNSAFE = 'Unsafe'
    TIMEOUT = 'Timeout'


class ViolationKind(Enum):
    """ Safety property violated. """
    TOKEN_OVERFLOW = 'TokenOverflow'
    UNREACHABLE_STEP = 'UnreachableStep'
    UNATTAINABLE_CONVERGENCE = 'UnattainableConvergence'
    ILLEGAL_JUMP = 'IllegalJump'


class FailureClass(Enum):
    """ Failure categories, in order of increasing strictness of the check that detects them. """
    INIT_STEP = 'InitStepError'
    TRANSITION = 'TransitionError'
    SAFETY = 'SafetyError'
    TIMEOUT = 'TimeoutError'


class Violation(namedtuple('Violation', "kind element witness")):
    """
    One violated safety property.

    :ivar kind:    Violation kind
    :ivar element: Offending element: double-marked step names ("A" or "A, B"), unreachable step name,
                   converging step names joined by '+', or jump edge "S1->S0"
    :ivar witness: Firing trace (tuple of transition node ids from the initial marking, the last one causing the
                   violation) for TokenOverflow; the element name otherwise
    """
    __slots__ = ()

    def __new__(cls, kind, element, witness=None):
        witness = tuple(witness) if isinstance(witness, (list, tuple)) else (element if witness is None else witness)
        return super().__new__(cls, kind, element, witness)

    @property
    def has_trace(self):
        """ True if the witness is a replayable firing trace. """
        return isinstance(self.witness, tuple)


class VerifyLimits(namedtuple('VerifyLimits', "max_states max_time")):
    """ Exploration limits: maximum number of distinct markings and maximum wall time (seconds). """
    __slots__ = ()

    def __new__(cls, max_states, max_time):
        max_states, max_time = int(max_states), float(max_time)
        if max_states <= 0 or max_time <= 0:
            raise ValueError("verification limits must be positive: {}, {}".format(max_states, max_time))
        return super().__new__(cls, max_states, max_time)

    @classmethod
    def preset(cls, name, config=None):
        """
        Limits for a named preset.

        :param name:   'desk' (default limits), 'exhaustive' (six-hour budget) or 'timeout' (forces Timeout verdicts on
                       all but trivial charts)
        :type  name:   str
        :param config: Configuration (None => global `SfcConfig`)
        """
        config = config or SfcConfig
        prefix = PRESETS.get(name)
        if prefix is None:
            raise ValueError("unknown verification preset '{}' (choose from {})".format(name, ', '.join(PRESETS)))
        return cls(getattr(config, prefix + 'MAX_STATES'), getattr(config, prefix + 'MAX_TIME'))


# preset name => configuration key prefix
PRESETS = {'desk': 'VERIFY_', 'exhaustive': 'VERIFY_EXHAUSTIVE_', 'timeout': 'VERIFY_TIMEOUT_'}


class SafetyReport(namedtuple('SafetyReport', "verdict violations explored_states elapsed diagnostics",
                              defaults=((),))):
    """
    Verification result.

    :ivar verdict:         Safe, Unsafe or Timeout
    :ivar violations:      Violations found (empty unless Unsafe)
    :ivar explored_states: Distinct markings visited (0 when exploration did not run)
    :ivar elapsed:         Wall time spent (seconds)
    :ivar diagnostics:     Structural diagnostics that stopped verification before exploration
    """
    __slots__ = ()

    def __new__(cls, verdict, violations=(), explored_states=0, elapsed=0.0, diagnostics=()):
        return super().__new__(cls, verdict, tuple(violations), explored_states, elapsed, tuple(diagnostics))

    def as_record(self):
        """ JSON-serializable form (one line of a line-delimited report file). """
        return {
            'verdict': self.verdict.value,
            'violations': [{'kind': v.kind.value, 'element': v.element,
                            'witness': list(v.witness) if v.has_trace else v.witness} for v in self.violations],
            'explored_states': self.explored_states,
            'elapsed': round(self.elapsed, 6),
            'diagnostics': [{'code': d.code.value, 'element': d.element, 'message': d.message,
                             'severity': d.severity.value} for d in self.diagnostics],
            'failure_class': None if self.verdict is Verdict.SAFE else classify_failure(self).value,
        }

    @classmethod
    def from_record(cls, record):
        """ Inverse of `as_record()` (diagnostic spans are not carried). """
        return cls(Verdict(record['verdict']),
                   [Violation(ViolationKind(v['kind']), v['element'], v['witness']) for v in record['violations']],
                   record['explored_states'], record['elapsed'],
                   [Diagnostic(DiagCode(d['code']), d['element'], d['message'], Severity(d['severity']))
                    for d in record.get('diagnostics', [])])


def classify_failure(report):
    """
    Maps a failed verification to its failure class; the first matching class wins: initial-step diagnostics,
    transition-target diagnostics, any other structural diagnostic or violation, timeout.

    :param report: Verification report (not Safe)
    :type  report: SafetyReport

    :rtype: FailureClass

    :raises ValueError: Report is Safe
    """
    if report.verdict is Verdict.SAFE:
        raise ValueError("a Safe report has no failure class")
    codes = {d.code for d in report.diagnostics if d.is_error}
    if DiagCode.INIT_STEP in codes:
        return FailureClass.INIT_STEP
    if DiagCode.TRANSITION in codes:
        return FailureClass.TRANSITION
    if codes or report.violations:
        return FailureClass.SAFETY
    return FailureClass.TIMEOUT if report.verdict is Verdict.TIMEOUT else FailureClass.SAFETY
