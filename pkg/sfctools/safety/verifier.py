# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Safety ladder: structural checks, then exploration of the normalized graph. """
import logging
import time

from sfctools.model import DiagCode
from sfctools.codecs.normalize import normalize
from sfctools.safety.report import (Verdict, ViolationKind, Violation, SafetyReport, VerifyLimits)
from sfctools.safety.structural import structural_check
from sfctools.safety.explore import explore

__all__ = ['verify']

log = logging.getLogger(__name__)


def verify(sfc, limits=None):
    """
    Verifies a chart.

    :param sfc:    Chart (may be invalid)
    :type  sfc:    ReducedSfc
    :param limits: Exploration limits (None => 'desk' preset)
    :type  limits: Union(VerifyLimits, None)

    :return: Unsafe report carrying the structural diagnostics if any structural check fails (exploration is not
             run; illegal jumps are also listed as violations); the exploration report otherwise
    :rtype:  SafetyReport
    """
    limits = limits or VerifyLimits.preset('desk')
    started = time.monotonic()
    diagnostics = structural_check(sfc)
    if diagnostics:
        log.info("POU '{}': {} structural diagnostics, exploration skipped".format(sfc.pou_name, len(diagnostics)))
        violations = [Violation(ViolationKind.ILLEGAL_JUMP, d.element) for d in diagnostics
                      if d.code is DiagCode.ILLEGAL_JUMP]
        return SafetyReport(Verdict.UNSAFE, violations, 0, time.monotonic() - started, diagnostics)
    report = explore(normalize(sfc), limits)
    log.info("POU '{}': {} after {} states".format(sfc.pou_name, report.verdict.value, report.explored_states))
    return report._replace(elapsed=time.monotonic() - started)
