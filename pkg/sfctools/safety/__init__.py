# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Safety verification of charts: structural checks, guard-free state exploration, SMV export. """
from sfctools.safety.report import (Verdict, ViolationKind, FailureClass, Violation, VerifyLimits, SafetyReport,
                                    classify_failure)
from sfctools.safety.structural import (structural_check, parallel_regions)
from sfctools.safety.explore import (explore, replay, reachable_markings)
from sfctools.safety.smv import emit_smv
from sfctools.safety.verifier import verify
