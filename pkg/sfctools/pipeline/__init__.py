# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Generation against chat-completions endpoints, sample metrics and the offline mock endpoint. """
from sfctools.pipeline.generation import (GenerationConfig, SampleRecord, evaluate_output, build_messages, generate,
                                          generate_batch)
from sfctools.pipeline.metrics import (gen_at_k, pass_at_k, safe_at_k, failure_distribution, score, format_score)
