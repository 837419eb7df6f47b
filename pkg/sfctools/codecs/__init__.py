# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Chart codecs: canonical reduced text (with its grammar and prefix recognizer) and PLCopen XML. """
from sfctools.codecs.reduced import (serialize_reduced, parse_reduced, document_parts, load_schema)
from sfctools.codecs.grammar import (grammar, recognizer_start, feed, classify, expected_bytes, recognizer_accepts,
                                     Classification, Rejected)
from sfctools.codecs.normalize import (normalize, denormalize, check_graph, graph_transitions, NodeKind, GraphNode,
                                       NormalizedGraph)
from sfctools.codecs.plcopen import (MetadataTemplate, parse_plcopen, parse_plcopen_project, emit_plcopen)
