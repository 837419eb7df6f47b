# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Next-token training records, line-delimited record files and corpus splitting.
"""
import json
import random
import threading
from pathlib import Path

from sfctools.codecs.reduced import serialize_reduced

__all__ = ['ntp_sequence', 'write_records', 'read_records', 'split_corpus', 'SPLIT_NAMES']

SPLIT_NAMES = ('train', 'validation', 'test')

_WRITE_LOCK = threading.Lock()


def ntp_sequence(sfc, prompt, chart_id=None):
    """
    Next-token training record: the prompt and the chart's canonical document as completion.

    :raises ChartValidationError: Chart invalid
    """
    return {'kind': 'ntp', 'chart_id': sfc.pou_name if chart_id is None else chart_id, 'prompt': prompt,
            'completion': serialize_reduced(sfc)}


def write_records(path, records):
    """
    Appends records to a line-delimited record file, one JSON object per line; each call's lines are written under
    a process-wide lock so concurrent writers never interleave within a record.

    :return: Number of records written
    :rtype:  int
    """
    lines = ''.join(json.dumps(record, ensure_ascii=False) + '\n' for record in records)
    with _WRITE_LOCK:
        with Path(path).open('a', encoding='utf-8') as stream:
            stream.write(lines)
            stream.flush()
    return lines.count('\n')


def read_records(path):
    """ Yields the records of a line-delimited record file (blank lines skipped). """
    with Path(path).open(encoding='utf-8') as stream:
        for line in stream:
            if line.strip():
                yield json.loads(line)


def split_corpus(chart_ids, seed, ratios=(0.8, 0.1, 0.1)):
    """
    Deterministic train/validation/test split.

    :param chart_ids: Chart identifiers (order irrelevant; duplicates collapsed)
    :type  chart_ids: Iterable(str)
    :param seed:      Shuffle seed
    :type  seed:      int
    :param ratios:    Train, validation and test fractions (non-negative, summing to 1)
    :type  ratios:    tuple(float, float, float)

    :return: split name => sorted chart identifiers
    :rtype:  dict
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must be three non-negative fractions summing to 1: {}".format(ratios))
    ids = sorted(set(chart_ids))
    random.Random(seed).shuffle(ids)
    train = round(len(ids) * ratios[0])
    validation = min(len(ids) - train, round(len(ids) * ratios[1]))
    parts = (ids[:train], ids[train:train + validation], ids[train + validation:])
    return {name: sorted(part) for name, part in zip(SPLIT_NAMES, parts)}
