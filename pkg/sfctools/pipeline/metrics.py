# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Sample-set metrics: Gen@k (output parses), Pass@k (parses and passes the Structured Text check) and Safe@k
(verified safe), each under two definitions:

  * per-sample (default): fraction of the first k samples of every prompt, pooled, that meet the criterion;
  * any-of-k:             fraction of prompts with at least one of their first k samples meeting it.
"""
from collections import (Counter, OrderedDict)

from sfctools.pipeline.generation import SampleRecord
from sfctools.sfc_exceptions import ScoreError

__all__ = ['PER_SAMPLE', 'ANY_OF_K', 'samples_by_prompt', 'gen_at_k', 'pass_at_k', 'safe_at_k',
           'failure_distribution', 'score', 'format_score']

PER_SAMPLE = 'per-sample'
ANY_OF_K = 'any-of-k'

DEFINITIONS = {
    PER_SAMPLE: "fraction of the first k samples per prompt meeting the criterion",
    ANY_OF_K: "fraction of prompts with at least one of their first k samples meeting the criterion",
}


def _sample(record):
    return record if isinstance(record, SampleRecord) else SampleRecord.from_record(record)


def samples_by_prompt(records, k):
    """
    Groups records by prompt, keeping the first k samples (by sample index) of each.

    :param records: Sample records (`SampleRecord` or record-file dicts)
    :type  records: Iterable(Union(SampleRecord, dict))
    :param k:       Samples per prompt to evaluate (>= 1)
    :type  k:       int

    :return: prompt_id => first k samples, prompts sorted by identifier
    :rtype:  OrderedDict

    :raises ScoreError: k < 1, no records, a duplicated (prompt, sample index) pair, or a prompt with fewer than k
                        samples
    """
    if int(k) < 1:
        raise ScoreError("k must be at least 1, not {}".format(k))
    groups = {}
    for record in records:
        try:
            sample = _sample(record)
        except ValueError as exc:
            raise ScoreError(str(exc)) from exc
        group = groups.setdefault(sample.prompt_id, {})
        if sample.sample_index in group:
            raise ScoreError("prompt '{}' has sample {} more than once".format(sample.prompt_id,
                                                                              sample.sample_index))
        group[sample.sample_index] = sample
    if not groups:
        raise ScoreError("no sample records to score")
    short = sorted(str(p) for p, g in groups.items() if len(g) < k)
    if short:
        raise ScoreError("fewer than {} samples for prompt(s): {}".format(k, ', '.join(short)))
    return OrderedDict((prompt_id, [groups[prompt_id][i] for i in sorted(groups[prompt_id])[:k]])
                       for prompt_id in sorted(groups, key=str))


def _rate(records, k, criterion, any_of_k):
    groups = samples_by_prompt(records, k)
    if any_of_k:
        return sum(1 for samples in groups.values() if any(criterion(s) for s in samples)) / len(groups)
    return sum(1 for samples in groups.values() for s in samples if criterion(s)) / (len(groups) * k)


def gen_at_k(records, k, any_of_k=False):
    """ Gen@k: outputs that parse as reduced documents. """
    return _rate(records, k, lambda s: s.generated, any_of_k)


def pass_at_k(records, k, any_of_k=False):
    """
    Pass@k: outputs that pass all syntactic checks.

    :param records:  Sample records (every prompt needs at least k)
    :param k:        Samples per prompt evaluated
    :param any_of_k: True => any-of-k definition; False => per-sample definition

    :rtype: float
    """
    return _rate(records, k, lambda s: s.passed, any_of_k)


def safe_at_k(records, k, any_of_k=False):
    """ Safe@k: outputs verified safe (see `pass_at_k()` for parameters). """
    return _rate(records, k, lambda s: s.safe, any_of_k)


def failure_distribution(records, k):
    """ Failure class => count over the evaluated (first k per prompt) samples, classes sorted by name. """
    counts = Counter(s.failure_class for samples in samples_by_prompt(records, k).values() for s in samples
                     if s.failure_class is not None)
    return OrderedDict(sorted(counts.items()))


def score(records, k):
    """
    All metrics of a record set under both definitions.

    :return: Summary: k, prompt and sample counts, one rate table per definition, failure-class counts
    :rtype:  dict
    """
    groups = samples_by_prompt(records, k)
    records = [s for samples in groups.values() for s in samples]
    summary = {'k': k, 'prompts': len(groups), 'samples': len(groups) * k}
    for definition, any_of_k in ((PER_SAMPLE, False), (ANY_OF_K, True)):
        summary[definition] = OrderedDict((('gen_at_k', gen_at_k(records, k, any_of_k)),
                                           ('pass_at_k', pass_at_k(records, k, any_of_k)),
                                           ('safe_at_k', safe_at_k(records, k, any_of_k))))
    summary['failure_classes'] = failure_distribution(records, k)
    return summary


def format_score(summary, any_of_k=False):
    """ Text report of a `score()` summary, naming the definition used. """
    definition = ANY_OF_K if any_of_k else PER_SAMPLE
    rates = summary[definition]
    lines = ["{} prompts x {} samples (k={})".format(summary['prompts'], summary['k'], summary['k']),
             "definition: {} ({})".format(definition, DEFINITIONS[definition]),
             "Gen@{k}:  {:.4f}".format(rates['gen_at_k'], k=summary['k']),
             "Pass@{k}: {:.4f}".format(rates['pass_at_k'], k=summary['k']),
             "Safe@{k}: {:.4f}".format(rates['safe_at_k'], k=summary['k'])]
    if summary['failure_classes']:
        lines.append("failures: " + ', '.join("{}={}".format(c, n) for c, n in summary['failure_classes'].items()))
    return '\n'.join(lines) + '\n'
