# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Chart generation against a chat-completions endpoint, with every sample run through the verdict ladder
(reduced parse => Structured Text check => safety verification).

Request body (widely used chat-completions shape)::

    {"model": <name>, "messages": [{"role": "system"|"user"|"assistant", "content": <text>}, ...],
     "temperature": <float>, "n": <samples>[, "seed": <int>]
     [, "response_format": {"type": "json_schema", "json_schema": {"name": "reduced_sfc", "schema": {...}}}]}

The response carries one completion per choice in `choices[i].message.content`; the bearer token, if any, comes
from the `LLM_API_KEY` environment variable.
"""
import logging
import os
import re
import time
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pystache
import requests

from sfctools.config import (SfcConfig, env_flag)
from sfctools.codecs.grammar import (feed, classify, recognizer_start, Classification, Rejected)
from sfctools.codecs.reduced import (parse_reduced, load_schema)
from sfctools.datagen.ntp import write_records
from sfctools.datagen.retrieval import retrieve
from sfctools.safety.report import (Verdict, VerifyLimits, classify_failure)
from sfctools.safety.verifier import verify
from sfctools.sfc_exceptions import (ParseError, SchemaError, GenerationConfigError, TransportError)
from sfctools.st.symbols import check_chart_st

__all__ = ['PROMPT_TEMPLATE', 'PASS', 'FAIL', 'PARSE_FAILURE', 'ST_FAILURE', 'TRANSPORT_FAILURE', 'GenerationConfig',
           'SampleRecord', 'Evaluation', 'extract_document', 'evaluate_output', 'build_messages',
           'request_completions', 'generate', 'generate_batch']

log = logging.getLogger(__name__)

PROMPT_TEMPLATE = Path(__file__).resolve().parent.joinpath('templates', 'task_prompt.mustache')

PASS, FAIL = 'pass', 'fail'
PARSE_FAILURE = 'ParseError'
ST_FAILURE = 'StSyntaxError'
TRANSPORT_FAILURE = 'TransportError'

# Samples failing with these classes are not retried.
NOT_RETRIED = (None, TRANSPORT_FAILURE, 'TimeoutError')

RETRY_MESSAGE = ("The chart above was rejected ({}):\n{}\n"
                 "Correct it and reply with the complete corrected document only.")

FENCE_RE = re.compile(r'```[A-Za-z0-9_+-]*[ \t]*\r?\n(.*?)```', re.DOTALL)


class GenerationConfig(namedtuple('GenerationConfig', "endpoint_url model temperature samples few_shot constrained "
                                                      "max_retries limits timeout parallelism seed")):
    """
    Generation run parameters.

    :ivar endpoint_url: Chat-completions URL
    :ivar model:        Model name sent with every request
    :ivar temperature:  Sampling temperature (>= 0)
    :ivar samples:      Samples per prompt, k (>= 1)
    :ivar few_shot:     Retrieved demonstrations per prompt (0 => zero-shot)
    :ivar constrained:  True => attach the reduced-format schema and screen outputs with the recognizer
    :ivar max_retries:  Retries of a failed sample with its diagnostics appended to the context (0 => single shot)
    :ivar limits:       Safety verification limits
    :ivar timeout:      HTTP request timeout (seconds)
    :ivar parallelism:  Prompts processed concurrently by `generate_batch()`
    :ivar seed:         Sampling seed forwarded to the endpoint (None => not sent)
    """
    __slots__ = ()

    def __new__(cls, endpoint_url, model, temperature=0.3, samples=5, few_shot=3, constrained=False, max_retries=0,
                limits=None, timeout=120.0, parallelism=4, seed=None):
        try:
            temperature, timeout = float(temperature), float(timeout)
            samples, few_shot, max_retries, parallelism = (int(v) for v in (samples, few_shot, max_retries,
                                                                            parallelism))
            seed = None if seed is None else int(seed)
        except (TypeError, ValueError) as exc:
            raise GenerationConfigError("non-numeric generation parameter: {}".format(exc)) from exc
        if not endpoint_url:
            raise GenerationConfigError("no endpoint URL configured")
        if temperature < 0:
            raise GenerationConfigError("temperature must be non-negative, not {}".format(temperature))
        if samples < 1:
            raise GenerationConfigError("samples per prompt must be at least 1, not {}".format(samples))
        if few_shot < 0 or max_retries < 0:
            raise GenerationConfigError("few-shot count and retries must be non-negative")
        if parallelism < 1 or timeout <= 0:
            raise GenerationConfigError("parallelism and request timeout must be positive")
        limits = limits or VerifyLimits.preset('desk')
        if not isinstance(limits, VerifyLimits):
            raise GenerationConfigError("verification limits must be VerifyLimits, not {!r}".format(limits))
        return super().__new__(cls, endpoint_url, model, temperature, samples, few_shot, env_flag(constrained),
                               max_retries, limits, timeout, parallelism, seed)

    @classmethod
    def from_config(cls, config=None, **overrides):
        """
        Builds a configuration from the toolchain configuration, with overrides.

        :param config:    Configuration namespace (None => global `SfcConfig`)
        :type  config:    Union(SimpleNamespace, None)
        :param overrides: Field values to use instead (None values are ignored)
        """
        config = config or SfcConfig
        params = dict(endpoint_url=config.LLM_ENDPOINT_URL, model=config.LLM_MODEL,
                      temperature=config.LLM_TEMPERATURE, samples=config.LLM_SAMPLES, few_shot=config.LLM_FEW_SHOT,
                      constrained=config.LLM_CONSTRAINED, max_retries=config.LLM_MAX_RETRIES,
                      timeout=config.LLM_REQUEST_TIMEOUT, parallelism=config.LLM_PARALLELISM)
        params.update({k: v for k, v in overrides.items() if v is not None})
        if 'limits' not in params:
            params['limits'] = VerifyLimits.preset('desk', config)
        return cls(**params)


class SampleRecord(namedtuple('SampleRecord', "prompt_id sample_index raw_output parse_verdict st_verdict "
                                              "safety_verdict failure_class latency attempts diagnostics")):
    """
    Outcome of one generated sample.

    .. note::
     * Verdicts are filled in ladder order: `st_verdict` is None unless the output parsed, `safety_verdict` (a
       `Verdict` value) is None unless the Structured Text check passed.
     * `failure_class` is None for a Safe sample, else one of 'ParseError', 'StSyntaxError', 'TransportError' or
       a `FailureClass` value.
    """
    __slots__ = ()

    @property
    def generated(self):
        """ True if the output parsed as a reduced document. """
        return self.parse_verdict == PASS

    @property
    def passed(self):
        """ True if the output passed all syntactic checks (reduced document and Structured Text). """
        return self.generated and self.st_verdict == PASS

    @property
    def safe(self):
        """ True if the output was verified safe. """
        return self.safety_verdict == Verdict.SAFE.value

    @property
    def consistent(self):
        """ True if the verdicts respect the ladder (safe => ST pass => parse pass). """
        if self.parse_verdict != PASS and (self.st_verdict is not None or self.safety_verdict is not None):
            return False
        if self.st_verdict != PASS and self.safety_verdict is not None:
            return False
        return (self.failure_class is None) == self.safe

    def as_record(self):
        """ Record-file form (one line). """
        return dict(self._asdict(), diagnostics=list(self.diagnostics))

    @classmethod
    def from_record(cls, record):
        """ Re-creates a sample from its record-file form. """
        try:
            return cls(**dict(record, diagnostics=tuple(record.get('diagnostics', ()))))
        except TypeError as exc:
            raise ValueError("not a sample record: {}".format(exc)) from exc


Evaluation = namedtuple('Evaluation', "parse_verdict st_verdict safety_verdict failure_class diagnostics")
Evaluation.__doc__ = """ Verdict ladder outcome for one output text. """


def extract_document(text):
    """ Reduced document carried by a completion: the first fenced code block if any, else the whole text. """
    match = FENCE_RE.search(text or '')
    body = match.group(1) if match else (text or '')
    return body.strip() + '\n'


def _screen(document):
    state = feed(recognizer_start(), document)
    if isinstance(state, Rejected):
        return "recognizer rejected the output at byte {}".format(state.position)
    if classify(state) is not Classification.VALID_COMPLETE:
        return "recognizer found an incomplete document ({} bytes)".format(state.offset)
    return None


def evaluate_output(text, limits=None, screen=False):
    """
    Runs one completion through the verdict ladder; the first failing rung decides the failure class.

    :param text:   Completion text
    :type  text:   str
    :param limits: Verification limits (None => 'desk' preset)
    :type  limits: Union(VerifyLimits, None)
    :param screen: True => the document must be accepted by the canonical-form recognizer before parsing

    :rtype: Evaluation
    """
    document = extract_document(text)
    problem = _screen(document) if screen else None
    if problem:
        return Evaluation(FAIL, None, None, PARSE_FAILURE, (problem,))
    try:
        sfc = parse_reduced(document)
    except (ParseError, SchemaError) as exc:
        return Evaluation(FAIL, None, None, PARSE_FAILURE, (str(exc),))

    errors = [d for d in check_chart_st(sfc) if d.is_error]
    if errors:
        return Evaluation(PASS, FAIL, None, ST_FAILURE, tuple(str(d) for d in errors))

    report = verify(sfc, limits)
    if report.verdict is Verdict.SAFE:
        return Evaluation(PASS, PASS, report.verdict.value, None, ())
    details = [str(d) for d in report.diagnostics]
    details += ["{}: {}".format(v.kind.value, v.element) for v in report.violations]
    return Evaluation(PASS, PASS, report.verdict.value, classify_failure(report).value,
                      tuple(details) or ("verification gave up after {} states".format(report.explored_states),))


def build_messages(prompt, examples=(), constrained=False, template=None):
    """
    Chat context for one prompt: task instruction with the retrieved demonstrations, then the user prompt.

    :param prompt:      Task description
    :type  prompt:      str
    :param examples:    Retrieved corpus items (summary and reduced document each)
    :type  examples:    Iterable(CorpusItem)
    :param constrained: True => instruction refers to the attached schema
    :param template:    Mustache template text (None => shipped template)

    :rtype: list(dict)
    """
    examples = [{'summary': item.summary, 'document': item.document.rstrip('\n')} for item in examples]
    renderer = pystache.Renderer(escape=lambda text: text, missing_tags='strict')
    system = renderer.render(template or PROMPT_TEMPLATE.read_text(encoding='utf-8'),
                             {'constrained': bool(constrained), 'has_examples': bool(examples),
                              'examples': examples})
    return [{'role': 'system', 'content': system}, {'role': 'user', 'content': prompt}]


def request_completions(cfg, messages, n):
    """
    Requests `n` completions of a chat context.

    :return: Completion texts in choice order (possibly fewer than `n`, never none)
    :rtype:  list(str)

    :raises TransportError: Endpoint unreachable, HTTP failure, or response without usable choices
    """
    body = {'model': cfg.model, 'messages': messages, 'temperature': cfg.temperature, 'n': n}
    if cfg.seed is not None:
        body['seed'] = cfg.seed
    if cfg.constrained:
        body['response_format'] = {'type': 'json_schema',
                                   'json_schema': {'name': 'reduced_sfc', 'schema': load_schema()}}
    api_key = os.getenv('LLM_API_KEY')
    headers = {'Authorization': 'Bearer ' + api_key} if api_key else {}
    try:
        response = requests.post(cfg.endpoint_url, json=body, headers=headers, timeout=cfg.timeout)
        response.raise_for_status()
        choices = sorted(response.json()['choices'], key=lambda c: c.get('index', 0))
        texts = [choice['message']['content'] or '' for choice in choices]
    except (requests.RequestException, ValueError, KeyError, TypeError, AttributeError) as exc:
        raise TransportError("endpoint {}: {}".format(cfg.endpoint_url, exc)) from exc
    if not texts:
        raise TransportError("endpoint {}: response has no choices".format(cfg.endpoint_url))
    return texts[:n]


def _record(prompt_id, index, text, evaluation, latency, attempts):
    return SampleRecord(prompt_id=prompt_id, sample_index=index, raw_output=text,
                        parse_verdict=evaluation.parse_verdict, st_verdict=evaluation.st_verdict,
                        safety_verdict=evaluation.safety_verdict, failure_class=evaluation.failure_class,
                        latency=round(latency, 6), attempts=attempts, diagnostics=tuple(evaluation.diagnostics))


def _transport_failure(prompt_id, index, exc, latency):
    return _record(prompt_id, index, '', Evaluation(None, None, None, TRANSPORT_FAILURE, (str(exc),)), latency, 1)


def _retry(cfg, messages, record):
    """ Re-requests a failed sample with its diagnostics appended, up to `cfg.max_retries` times. """
    context = list(messages)
    while record.failure_class not in NOT_RETRIED and record.attempts <= cfg.max_retries:
        context += [{'role': 'assistant', 'content': record.raw_output},
                    {'role': 'user', 'content': RETRY_MESSAGE.format(record.failure_class,
                                                                     '\n'.join(record.diagnostics))}]
        started = time.monotonic()
        try:
            text = request_completions(cfg, context, 1)[0]
        except TransportError as exc:
            log.warning("prompt '{}' sample {}: retry abandoned: {}".format(record.prompt_id, record.sample_index,
                                                                             exc))
            break
        evaluation = evaluate_output(text, cfg.limits, screen=cfg.constrained)
        record = _record(record.prompt_id, record.sample_index, text, evaluation,
                         record.latency + time.monotonic() - started, record.attempts + 1)
    return record


def generate(prompt, cfg, index=None, prompt_id=None):
    """
    Generates and evaluates `cfg.samples` charts for one prompt.

    :param prompt:    Task description
    :type  prompt:    str
    :param cfg:       Generation parameters
    :type  cfg:       GenerationConfig
    :param index:     Retrieval index for few-shot demonstrations (required when `cfg.few_shot` > 0)
    :type  index:     Union(RetrievalIndex, None)
    :param prompt_id: Identifier recorded in every sample (None => the prompt text)
    :type  prompt_id: Union(str, None)

    :return: Records ordered by sample index
    :rtype:  list(SampleRecord)

    :raises GenerationConfigError: Few-shot requested without a usable index (nothing has been sent)

    .. note::
     * Transport errors fail the affected samples only (failure class 'TransportError').
     * Samples are requested in as few requests as the endpoint allows (`n` per request).
    """
    if cfg.few_shot and (index is None or not len(index)):
        raise GenerationConfigError("few-shot generation ({} demonstrations) needs a non-empty retrieval index"
                                    .format(cfg.few_shot))
    prompt_id = prompt if prompt_id is None else prompt_id
    examples = retrieve(index, prompt, cfg.few_shot) if cfg.few_shot else []
    messages = build_messages(prompt, examples, cfg.constrained)

    records = []
    while len(records) < cfg.samples:
        started = time.monotonic()
        try:
            texts = request_completions(cfg, messages, cfg.samples - len(records))
        except TransportError as exc:
            log.warning("prompt '{}': {}".format(prompt_id, exc))
            latency = time.monotonic() - started
            records += [_transport_failure(prompt_id, k, exc, latency) for k in range(len(records), cfg.samples)]
            break
        latency = time.monotonic() - started
        for text in texts:
            evaluation = evaluate_output(text, cfg.limits, screen=cfg.constrained)
            records.append(_retry(cfg, messages, _record(prompt_id, len(records), text, evaluation, latency, 1)))

    log.info("prompt '{}': {} of {} samples safe".format(prompt_id, sum(r.safe for r in records), len(records)))
    return records


def generate_batch(prompts, cfg, index=None, records_file=None):
    """
    Generates for many prompts concurrently (at most `cfg.parallelism` at a time).

    :param prompts:      (prompt_id, prompt) pairs
    :type  prompts:      Iterable(tuple(str, str))
    :param cfg:          Generation parameters
    :type  cfg:          GenerationConfig
    :param index:        See `generate()`
    :param records_file: Record file to append each prompt's samples to, in prompt order (None => not written)
    :type  records_file: Union(str, Path, None)

    :return: All records, in prompt order
    :rtype:  list(SampleRecord)
    """
    prompts = list(prompts)
    if cfg.few_shot and (index is None or not len(index)):
        raise GenerationConfigError("few-shot generation ({} demonstrations) needs a non-empty retrieval index"
                                    .format(cfg.few_shot))
    records = []
    with ThreadPoolExecutor(max_workers=cfg.parallelism) as executor:
        results = executor.map(lambda item: generate(item[1], cfg, index, prompt_id=item[0]), prompts)
        for prompt_records in results:
            if records_file is not None:
                write_records(records_file, (r.as_record() for r in prompt_records))
            records += prompt_records
    return records
