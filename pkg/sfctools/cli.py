#!/usr/bin/env python3
# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Command-line entry point for the SFC toolchain.

Exit status: 0 => success; 1 => validation or safety failure; 2 => usage, I/O or input format error.

Input charts are reduced documents, or PLCopen XML when the file name ends in '.xml'; a chart's identifier is its
file name stem. Summary and prompt files are JSON objects mapping identifiers to text.
"""
# pylint:disable=wrong-import-position
import sys
import argparse
import json
import logging
from pathlib import Path

# noinspection PyPackageRequirements
from cinch_pyutils.imports import add_sys_path
add_sys_path(Path(__file__).resolve().parent.parent, prepend=True)

from sfctools import __version__
from sfctools.config import (SfcConfig, override_config)
from sfctools.model import validate_reduced
from sfctools.sfc_exceptions import (SfcError, ParseError, ChartValidationError, NormalizationError)
from sfctools.codecs import (parse_reduced, serialize_reduced, grammar, normalize, MetadataTemplate, parse_plcopen,
                             emit_plcopen)
from sfctools.st import check_chart_st
from sfctools.safety import (Verdict, VerifyLimits, verify, emit_smv, classify_failure)
from sfctools.datagen import (MaskParams, mask_subgraph, ntp_sequence, write_records, read_records, split_corpus,
                              LexicalEmbedder, HttpEmbedder, build_index, save_index, load_index, rank)
from sfctools.pipeline import (GenerationConfig, generate_batch, score, format_score)
from sfctools.pipeline.mock_endpoint import (load_script, run_mock_server)

log = logging.getLogger('sfctools')

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class CommandFailure(Exception):
    """ Command ended unsuccessfully with a message for the user and an exit status. """
    def __init__(self, message, status=EXIT_USAGE):
        self.status = status
        super().__init__(message)


def _line_col(data, position):
    position = min(position, len(data))
    line = data.count(b'\n', 0, position) + 1
    return line, position - (data.rfind(b'\n', 0, position) + 1) + 1


def read_chart(path, pou=None):
    """
    Reads a chart file (PLCopen XML by '.xml' suffix, else reduced document).

    :raises CommandFailure: Unreadable or malformed input (message names the file and position)
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CommandFailure("{}: {}".format(path, exc.strerror or exc)) from exc
    try:
        if path.suffix.lower() == '.xml':
            return parse_plcopen(data, pou)[0]
        return parse_reduced(data)
    except ParseError as exc:
        raise CommandFailure("{}:{}:{}: {}".format(path, *_line_col(data, exc.position), exc)) from exc
    except SfcError as exc:
        raise CommandFailure("{}: {}".format(path, exc)) from exc


def read_mapping(path, what):
    """ Reads a JSON object mapping identifiers to text. """
    try:
        mapping = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, ValueError) as exc:
        raise CommandFailure("{}: cannot read {}: {}".format(path, what, exc)) from exc
    if not isinstance(mapping, dict) or not all(isinstance(v, str) for v in mapping.values()):
        raise CommandFailure("{}: {} file must map identifiers to text".format(path, what))
    return mapping


def write_output(path, text):
    """ Writes text to a file, or to standard output for '-'. """
    if str(path) == '-':
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding='utf-8')
    except OSError as exc:
        raise CommandFailure("{}: {}".format(path, exc.strerror or exc)) from exc
    log.info("wrote {}".format(path))


def chart_id(path):
    """ Identifier of a chart file. """
    return Path(path).stem


def setting(value, key):
    """ Flag value, or the configured value of `key` if the flag was not given. """
    return int(getattr(SfcConfig, key)) if value is None else value


# ---------------------------------------------------------------------------------------------------------------
# Subcommands.
def cmd_convert(params):
    """ Converts between reduced documents and PLCopen XML. """
    sfc = read_chart(params.input, params.pou)
    if params.to_plcopen:
        template = MetadataTemplate.load(params.template) if params.template else None
        text, suffix = emit_plcopen(sfc, template), '.xml'
    else:
        text, suffix = serialize_reduced(sfc), '.red'
    write_output(params.output or Path(params.input).with_suffix(suffix), text)
    return EXIT_OK


def cmd_validate(params):
    """ Checks chart invariants and Structured Text of every input. """
    status = EXIT_OK
    for path in params.inputs:
        sfc = read_chart(path)
        diagnostics = validate_reduced(sfc, strict=not params.lenient) + check_chart_st(sfc)
        for diagnostic in diagnostics:
            print(diagnostic.render(str(path)))
        if any(d.is_error for d in diagnostics):
            status = EXIT_FAILED
        else:
            log.info("{}: valid".format(path))
    return status


def cmd_verify(params):
    """ Verifies chart safety. """
    limits = VerifyLimits.preset(params.preset)
    limits = limits._replace(**{k: v for k, v in (('max_states', params.max_states), ('max_time', params.max_time))
                                if v is not None})
    sfc = read_chart(params.input)
    report = verify(sfc, VerifyLimits(*limits))
    if params.json:
        print(json.dumps(report.as_record()))
    else:
        print("{}: {} ({} states, {:.3f} s)".format(params.input, report.verdict.value, report.explored_states,
                                                    report.elapsed))
        for diagnostic in report.diagnostics:
            print("  " + str(diagnostic))
        for violation in report.violations:
            trace = " via {}".format(', '.join('t_{}'.format(t) for t in violation.witness)) \
                if violation.has_trace else ''
            print("  {}: {}{}".format(violation.kind.value, violation.element, trace))
        if report.verdict is not Verdict.SAFE:
            print("  failure class: {}".format(classify_failure(report).value))
    if params.smv:
        try:
            write_output(params.smv, emit_smv(normalize(sfc)))
        except (ChartValidationError, NormalizationError) as exc:
            log.warning("{}: no SMV model: {}".format(params.input, exc))
    return EXIT_OK if report.verdict is Verdict.SAFE else EXIT_FAILED


def cmd_grammar(params):
    """ Writes the grammar of canonical reduced documents. """
    write_output(params.output, grammar().text())
    return EXIT_OK


def cmd_mask(params):
    """ Writes fill-in-the-middle records. """
    try:
        mask = MaskParams(setting(params.min_steps, 'FIM_MIN_STEPS'), setting(params.max_steps, 'FIM_MAX_STEPS'))
    except ValueError as exc:
        raise CommandFailure("--min-steps/--max-steps: {}".format(exc)) from exc
    records = []
    for path in params.inputs:
        sfc = read_chart(path)
        errors = [d for d in validate_reduced(sfc) if d.is_error]
        if errors:
            log.warning("{}: skipped: {}".format(path, ChartValidationError(errors)))
            continue
        for n in range(setting(params.count, 'FIM_EXAMPLES_PER_CHART')):
            try:
                records.append(mask_subgraph(sfc, params.seed + n, mask, chart_id(path)).as_record())
            except SfcError as exc:
                log.warning("{}: skipped: {}".format(path, exc))
                break
    log.info("{} records written".format(write_records(params.output, records)))
    return EXIT_OK


def cmd_ntp(params):
    """ Writes next-token records. """
    prompts = read_mapping(params.summaries, "summaries") if params.summaries else {}
    records = []
    for path in params.inputs:
        try:
            records.append(ntp_sequence(read_chart(path), prompts.get(chart_id(path), ''), chart_id(path)))
        except ChartValidationError as exc:
            log.warning("{}: skipped: {}".format(path, exc))
    log.info("{} records written".format(write_records(params.output, records)))
    return EXIT_OK


def cmd_split(params):
    """ Writes a deterministic train/validation/test split of chart identifiers. """
    try:
        split = split_corpus([chart_id(p) for p in params.inputs], params.seed, tuple(params.ratios))
    except ValueError as exc:
        raise CommandFailure("--ratios: {}".format(exc)) from exc
    write_output(params.output, json.dumps(split, indent=2) + '\n')
    return EXIT_OK


def cmd_index(params):
    """ Builds a retrieval index from charts and their summaries. """
    summaries = read_mapping(params.summaries, "summaries")
    items = []
    for path in params.inputs:
        if chart_id(path) not in summaries:
            log.warning("{}: no summary, not indexed".format(path))
            continue
        try:
            items.append((chart_id(path), serialize_reduced(read_chart(path)), summaries[chart_id(path)]))
        except ChartValidationError as exc:
            log.warning("{}: not indexed: {}".format(path, exc))
    embedder = HttpEmbedder() if params.embedder == 'http' else LexicalEmbedder()
    index = build_index(items, embedder)
    save_index(index, params.output)
    log.info("{}: {} charts indexed".format(params.output, len(index)))
    return EXIT_OK


def cmd_retrieve(params):
    """ Prints the charts closest to a query. """
    k = setting(params.k, 'RETRIEVAL_K')
    if k < 1:
        raise CommandFailure("-k: must be at least 1")
    for item, similarity in rank(load_index(params.index), params.query)[:k]:
        print("{:.6f}  {}".format(similarity, item.chart_id))
    return EXIT_OK


def cmd_generate(params):
    """ Generates charts for a set of prompts and records every sample's verdicts. """
    limits = VerifyLimits.preset(params.preset) if params.preset else None
    cfg = GenerationConfig.from_config(endpoint_url=params.endpoint, model=params.model,
                                       temperature=params.temperature, samples=params.samples,
                                       few_shot=params.few_shot, constrained=params.constrained,
                                       max_retries=params.max_retries, limits=limits,
                                       parallelism=params.parallelism, seed=params.seed)
    prompts = read_mapping(params.prompts, "prompts")
    index = load_index(params.index) if params.index else None
    records = generate_batch(sorted(prompts.items()), cfg, index, params.output)
    log.info("{} samples for {} prompts written to {}".format(len(records), len(prompts), params.output))
    return EXIT_OK


def cmd_score(params):
    """ Prints Gen@k, Pass@k and Safe@k of a record file. """
    try:
        summary = score(list(read_records(params.records)), setting(params.k, 'LLM_SAMPLES'))
    except (OSError, ValueError) as exc:
        raise CommandFailure("{}: {}".format(params.records, exc)) from exc
    if params.json:
        print(json.dumps(summary))
    else:
        sys.stdout.write(format_score(summary, any_of_k=params.any))
    return EXIT_OK


def cmd_serve_mock(params):
    """ Serves the deterministic mock chat-completions endpoint. """
    script = None
    if params.script:
        try:
            script = load_script(params.script)
        except (OSError, ValueError) as exc:
            raise CommandFailure("--script: {}".format(exc)) from exc
    run_mock_server(params.host, params.port, script)
    return EXIT_OK


# ---------------------------------------------------------------------------------------------------------------
def build_parser():
    """ Defines the command-line surface. """
    parser = argparse.ArgumentParser(prog='sfctools', description=__doc__.strip().split('\n')[0])
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', metavar='<file>', type=str, default=None,
                        help="Configuration file %(metavar)s overriding the shipped defaults")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help="Log debugging detail")
    verbosity.add_argument('-q', '--quiet', action='store_true', help="Log warnings and errors only")
    commands = parser.add_subparsers(dest='command', metavar='<command>')
    commands.required = True

    def command(name, func, **kwargs):
        sub = commands.add_parser(name, help=func.__doc__.strip(), description=func.__doc__.strip(), **kwargs)
        sub.set_defaults(func=func)
        return sub

    sub = command('convert', cmd_convert)
    sub.add_argument('input', metavar='<chart>', help="Reduced document or PLCopen XML (.xml)")
    direction = sub.add_mutually_exclusive_group(required=True)
    direction.add_argument('--to-plcopen', action='store_true', help="Emit PLCopen XML")
    direction.add_argument('--to-reduced', action='store_true', help="Emit the canonical reduced document")
    sub.add_argument('-o', '--output', metavar='<file>', default=None,
                     help="Output %(metavar)s (- => standard output; default: input with .xml/.red suffix)")
    sub.add_argument('--template', metavar='<file>', default=None, help="PLCopen metadata template %(metavar)s")
    sub.add_argument('--pou', metavar='<name>', default=None, help="SFC POU to read from a PLCopen project")

    sub = command('validate', cmd_validate)
    sub.add_argument('inputs', metavar='<chart>', nargs='+')
    sub.add_argument('--lenient', action='store_true', help="Several initial steps are only a warning")

    sub = command('verify', cmd_verify)
    sub.add_argument('input', metavar='<chart>')
    sub.add_argument('--preset', choices=('desk', 'exhaustive', 'timeout'), default='desk',
                     help="Verification limits preset (default: %(default)s)")
    sub.add_argument('--max-states', metavar='<num>', type=int, default=None, help="Override the state limit")
    sub.add_argument('--max-time', metavar='<sec>', type=float, default=None, help="Override the time limit")
    sub.add_argument('--smv', metavar='<file>', default=None, help="Also write the SMV model to %(metavar)s")
    sub.add_argument('--json', action='store_true', help="Print the report as one JSON object")

    sub = command('grammar', cmd_grammar)
    sub.add_argument('-o', '--output', metavar='<file>', default='-', help="Output %(metavar)s (default: stdout)")

    sub = command('mask', cmd_mask)
    sub.add_argument('inputs', metavar='<chart>', nargs='+')
    sub.add_argument('-o', '--output', metavar='<file>', required=True, help="Record file to append to")
    sub.add_argument('--seed', type=int, default=0, help="Seed of the first example (default: %(default)s)")
    sub.add_argument('--count', type=int, default=None, help="Examples per chart (default: FIM_EXAMPLES_PER_CHART)")
    sub.add_argument('--min-steps', type=int, default=None, help="Smallest masked cluster (default: FIM_MIN_STEPS)")
    sub.add_argument('--max-steps', type=int, default=None, help="Largest masked cluster (default: FIM_MAX_STEPS)")

    sub = command('ntp', cmd_ntp)
    sub.add_argument('inputs', metavar='<chart>', nargs='+')
    sub.add_argument('-o', '--output', metavar='<file>', required=True, help="Record file to append to")
    sub.add_argument('--summaries', metavar='<file>', default=None, help="Prompts by chart identifier")

    sub = command('split', cmd_split)
    sub.add_argument('inputs', metavar='<chart>', nargs='+')
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--ratios', type=float, nargs=3, default=[0.8, 0.1, 0.1], metavar=('<train>', '<val>', '<test>'))
    sub.add_argument('-o', '--output', metavar='<file>', default='-')

    sub = command('index', cmd_index)
    sub.add_argument('inputs', metavar='<chart>', nargs='+')
    sub.add_argument('--summaries', metavar='<file>', required=True, help="Summaries by chart identifier")
    sub.add_argument('--embedder', choices=('lexical', 'http'), default='lexical')
    sub.add_argument('-o', '--output', metavar='<file>', required=True, help="Index file to write")

    sub = command('retrieve', cmd_retrieve)
    sub.add_argument('index', metavar='<index>')
    sub.add_argument('query', metavar='<text>')
    sub.add_argument('-k', type=int, default=None, help="Number of charts (default: RETRIEVAL_K)")

    sub = command('generate', cmd_generate)
    sub.add_argument('prompts', metavar='<prompts>', help="Prompts by identifier")
    sub.add_argument('-o', '--output', metavar='<file>', required=True, help="Record file to append to")
    sub.add_argument('--index', metavar='<file>', default=None, help="Retrieval index for few-shot prompts")
    sub.add_argument('--endpoint', metavar='<url>', default=None)
    sub.add_argument('--model', metavar='<name>', default=None)
    sub.add_argument('--temperature', type=float, default=None)
    sub.add_argument('--samples', '-k', type=int, default=None, help="Samples per prompt")
    sub.add_argument('--few-shot', type=int, default=None, help="Demonstrations per prompt (0 => zero-shot)")
    mode = sub.add_mutually_exclusive_group()
    mode.add_argument('--constrained', dest='constrained', action='store_true', default=None,
                      help="Attach the reduced-format schema and screen outputs")
    mode.add_argument('--unconstrained', dest='constrained', action='store_false')
    sub.add_argument('--max-retries', type=int, default=None)
    sub.add_argument('--preset', choices=('desk', 'exhaustive', 'timeout'), default=None)
    sub.add_argument('--parallelism', type=int, default=None)
    sub.add_argument('--seed', type=int, default=None)

    sub = command('score', cmd_score)
    sub.add_argument('records', metavar='<records>')
    sub.add_argument('--k', type=int, default=None, help="Samples per prompt evaluated (default: LLM_SAMPLES)")
    sub.add_argument('--any', action='store_true', help="Report the any-of-k definition")
    sub.add_argument('--json', action='store_true', help="Print all metrics as one JSON object")

    sub = command('serve-mock', cmd_serve_mock)
    sub.add_argument('--host', default=None)
    sub.add_argument('--port', type=int, default=None)
    sub.add_argument('--script', metavar='<file>', default=None, help="Reply script (prompt => outputs)")

    return parser


def main(argv=None):
    """
    Runs one subcommand.

    :param argv: Command-line arguments (None => `sys.argv[1:]`)
    :type  argv: Union(list, None)

    :return: Exit status
    :rtype:  int
    """
    parser = build_parser()
    params = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if params.verbose else logging.WARNING if params.quiet else logging.INFO,
                        format='%(levelname)s: %(name)s: %(message)s')
    try:
        if params.config:
            override_config(params.config)
        return params.func(params)
    except CommandFailure as exc:
        log.error(str(exc))
        return exc.status
    except ChartValidationError as exc:
        log.error(str(exc))
        return EXIT_FAILED
    except (SfcError, OSError, ValueError) as exc:
        log.error(str(exc))
        return EXIT_USAGE
    except Exception as exc:  # pylint:disable=broad-except
        log.exception("internal error in '{}': {!r}".format(params.command, exc))
        return EXIT_USAGE


# =============================================================================
if __name__ == "__main__":
    sys.exit(main())
