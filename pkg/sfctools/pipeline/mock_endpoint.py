# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Deterministic chat-completions endpoint for offline generation runs and tests.

Replies are scripted per task prompt (the first user message of the request): choice `i` of a request is output
`i mod len(outputs)` of that prompt's script; prompts without a script get the default reply, a small valid chart.
A script file is a JSON object mapping prompt text to a list of output texts.
"""
import json
import logging
from pathlib import Path

from flask import (Flask, jsonify, request)

from sfctools.config import SfcConfig
from sfctools.codecs.reduced import serialize_reduced
from sfctools.model import (VariableDecl, Edge, StepNode, ReducedSfc)

__all__ = ['COMPLETIONS_PATH', 'DEFAULT_CHART', 'create_app', 'load_script', 'run_mock_server']

log = logging.getLogger(__name__)

COMPLETIONS_PATH = '/v1/chat/completions'

DEFAULT_CHART = ReducedSfc(
    'Conveyor',
    [VariableDecl('xStart', 'BOOL', 'FALSE', 'input'),
     VariableDecl('xStop', 'BOOL', 'FALSE', 'input'),
     VariableDecl('xMotor', 'BOOL', 'FALSE', 'output')],
    [StepNode('Idle', True, 'xMotor := FALSE;', None, [Edge('xStart', 'Run')]),
     StepNode('Run', False, 'xMotor := TRUE;', 'belt running', [Edge('xStop', 'Idle', is_jump=True)])])


def load_script(path):
    """
    Reads a reply script file.

    :return: prompt => list of output texts
    :rtype:  dict

    :raises ValueError: File content is not a mapping of text to non-empty lists of text
    """
    script = json.loads(Path(path).read_text(encoding='utf-8'))
    if not isinstance(script, dict) or not all(isinstance(v, list) and v and all(isinstance(t, str) for t in v)
                                               for v in script.values()):
        raise ValueError("reply script '{}' must map prompt text to non-empty lists of output text".format(path))
    return script


def _error(message, status=400):
    return jsonify({'error': {'message': message, 'type': 'invalid_request_error'}}), status


def create_app(script=None, default=None):
    """
    Creates the mock endpoint application.

    :param script:  prompt => list of output texts
    :type  script:  Union(dict, None)
    :param default: Reply for unscripted prompts (None => canonical document of `DEFAULT_CHART`)
    :type  default: Union(str, None)

    :return: Flask application; `app.config['MOCK_REQUESTS']` collects the bodies of all accepted requests
    :rtype:  Flask
    """
    app = Flask(__name__)
    app.config['MOCK_SCRIPT'] = dict(script or {})
    app.config['MOCK_DEFAULT'] = serialize_reduced(DEFAULT_CHART) if default is None else default
    app.config['MOCK_REQUESTS'] = []

    @app.route(COMPLETIONS_PATH, methods=['POST'])
    def chat_completions():
        body = request.get_json(silent=True)
        if not isinstance(body, dict):
            return _error("request body must be a JSON object")
        messages = body.get('messages')
        if not isinstance(messages, list) or not messages:
            return _error("'messages' must be a non-empty list")
        try:
            count = int(body.get('n', 1))
        except (TypeError, ValueError):
            return _error("'n' must be an integer")
        if count < 1:
            return _error("'n' must be at least 1")
        app.config['MOCK_REQUESTS'].append(body)

        prompt = next((m.get('content', '') for m in messages if isinstance(m, dict) and m.get('role') == 'user'),
                      '')
        outputs = app.config['MOCK_SCRIPT'].get(prompt, [app.config['MOCK_DEFAULT']])
        log.debug("mock reply to {!r}: {} choices".format(prompt[:40], count))
        return jsonify({
            'id': 'mock-{}'.format(len(app.config['MOCK_REQUESTS'])),
            'object': 'chat.completion',
            'model': body.get('model', ''),
            'choices': [{'index': i, 'finish_reason': 'stop',
                         'message': {'role': 'assistant', 'content': outputs[i % len(outputs)]}}
                        for i in range(count)],
        })

    return app


def run_mock_server(host=None, port=None, script=None):
    """
    Serves the mock endpoint until interrupted.

    :param host:   Interface to bind (None => `MOCK_HOST`)
    :param port:   Port (None => `MOCK_PORT`)
    :param script: See `create_app()`
    """
    host = host or SfcConfig.MOCK_HOST
    port = int(port or SfcConfig.MOCK_PORT)
    log.info("======== Starting mock chat-completions endpoint at http://{}:{}{}".format(host, port,
                                                                                      COMPLETIONS_PATH))
    create_app(script).run(host=host, port=port, debug=False, use_reloader=False)
