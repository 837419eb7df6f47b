# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Shared fixtures: sample charts, configuration isolation and an in-process mock chat-completions endpoint. """
import threading
from pathlib import Path

import pytest
from werkzeug.serving import make_server

from cinch_pyutils.imports import add_sys_path

add_sys_path(Path(__file__).resolve().parents[1], prepend=True)

# pylint:disable=wrong-import-position
from sfctools.config import SfcConfig  # noqa: E402
from sfctools.pipeline.mock_endpoint import (COMPLETIONS_PATH, create_app)  # noqa: E402
import chart_factory  # noqa: E402

DATA_DIR = Path(__file__).resolve().parent.joinpath('data')


@pytest.fixture
def linear3():
    return chart_factory.linear_chart(3)


@pytest.fixture
def parallel_pair():
    return chart_factory.parallel_chart()


@pytest.fixture
def choice():
    return chart_factory.choice_chart()


@pytest.fixture
def cycle():
    return chart_factory.cycle_chart()


@pytest.fixture
def overflow():
    return chart_factory.overflow_chart()


@pytest.fixture
def jump_exit():
    return chart_factory.jump_exit_chart()


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture(autouse=True)
def quiet_environment(monkeypatch):
    """ Keeps credentials and config overlays of the invoking shell out of the tests. """
    for name in ('LLM_API_KEY', 'SFCTOOLS_EMBEDDING_URL', 'SFCTOOLS_EMBEDDING_KEY'):
        monkeypatch.delenv(name, raising=False)
    saved = {k: v for k, v in vars(SfcConfig).items() if k.isupper()}
    yield
    for key, value in saved.items():
        setattr(SfcConfig, key, value)


class MockEndpoint:
    """ Mock endpoint served from a background thread. """
    def __init__(self, script=None, default=None):
        self.app = create_app(script, default)
        self.server = make_server('127.0.0.1', 0, self.app, threaded=True)
        self.url = 'http://127.0.0.1:{}{}'.format(self.server.server_port, COMPLETIONS_PATH)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def requests(self):
        return self.app.config['MOCK_REQUESTS']

    def close(self):
        self.server.shutdown()
        self.thread.join(timeout=10)


@pytest.fixture
def mock_endpoint():
    """ Factory: `mock_endpoint(script=None, default=None)` starts a server, stopped after the test. """
    servers = []

    def start(script=None, default=None):
        servers.append(MockEndpoint(script, default))
        return servers[-1]

    yield start
    for server in servers:
        server.close()
