# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Toolchain configuration: defaults from `sfc_config.sh`, overridden by environment and optional user config file.
"""
# pylint:disable=invalid-name
import os
from pathlib import Path
from types import SimpleNamespace

# noinspection PyPackageRequirements,PyUnresolvedReferences
from cinch_pyutils.imports import (import_module_source, apply_environ)

THISDIR = Path(__file__).resolve().parent
CONFIG_FILE = Path(os.getenv('SFCTOOLS_CONFIG', str(THISDIR.joinpath('sfc_config.sh')))).expanduser()


def _public_items(namespace):
    return {k: v for k, v in vars(namespace).items()
            if not k.startswith('__') and not hasattr(v, '__dict__') and not callable(v)}


def load_config(filespec=None, environ=None):
    """
    Loads the toolchain configuration.

    :param filespec: Configuration file (None => `SFCTOOLS_CONFIG` or the shipped default)
    :type  filespec: Union(str, Path, None)
    :param environ:  Environment overriding same-named configuration items (None => process environment)
    :type  environ:  Union(dict, None)

    :return: Configuration namespace
    :rtype:  SimpleNamespace
    """
    filespec = Path(filespec or CONFIG_FILE)
    config = SimpleNamespace(**_public_items(import_module_source('SfcConfig', filespec, execute=True)))
    return apply_environ(config, environ=os.environ.copy() if environ is None else environ)


def override_config(filespec, config=None):
    """
    Overrides/supplements existing configuration with definitions from a specified module file.

    :param filespec: File specification of configuration source file (shell/Python dual syntax)
    :type  filespec: Union(str, Path)
    :param config:   Configuration to override/supplement (None => global `SfcConfig`)
    :type  config:   Union(SimpleNamespace, None)

    :return: The updated configuration

    .. note::
     * The file may contain non-Python syntax lines; these are ignored if present.
    """
    if config is None:
        config = SfcConfig
    overrides = _public_items(import_module_source('config', Path(filespec), execute=True))
    for key, val in overrides.items():
        setattr(config, key, val)
    return config


def env_flag(value):
    """ Interprets a configuration or environment value as a boolean flag. """
    if isinstance(value, bool):
        return value
    return str(value).lower() in ('1', 'true', 'on', 'yes')


SfcConfig = load_config()
