#!/usr/bin/env python3
# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
setuptools/pip installer for SFC Tools.

.. note::
 * See :function:`pyutils.setup.setup()` notes for optional envirosym definitions to customize install.
 * Package data (templates, reduced-format schema, default configuration) ships inside `sfctools/`.
"""

from pathlib import Path

# noinspection PyPackageRequirements,PyUnresolvedReferences
from cinch_pyutils.setup import setup

import sfctools

THISDIR = Path(__file__).resolve().parent

# noinspection PyTypeChecker
setup(
    THISDIR,
    version=sfctools.__version__,
    description="IEC 61131-3 Sequential Function Chart toolchain: reduced format, PLCopen XML, "
                "Structured Text checks, safety verification and LLM generation pipeline",
    url="https://github.com/cinchent/sfctools",
    author="Rod Pullmann",
    author_email='rod@cinchent.com',
    license="MIT :: " + THISDIR.joinpath('LICENSE.txt').read_text(encoding='utf-8').split('\n')[0],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Intended Audience :: Developers",
        "Intended Audience :: Manufacturing",
        "Topic :: Software Development :: Code Generators",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    keywords="iec61131-3 sfc plc plcopen structured-text model-checking llm",
    python_requires='>=3.7, <4',
    external_packages=False,
    executables=([__file__, 'sfctools/cli.py'] +
                 list(THISDIR.rglob('*.sh'))),
)
