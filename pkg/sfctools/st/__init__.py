# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Structured Text subset: tokenizer, parser, canonical printer and identifier resolution. """
from sfctools.st.lexer import tokenize
from sfctools.st.parser import (parse_statements, parse_expression)
from sfctools.st.ast import (render_st, ast_shape, walk)
from sfctools.st.symbols import (SymbolTable, check_symbols, check_chart_st, DEFAULT_BUILTINS)
