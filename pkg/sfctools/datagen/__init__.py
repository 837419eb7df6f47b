# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

""" Fine-tuning data preparation (next-token and fill-in-the-middle records) and few-shot retrieval. """
from sfctools.datagen.fim import (MaskParams, FimExample, mask_subgraph, fim_examples)
from sfctools.datagen.ntp import (ntp_sequence, write_records, read_records, split_corpus)
from sfctools.datagen.retrieval import (CorpusItem, LexicalEmbedder, HttpEmbedder, RetrievalIndex, build_index,
                                        retrieve, rank, cosine, save_index, load_index)
