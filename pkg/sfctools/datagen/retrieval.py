# -*- mode: python -*-
# -*- coding: utf-8 -*-
#
# Copyright © 2025  CINCH Enterprises, Ltd and Rod Pullmann.  All rights reserved.

"""
Few-shot retrieval over chart summaries: pluggable embedders, cosine-ranked index, single-file persistence.

Index file layout (JSON)::

    {"format": "sfctools-retrieval-index", "version": 1, "dimension": <int>,
     "embedder": {"kind": "lexical", "vocabulary": [...]} | {"kind": "http", "url": ..., "model": ...},
     "items": [{"chart_id": ..., "document": ..., "summary": ..., "embedding": [...]}, ...]}

External embedding service (OpenAI embeddings shape): POST `{"model": <name>, "input": <text>}` to the URL in
`SFCTOOLS_EMBEDDING_URL`, bearer token from `SFCTOOLS_EMBEDDING_KEY`; the response carries the vector in
`data[0].embedding`.
"""
import json
import logging
import os
import re
from collections import (namedtuple, Counter)
from pathlib import Path

import numpy as np
import requests

from sfctools.config import SfcConfig
from sfctools.sfc_exceptions import (EmbedderError, RetrievalError)

__all__ = ['INDEX_FORMAT', 'INDEX_VERSION', 'CorpusItem', 'LexicalEmbedder', 'HttpEmbedder', 'RetrievalIndex',
           'build_index', 'rank', 'retrieve', 'cosine', 'save_index', 'load_index', 'embedder_from_state']

log = logging.getLogger(__name__)

INDEX_FORMAT = 'sfctools-retrieval-index'
INDEX_VERSION = 1
TOKEN_RE = re.compile(r'[a-z0-9]+')


class CorpusItem(namedtuple('CorpusItem', "chart_id document summary embedding")):
    """ Indexed chart: identifier, canonical reduced document, summary and summary embedding (tuple of floats). """
    __slots__ = ()


def cosine(first, second):
    """ Cosine similarity of two vectors (0.0 if either is zero). """
    first, second = np.asarray(first, dtype=float), np.asarray(second, dtype=float)
    norm = np.linalg.norm(first) * np.linalg.norm(second)
    return float(first @ second / norm) if norm else 0.0


class LexicalEmbedder:
    """
    L2-normalized term-frequency bag of words over lowercased alphanumeric tokens, with a vocabulary fitted on the
    indexed summaries (terms sorted); unknown query terms are ignored.
    """
    kind = 'lexical'

    def __init__(self, vocabulary=None):
        self.vocabulary = list(vocabulary) if vocabulary is not None else None
        self._position = {term: k for k, term in enumerate(self.vocabulary or [])}

    @staticmethod
    def tokens(text):
        """ Lowercased alphanumeric tokens of a text. """
        return TOKEN_RE.findall(text.lower())

    def fit(self, texts):
        """ Sets the vocabulary to all terms of the texts. """
        self.vocabulary = sorted({term for text in texts for term in self.tokens(text)})
        self._position = {term: k for k, term in enumerate(self.vocabulary)}
        return self

    @property
    def dimension(self):
        """ Embedding dimension (vocabulary size). """
        return len(self.vocabulary or [])

    def embed(self, text):
        """ Embedding of a text (zero vector if it has no vocabulary term). """
        if self.vocabulary is None:
            raise EmbedderError("lexical embedder has no vocabulary (fit it first)")
        vector = np.zeros(len(self.vocabulary))
        for term, count in Counter(self.tokens(text)).items():
            if term in self._position:
                vector[self._position[term]] = count
        norm = np.linalg.norm(vector)
        return vector / norm if norm else vector

    def state(self):
        """ Persistable description. """
        return {'kind': self.kind, 'vocabulary': list(self.vocabulary or [])}


class HttpEmbedder:
    """ Embeddings from an external service (OpenAI embeddings request/response shape). """
    kind = 'http'

    def __init__(self, url=None, model=None, api_key=None, timeout=None):
        self.url = url or os.getenv('SFCTOOLS_EMBEDDING_URL')
        self.model = model or SfcConfig.EMBEDDING_MODEL
        self.api_key = api_key or os.getenv('SFCTOOLS_EMBEDDING_KEY')
        self.timeout = float(timeout or SfcConfig.LLM_REQUEST_TIMEOUT)
        if not self.url:
            raise EmbedderError("no embedding service URL (set SFCTOOLS_EMBEDDING_URL)")

    def embed(self, text):
        """ Embedding of a text, as returned by the service. """
        headers = {'Authorization': 'Bearer ' + self.api_key} if self.api_key else {}
        try:
            response = requests.post(self.url, json={'model': self.model, 'input': text}, headers=headers,
                                     timeout=self.timeout)
            response.raise_for_status()
            return np.asarray(response.json()['data'][0]['embedding'], dtype=float)
        except (requests.RequestException, ValueError, KeyError, IndexError, TypeError) as exc:
            raise EmbedderError("embedding service {} failed: {}".format(self.url, exc)) from exc

    def state(self):
        """ Persistable description (credentials excluded). """
        return {'kind': self.kind, 'url': self.url, 'model': self.model}


def embedder_from_state(state):
    """ Re-creates an embedder from its persisted description. """
    if state.get('kind') == LexicalEmbedder.kind:
        return LexicalEmbedder(state['vocabulary'])
    if state.get('kind') == HttpEmbedder.kind:
        return HttpEmbedder(url=state.get('url'), model=state.get('model'))
    raise RetrievalError("unknown embedder kind {!r}".format(state.get('kind')))


class RetrievalIndex:
    """ Immutable set of embedded corpus items plus the embedder used for queries. """
    def __init__(self, items, embedder):
        self.items = tuple(items)
        self.embedder = embedder
        self.matrix = np.array([item.embedding for item in self.items], dtype=float)
        dimensions = {len(item.embedding) for item in self.items}
        if len(dimensions) > 1:
            raise RetrievalError("index items differ in embedding dimension: {}".format(sorted(dimensions)))

    @property
    def dimension(self):
        """ Embedding dimension (0 for an empty index). """
        return len(self.items[0].embedding) if self.items else 0

    def __len__(self):
        return len(self.items)


def build_index(items, embedder=None):
    """
    Embeds chart summaries into an index.

    :param items:    (chart_id, document, summary) triples
    :type  items:    Iterable(tuple)
    :param embedder: Embedder (None => lexical embedder fitted on the summaries; an unfitted lexical embedder is
                     fitted too)
    :type  embedder: Union(LexicalEmbedder, HttpEmbedder, None)

    :rtype: RetrievalIndex

    .. note::
     * Items whose summary cannot be embedded (service failure, zero or non-finite vector, dimension mismatch) are
       skipped with a warning.
    """
    items = list(items)
    embedder = embedder or LexicalEmbedder()
    if isinstance(embedder, LexicalEmbedder) and embedder.vocabulary is None:
        embedder.fit(summary for _, _, summary in items)
    indexed = []
    for chart_id, document, summary in items:
        try:
            vector = np.asarray(embedder.embed(summary), dtype=float)
            norm = np.linalg.norm(vector)
            if not np.isfinite(norm) or norm == 0:
                raise EmbedderError("summary has a zero or non-finite embedding")
            if indexed and len(vector) != len(indexed[0].embedding):
                raise EmbedderError("embedding dimension {} differs from {}".format(len(vector),
                                                                                   len(indexed[0].embedding)))
        except EmbedderError as exc:
            log.warning("chart '{}' not indexed: {}".format(chart_id, exc))
            continue
        indexed.append(CorpusItem(chart_id, document, summary, tuple(float(v) for v in vector)))
    log.info("indexed {} of {} charts".format(len(indexed), len(items)))
    return RetrievalIndex(indexed, embedder)


def rank(index, query):
    """
    Ranks all items of an index against a query.

    :return: (item, cosine) pairs by descending similarity, ties by chart_id
    :rtype:  list(tuple(CorpusItem, float))

    :raises RetrievalError: Index empty
    """
    if not index.items:
        raise RetrievalError("retrieval index is empty")
    query = np.asarray(index.embedder.embed(query), dtype=float)
    norms = np.linalg.norm(index.matrix, axis=1) * np.linalg.norm(query)
    with np.errstate(invalid='ignore', divide='ignore'):
        scores = np.where(norms > 0, index.matrix @ query / norms, 0.0)
    order = sorted(range(len(index.items)), key=lambda k: (-scores[k], index.items[k].chart_id))
    return [(index.items[k], float(scores[k])) for k in order]


def retrieve(index, query, k=None):
    """
    Top-k items for a query.

    :param index: Retrieval index (non-empty)
    :type  index: RetrievalIndex
    :param query: Query text
    :type  query: str
    :param k:     Number of items (None => `RETRIEVAL_K`); clamped to the index size
    :type  k:     Union(int, None)

    :rtype: list(CorpusItem)
    """
    k = int(SfcConfig.RETRIEVAL_K if k is None else k)
    if k < 1:
        raise ValueError("k must be at least 1, not {}".format(k))
    return [item for item, _ in rank(index, query)[:k]]


def save_index(index, path):
    """ Writes an index to a single JSON file. """
    payload = {
        'format': INDEX_FORMAT,
        'version': INDEX_VERSION,
        'dimension': index.dimension,
        'embedder': index.embedder.state(),
        'items': [item._asdict() for item in index.items],
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False) + '\n', encoding='utf-8')


def load_index(path, embedder=None):
    """
    Reads an index file.

    :param embedder: Query embedder overriding the persisted one (e.g. with credentials)

    :raises RetrievalError: File unreadable or not an index of a supported version
    """
    try:
        payload = json.loads(Path(path).read_text(encoding='utf-8'))
    except (OSError, ValueError) as exc:
        raise RetrievalError("cannot read index '{}': {}".format(path, exc)) from exc
    if not isinstance(payload, dict) or payload.get('format') != INDEX_FORMAT:
        raise RetrievalError("'{}' is not a retrieval index".format(path))
    if payload.get('version') != INDEX_VERSION:
        raise RetrievalError("index '{}' has unsupported version {!r}".format(path, payload.get('version')))
    items = [CorpusItem(i['chart_id'], i['document'], i['summary'], tuple(i['embedding'])) for i in payload['items']]
    index = RetrievalIndex(items, embedder or embedder_from_state(payload['embedder']))
    if items and index.dimension != payload.get('dimension'):
        raise RetrievalError("index '{}' dimension does not match its items".format(path))
    return index
