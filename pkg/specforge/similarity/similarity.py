import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from specforge.similarity.embedding import EmbeddingVector
from specforge.utilities.errors import (DimensionMismatch, MixedDomains, PreconditionError, TooFewDocuments,
                                        ZeroVector)


def embed(text, provider):
    """Embeds text as one unit.

    Raises:
        DimensionMismatch: if the provider returns another length than it is configured for.
    """
    if not text or not text.strip():
        raise PreconditionError('Cannot embed empty text')
    values = provider.embed_text(text)
    if len(values) != provider.dimension:
        raise DimensionMismatch('Provider {} returned {} values, {} configured'.format(
            provider.provider_id, len(values), provider.dimension))
    return EmbeddingVector(tuple(float(v) for v in values), provider.dimension, provider.provider_id)


def cosine(a, b):
    """dot(a, b) / (|a| |b|), clipped to [-1, 1]."""
    if a.dimension != b.dimension or a.provider_id != b.provider_id:
        raise DimensionMismatch('Cannot compare {}-d {} with {}-d {}'.format(
            a.dimension, a.provider_id, b.dimension, b.provider_id))
    x, y = a.as_array(), b.as_array()
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVector('Cosine of a zero vector is undefined')
    return float(np.clip(np.dot(x, y) / (nx * ny), -1.0, 1.0))


@dataclass(frozen=True)
class SimilarityRecord:
    """Cosine scores of every unordered document pair of one domain."""
    domain: str
    pairs: tuple
    provider_id: str

    def score(self, doc_a, doc_b):
        for a, b, value in self.pairs:
            if (a, b) in ((doc_a, doc_b), (doc_b, doc_a)):
                return value
        raise KeyError((doc_a, doc_b))

    def scores(self):
        return [value for _, _, value in self.pairs]

    def to_dict(self):
        return {
            'domain': self.domain,
            'provider_id': self.provider_id,
            'pairs': [{'a': a, 'b': b, 'score': value} for a, b, value in self.pairs],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['domain'], tuple((p['a'], p['b'], float(p['score'])) for p in data['pairs']),
                   data['provider_id'])


def pairwise_similarity(docs, provider, nproc=1):
    """Embeds every document's raw text once and scores all unordered pairs.

    Args:
        docs (list of SsyrsDocument): At least two documents of one domain.
        provider (EmbeddingProvider): Embedding backend.
        nproc (int, optional): Concurrent embedding calls. (default: {1})

    Returns:
        SimilarityRecord: n(n-1)/2 pairs in input order.
    """
    docs = list(docs)
    if len(docs) < 2:
        raise TooFewDocuments('Similarity needs at least 2 documents, got {}'.format(len(docs)))
    domains = {doc.domain.abbreviation for doc in docs}
    if len(domains) > 1:
        raise MixedDomains('Documents of several domains given: {}'.format(sorted(domains)))

    if nproc > 1:
        with ThreadPoolExecutor(max_workers=nproc) as pool:
            vectors = list(pool.map(lambda d: embed(d.raw_text, provider), docs))
    else:
        vectors = [embed(d.raw_text, provider) for d in docs]

    ids = [doc.doc_id or 'doc-{}'.format(i) for i, doc in enumerate(docs, start=1)]
    pairs = tuple((ids[i], ids[j], cosine(vectors[i], vectors[j]))
                  for i, j in itertools.combinations(range(len(docs)), 2))
    return SimilarityRecord(domains.pop(), pairs, provider.provider_id)
