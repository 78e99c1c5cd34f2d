import hashlib
import os
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import requests

import specforge.global_config as gc
from specforge.interfaces.embedding_provider import EmbeddingProvider
from specforge.utilities.errors import DimensionMismatch, EmbeddingProviderError, ZeroVector

_TOKEN = re.compile(r'\w+', re.UNICODE)


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed length embedding of one text, never the all-zero vector."""
    values: tuple
    dimension: int
    provider_id: str

    def __post_init__(self):
        if self.dimension != len(self.values):
            raise DimensionMismatch('Vector has {} values but dimension {}'.format(len(self.values), self.dimension))
        if not any(self.values):
            raise ZeroVector('Embedding of provider {} is all zero'.format(self.provider_id))

    def as_array(self):
        return np.asarray(self.values, dtype=float)

    def scaled(self, factor):
        return EmbeddingVector(tuple(float(v) * factor for v in self.values), self.dimension, self.provider_id)


@lru_cache(maxsize=65536)
def _token_vector(token, dimension):
    seed = int.from_bytes(hashlib.sha256(token.encode('utf-8')).digest()[:8], 'big')
    return np.random.default_rng(seed).standard_normal(dimension)


class HashEmbeddingProvider(EmbeddingProvider):
    """Deterministic embedder for tests and --mock runs.

    Every lowercase word token gets a pseudo-random vector seeded by its
    SHA-256; a text embeds to the normalized sum of its token vectors, so
    texts sharing vocabulary score higher than unrelated ones.
    """

    def __init__(self, dimension=gc.MOCK_EMBEDDING['dimension'], provider_id=gc.MOCK_EMBEDDING['provider_id']):
        self.dimension = int(dimension)
        self.provider_id = provider_id

    def embed_text(self, text):
        tokens = _TOKEN.findall(text.lower()) or [text]
        total = np.zeros(self.dimension)
        for token in tokens:
            total += _token_vector(token, self.dimension)
        norm = np.linalg.norm(total)
        if norm == 0:
            raise EmbeddingProviderError('Hash embedding collapsed to zero')
        return (total / norm).tolist()


class HttpEmbeddingProvider(EmbeddingProvider):
    """OpenAI compatible ``/embeddings`` endpoint, e.g. a server hosting a sentence-transformers model."""

    def __init__(self, endpoint=gc.EMBEDDING['endpoint'], model=gc.EMBEDDING['model'],
                 dimension=gc.EMBEDDING['dimension'], timeout=gc.EMBEDDING['timeout'],
                 api_key_env=gc.EMBEDDING['api_key_env']):
        self.endpoint = endpoint
        self.model = model
        self.dimension = int(dimension)
        self.timeout = timeout
        self.api_key_env = api_key_env
        self.provider_id = 'http:{}'.format(model)

    def embed_text(self, text):
        headers = {'Content-Type': 'application/json'}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers['Authorization'] = 'Bearer {}'.format(api_key)
        try:
            response = requests.post(self.endpoint, json={'model': self.model, 'input': text}, headers=headers,
                                     timeout=self.timeout)
            response.raise_for_status()
            values = response.json()['data'][0]['embedding']
        except requests.RequestException as e:
            raise EmbeddingProviderError('Embedding request to {} failed: {}'.format(self.endpoint, e))
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise EmbeddingProviderError('Unreadable embedding response: {}'.format(e))
        return values
