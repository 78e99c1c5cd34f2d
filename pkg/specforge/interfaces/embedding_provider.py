

class EmbeddingProvider():
    """Interface for text embedding providers."""

    provider_id = None
    dimension = None

    def embed_text(self, text):
        """Embeds one text unit.

        Implemented method should return a list of ``dimension`` floats and
        raise EmbeddingProviderError when the provider fails.
        """
        raise NotImplementedError
