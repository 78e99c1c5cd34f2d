

class ChatProvider():
    """Interface for chat completion providers used by the gateway."""

    provider_id = None

    def complete(self, messages, setting, context):
        """Returns the assistant reply to a full conversation.

        Args:
            messages (list of dict): Whole history plus the new prompt, each a
                dict with ``role`` (user or assistant) and ``content``.
            setting (ModelSetting): Endpoint, model and timeout to use.
            context (ChatContext): Conversation the messages belong to.

        Implemented method should return the reply text and raise:

        * TransportError (or RateLimited) for transient failures, which the
          gateway retries.
        * ProviderRefusal for non-retryable rejections, truncated replies
          included.
        """
        raise NotImplementedError
