import os
import threading
from fnmatch import fnmatchcase

import yaml

from specforge.interfaces.chat_provider import ChatProvider
from specforge.utilities.errors import PreconditionError, ProviderRefusal, RateLimited, TransportError
from specforge.utilities.io.files import read_json

ERRORS = {
    'transport': TransportError,
    'rate_limit': RateLimited,
    'refusal': ProviderRefusal,
}


def _raise_or_empty(kind, context_id, turn):
    if kind == 'empty':
        return ''
    if kind not in ERRORS:
        raise PreconditionError('Unknown scripted error {!r}'.format(kind))
    raise ERRORS[kind]('Scripted {} failure in {} turn {}'.format(kind, context_id, turn))


class ScriptedChatProvider(ChatProvider):
    """Deterministic provider replaying scripted replies.

    A script maps context label patterns (``fnmatch`` syntax, first match
    wins) to the replies of that conversation: the n-th prompt of a context
    receives the n-th reply, so a resumed context continues where its
    transcript ends. A reply may be ``{"error": kind}`` to fail on every
    attempt. ``failures`` maps label patterns to ``{turn: [kind, ...]}``:
    attempt i of that turn fails with the i-th kind, later attempts succeed.
    Kinds are transport, rate_limit, refusal and empty.

    Script file format::

        {"contexts": {"iteration-*/logi": ["<reply 1>", "<reply 2>"]},
         "failures": {"iteration-1/logi": {"3": ["transport", "transport"]}}}
    """

    provider_id = 'mock'

    def __init__(self, contexts=None, failures=None):
        self.contexts = dict(contexts or {})
        self.failures = dict(failures or {})
        self.calls = 0
        self._attempts = {}
        self._lock = threading.Lock()

    @classmethod
    def from_dict(cls, data):
        return cls(data.get('contexts'), data.get('failures'))

    def merge(self, other):
        """Adds the patterns of other; existing patterns keep precedence."""
        for pattern, replies in other.contexts.items():
            self.contexts.setdefault(pattern, replies)
        for pattern, failures in other.failures.items():
            self.failures.setdefault(pattern, failures)
        return self

    @staticmethod
    def _lookup(table, label):
        for pattern, value in table.items():
            if fnmatchcase(label, pattern):
                return value
        return None

    def complete(self, messages, setting, context):
        turn = (len(messages) - 1) // 2
        with self._lock:
            attempt = self._attempts.get((context.context_id, turn), 0)
            self._attempts[(context.context_id, turn)] = attempt + 1
            self.calls += 1

        failures = self._lookup(self.failures, context.label) or {}
        kinds = failures.get(str(turn)) or failures.get(turn) or []
        if attempt < len(kinds):
            return _raise_or_empty(kinds[attempt], context.context_id, turn)

        replies = self._lookup(self.contexts, context.label)
        if replies is None or turn >= len(replies):
            raise ProviderRefusal('Script has no reply for {} turn {}'.format(context.label, turn))
        reply = replies[turn]
        if isinstance(reply, dict):
            return _raise_or_empty(reply.get('error'), context.context_id, turn)
        return reply


SCRIPT_SUFFIXES = ('.json', '.yaml', '.yml')


def _read_script(path):
    if path.endswith('.json'):
        return read_json(path)
    with open(path, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


def load_script(path):
    """Loads one JSON or YAML script, or every script of a directory merged in name order."""
    if os.path.isdir(path):
        provider = ScriptedChatProvider()
        for name in sorted(os.listdir(path)):
            if name.endswith(SCRIPT_SUFFIXES):
                provider.merge(ScriptedChatProvider.from_dict(_read_script(os.path.join(path, name))))
        return provider
    return ScriptedChatProvider.from_dict(_read_script(path))
