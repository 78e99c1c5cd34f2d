import os
import random
import re
import threading
import time

import specforge.global_config as gc
from specforge.utilities.errors import EmptyResponse, PreconditionError, TransportError
from specforge.utilities.io.files import read_json, write_json
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import utc_timestamp

gateway_loc = 'chat_gateway'

USER = 'user'
ASSISTANT = 'assistant'


def _safe_id(text):
    return re.sub(r'[^A-Za-z0-9._-]+', '_', text).strip('_')


class ChatContext(object):
    """One conversation with a model.

    The history alternates user and assistant turns starting with the user
    and only grows. A context is owned by one caller at a time.
    """

    def __init__(self, context_id, setting, label):
        self.context_id = context_id
        self.setting = setting
        self.label = label
        self.retries = 0
        self._turns = []

    @property
    def history(self):
        """Tuple of (role, text) pairs."""
        return tuple((t['role'], t['content']) for t in self._turns)

    def __len__(self):
        return len(self._turns)

    def messages(self):
        return [{'role': t['role'], 'content': t['content']} for t in self._turns]

    def _append_exchange(self, prompt, reply, timestamp):
        self._turns.append({'role': USER, 'content': prompt, 'timestamp': timestamp})
        self._turns.append({'role': ASSISTANT, 'content': reply, 'timestamp': timestamp})

    def to_dict(self):
        return {
            'context_id': self.context_id,
            'label': self.label,
            'setting_id': self.setting.setting_id,
            'model_identifier': self.setting.model_identifier,
            'context_mode': self.setting.context_mode,
            'turns': [dict(t) for t in self._turns],
        }

    @classmethod
    def from_dict(cls, data, setting):
        ctx = cls(data['context_id'], setting, data['label'])
        roles = [t['role'] for t in data['turns']]
        if roles != [USER, ASSISTANT] * (len(roles) // 2) or len(roles) % 2:
            raise PreconditionError('Transcript {} does not alternate user/assistant'.format(data['context_id']))
        ctx._turns = [dict(t) for t in data['turns']]
        return ctx


class ChatGateway(object):
    """Sends prompts through a ChatProvider while keeping per-context history.

    Context ids are derived from the setting, a caller supplied label and a
    per-label counter, so identical runs produce identical ids.

    Args:
        provider (ChatProvider): Backend answering the prompts.
        transcripts_dir (str, optional): Where to persist a transcript after
            every exchange. (default: {None})
        clock (callable, optional): Returns timestamps for transcript turns.
        sleep (callable, optional): Used between retries. (default: {time.sleep})
    """

    def __init__(self, provider, transcripts_dir=None, clock=None, sleep=time.sleep):
        self.provider = provider
        self.transcripts_dir = transcripts_dir
        self.clock = clock or utc_timestamp
        self.sleep = sleep
        self._counters = {}
        self._lock = threading.Lock()

    def open_context(self, setting, label='context', resume=False):
        """Returns a fresh context, or with resume the persisted one of the same id.

        Args:
            setting (ModelSetting): Model to talk to.
            label (str, optional): Caller's name for the conversation, e.g.
                ``iteration-1/logi``.
            resume (bool, optional): Reload the history from an existing
                transcript with the same id. (default: {False})
        """
        with self._lock:
            key = (setting.setting_id, label)
            self._counters[key] = self._counters.get(key, 0) + 1
            context_id = _safe_id('{}.{}.{}'.format(setting.setting_id, label, self._counters[key]))
        if resume and self.transcripts_dir:
            path = self.transcript_path(context_id)
            if os.path.isfile(path):
                ctx = ChatContext.from_dict(read_json(path), setting)
                MyLogger.print_and_log('Resumed context {} with {} turns'.format(context_id, len(ctx)),
                                       gateway_loc)
                return ctx
        return ChatContext(context_id, setting, label)

    def send(self, ctx, prompt):
        """Sends prompt with the full history and returns the reply.

        Transient failures are retried with exponential backoff up to
        ``ctx.setting.max_retries`` times. The history grows by exactly one
        user and one assistant turn on success and is unchanged on failure.

        Raises:
            TransportError: when retries are exhausted.
            ProviderRefusal: on a non-retryable rejection.
            EmptyResponse: when the reply is blank.
        """
        if not prompt or not prompt.strip():
            raise PreconditionError('Cannot send an empty prompt')
        setting = ctx.setting
        messages = ctx.messages() + [{'role': USER, 'content': prompt}]

        attempt = 0
        while True:
            try:
                reply = self.provider.complete(messages, setting, ctx)
                break
            except TransportError as e:
                if attempt >= setting.max_retries:
                    MyLogger.print_and_log('Giving up on {} after {} retries: {}'.format(
                        ctx.context_id, attempt, e), gateway_loc, level=2)
                    raise
                delay = setting.retry_delay(attempt)
                if setting.jitter:
                    delay *= random.uniform(0.5, 1.5)
                attempt += 1
                ctx.retries += 1
                MyLogger.print_and_log('Retry {}/{} for {} in {:.1f}s: {}'.format(
                    attempt, setting.max_retries, ctx.context_id, delay, e), gateway_loc, level=1)
                self.sleep(delay)

        if reply is None or not reply.strip():
            raise EmptyResponse('Empty reply in context {}'.format(ctx.context_id))
        ctx._append_exchange(prompt, reply, self.clock())
        if self.transcripts_dir:
            self.save_transcript(ctx)
        return reply

    def transcript_path(self, context_id, directory=None):
        return os.path.join(directory or self.transcripts_dir, '{}.json'.format(context_id))

    def save_transcript(self, ctx, directory=None):
        """Writes the context's turns, timestamps and setting to ``<context-id>.json``."""
        directory = directory or self.transcripts_dir
        if not directory:
            raise PreconditionError('No transcript directory configured')
        path = self.transcript_path(ctx.context_id, directory)
        write_json(path, ctx.to_dict())
        return path


def load_transcript(path, setting):
    return ChatContext.from_dict(read_json(path), setting)
