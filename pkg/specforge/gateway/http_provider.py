import os

import requests

import specforge.global_config as gc
from specforge.interfaces.chat_provider import ChatProvider
from specforge.utilities.errors import ProviderRefusal, RateLimited, TransportError
from specforge.utilities.io.logger import MyLogger

http_provider_loc = 'http_provider'


class HttpChatProvider(ChatProvider):
    """OpenAI compatible chat completions over HTTP.

    The whole message history is posted on every call; the bearer token is
    read from ``SPECFORGE_LLM_API_KEY`` when the call is made.
    """

    provider_id = 'http'

    def __init__(self, api_key_env=gc.LLM['api_key_env'], session=None):
        self.api_key_env = api_key_env
        self.session = session or requests

    def _headers(self):
        headers = {'Content-Type': 'application/json'}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers['Authorization'] = 'Bearer {}'.format(api_key)
        return headers

    def complete(self, messages, setting, context):
        payload = {'model': setting.model_identifier, 'messages': messages}
        try:
            response = self.session.post(setting.provider_endpoint, json=payload, headers=self._headers(),
                                         timeout=setting.timeout)
        except (requests.Timeout, requests.ConnectionError) as e:
            raise TransportError('Request to {} failed: {}'.format(setting.provider_endpoint, e))
        except requests.RequestException as e:
            raise ProviderRefusal('Request to {} rejected: {}'.format(setting.provider_endpoint, e))

        status = response.status_code
        if status == 429:
            raise RateLimited('Rate limited by {}'.format(setting.provider_endpoint))
        if status >= 500:
            raise TransportError('HTTP {} from {}'.format(status, setting.provider_endpoint))
        if status >= 400:
            raise ProviderRefusal('HTTP {}: {}'.format(status, response.text[:1200]))

        try:
            choice = response.json()['choices'][0]
            content = choice['message']['content']
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise TransportError('Unreadable response from {}: {}'.format(setting.provider_endpoint, e))
        if choice.get('finish_reason') == 'length':
            MyLogger.print_and_log('{} stopped at the token limit after {} characters'.format(
                setting.model_identifier, len(content or '')), http_provider_loc, level=1)
            raise ProviderRefusal('Reply of {} was truncated at the token limit'.format(setting.model_identifier))
        return content or ''
