import os
import shutil
import tempfile
import unittest
from unittest import mock

import requests

import specforge.global_config as gc
from specforge.gateway.gateway import ChatGateway, load_transcript
from specforge.gateway.http_provider import HttpChatProvider
from specforge.gateway.mock import ScriptedChatProvider, load_script
from specforge.gateway.settings import ModelSetting
from specforge.utilities.errors import (EmptyResponse, PreconditionError, ProviderRefusal, RateLimited,
                                        TransportError)
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import fixed_clock


def mock_setting(**kwargs):
    values = dict(setting_id='mock', provider_endpoint='http://localhost/v1/chat/completions',
                  model_identifier='mock-model')
    values.update(kwargs)
    return ModelSetting(**values)


class TestModelSetting(unittest.TestCase):

    def test_zero_timeout(self):
        with self.assertRaises(PreconditionError):
            mock_setting(timeout=0)

    def test_unknown_context_mode(self):
        with self.assertRaises(PreconditionError):
            mock_setting(context_mode='shared')

    def test_backoff(self):
        setting = mock_setting()
        self.assertEqual([1.0, 2.0, 4.0], [setting.retry_delay(i) for i in range(3)])

    def test_round_trip(self):
        setting = mock_setting(context_mode=gc.new_context, max_retries=1)
        self.assertEqual(setting, ModelSetting.from_dict(setting.to_dict()))
        with self.assertRaises(PreconditionError):
            ModelSetting.from_dict(dict(setting.to_dict(), temperature=0.2))


class TestChatGateway(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        MyLogger.quiet = True

    def setUp(self):
        self.sleeps = []

    def gateway(self, provider, **kwargs):
        return ChatGateway(provider, clock=fixed_clock(), sleep=self.sleeps.append, **kwargs)

    def test_open_context(self):
        gateway = self.gateway(ScriptedChatProvider())
        first = gateway.open_context(mock_setting())
        second = gateway.open_context(mock_setting())
        self.assertEqual(0, len(first.history))
        self.assertNotEqual(first.context_id, second.context_id)

    def test_send(self):
        gateway = self.gateway(ScriptedChatProvider({'*': ['ok', 'again']}))
        ctx = gateway.open_context(mock_setting())
        self.assertEqual('ok', gateway.send(ctx, 'p'))
        self.assertEqual((('user', 'p'), ('assistant', 'ok')), ctx.history)
        self.assertEqual('again', gateway.send(ctx, 'q'))
        self.assertEqual(['user', 'assistant', 'user', 'assistant'], [role for role, _ in ctx.history])
        self.assertEqual(['p', 'ok', 'q', 'again'], [text for _, text in ctx.history])

    def test_full_history_transmitted(self):
        provider = ScriptedChatProvider({'*': ['a', 'b']})
        gateway = self.gateway(provider)
        ctx = gateway.open_context(mock_setting())
        with mock.patch.object(provider, 'complete', wraps=provider.complete) as spy:
            gateway.send(ctx, 'first')
            gateway.send(ctx, 'second')
        messages = spy.call_args[0][0]
        self.assertEqual(['first', 'a', 'second'], [m['content'] for m in messages])

    def test_retry_then_success(self):
        provider = ScriptedChatProvider({'*': ['ok']}, failures={'*': {'0': ['transport', 'rate_limit']}})
        gateway = self.gateway(provider)
        ctx = gateway.open_context(mock_setting(max_retries=3))
        self.assertEqual('ok', gateway.send(ctx, 'p'))
        self.assertEqual(2, ctx.retries)
        self.assertEqual([1.0, 2.0], self.sleeps)
        self.assertEqual(2, len(ctx.history))

    def test_retries_exhausted(self):
        provider = ScriptedChatProvider({'*': [{'error': 'transport'}]})
        gateway = self.gateway(provider)
        ctx = gateway.open_context(mock_setting(max_retries=2))
        with self.assertRaises(TransportError):
            gateway.send(ctx, 'p')
        self.assertEqual(3, provider.calls)
        self.assertEqual(0, len(ctx.history))

    def test_refusal_not_retried(self):
        provider = ScriptedChatProvider({'*': [{'error': 'refusal'}]})
        gateway = self.gateway(provider)
        ctx = gateway.open_context(mock_setting())
        with self.assertRaises(ProviderRefusal):
            gateway.send(ctx, 'p')
        self.assertEqual(1, provider.calls)

    def test_empty_response(self):
        gateway = self.gateway(ScriptedChatProvider({'*': ['   ']}))
        ctx = gateway.open_context(mock_setting())
        with self.assertRaises(EmptyResponse):
            gateway.send(ctx, 'p')
        with self.assertRaises(PreconditionError):
            gateway.send(ctx, '')

    def test_scripts_per_context(self):
        provider = ScriptedChatProvider({'logi': ['l1', 'l2'], 'fin': ['f1']})
        gateway = self.gateway(provider)
        logi = gateway.open_context(mock_setting(), 'logi')
        fin = gateway.open_context(mock_setting(), 'fin')
        self.assertEqual('l1', gateway.send(logi, 'p'))
        self.assertEqual('f1', gateway.send(fin, 'p'))
        self.assertEqual('l2', gateway.send(logi, 'p'))

    def test_transcripts_and_resume(self):
        directory = tempfile.mkdtemp()
        try:
            provider = ScriptedChatProvider({'run/*': ['one', 'two']})
            gateway = self.gateway(provider, transcripts_dir=directory)
            ctx = gateway.open_context(mock_setting(), 'run/a')
            gateway.send(ctx, 'p1')
            path = gateway.transcript_path(ctx.context_id)
            self.assertTrue(os.path.isfile(path))
            self.assertEqual(ctx.history, load_transcript(path, mock_setting()).history)

            resumed_gateway = self.gateway(ScriptedChatProvider({'run/*': ['one', 'two']}),
                                           transcripts_dir=directory)
            resumed = resumed_gateway.open_context(mock_setting(), 'run/a', resume=True)
            self.assertEqual(ctx.context_id, resumed.context_id)
            self.assertEqual('two', resumed_gateway.send(resumed, 'p2'))
            self.assertEqual(4, len(resumed.history))
        finally:
            shutil.rmtree(directory)

    def test_load_yaml_script(self):
        provider = load_script(os.path.join(os.path.dirname(__file__), 'test_data', 'domain_proposal.yaml'))
        self.assertIn('Energy and Utilities', provider.contexts['domain-proposal'][0])
        gateway = ChatGateway(provider, clock=fixed_clock(), sleep=lambda s: None)
        ctx = gateway.open_context(mock_setting(max_retries=1), 'domain-proposal')
        self.assertIn('Insurance', gateway.send(ctx, 'Propose domains'))
        self.assertEqual(2, provider.calls)

    def test_deterministic_transcripts(self):
        transcripts = []
        for _ in range(2):
            gateway = self.gateway(ScriptedChatProvider({'*': ['x', 'y']}))
            ctx = gateway.open_context(mock_setting(), 'a')
            gateway.send(ctx, 'p')
            gateway.send(ctx, 'q')
            transcripts.append(ctx.to_dict())
        self.assertEqual(transcripts[0], transcripts[1])

    def test_load_script_directory(self):
        directory = tempfile.mkdtemp()
        try:
            with open(os.path.join(directory, 'a.json'), 'w') as f:
                f.write('{"contexts": {"x": ["from a"]}}')
            with open(os.path.join(directory, 'b.json'), 'w') as f:
                f.write('{"contexts": {"x": ["from b"], "y": ["only b"]}}')
            provider = load_script(directory)
            self.assertEqual(['from a'], provider.contexts['x'])
            self.assertEqual(['only b'], provider.contexts['y'])
        finally:
            shutil.rmtree(directory)

    def test_load_yaml_script(self):
        provider = load_script(os.path.join(os.path.dirname(__file__), 'test_data', 'domain_proposal.yaml'))
        self.assertIn('Energy and Utilities', provider.contexts['domain-proposal'][0])
        gateway = ChatGateway(provider, clock=fixed_clock(), sleep=lambda s: None)
        ctx = gateway.open_context(mock_setting(max_retries=1), 'domain-proposal')
        self.assertIn('Insurance', gateway.send(ctx, 'Propose domains'))
        self.assertEqual(2, provider.calls)


class FakeResponse():

    def __init__(self, status_code=200, payload=None, text=''):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError('no json')
        return self._payload


def reply(content, finish_reason='stop'):
    return FakeResponse(payload={'choices': [{'message': {'content': content}, 'finish_reason': finish_reason}]})


class TestHttpChatProvider(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        MyLogger.quiet = True
        cls.setting = mock_setting(max_retries=1, timeout=5)

    def send(self, side_effect):
        gateway = ChatGateway(HttpChatProvider(), clock=fixed_clock(), sleep=lambda s: None)
        ctx = gateway.open_context(self.setting)
        with mock.patch('requests.post', side_effect=side_effect) as post:
            with mock.patch.dict(os.environ, {'SPECFORGE_LLM_API_KEY': 'secret'}):
                result = gateway.send(ctx, 'hello')
        return result, post

    def test_success(self):
        result, post = self.send([reply('hi there')])
        self.assertEqual('hi there', result)
        args, kwargs = post.call_args
        self.assertEqual('http://localhost/v1/chat/completions', args[0])
        self.assertEqual('mock-model', kwargs['json']['model'])
        self.assertEqual([{'role': 'user', 'content': 'hello'}], kwargs['json']['messages'])
        self.assertEqual('Bearer secret', kwargs['headers']['Authorization'])
        self.assertEqual(5, kwargs['timeout'])

    def test_server_error_retried(self):
        result, post = self.send([FakeResponse(503), reply('recovered')])
        self.assertEqual('recovered', result)
        self.assertEqual(2, post.call_count)

    def test_timeout_exhausts_retries(self):
        with self.assertRaises(TransportError):
            self.send(requests.exceptions.Timeout('slow'))

    def test_rate_limit(self):
        with self.assertRaises(RateLimited):
            self.send([FakeResponse(429), FakeResponse(429)])

    def test_client_error_refused(self):
        with self.assertRaises(ProviderRefusal):
            self.send([FakeResponse(400, text='bad model')])

    def test_truncated_reply_refused(self):
        with self.assertRaises(ProviderRefusal):
            self.send([reply('partial', finish_reason='length')])


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
