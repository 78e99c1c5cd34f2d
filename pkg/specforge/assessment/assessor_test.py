import os
import unittest

import specforge.global_config as gc
from specforge.assessment.assessor import assess_document, assess_dor
from specforge.assessment.parser import render_completeness_response, render_dor_response
from specforge.assessment.records import Finding
from specforge.assessment.scale import default_scale
from specforge.gateway.gateway import ChatGateway
from specforge.gateway.mock import ScriptedChatProvider
from specforge.gateway.settings import ModelSetting
from specforge.prompting.prompts import PromptVersion
from specforge.specification.document import parse_document
from specforge.specification.domains import load_registry
from specforge.specification.template import default_template
from specforge.utilities.errors import MalformedAssessment, TransportError
from specforge.utilities.io.files import read_text
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import fixed_clock

MINOR = Finding(('Non-Functional Requirements', 'Usability'), 'Offline mode lacks detail.', 'minor', 0.02)


class TestAssessDocument(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        MyLogger.quiet = True
        cls.template = default_template()
        cls.scale = default_scale()
        path = os.path.join(os.path.dirname(__file__), '..', 'specification', 'test_data', 'logistics_dfop.md')
        with open(path) as f:
            cls.doc = parse_document(f.read(), cls.template, load_registry().get('logi'),
                                     doc_id='iteration-1/logi/ssyrs-1')
        cls.versions = {kind: PromptVersion(1, kind, read_text(os.path.join(gc.PROMPTS_PATH, kind, 'v1.txt')),
                                            'Initial version', 1)
                        for kind in gc.prompt_kinds}
        cls.setting = ModelSetting('gpt-4o-same-context', 'http://localhost', 'gpt-4o')

    def run_script(self, replies, **kwargs):
        gateway = ChatGateway(ScriptedChatProvider({'*': replies}), clock=fixed_clock(), sleep=lambda s: None)
        ctx = gateway.open_context(self.setting, 'iteration-1/logi')
        saved = []
        result = assess_document(gateway, ctx, self.doc, self.template, self.scale, self.versions,
                                 persist=lambda c, d: saved.append((c, d)), clock=fixed_clock('t0'), **kwargs)
        return result, ctx, saved

    def test_agreement(self):
        (completeness, dor), ctx, saved = self.run_script([
            render_completeness_response(True), render_dor_response([MINOR], 0.98)])
        self.assertTrue(completeness.agreement)
        self.assertFalse(completeness.needs_review)
        self.assertFalse(dor.discrepancy)
        self.assertAlmostEqual(0.98, dor.recomputed_score)
        self.assertEqual('iteration-1/logi/ssyrs-1', dor.document_id)
        self.assertEqual('t0', dor.timestamp)
        self.assertEqual([(completeness, dor)], saved)

    def test_prompt_order(self):
        _, ctx, _ = self.run_script([render_completeness_response(True), render_dor_response([], 1.0)])
        prompts = [text for role, text in ctx.history if role == 'user']
        self.assertEqual(2, len(prompts))
        self.assertIn('boolean verdict', prompts[0])
        self.assertIn('subtract', prompts[1])

    def test_disagreement_flagged(self):
        (completeness, _), _, _ = self.run_script([
            render_completeness_response(False, ['Constraints > Integration Needs']),
            render_dor_response([], 1.0)])
        self.assertFalse(completeness.agreement)
        self.assertTrue(completeness.needs_review)
        self.assertTrue(completeness.structural_verdict)

    def test_reask_once(self):
        (_, dor), ctx, _ = self.run_script([
            render_completeness_response(True), 'It is fine, roughly 0.9.', render_dor_response([], 0.9)])
        self.assertEqual(6, len(ctx.history))
        self.assertTrue(dor.discrepancy)
        self.assertEqual(1.0, dor.recomputed_score)

    def test_negated_verdict_asks_again(self):
        (completeness, _), ctx, _ = self.run_script([
            'The scenario is not complete: Constraints > Integration Needs is missing.',
            render_completeness_response(False, ['Constraints > Integration Needs']),
            render_dor_response([], 1.0)])
        self.assertEqual(6, len(ctx.history))
        self.assertFalse(completeness.llm_verdict)
        self.assertFalse(completeness.agreement)

    def test_malformed_after_reask(self):
        with self.assertRaises(MalformedAssessment):
            self.run_script([render_completeness_response(True), 'no idea', 'still no idea'])

    def test_transport_error_propagates(self):
        with self.assertRaises(TransportError):
            self.run_script([render_completeness_response(True), {'error': 'transport'}])

    def test_assess_dor_alone(self):
        gateway = ChatGateway(ScriptedChatProvider({'*': [render_dor_response([MINOR, MINOR], 0.96)]}),
                              clock=fixed_clock(), sleep=lambda s: None)
        ctx = gateway.open_context(self.setting, 'reliability')
        record = assess_dor(gateway, ctx, self.doc, self.template, self.scale, self.versions[gc.dor])
        self.assertAlmostEqual(0.96, record.recomputed_score)
        self.assertEqual(2, len(ctx.history))


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
