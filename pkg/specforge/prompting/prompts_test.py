import os
import unittest

import specforge.global_config as gc
from specforge.assessment.scale import SeverityLevel, SeverityScale, default_scale
from specforge.prompting.prompts import (PersonaConfig, PromptVersion, build_assessment_prompt,
                                         build_domain_proposal_prompt, build_generation_prompt,
                                         summarize_document)
from specforge.specification.document import parse_document
from specforge.specification.domains import Domain, load_registry
from specforge.specification.template import default_template
from specforge.utilities.errors import InvalidScale, PreconditionError, UnknownDomain, WrongPromptKind
from specforge.utilities.io.files import read_text

PERSONA_PHRASE = 'experienced requirements engineer and business analyst'


def packaged_version(kind):
    body = read_text(os.path.join(gc.PROMPTS_PATH, kind, 'v1.txt'))
    return PromptVersion(1, kind, body, 'Initial version', 1)


class TestGenerationPrompt(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.registry = load_registry()
        cls.template = default_template()
        cls.version = packaged_version(gc.generation)

    def test_first_document(self):
        prompt = build_generation_prompt(self.registry.get('logi'), self.template, [], self.version)
        self.assertIn(PERSONA_PHRASE, prompt)
        self.assertIn('scenario', prompt)
        self.assertNotIn('SSyRS', prompt)
        self.assertNotIn('Vary the content', prompt)
        self.assertNotIn('\n\n\n', prompt)
        for main, sub in self.template.sections():
            self.assertIn(sub, prompt)

    def test_variation_clause(self):
        prompt = build_generation_prompt(self.registry.get('logi'), self.template, ['DFOP', 'FleetHub'],
                                         self.version)
        clause = prompt[prompt.index('Vary the content'):]
        self.assertIn('- DFOP\n- FleetHub', clause)

    def test_contract_for_every_domain(self):
        """Prompts never leak the internal acronym, even through titles."""
        titles = ['SSyRS one', 'Other ssyrs']
        for domain in self.registry:
            for prior in ([], titles):
                prompt = build_generation_prompt(domain, self.template, prior, self.version)
                self.assertNotIn('ssyrs', prompt.lower())
                self.assertIn('scenario', prompt)
                self.assertIn(PERSONA_PHRASE, prompt)
                self.assertIn(domain.name, prompt)

    def test_deterministic(self):
        domain = self.registry.get('fin')
        self.assertEqual(build_generation_prompt(domain, self.template, ['A'], self.version),
                         build_generation_prompt(domain, self.template, ['A'], self.version))

    def test_unknown_domain(self):
        with self.assertRaises(UnknownDomain):
            build_generation_prompt(Domain(99, 'Aerospace', 'aero'), self.template, [], self.version)

    def test_wrong_kind(self):
        with self.assertRaises(WrongPromptKind):
            build_generation_prompt(self.registry.get('logi'), self.template, [], packaged_version(gc.dor))

    def test_custom_persona(self):
        prompt = build_generation_prompt(self.registry.get('edu'), self.template, [], self.version,
                                         persona=PersonaConfig('senior product owner'))
        self.assertIn('You are a senior product owner.', prompt)
        with self.assertRaises(PreconditionError):
            PersonaConfig('  ')


class TestAssessmentPrompt(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.template = default_template()
        path = os.path.join(os.path.dirname(__file__), '..', 'specification', 'test_data', 'logistics_dfop.md')
        with open(path) as f:
            cls.doc = parse_document(f.read(), cls.template, load_registry().get('logi'))

    def test_completeness(self):
        prompt = build_assessment_prompt(gc.completeness, self.doc, self.template, None,
                                         packaged_version(gc.completeness))
        for main, sub in self.template.sections():
            self.assertIn(sub, prompt)
        self.assertIn('boolean', prompt)
        self.assertIn('"complete"', prompt)
        self.assertIn(self.doc.raw_text.strip(), prompt)

    def test_dor(self):
        scale = default_scale()
        prompt = build_assessment_prompt(gc.dor, self.doc, self.template, scale, packaged_version(gc.dor))
        self.assertIn('subtract', prompt)
        for name in scale.names():
            self.assertIn(name, prompt)
        self.assertIn('0.25', prompt)
        self.assertIn(PERSONA_PHRASE, prompt)
        self.assertIn(self.doc.raw_text.strip(), prompt)

    def test_dor_without_scale(self):
        with self.assertRaises(InvalidScale):
            build_assessment_prompt(gc.dor, self.doc, self.template, None, packaged_version(gc.dor))
        with self.assertRaises(InvalidScale):
            SeverityScale(())
        with self.assertRaises(InvalidScale):
            SeverityScale((SeverityLevel('minor', 0.1), SeverityLevel('major', 0.05)))

    def test_kind_mismatch(self):
        with self.assertRaises(WrongPromptKind):
            build_assessment_prompt(gc.dor, self.doc, self.template, default_scale(),
                                    packaged_version(gc.completeness))
        with self.assertRaises(WrongPromptKind):
            build_assessment_prompt(gc.generation, self.doc, self.template, None,
                                    packaged_version(gc.generation))


class TestHelpers(unittest.TestCase):

    def test_summary(self):
        path = os.path.join(os.path.dirname(__file__), '..', 'specification', 'test_data', 'logistics_dfop.md')
        with open(path) as f:
            doc = parse_document(f.read(), default_template(), load_registry().get('logi'))
        summary = summarize_document(doc)
        self.assertTrue(summary.startswith('Dynamic Freight Optimization Platform (DFOP): The system, called'))
        self.assertLessEqual(len(summary), 200)
        self.assertNotIn('\n', summary)

    def test_domain_proposal(self):
        prompt = build_domain_proposal_prompt(10, excluded=['Aerospace'])
        self.assertIn('List 10 industry domains', prompt)
        self.assertIn('niche', prompt)
        self.assertIn('Aerospace', prompt)
        with self.assertRaises(PreconditionError):
            build_domain_proposal_prompt(0)


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
