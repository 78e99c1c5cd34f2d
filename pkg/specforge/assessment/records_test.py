import random
import unittest

import specforge.global_config as gc
from specforge.assessment.records import (CompletenessAssessment, DorAssessment, Finding, is_discrepant,
                                          recompute_score)
from specforge.assessment.scale import default_scale
from specforge.gateway.settings import ModelSetting
from specforge.utilities.errors import DataIntegrityError


def finding(deduction, severity='major'):
    return Finding(('Constraints', 'Technical Constraints'), 'x', severity, deduction)


class TestRecomputeScore(unittest.TestCase):

    def test_no_findings(self):
        self.assertEqual(1.0, recompute_score([]))

    def test_subtraction(self):
        self.assertAlmostEqual(0.85, recompute_score([finding(0.05, 'moderate'), finding(0.10)]))

    def test_clamped(self):
        self.assertEqual(0.0, recompute_score([finding(0.25, 'critical')] * 5 + [finding(0.05, 'moderate')]))

    def test_fuzz_range_and_monotone(self):
        """Random finding lists stay in [0, 1] and never gain score by adding findings."""
        rng = random.Random(7)
        deductions = [level.deduction for level in default_scale().levels]
        for _ in range(10000):
            findings = [finding(rng.choice(deductions)) for _ in range(rng.randint(0, 12))]
            score = recompute_score(findings)
            self.assertTrue(0.0 <= score <= 1.0)
            extended = recompute_score(findings + [finding(rng.choice(deductions))])
            self.assertLessEqual(extended, score)
            reported = rng.uniform(0.0, 1.0)
            self.assertEqual(abs(reported - score) > gc.DISCREPANCY_TOLERANCE, is_discrepant(reported, score))


class TestAssessmentRecords(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.setting = ModelSetting('judge', 'http://localhost', 'judge-model', context_mode=gc.new_context)

    def test_discrepancy_flag(self):
        consistent = DorAssessment.build('d1', [finding(0.05), finding(0.10)], 0.85, self.setting, 't')
        self.assertFalse(consistent.discrepancy)
        inconsistent = DorAssessment.build('d1', [finding(0.05), finding(0.10)], 0.90, self.setting, 't')
        self.assertTrue(inconsistent.discrepancy)
        self.assertEqual(gc.new_context, inconsistent.context_mode)

    def test_round_trip(self):
        record = DorAssessment.build('d1', [finding(0.02, 'minor')], 0.98, self.setting, 't')
        self.assertEqual(record, DorAssessment.from_dict(record.to_dict()))

    def test_tampered_flags_rejected(self):
        data = DorAssessment.build('d1', [finding(0.10)], 0.90, self.setting, 't').to_dict()
        data['recomputed_score'] = 0.95
        with self.assertRaises(DataIntegrityError):
            DorAssessment.from_dict(data)
        with self.assertRaises(DataIntegrityError):
            CompletenessAssessment('d1', True, (), False, True, 'judge')


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
