import math
from dataclasses import dataclass

import specforge.global_config as gc
from specforge.utilities.errors import DataIntegrityError

SECTION_SEPARATOR = ' > '


def section_label(section_ref):
    """``Main > Sub`` for a section pair, ``whole-document`` for None."""
    if section_ref is None:
        return gc.whole_document
    return SECTION_SEPARATOR.join(section_ref)


def parse_section_label(label):
    if label is None:
        return None
    if isinstance(label, (list, tuple)):
        return tuple(str(part).strip() for part in label) if label else None
    label = str(label).strip()
    if not label or label.lower() == gc.whole_document:
        return None
    if SECTION_SEPARATOR.strip() in label:
        main, sub = label.split(SECTION_SEPARATOR.strip(), 1)
        return (main.strip(), sub.strip())
    return (label,)


@dataclass(frozen=True)
class Finding:
    """One element judged unrealistic.

    Attributes:
        section_ref (tuple or None): (main, sub) pair, None for the whole document.
        description (str): Explanation given by the judge.
        severity (str): Level name of the severity scale.
        deduction (float): Points that level deducts.
    """
    section_ref: object
    description: str
    severity: str
    deduction: float

    def to_dict(self):
        return {
            'section': section_label(self.section_ref),
            'description': self.description,
            'severity': self.severity,
            'deduction': self.deduction,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(parse_section_label(data.get('section')), data['description'], data['severity'],
                   float(data['deduction']))


def recompute_score(findings):
    """DoR score implied by the findings: 1 minus all deductions, clamped to [0, 1]."""
    total = math.fsum(f.deduction for f in findings)
    return round(min(1.0, max(0.0, 1.0 - total)), 10)


def is_discrepant(reported_score, recomputed_score):
    return round(abs(reported_score - recomputed_score), 10) > gc.DISCREPANCY_TOLERANCE


@dataclass(frozen=True)
class DorAssessment:
    """Degree of realism judgment of one document.

    recomputed_score is authoritative for statistics; reported_score keeps
    what the judge claimed so disagreements stay measurable.
    """
    document_id: str
    findings: tuple
    reported_score: float
    recomputed_score: float
    discrepancy: bool
    setting_id: str
    context_mode: str
    timestamp: str

    def __post_init__(self):
        if abs(self.recomputed_score - recompute_score(self.findings)) > 1e-9:
            raise DataIntegrityError('Recomputed score of {} does not match its findings'.format(self.document_id))
        if self.discrepancy != is_discrepant(self.reported_score, self.recomputed_score):
            raise DataIntegrityError('Discrepancy flag of {} does not match its scores'.format(self.document_id))

    @classmethod
    def build(cls, document_id, findings, reported_score, setting, timestamp):
        findings = tuple(findings)
        recomputed = recompute_score(findings)
        return cls(document_id, findings, float(reported_score), recomputed,
                   is_discrepant(reported_score, recomputed), setting.setting_id, setting.context_mode, timestamp)

    def to_dict(self):
        return {
            'document_id': self.document_id,
            'findings': [f.to_dict() for f in self.findings],
            'reported_score': self.reported_score,
            'recomputed_score': self.recomputed_score,
            'discrepancy': self.discrepancy,
            'setting_id': self.setting_id,
            'context_mode': self.context_mode,
            'timestamp': self.timestamp,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['document_id'], tuple(Finding.from_dict(f) for f in data['findings']),
                   float(data['reported_score']), float(data['recomputed_score']), bool(data['discrepancy']),
                   data['setting_id'], data['context_mode'], data.get('timestamp', ''))


@dataclass(frozen=True)
class CompletenessAssessment:
    """LLM completeness verdict next to the deterministic structural verdict."""
    document_id: str
    llm_verdict: bool
    llm_missing: tuple
    structural_verdict: bool
    agreement: bool
    setting_id: str
    structural_missing: tuple = ()

    def __post_init__(self):
        if self.agreement != (self.llm_verdict == self.structural_verdict):
            raise DataIntegrityError('Agreement flag of {} does not match its verdicts'.format(self.document_id))

    @property
    def needs_review(self):
        return not self.agreement

    @classmethod
    def build(cls, document_id, llm_verdict, llm_missing, structural_report, setting):
        return cls(document_id, bool(llm_verdict), tuple(llm_missing), structural_report.complete,
                   bool(llm_verdict) == structural_report.complete, setting.setting_id,
                   tuple(structural_report.missing_labels()))

    def to_dict(self):
        return {
            'document_id': self.document_id,
            'llm_verdict': self.llm_verdict,
            'llm_missing': list(self.llm_missing),
            'structural_verdict': self.structural_verdict,
            'structural_missing': list(self.structural_missing),
            'agreement': self.agreement,
            'needs_review': self.needs_review,
            'setting_id': self.setting_id,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['document_id'], bool(data['llm_verdict']), tuple(data['llm_missing']),
                   bool(data['structural_verdict']), bool(data['agreement']), data['setting_id'],
                   tuple(data.get('structural_missing', ())))
