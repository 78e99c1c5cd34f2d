from dataclasses import dataclass

from specforge.utilities.errors import TemplateMismatch


@dataclass(frozen=True)
class StructuralReport:
    complete: bool
    missing: tuple
    extra_headings: tuple

    def to_dict(self):
        return {
            'complete': self.complete,
            'missing': [list(pair) for pair in self.missing],
            'extra_headings': list(self.extra_headings),
        }

    def missing_labels(self):
        return ['{} > {}'.format(main, sub) for main, sub in self.missing]


def validate_structure(doc, template):
    """Deterministic completeness check.

    Lists every template sub-category whose section text is missing or blank.

    Raises:
        TemplateMismatch: if doc was parsed against another template version.
    """
    if doc.template_version != template.version:
        raise TemplateMismatch('Document parsed against template {} but validated against {}'.format(
            doc.template_version, template.version))
    missing = tuple(key for key in template.sections() if not doc.sections.get(key, '').strip())
    return StructuralReport(complete=not missing, missing=missing, extra_headings=tuple(doc.extra_headings))
