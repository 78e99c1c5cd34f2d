import re
import string
from dataclasses import dataclass

import specforge.global_config as gc
from specforge.specification.domains import load_registry
from specforge.utilities.errors import (InvalidScale, PreconditionError, UnknownDomain,
                                        UnknownPlaceholder, WrongPromptKind)
from specforge.utilities.io.files import read_text

# Name of the generated artifact inside prompts. The internal document
# acronym must never reach the model.
ARTIFACT = 'scenario'
_HIDDEN_ACRONYM = re.compile('ssyrs', re.IGNORECASE)

PLACEHOLDERS = {
    gc.generation: frozenset(['persona', 'domain', 'template', 'variation', 'artifact']),
    gc.completeness: frozenset(['artifact', 'template', 'document', 'response_format']),
    gc.dor: frozenset(['persona', 'artifact', 'scale', 'document', 'response_format']),
}

COMPLETENESS_RESPONSE_FORMAT = '\n'.join([
    'Reply with exactly one fenced JSON block of this form:',
    '```json',
    '{"complete": false, "missing": ["Constraints > Integration Needs"]}',
    '```',
])

DOR_RESPONSE_FORMAT = '\n'.join([
    'Reply with exactly one fenced JSON block of this form. Use "{}" as section for findings'.format(
        gc.whole_document),
    'that concern the document as a whole.',
    '```json',
    '{"findings": [{"section": "Non-Functional Requirements > Performance", "severity": "major",',
    '               "deduction": 0.1, "description": "Why this element is unrealistic."}],',
    ' "score": 0.9}',
    '```',
])

REASK_PROMPT = ('Your previous answer could not be read. Reply again with only the fenced JSON block '
                'in exactly the form requested above.')


@dataclass(frozen=True)
class PersonaConfig:
    """Role the model is asked to adopt."""
    role_description: str

    def __post_init__(self):
        if not self.role_description or not self.role_description.strip():
            raise PreconditionError('Persona role description must not be empty')

    def sentence(self):
        article = 'an' if self.role_description.strip()[0].lower() in 'aeiou' else 'a'
        return 'You are {} {}.'.format(article, self.role_description.strip())


DEFAULT_PERSONA = PersonaConfig(gc.PERSONA['role_description'])


@dataclass(frozen=True)
class PromptVersion:
    """One registered prompt body.

    Attributes:
        id (int): 1, 2, ... per kind.
        kind (str): generation, completeness or dor.
        body_template (str): Body with ``$name`` placeholders.
        rationale (str): Why this version was introduced.
        iteration_introduced (int): Iteration whose analysis led to it.
    """
    id: int
    kind: str
    body_template: str
    rationale: str
    iteration_introduced: int


def placeholders_of(body):
    """Returns the set of placeholder names used in body.

    Raises:
        UnknownPlaceholder: on a malformed ``$`` sequence.
    """
    names = set()
    for m in string.Template.pattern.finditer(body):
        if m.group('invalid') is not None:
            raise UnknownPlaceholder('Malformed placeholder at position {}'.format(m.start('invalid')))
        name = m.group('named') or m.group('braced')
        if name:
            names.add(name)
    return names


def check_placeholders(kind, body):
    if kind not in PLACEHOLDERS:
        raise WrongPromptKind('Unknown prompt kind {!r}'.format(kind))
    unknown = placeholders_of(body) - PLACEHOLDERS[kind]
    if unknown:
        raise UnknownPlaceholder('Placeholders {} are not defined for {} prompts'.format(sorted(unknown), kind))


def render_template_outline(template):
    """Numbered outline of the main and sub-categories."""
    lines = []
    for i, main in enumerate(template.main_categories, start=1):
        lines.append('{}. {}'.format(i, main.name))
        lines.extend('   - {}'.format(sub) for sub in main.sub_categories)
    return '\n'.join(lines)


def render_scale(scale):
    lines = []
    for level in scale.levels:
        line = '- {}: deduct {:.2f} points'.format(level.name, level.deduction)
        if level.description:
            line += ' ({})'.format(level.description)
        lines.append(line)
    return '\n'.join(lines)


def summarize_document(doc, max_length=200):
    """Title plus the first sentence of the first section, on one line."""
    first = ''
    if doc.sections:
        text = ' '.join(next(iter(doc.sections.values())).split())
        first = re.split(r'(?<=[.!?])\s', text, maxsplit=1)[0]
    summary = ': '.join(part for part in (doc.title, first) if part)
    if len(summary) > max_length:
        summary = summary[:max_length - 3].rstrip() + '...'
    return summary


def _variation_clause(prior_titles, prior_summaries):
    if not prior_titles:
        return ''
    lines = ['Vary the content of this {} from the {}s you have already created for this domain:'.format(
        ARTIFACT, ARTIFACT)]
    for i, title in enumerate(prior_titles):
        summary = prior_summaries[i] if prior_summaries and i < len(prior_summaries) else ''
        lines.append('- {}'.format(summary if summary.startswith(title) and summary else title))
    return '\n'.join(lines)


def _finish(text):
    text = re.sub(r'\n{3,}', '\n\n', text).strip() + '\n'
    return text


def _check_kind(version, kind):
    if version.kind != kind:
        raise WrongPromptKind('Expected a {} prompt version, got {}'.format(kind, version.kind))


def build_generation_prompt(domain, template, prior_titles, version, persona=None, registry=None,
                            prior_summaries=None):
    """Renders the generation prompt for one document of a domain.

    The prompt combines the persona, template, chain-of-thought and zero-shot
    patterns and, when earlier documents exist in this domain-iteration, a
    variation clause listing them.

    Args:
        domain (Domain): Target domain, must be part of the registry.
        template (Template): Structure the document must follow.
        prior_titles (list of str): Titles of the domain's earlier documents.
        version (PromptVersion): Generation prompt body.
        persona (PersonaConfig, optional): Defaults to the configured persona.
        registry (DomainRegistry, optional): Defaults to the packaged registry.
        prior_summaries (list of str, optional): One-line digests aligned with prior_titles.

    Returns:
        str: the prompt text.
    """
    _check_kind(version, gc.generation)
    registry = registry if registry is not None else load_registry()
    if domain not in registry:
        raise UnknownDomain('Domain {!r} is not registered'.format(domain))
    persona = persona or DEFAULT_PERSONA

    text = string.Template(version.body_template).substitute(
        persona=persona.sentence(),
        domain=domain.name,
        template=render_template_outline(template),
        variation=_variation_clause(list(prior_titles), prior_summaries),
        artifact=ARTIFACT,
    )
    text = _finish(_HIDDEN_ACRONYM.sub(ARTIFACT, text))
    if ARTIFACT not in text:
        raise UnknownPlaceholder('Generation prompt v{} never names the {}'.format(version.id, ARTIFACT))
    return text


def build_assessment_prompt(kind, doc, template, scale, version, persona=None):
    """Renders the completeness or DoR prompt for one document.

    Both embed the document text verbatim. The DoR prompt additionally
    carries the persona, the severity scale with its deductions and the
    subtraction scoring rule.

    Raises:
        WrongPromptKind: if kind is not an assessment kind or differs from version.kind.
        InvalidScale: if a DoR prompt is built without a usable scale.
    """
    if kind not in (gc.completeness, gc.dor):
        raise WrongPromptKind('{!r} is not an assessment prompt kind'.format(kind))
    _check_kind(version, kind)

    values = {'artifact': ARTIFACT, 'document': doc.raw_text.strip('\n')}
    if kind == gc.completeness:
        values.update(template=render_template_outline(template),
                      response_format=COMPLETENESS_RESPONSE_FORMAT)
    else:
        if scale is None or len(getattr(scale, 'levels', ())) < 2:
            raise InvalidScale('A DoR prompt needs a severity scale with at least 2 levels')
        values.update(persona=(persona or DEFAULT_PERSONA).sentence(), scale=render_scale(scale),
                      response_format=DOR_RESPONSE_FORMAT)
    return string.Template(version.body_template).substitute(values).strip() + '\n'


def build_domain_proposal_prompt(count, excluded=()):
    """Prompt asking for count software-product industry domains, one per line."""
    if count < 1:
        raise PreconditionError('At least one domain must be requested')
    exclusion = ''
    if excluded:
        exclusion = ' Do not list these domains: {}.'.format(', '.join(excluded))
    body = read_text(gc.DOMAIN_PROPOSAL_PROMPT)
    return _finish(string.Template(body).substitute(count=count, exclusion=exclusion))
