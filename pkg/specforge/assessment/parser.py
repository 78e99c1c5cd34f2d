import json
import re

from specforge.assessment.records import Finding, parse_section_label, section_label
from specforge.utilities.errors import MalformedAssessment, ScoreOutOfRange

_FENCED = re.compile(r'```(?:json|JSON)?\s*([\s\S]*?)```')
_VERDICT_LINE = re.compile(r'^[\s*_`>#]*(true|false)\b[\s*_`]*(?:[.:;,-]|$)', re.IGNORECASE)


def _json_objects(raw):
    """Yields every JSON object found in fenced blocks, then bare objects in the prose."""
    for m in _FENCED.finditer(raw):
        try:
            data = json.loads(m.group(1))
        except ValueError:
            continue
        if isinstance(data, dict):
            yield data
    decoder = json.JSONDecoder()
    start = raw.find('{')
    while start != -1:
        try:
            data, end = decoder.raw_decode(raw, start)
        except ValueError:
            start = raw.find('{', start + 1)
            continue
        if isinstance(data, dict):
            yield data
        start = raw.find('{', end)


def _structured_block(raw, required):
    if not raw or not raw.strip():
        raise MalformedAssessment('Empty judge response')
    for data in _json_objects(raw):
        if required <= set(data):
            return data
    raise MalformedAssessment('No structured block with keys {} in judge response'.format(sorted(required)))


def parse_dor_response(raw, scale):
    """Extracts findings and the reported score from a DoR judge reply.

    Prose around the block is ignored. Severities are checked against the
    scale and each deduction is replaced by the scale's value.

    Returns:
        (tuple of Finding, float)

    Raises:
        MalformedAssessment: if no readable block exists.
        UnknownSeverity: for a level the scale does not define.
        ScoreOutOfRange: if the reported score is outside [0, 1].
    """
    data = _structured_block(raw, {'findings', 'score'})
    if not isinstance(data['findings'], list):
        raise MalformedAssessment('"findings" must be a list')
    try:
        score = float(data['score'])
    except (TypeError, ValueError):
        raise MalformedAssessment('"score" is not a number: {!r}'.format(data['score']))
    if not 0.0 <= score <= 1.0:
        raise ScoreOutOfRange('Reported score {} outside [0, 1]'.format(score))

    findings = []
    for item in data['findings']:
        if not isinstance(item, dict) or 'severity' not in item:
            raise MalformedAssessment('Finding without severity: {!r}'.format(item))
        severity = str(item['severity']).strip().lower()
        deduction = scale.deduction_for(severity)
        findings.append(Finding(parse_section_label(item.get('section')),
                                str(item.get('description', '')).strip(), severity, deduction))
    return tuple(findings), score


def render_dor_response(findings, score):
    """Canonical fenced block a DoR judge is asked to produce."""
    block = {
        'findings': [{'section': section_label(f.section_ref), 'severity': f.severity,
                      'deduction': f.deduction, 'description': f.description} for f in findings],
        'score': score,
    }
    return '```json\n{}\n```'.format(json.dumps(block, indent=2))


def parse_completeness_response(raw):
    """Reads a completeness verdict.

    Accepts the fenced block ``{"complete": bool, "missing": [...]}`` or,
    failing that, a reply whose first non-blank line opens with a bare true/false.

    Returns:
        (bool, tuple of str)
    """
    if not raw or not raw.strip():
        raise MalformedAssessment('Empty judge response')
    for data in _json_objects(raw):
        if 'complete' in data:
            verdict = data['complete']
            if isinstance(verdict, str):
                verdict = verdict.strip().lower() in ('true', 'yes')
            missing = data.get('missing') or []
            if not isinstance(missing, list):
                raise MalformedAssessment('"missing" must be a list')
            return bool(verdict), tuple(str(m).strip() for m in missing)
    first_line = next(line for line in raw.splitlines() if line.strip())
    m = _VERDICT_LINE.match(first_line)
    if m:
        return m.group(1).lower() == 'true', ()
    raise MalformedAssessment('No completeness verdict in judge response')


def render_completeness_response(complete, missing=()):
    return '```json\n{}\n```'.format(json.dumps({'complete': bool(complete), 'missing': list(missing)}))
