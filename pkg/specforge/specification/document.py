import re
from dataclasses import dataclass, field, replace

from specforge.utilities.errors import EmptyInput, NoRecognizableStructure, PreconditionError

_MD_HEADING = re.compile(r'^#{1,6}\s+(.*?)\s*#*$')
_BOLD_HEADING = re.compile(r'^(?:\*\*|__)(.+?)(?:\*\*|__)\s*(.*)$')
_LABELLED = re.compile(r'^([^:]{2,80}):\s*(.*)$')
_NUMBERING = re.compile(r'^\s*(?:\d+(?:\.\d+)*[.)]?|[ivx]+[.)])\s+', re.IGNORECASE)
_TRAILING = re.compile(r'[\s:.;,\-–—]+$')
_QUOTED = re.compile(r'["“]([^"”]+)["”]')
_TITLE_PREFIX = re.compile(r'^(?:title|scenario)\s*:\s*', re.IGNORECASE)


@dataclass(frozen=True)
class SsyrsDocument:
    """A parsed scenario document.

    Attributes:
        domain (Domain): Domain the document was generated for.
        title (str): System name of the scenario.
        sections (dict): Maps (main, sub) template pairs to their text block.
        raw_text (str): Text exactly as stored.
        word_count (int): ``word_count(raw_text)``.
        template_version (str): Version of the template it was parsed against.
        extra_headings (tuple): Headings that matched no template category.
        doc_id (str): Corpus identifier such as ``iteration-1/logi/ssyrs-2``.
    """
    domain: object
    title: str
    sections: dict
    raw_text: str
    word_count: int
    template_version: str
    extra_headings: tuple = ()
    doc_id: str = field(default='', compare=False)


def word_count(raw):
    """Number of maximal whitespace separated tokens; punctuation stays attached."""
    return len(raw.split())


def normalize_heading(text):
    """Canonical form used to compare headings with template category names."""
    text = text.strip().strip('*_#').strip()
    text = _NUMBERING.sub('', text, count=1)
    text = text.replace('&', ' and ')
    text = re.sub(r'\s*/\s*', '/', text)
    text = re.sub(r'\s+', ' ', text).strip().lower()
    return _TRAILING.sub('', text)


def _heading_lookup(template):
    lookup = {}
    for main in template.main_categories:
        lookup[normalize_heading(main.name)] = ('main', main.name)
        for sub in main.sub_categories:
            lookup[normalize_heading(sub)] = ('sub', (main.name, sub))
    return lookup


def _match_line(stripped, lookup):
    """Classifies one non-blank line.

    Returns:
        (entry, label, heading_like, rest): entry is the template lookup hit or
        None, label the heading text, heading_like whether the line is
        formatted as a standalone heading, rest any content following the
        heading on the same line.
    """
    m = _MD_HEADING.match(stripped)
    if m:
        label = m.group(1)
        return lookup.get(normalize_heading(label)), label, True, ''

    m = _BOLD_HEADING.match(_NUMBERING.sub('', stripped, count=1))
    if m:
        label, rest = m.group(1), m.group(2).lstrip(':.-– ').strip()
        return lookup.get(normalize_heading(label)), label, not rest, rest

    entry = lookup.get(normalize_heading(stripped))
    if entry is not None:
        return entry, stripped, False, ''
    m = _LABELLED.match(stripped)
    if m:
        entry = lookup.get(normalize_heading(m.group(1)))
        if entry is not None:
            return entry, m.group(1), False, m.group(2).strip()
    return None, stripped, False, ''


def _clean_title(line):
    title = line.strip().strip('#').strip().strip('*_').strip()
    return _TITLE_PREFIX.sub('', title).strip()


def parse_document(raw, template, domain, doc_id=''):
    """Parses raw scenario text into its template sections.

    Headings are matched to template categories case-insensitively, ignoring
    numbering prefixes, trailing punctuation and the ``&``/``and`` variation.
    Markdown headings, bold labels and plain ``Label:`` lines are recognised.

    Args:
        raw (str): Document text.
        template (Template): Template to match headings against.
        domain (Domain): Domain the document belongs to.
        doc_id (str, optional): Corpus identifier.

    Returns:
        SsyrsDocument

    Raises:
        EmptyInput: if raw is blank.
        NoRecognizableStructure: if no template heading is found.
    """
    if not raw or not raw.strip():
        raise EmptyInput('Cannot parse an empty document')

    lookup = _heading_lookup(template)
    buffers = {}
    current = None
    matched = 0
    extra = []
    first_line = None
    first_is_heading = False

    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            if current is not None:
                buffers[current].append('')
            continue
        entry, label, heading_like, rest = _match_line(stripped, lookup)
        is_first = first_line is None
        if is_first:
            first_line = stripped
            first_is_heading = entry is not None
        if entry is not None:
            matched += 1
            kind, value = entry
            if kind == 'main':
                current = None
            else:
                current = value
                buffers.setdefault(current, [])
                if rest:
                    buffers[current].append(rest)
            continue
        if heading_like and not is_first:
            extra.append(_clean_title(label))
        if current is not None:
            buffers[current].append(line.rstrip())

    if matched == 0:
        raise NoRecognizableStructure('No template heading found in document')

    sections = {key: '\n'.join(buffers[key]).strip() for key in template.sections() if key in buffers}

    title = ''
    if first_line is not None and not first_is_heading:
        title = _clean_title(first_line)
    else:
        purpose = sections.get(template.sections()[0], '')
        m = _QUOTED.search(purpose)
        if m:
            title = m.group(1).strip().rstrip(',.;:').strip()

    return SsyrsDocument(domain=domain, title=title, sections=sections, raw_text=raw,
                         word_count=word_count(raw), template_version=template.version,
                         extra_headings=tuple(extra), doc_id=doc_id)


def serialize_document(doc, template):
    """Renders the section map back into numbered markdown headings."""
    parts = []
    if doc.title:
        parts.append('# {}\n'.format(doc.title))
    for i, main in enumerate(template.main_categories, start=1):
        parts.append('## {}. {}\n'.format(i, main.name))
        for sub in main.sub_categories:
            key = (main.name, sub)
            if key in doc.sections:
                parts.append('### {}\n{}\n'.format(sub, doc.sections[key]))
    return '\n'.join(parts)


def remove_section(doc, template, main, sub):
    """Returns a copy of doc without the (main, sub) section, re-serialized."""
    key = (main, sub)
    if key not in template.sections():
        raise PreconditionError('{} / {} is not part of the template'.format(main, sub))
    sections = {k: v for k, v in doc.sections.items() if k != key}
    trimmed = replace(doc, sections=sections)
    raw = serialize_document(trimmed, template)
    return replace(trimmed, raw_text=raw, word_count=word_count(raw))
