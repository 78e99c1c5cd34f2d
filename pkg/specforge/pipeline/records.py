from dataclasses import asdict, dataclass, field, replace

import specforge.global_config as gc
from specforge.utilities.errors import (AlreadyDecided, DataIntegrityError, EmptyRationale, PreconditionError)
from specforge.utilities.io.files import canonical_json, sha256_text, strip_keys

# Keys holding wall-clock values; excluded from every content hash.
TIMESTAMP_KEYS = ('timestamp', 'timestamps')


def content_hash(data):
    """SHA-256 of the canonical JSON form of data without timestamps."""
    return sha256_text(canonical_json(strip_keys(data, TIMESTAMP_KEYS)))


@dataclass(frozen=True)
class DocumentEntry:
    """One generated document of an iteration and where its files live."""
    doc_id: str
    k: int
    title: str
    word_count: int
    document: str
    assessment: str
    recomputed_score: float
    reported_score: float
    discrepancy: bool
    agreement: bool

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class DomainBundle:
    """Documents, assessments and similarity of one domain in one iteration.

    A bundle is partial while it has fewer documents than requested or no
    similarity record; error names the failure that stopped it.
    """
    domain: str
    documents: tuple = ()
    similarity: str = ''
    error: str = ''

    def is_complete(self, docs_per_domain):
        return len(self.documents) == docs_per_domain and bool(self.similarity) and not self.error

    def to_dict(self):
        return {
            'domain': self.domain,
            'documents': [d.to_dict() for d in self.documents],
            'similarity': self.similarity,
            'error': self.error,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['domain'], tuple(DocumentEntry.from_dict(d) for d in data['documents']),
                   data.get('similarity', ''), data.get('error', ''))


@dataclass(frozen=True)
class IterationRecord:
    """One pass of generation, assessment and analysis.

    Once a decision is recorded the record is sealed: sealed_hash holds its
    content hash and any later change is detected when it is loaded.
    """
    iteration: int
    prompt_versions: dict
    setting_id: str
    docs_per_domain: int
    domains: tuple = ()
    stats: str = ''
    outliers: tuple = ()
    decision: str = gc.pending
    decision_rationale: str = ''
    subjective_ratings: dict = field(default_factory=dict)
    timestamps: dict = field(default_factory=dict)
    sealed_hash: str = ''

    def __post_init__(self):
        if int(self.iteration) < 1:
            raise DataIntegrityError('Iterations are numbered from 1, got {}'.format(self.iteration))
        if self.decision not in gc.decisions:
            raise DataIntegrityError('Unknown decision {!r}'.format(self.decision))
        if self.decision != gc.pending and not self.decision_rationale.strip():
            raise DataIntegrityError('Iteration {} has a decision without rationale'.format(self.iteration))
        if self.sealed_hash and self.sealed_hash != self.content_hash():
            raise DataIntegrityError('Sealed iteration {} was modified'.format(self.iteration))

    @property
    def complete(self):
        return bool(self.domains) and all(b.is_complete(self.docs_per_domain) for b in self.domains)

    @property
    def sealed(self):
        return bool(self.sealed_hash)

    def documents(self):
        return [entry for bundle in self.domains for entry in bundle.documents]

    def bundle(self, domain):
        for b in self.domains:
            if b.domain == domain:
                return b
        raise PreconditionError('Iteration {} has no domain {!r}'.format(self.iteration, domain))

    def with_domains(self, domains, **changes):
        if self.sealed:
            raise AlreadyDecided('Iteration {} is sealed'.format(self.iteration))
        return replace(self, domains=tuple(domains), **changes)

    def decide(self, decision, rationale, subjective_ratings=None, timestamp=''):
        """Returns the sealed copy carrying the human decision.

        Raises:
            AlreadyDecided: if a decision was already recorded.
            EmptyRationale: if rationale is blank.
        """
        if self.decision != gc.pending:
            raise AlreadyDecided('Iteration {} was already decided: {}'.format(self.iteration, self.decision))
        if not rationale or not rationale.strip():
            raise EmptyRationale('A decision needs a rationale')
        if decision not in (gc.decision_continue, gc.decision_terminate):
            raise PreconditionError('Decision must be {} or {}, got {!r}'.format(
                gc.decision_continue, gc.decision_terminate, decision))
        if not self.complete:
            raise PreconditionError('Iteration {} is partial, resume it before deciding'.format(self.iteration))
        ratings = dict(subjective_ratings or {})
        known = {d.doc_id for d in self.documents()}
        low, high = gc.RATING_SCALE
        for doc_id, rating in ratings.items():
            if doc_id not in known:
                raise PreconditionError('Rating for unknown document {!r}'.format(doc_id))
            if int(rating) != rating or not low <= rating <= high:
                raise PreconditionError('Rating of {} must be an integer in [{}, {}]'.format(doc_id, low, high))
        timestamps = dict(self.timestamps, decided=timestamp)
        decided = replace(self, decision=decision, decision_rationale=rationale.strip(),
                          subjective_ratings={k: int(v) for k, v in sorted(ratings.items())}, timestamps=timestamps)
        return replace(decided, sealed_hash=decided.content_hash())

    def content_hash(self):
        data = self.to_dict()
        data.pop('sealed_hash')
        return content_hash(data)

    def to_dict(self):
        return {
            'iteration': int(self.iteration),
            'prompt_versions': dict(self.prompt_versions),
            'setting_id': self.setting_id,
            'docs_per_domain': int(self.docs_per_domain),
            'domains': [b.to_dict() for b in self.domains],
            'stats': self.stats,
            'outliers': list(self.outliers),
            'decision': self.decision,
            'decision_rationale': self.decision_rationale,
            'subjective_ratings': dict(self.subjective_ratings),
            'timestamps': dict(self.timestamps),
            'sealed_hash': self.sealed_hash,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['iteration'], dict(data['prompt_versions']), data['setting_id'], data['docs_per_domain'],
                   tuple(DomainBundle.from_dict(b) for b in data.get('domains', [])), data.get('stats', ''),
                   tuple(data.get('outliers', [])), data.get('decision', gc.pending),
                   data.get('decision_rationale', ''), dict(data.get('subjective_ratings', {})),
                   dict(data.get('timestamps', {})), data.get('sealed_hash', ''))


@dataclass(frozen=True)
class RunManifest:
    """Top-level index of a run: its configuration hash and ordered iterations.

    Each iteration entry holds the iteration number, the relative path of its
    record, its decision and whether it is complete.
    """
    run_id: str
    config_hash: str
    generation_setting: str
    iterations: tuple = ()
    timestamps: dict = field(default_factory=dict)

    def __post_init__(self):
        numbers = [entry['iteration'] for entry in self.iterations]
        if numbers != list(range(1, len(numbers) + 1)):
            raise DataIntegrityError('Manifest of {} has non-gapless iterations {}'.format(self.run_id, numbers))

    @property
    def last(self):
        return self.iterations[-1] if self.iterations else None

    def entry(self, iteration):
        if not 1 <= iteration <= len(self.iterations):
            raise PreconditionError('Run {} has no iteration {}'.format(self.run_id, iteration))
        return self.iterations[iteration - 1]

    def completed(self):
        return [entry['iteration'] for entry in self.iterations if entry['complete']]

    def with_iteration(self, record, path, timestamp=''):
        """Adds or updates the entry of record; new entries must extend the sequence by one."""
        entry = {'iteration': int(record.iteration), 'path': path, 'decision': record.decision,
                 'complete': record.complete}
        entries = list(self.iterations)
        if record.iteration == len(entries) + 1:
            entries.append(entry)
        else:
            self.entry(record.iteration)
            entries[record.iteration - 1] = entry
        return replace(self, iterations=tuple(entries), timestamps=dict(self.timestamps, updated=timestamp))

    def to_dict(self):
        return {
            'run_id': self.run_id,
            'config_hash': self.config_hash,
            'generation_setting': self.generation_setting,
            'iterations': [dict(e) for e in self.iterations],
            'timestamps': dict(self.timestamps),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['run_id'], data['config_hash'], data['generation_setting'],
                   tuple(dict(e) for e in data.get('iterations', [])), dict(data.get('timestamps', {})))
