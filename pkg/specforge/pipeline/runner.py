import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from tqdm import tqdm

import specforge.global_config as gc
from specforge.assessment.assessor import assess_document, assess_dor
from specforge.assessment.records import CompletenessAssessment, DorAssessment
from specforge.assessment.scale import default_scale, load_scale
from specforge.gateway.gateway import ChatGateway
from specforge.gateway.http_provider import HttpChatProvider
from specforge.pipeline import analysis
from specforge.pipeline.records import DomainBundle, DocumentEntry, IterationRecord, RunManifest
from specforge.pipeline.store import RunStore, document_id, iteration_name
from specforge.prompting.ledger import PromptLedger
from specforge.prompting.prompts import (DEFAULT_PERSONA, build_domain_proposal_prompt, build_generation_prompt,
                                         summarize_document)
from specforge.similarity.embedding import HashEmbeddingProvider, HttpEmbeddingProvider
from specforge.similarity.similarity import SimilarityRecord, pairwise_similarity
from specforge.specification.document import parse_document
from specforge.specification.domains import load_registry
from specforge.specification.template import default_template, load_template
from specforge.stats.descriptive import describe, flag_outliers
from specforge.stats.tables import dor_mean_matrix
from specforge.utilities.errors import (AlreadyDecided, ParseError, PreconditionError, ProviderError,
                                        TooFewValues, UnsupportedReplay)
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import utc_timestamp

pipeline_loc = 'pipeline'

PROPOSAL_FILE = 'domain_proposal.json'
_LIST_MARKER = re.compile(r'^\s*(?:[-*•]|\d+[.)])\s*')


def make_embedder(config):
    """Embedding provider named by the run config."""
    embedding = config.embedding
    if embedding.get('provider') == 'mock':
        return HashEmbeddingProvider(dimension=embedding.get('dimension') or gc.MOCK_EMBEDDING['dimension'])
    return HttpEmbeddingProvider(endpoint=embedding.get('endpoint') or gc.EMBEDDING['endpoint'],
                                 model=embedding.get('model') or gc.EMBEDDING['model'],
                                 dimension=embedding.get('dimension') or gc.EMBEDDING['dimension'])


def parse_domain_names(reply):
    """Domain names of a proposal reply, one per line, list markers removed."""
    names = []
    for line in reply.splitlines():
        name = _LIST_MARKER.sub('', line).strip().strip('*_').strip()
        if name and not name.endswith(':'):
            names.append(name)
    return names


@dataclass(frozen=True)
class DomainProposal:
    """Candidate domains awaiting human approval."""
    names: tuple
    requested: int
    duplicates: tuple = ()

    @property
    def fewer_than_requested(self):
        return len(self.names) < self.requested

    def to_dict(self):
        return {'names': list(self.names), 'requested': self.requested, 'duplicates': list(self.duplicates),
                'fewer_than_requested': self.fewer_than_requested}


@dataclass(frozen=True)
class ReliabilityResult:
    """Repeated DoR assessments of one document in fresh contexts."""
    document_id: str
    setting_id: str
    scores: tuple
    stats: object
    outliers: dict
    failures: int = 0

    @property
    def first_run_delta(self):
        """How much the mean differs from the first run."""
        return self.stats.mean - self.scores[0]

    def to_dict(self):
        return {
            'document_id': self.document_id,
            'setting_id': self.setting_id,
            'scores': list(self.scores),
            'stats': self.stats.to_dict(),
            'outliers': {k: list(v) for k, v in self.outliers.items()},
            'failures': self.failures,
            'first_run_delta': self.first_run_delta,
        }


@dataclass(frozen=True)
class CrossModelResult:
    """DoR assessments of one iteration's corpus under several model settings."""
    iteration: int
    matrix: object
    grouped: dict
    failures: dict = field(default_factory=dict)

    def count(self):
        return sum(len(v) for v in self.grouped.values())

    def to_dict(self):
        data = self.matrix.to_dict()
        data.update(iteration=self.iteration, failures=dict(self.failures), assessments=self.count())
        return data


class Pipeline(object):
    """Runs the generate, assess and analyse loop of one run.

    Args:
        config (RunConfig): Run configuration.
        store (RunStore, optional): Where the run lives, ``<runs>/<run_id>`` by default.
        chat_provider (ChatProvider, optional): Chat backend, the live HTTP provider by default.
        embedder (EmbeddingProvider, optional): Embedding backend, as configured by default.
        clock (callable, optional): Timestamp source. (default: {utc_timestamp})
        sleep (callable, optional): Used between retries. (default: {time.sleep})
        persona (PersonaConfig, optional): Persona of generation and DoR prompts.
    """

    def __init__(self, config, store=None, chat_provider=None, embedder=None, clock=None, sleep=time.sleep,
                 persona=None):
        self.config = config
        self.store = store or RunStore(gc.runs_path, config.run_id)
        self.chat_provider = chat_provider or HttpChatProvider()
        self.embedder = embedder or make_embedder(config)
        self.clock = clock or utc_timestamp
        self.sleep = sleep
        self.persona = persona or DEFAULT_PERSONA
        self.template = load_template(config.template) if config.template else default_template()
        self.scale = load_scale(config.severity_scale) if config.severity_scale else default_scale()
        self._registry = None
        self._ledger = None

    @property
    def registry(self):
        """Approved domains of the run, the configured registry until domains are approved in the run."""
        if self._registry is None:
            if os.path.isfile(self.store.registry_path):
                self._registry = load_registry(self.store.registry_path)
            else:
                self._registry = load_registry(self.config.domain_registry or gc.DOMAINS_FILE)
        return self._registry

    @property
    def ledger(self):
        if self._ledger is None:
            self._ledger = PromptLedger(self.store.prompts_dir)
        return self._ledger

    def manifest(self):
        """Manifest of the run, creating the run on first use."""
        return self.store.initialize(self.config, lambda: RunManifest(
            self.config.run_id, self.config.config_hash(), self.config.generation_setting,
            timestamps={'created': self.clock()}))

    def _gateway(self, transcripts_dir):
        return ChatGateway(self.chat_provider, transcripts_dir=transcripts_dir, clock=self.clock, sleep=self.sleep)

    def _save_manifest(self, record):
        manifest = self.manifest().with_iteration(record, self.store.iteration_path(record.iteration), self.clock())
        self.store.write_manifest(manifest)

    ############################################################################
    # Generation and assessment
    ############################################################################

    def run_iteration(self, iteration=None, domains=None, resume=False):
        """Generates, assesses and analyses one iteration.

        Each domain gets one conversation in which its documents are generated
        one after another, every prompt listing the documents already created,
        and assessed. Documents and assessments are written as soon as they
        exist; a domain that fails keeps its finished documents and is marked
        partial, and the first failure is raised after the others finished.

        Args:
            iteration (int, optional): Iteration to run, the next one by default.
            domains (list, optional): Domain abbreviations, the configured ones by default.
            resume (bool, optional): Continue a partial iteration, reusing every
                stored document and assessment. (default: {False})

        Returns:
            IterationRecord
        """
        manifest = self.manifest()
        versions = self.ledger.resolve(self.config.prompt_versions)
        if resume:
            record = self.store.read_iteration(iteration or len(manifest.iterations))
            if record.sealed:
                raise AlreadyDecided('Iteration {} is sealed'.format(record.iteration))
            versions = self.ledger.resolve(record.prompt_versions)
            selected = self.registry.select([b.domain for b in record.domains])
        else:
            expected = len(manifest.iterations) + 1
            if iteration is not None and int(iteration) != expected:
                raise PreconditionError('Next iteration of run {} is {}, not {}'.format(
                    self.config.run_id, expected, iteration))
            last = manifest.last
            if last is not None and last['decision'] == gc.pending:
                raise PreconditionError('Iteration {} awaits a decision or resume'.format(last['iteration']))
            if last is not None and last['decision'] == gc.decision_terminate:
                raise PreconditionError('Run {} was terminated after iteration {}'.format(
                    self.config.run_id, last['iteration']))
            selected = self.registry.select(domains or self.config.domains)
            if not selected:
                raise PreconditionError('No domains selected')
            record = IterationRecord(expected, {kind: v.id for kind, v in versions.items()},
                                     self.config.generation_setting, int(self.config.docs_per_domain),
                                     tuple(DomainBundle(d.abbreviation) for d in selected),
                                     timestamps={'started': self.clock()})
            self.store.write_iteration(record)
            self._save_manifest(record)

        n = record.iteration
        MyLogger.print_and_log('{} iteration {} over {} domains'.format(
            'Resuming' if resume else 'Starting', n, len(selected)), pipeline_loc)
        gateway = self._gateway(self.store.transcripts_dir)

        def work(domain):
            try:
                return self._run_domain(gateway, n, domain, versions, resume), None
            except (ProviderError, ParseError) as e:
                MyLogger.print_and_log('Domain {} of iteration {} is partial: {}: {}'.format(
                    domain.abbreviation, n, type(e).__name__, e), pipeline_loc, level=1)
                return self._partial_bundle(n, domain, e), e

        bundles = [b for b in record.domains]
        failures = []
        if self.config.nproc > 1:
            with ThreadPoolExecutor(max_workers=self.config.nproc) as pool:
                results = list(pool.map(work, selected))
        else:
            results = (work(domain) for domain in selected)
        for i, (bundle, error) in enumerate(results):
            bundles[i] = bundle
            if error is not None:
                failures.append(error)
            record = record.with_domains(bundles)
            self.store.write_iteration(record)

        record = record.with_domains(bundles, stats=self.store.stats_path(n))
        snapshot = analysis.iteration_snapshot(self.store, record, self.config.outlier_policy)
        self.store.write_json(record.stats, snapshot)
        record = record.with_domains(bundles, outliers=tuple(snapshot['outliers']),
                                     timestamps=dict(record.timestamps, finished=self.clock()))
        self.store.write_iteration(record)
        self._save_manifest(record)

        if failures:
            MyLogger.print_and_log('Iteration {} stopped with {} partial domains, resume it to finish'.format(
                n, len(failures)), pipeline_loc, level=1)
            raise failures[0]
        MyLogger.print_and_log('Iteration {} complete with {} documents'.format(n, len(record.documents())),
                               pipeline_loc)
        return record

    def resume_iteration(self, iteration=None):
        """Finishes a partial iteration without regenerating stored documents."""
        return self.run_iteration(iteration, resume=True)

    def _run_domain(self, gateway, n, domain, versions, resume):
        label = '{}/{}'.format(iteration_name(n), domain.abbreviation)
        ctx = gateway.open_context(self.config.generator, label, resume=resume)
        docs, entries = [], []
        for k in range(1, int(self.config.docs_per_domain) + 1):
            doc, entry = self._document(gateway, ctx, n, domain, k, docs, versions, resume)
            docs.append(doc)
            entries.append(entry)

        similarity_path = self.store.similarity_path(n, domain.abbreviation)
        if not (resume and self.store.has(similarity_path)):
            similarity = pairwise_similarity(docs, self.embedder)
            self.store.write_json(similarity_path, similarity.to_dict())
        return DomainBundle(domain.abbreviation, tuple(entries), similarity_path)

    def _document(self, gateway, ctx, n, domain, k, prior, versions, resume):
        """Generates (or reloads) document k of a domain and its assessment pair."""
        doc_id = document_id(n, domain.abbreviation, k)
        doc_path = self.store.document_path(n, domain.abbreviation, k)
        assessment_path = self.store.assessment_path(n, domain.abbreviation, k)

        if resume and self.store.has(doc_path):
            doc = parse_document(self.store.read_text(doc_path), self.template, domain, doc_id)
        else:
            prompt = build_generation_prompt(domain, self.template, [d.title for d in prior],
                                             versions[gc.generation], persona=self.persona, registry=self.registry,
                                             prior_summaries=[summarize_document(d) for d in prior])
            raw = gateway.send(ctx, prompt)
            doc = parse_document(raw, self.template, domain, doc_id)
            self.store.write_text(doc_path, raw)

        if resume and self.store.has(assessment_path):
            stored = self.store.read_json(assessment_path)
            completeness = CompletenessAssessment.from_dict(stored['completeness'])
            dor = DorAssessment.from_dict(stored['dor'])
        else:
            setting = self.config.generator
            judge_ctx = ctx
            if setting.context_mode == gc.new_context:
                judge_ctx = gateway.open_context(setting, doc_id, resume=resume)
            completeness, dor = assess_document(gateway, judge_ctx, doc, self.template, self.scale, versions,
                                                persona=self.persona, clock=self.clock)
            self.store.write_json(assessment_path, {
                'document_id': doc_id,
                'title': doc.title,
                'word_count': doc.word_count,
                'completeness': completeness.to_dict(),
                'dor': dor.to_dict(),
            })
        return doc, DocumentEntry(doc_id, k, doc.title, doc.word_count, doc_path, assessment_path,
                                  dor.recomputed_score, dor.reported_score, dor.discrepancy, completeness.agreement)

    def _partial_bundle(self, n, domain, error):
        entries = []
        for k in range(1, int(self.config.docs_per_domain) + 1):
            assessment_path = self.store.assessment_path(n, domain.abbreviation, k)
            if not self.store.has(assessment_path):
                break
            stored = self.store.read_json(assessment_path)
            entries.append(DocumentEntry(
                stored['document_id'], k, stored['title'], stored['word_count'],
                self.store.document_path(n, domain.abbreviation, k), assessment_path,
                stored['dor']['recomputed_score'], stored['dor']['reported_score'], stored['dor']['discrepancy'],
                stored['completeness']['agreement']))
        return DomainBundle(domain.abbreviation, tuple(entries), '', '{}: {}'.format(type(error).__name__, error))

    def record_decision(self, iteration, decision, rationale, subjective_ratings=None):
        """Seals an iteration with the reviewer's continue/terminate decision."""
        sealed = self.store.read_iteration(iteration).decide(decision, rationale, subjective_ratings, self.clock())
        self.store.write_iteration(sealed)
        self._save_manifest(sealed)
        MyLogger.print_and_log('Iteration {} decided: {} ({})'.format(iteration, decision, sealed.decision_rationale),
                               pipeline_loc)
        return sealed

    ############################################################################
    # Domain selection
    ############################################################################

    def propose_domains(self, count, setting_id=None, excluded=()):
        """Asks a model for count industry domains; the result still needs human approval.

        Duplicate names (case-insensitive) are dropped. Fewer than count
        unique names are reported as a notice, not an error.
        """
        if int(count) < 1:
            raise PreconditionError('At least one domain must be requested')
        self.manifest()
        setting = self.config.setting(setting_id or self.config.generation_setting)
        gateway = self._gateway(self.store.transcripts_dir)
        ctx = gateway.open_context(setting, 'domain-proposal')
        reply = gateway.send(ctx, build_domain_proposal_prompt(count, excluded))

        names, duplicates, seen = [], [], {e.lower() for e in excluded}
        for name in parse_domain_names(reply):
            if name.lower() in seen:
                duplicates.append(name)
                continue
            seen.add(name.lower())
            names.append(name)
        proposal = DomainProposal(tuple(names[:count]), int(count), tuple(duplicates))
        if proposal.fewer_than_requested:
            MyLogger.print_and_log('FewerThanRequested: {} unique domains proposed, {} requested'.format(
                len(proposal.names), count), pipeline_loc, level=1)
        self.store.write_json(PROPOSAL_FILE, proposal.to_dict())
        return proposal

    def approve_domains(self, entries):
        """Adds (name, abbreviation) pairs to the run's registry and saves it."""
        self.manifest()
        registry = self.registry
        approved = [registry.approve(name, abbreviation) for name, abbreviation in entries]
        registry.dump_to_file(self.store.registry_path)
        return approved

    ############################################################################
    # Validation
    ############################################################################

    def _document_of(self, doc_id):
        path = doc_id + '.md'
        if not self.store.has(path):
            raise PreconditionError('No stored document {!r}'.format(doc_id))
        domain = self.registry.get(doc_id.split('/')[1])
        return parse_document(self.store.read_text(path), self.template, domain, doc_id)

    def reliability_study(self, doc_id, n_runs, setting_id=None):
        """Assesses one document's DoR n_runs times, each run in a fresh context.

        Failed runs are counted and skipped.

        Returns:
            ReliabilityResult: scores, their statistics and the outliers under every policy.
        """
        if int(n_runs) < 2:
            raise PreconditionError('A reliability study needs at least 2 runs')
        self.manifest()
        setting = self.config.setting(setting_id or self.config.generation_setting)
        doc = self._document_of(doc_id)
        version = self.ledger.resolve(self.config.prompt_versions)[gc.dor]
        gateway = self._gateway(self.store.path('reliability', 'transcripts'))

        scores, failures, last_error = [], 0, None
        for run in tqdm(range(1, int(n_runs) + 1), desc='reliability', disable=MyLogger.quiet):
            ctx = gateway.open_context(setting, 'reliability/{}/run-{}'.format(doc_id, run))
            try:
                record = assess_dor(gateway, ctx, doc, self.template, self.scale, version, persona=self.persona,
                                    clock=self.clock)
            except (ProviderError, ParseError) as e:
                failures += 1
                last_error = e
                MyLogger.print_and_log('Reliability run {} of {} failed: {}'.format(run, doc_id, e),
                                       pipeline_loc, level=1)
                continue
            scores.append(record.recomputed_score)
        if not scores:
            raise last_error

        outliers = {}
        for policy in gc.outlier_policies:
            try:
                outliers[policy] = flag_outliers(scores, policy)
            except TooFewValues:
                outliers[policy] = []
        result = ReliabilityResult(doc_id, setting.setting_id, tuple(scores), describe(scores), outliers, failures)
        self.store.write_json('reliability/{}--{}.json'.format(doc_id.replace('/', '__'), setting.setting_id),
                              result.to_dict())
        return result

    def cross_model_assess(self, setting_ids, iteration=None):
        """DoR of every document of an iteration under each setting, each in a fresh context.

        A same-context setting can only be the one that generated the corpus;
        its column replays the stored assessments. Failed documents leave
        their cells empty.

        Raises:
            UnsupportedReplay: for a same-context setting of another model.
        """
        n = int(iteration) if iteration else self.store.completed_iterations()[-1]
        record = self.store.read_iteration(n)
        settings = [self.config.setting(s) for s in setting_ids]
        for setting in settings:
            if setting.context_mode == gc.same_context and setting.setting_id != record.setting_id:
                raise UnsupportedReplay('{} cannot replay the generation context of {}'.format(
                    setting.setting_id, record.setting_id))

        version = self.ledger.resolve(record.prompt_versions)[gc.dor]
        gateway = self._gateway(self.store.path('validation', 'transcripts'))
        grouped, sources, failures = {}, {}, {}
        pairs = [(s, b, e) for s in settings for b in record.domains for e in b.documents]
        for setting, bundle, entry in tqdm(pairs, desc='validation', disable=MyLogger.quiet):
            key = (setting.setting_id, bundle.domain)
            grouped.setdefault(key, [])
            sources.setdefault(key, [])
            failures.setdefault(setting.setting_id, 0)
            if setting.context_mode == gc.same_context:
                path = entry.assessment
                dor = DorAssessment.from_dict(self.store.read_json(path)['dor'])
                ref = path + '#dor.recomputed_score'
            else:
                path = 'validation/{}/{}.dor.json'.format(setting.setting_id, entry.doc_id)
                ref = path + '#recomputed_score'
                if self.store.has(path):
                    dor = DorAssessment.from_dict(self.store.read_json(path))
                else:
                    doc = self._document_of(entry.doc_id)
                    ctx = gateway.open_context(setting, 'validation/{}/{}'.format(setting.setting_id, entry.doc_id))
                    try:
                        dor = assess_dor(gateway, ctx, doc, self.template, self.scale, version,
                                         persona=self.persona, clock=self.clock)
                    except (ProviderError, ParseError) as e:
                        failures[setting.setting_id] += 1
                        MyLogger.print_and_log('{} could not assess {}: {}'.format(
                            setting.setting_id, entry.doc_id, e), pipeline_loc, level=1)
                        continue
                    self.store.write_json(path, dor.to_dict())
            grouped[key].append(dor)
            sources[key].append(ref)

        matrix = dor_mean_matrix(grouped, [s.setting_id for s in settings], [b.domain for b in record.domains],
                                 sources)
        result = CrossModelResult(n, matrix, grouped, failures)
        self.store.write_json('validation/{}.json'.format(iteration_name(n)), result.to_dict())
        return result

    def reassess(self, iteration=None, setting_id=None):
        """Completeness and DoR of a stored corpus again, each document in a fresh context.

        Results go to ``reassessment/<setting>/<document>.assessment.json``.
        """
        n = int(iteration) if iteration else self.store.completed_iterations()[-1]
        record = self.store.read_iteration(n)
        setting = self.config.setting(setting_id or self.config.generation_setting)
        versions = self.ledger.resolve(record.prompt_versions)
        gateway = self._gateway(self.store.path('reassessment', 'transcripts'))
        results = []
        for entry in tqdm(record.documents(), desc='assess', disable=MyLogger.quiet):
            doc = self._document_of(entry.doc_id)
            ctx = gateway.open_context(setting, 'reassessment/{}/{}'.format(setting.setting_id, entry.doc_id))
            completeness, dor = assess_document(gateway, ctx, doc, self.template, self.scale, versions,
                                                persona=self.persona, clock=self.clock)
            self.store.write_json('reassessment/{}/{}.assessment.json'.format(setting.setting_id, entry.doc_id), {
                'document_id': entry.doc_id,
                'completeness': completeness.to_dict(),
                'dor': dor.to_dict(),
            })
            results.append((completeness, dor))
        return results

    ############################################################################
    # Statistics
    ############################################################################

    def similarity(self, iteration=None):
        """Similarity records of an iteration, computing those a partial domain is missing."""
        n = int(iteration) if iteration else len(self.manifest().iterations)
        record = self.store.read_iteration(n)
        records = {}
        for bundle in record.domains:
            path = self.store.similarity_path(n, bundle.domain)
            if self.store.has(path):
                records[bundle.domain] = SimilarityRecord.from_dict(self.store.read_json(path))
            elif len(bundle.documents) >= 2:
                docs = [self._document_of(e.doc_id) for e in bundle.documents]
                records[bundle.domain] = pairwise_similarity(docs, self.embedder)
        return records

    def run_stats(self, policy=None):
        """Writes ``stats.json`` with every completed iteration's snapshot and the trend.

        Args:
            policy (str, optional): Outlier policy, the configured one by default.
        """
        policy = policy or self.config.outlier_policy
        snapshots = {}
        for n in self.store.completed_iterations():
            record = self.store.read_iteration(n)
            snapshots[str(n)] = analysis.iteration_snapshot(self.store, record, policy)
        data = {'run_id': self.config.run_id, 'iterations': snapshots, 'trend': analysis.trend(self.store)}
        self.store.write_json('stats.json', data)
        return data

    def trend(self):
        return analysis.trend(self.store)
