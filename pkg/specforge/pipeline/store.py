import os
import threading

import specforge.global_config as gc
from specforge.pipeline.records import IterationRecord, RunManifest, content_hash
from specforge.utilities.errors import DataIntegrityError, NoCompletedIteration, PreconditionError
from specforge.utilities.io.files import (make_directory, read_json, read_text, sha256_file, write_json,
                                          write_text_atomic)
from specforge.utilities.io.logger import MyLogger

store_loc = 'run_store'

MANIFEST_FILE = 'manifest.json'
CONFIG_FILE = 'config.json'
REGISTRY_FILE = 'domains.yaml'
ITERATION_FILE = 'iteration.json'
STATS_FILE = 'stats.json'
SIMILARITY_FILE = 'similarity.json'

# Working state that is not part of the corpus.
_UNHASHED_DIRS = ('transcripts',)
_UNHASHED_SUFFIXES = ('.log', '.lock')


def iteration_name(iteration):
    return 'iteration-{}'.format(int(iteration))


def document_id(iteration, domain, k):
    """Corpus id of a document, also its path stem below the run directory."""
    return '{}/{}/ssyrs-{}'.format(iteration_name(iteration), domain, int(k))


class RunStore(object):
    """On-disk layout of one run.

    ``<root>/<run-id>/`` holds ``manifest.json``, ``config.json``,
    ``iteration-<N>/<domain>/ssyrs-<k>.md`` with a sibling
    ``.assessment.json``, ``iteration-<N>/<domain>/similarity.json``,
    ``iteration-<N>/iteration.json`` and ``stats.json``, plus the
    ``transcripts/``, ``prompts/``, ``validation/``, ``reliability/`` and
    ``reports/`` directories. Every write goes through one lock and is
    atomic.

    Args:
        root (str): Directory holding all runs.
        run_id (str): Name of this run.
    """

    def __init__(self, root=gc.runs_path, run_id='default'):
        self.root = root
        self.run_id = run_id
        self.run_dir = os.path.join(root, run_id)
        self._lock = threading.RLock()

    def path(self, *parts):
        return os.path.join(self.run_dir, *parts)

    def relpath(self, path):
        return os.path.relpath(path, self.run_dir).replace(os.sep, '/')

    @property
    def transcripts_dir(self):
        return self.path('transcripts')

    @property
    def prompts_dir(self):
        return self.path('prompts')

    @property
    def reliability_dir(self):
        return self.path('reliability')

    @property
    def registry_path(self):
        return self.path(REGISTRY_FILE)

    def exists(self):
        return os.path.isfile(self.path(MANIFEST_FILE))

    # Generic access

    def write_json(self, relpath, data):
        with self._lock:
            write_json(self.path(relpath), data)
        return relpath

    def write_text(self, relpath, text):
        with self._lock:
            write_text_atomic(self.path(relpath), text)
        return relpath

    def read_json(self, relpath):
        return read_json(self.path(relpath))

    def read_text(self, relpath):
        return read_text(self.path(relpath))

    def has(self, relpath):
        return os.path.isfile(self.path(relpath))

    def resolve(self, reference):
        """Value behind a source reference ``<relpath>#<key>.<key>...``.

        List positions are written as integers, e.g.
        ``iteration-1/logi/similarity.json#pairs.2.score``.
        """
        relpath, _, pointer = reference.partition('#')
        if not self.has(relpath):
            raise DataIntegrityError('Source {} does not exist'.format(relpath))
        value = self.read_json(relpath) if relpath.endswith('.json') else self.read_text(relpath)
        for key in [p for p in pointer.split('.') if p]:
            try:
                value = value[int(key)] if isinstance(value, list) else value[key]
            except (KeyError, IndexError, ValueError, TypeError):
                raise DataIntegrityError('Source {} has no value at {}'.format(relpath, pointer))
        return value

    # Documents and their assessments

    def document_path(self, iteration, domain, k):
        return document_id(iteration, domain, k) + '.md'

    def assessment_path(self, iteration, domain, k):
        return document_id(iteration, domain, k) + '.assessment.json'

    def similarity_path(self, iteration, domain):
        return '{}/{}/{}'.format(iteration_name(iteration), domain, SIMILARITY_FILE)

    def iteration_path(self, iteration):
        return '{}/{}'.format(iteration_name(iteration), ITERATION_FILE)

    def stats_path(self, iteration):
        return '{}/{}'.format(iteration_name(iteration), STATS_FILE)

    # Iterations and manifest

    def write_iteration(self, record):
        """Persists record; a sealed record on disk is never overwritten."""
        relpath = self.iteration_path(record.iteration)
        with self._lock:
            if self.has(relpath):
                stored = IterationRecord.from_dict(self.read_json(relpath))
                if stored.sealed and stored != record:
                    raise DataIntegrityError('Iteration {} is sealed'.format(record.iteration))
            self.write_json(relpath, record.to_dict())
        return relpath

    def read_iteration(self, iteration):
        relpath = self.iteration_path(iteration)
        if not self.has(relpath):
            raise PreconditionError('Run {} has no iteration {}'.format(self.run_id, iteration))
        return IterationRecord.from_dict(self.read_json(relpath))

    def write_manifest(self, manifest):
        with self._lock:
            self.write_json(MANIFEST_FILE, manifest.to_dict())

    def read_manifest(self):
        if not self.exists():
            raise PreconditionError('No run {} below {}'.format(self.run_id, self.root))
        return RunManifest.from_dict(self.read_json(MANIFEST_FILE))

    def completed_iterations(self):
        """Numbers of the complete iterations, oldest first.

        Raises:
            NoCompletedIteration: if there is none.
        """
        completed = self.read_manifest().completed()
        if not completed:
            raise NoCompletedIteration('Run {} has no completed iteration'.format(self.run_id))
        return completed

    def content_hashes(self):
        """Maps every corpus file to a hash of its content with timestamps removed."""
        hashes = {}
        with self._lock:
            for dirpath, dirnames, filenames in os.walk(self.run_dir):
                dirnames[:] = sorted(d for d in dirnames if d not in _UNHASHED_DIRS)
                for name in sorted(filenames):
                    if name.endswith(_UNHASHED_SUFFIXES) or name.startswith('.tmp-'):
                        continue
                    path = os.path.join(dirpath, name)
                    if name.endswith('.json'):
                        hashes[self.relpath(path)] = content_hash(read_json(path))
                    else:
                        hashes[self.relpath(path)] = sha256_file(path)
        return hashes

    def initialize(self, config, manifest_factory):
        """Creates the run directory on first use and checks the config hash afterwards."""
        with self._lock:
            if self.exists():
                manifest = self.read_manifest()
                if manifest.config_hash != config.config_hash():
                    raise DataIntegrityError('Run {} was created with another configuration'.format(self.run_id))
                return manifest
            make_directory(self.run_dir)
            self.write_json(CONFIG_FILE, config.to_dict())
            manifest = manifest_factory()
            self.write_manifest(manifest)
            MyLogger.print_and_log('Created run {} in {}'.format(self.run_id, self.run_dir), store_loc)
            return manifest
