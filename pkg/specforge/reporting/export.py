import os
import shutil
import tempfile
from dataclasses import dataclass, field

from specforge.pipeline.records import IterationRecord, RunManifest
from specforge.pipeline.store import CONFIG_FILE, MANIFEST_FILE, RunStore, iteration_name
from specforge.similarity.similarity import SimilarityRecord
from specforge.utilities.errors import DataIntegrityError, ExportError
from specforge.utilities.io.files import make_directory, read_json, sha256_file, write_json
from specforge.utilities.io.logger import MyLogger

export_loc = 'export'

CONTENTS_FILE = 'CONTENTS.json'
_CORPUS_SUFFIXES = ('.md', '.assessment.json', 'similarity.json', 'iteration.json', 'stats.json')


def corpus_files(store):
    """Relative paths of everything a corpus export contains, in a stable order."""
    files = [MANIFEST_FILE, CONFIG_FILE]
    for iteration in store.completed_iterations():
        directory = store.path(iteration_name(iteration))
        for dirpath, dirnames, filenames in os.walk(directory):
            dirnames.sort()
            for name in sorted(filenames):
                if name.endswith(_CORPUS_SUFFIXES):
                    files.append(store.relpath(os.path.join(dirpath, name)))
    return files


def export_corpus(store, destination):
    """Copies the completed iterations into a self-contained directory.

    The tree is assembled next to destination and renamed into place, so a
    failed export leaves nothing behind. ``CONTENTS.json`` lists the SHA-256
    of every file.

    Raises:
        NoCompletedIteration: if the run has nothing to export.
        ExportError: if destination exists or cannot be written.
    """
    files = corpus_files(store)
    run_id = store.read_manifest().run_id
    destination = os.path.abspath(destination)
    if os.path.exists(destination):
        raise ExportError('Export destination {} already exists'.format(destination))
    try:
        parent = make_directory(os.path.dirname(destination))
        staging = tempfile.mkdtemp(dir=parent, prefix='.export-')
    except OSError as e:
        raise ExportError('Cannot write to {}: {}'.format(destination, e))

    try:
        contents = {}
        for relpath in files:
            target = os.path.join(staging, *relpath.split('/'))
            make_directory(os.path.dirname(target))
            shutil.copyfile(store.path(relpath), target)
            contents[relpath] = sha256_file(target)
        write_json(os.path.join(staging, CONTENTS_FILE), {'run_id': run_id, 'files': contents})
        os.rename(staging, destination)
    except OSError as e:
        shutil.rmtree(staging, ignore_errors=True)
        raise ExportError('Export to {} failed: {}'.format(destination, e))

    MyLogger.print_and_log('Exported {} files of run {} to {}'.format(len(files), store.run_id, destination),
                           export_loc)
    return destination


@dataclass
class ImportedCorpus:
    """Records read back from an exported corpus."""
    store: object
    manifest: object
    iterations: dict = field(default_factory=dict)
    documents: dict = field(default_factory=dict)
    assessments: dict = field(default_factory=dict)
    similarity: dict = field(default_factory=dict)
    contents: dict = field(default_factory=dict)


def import_corpus(path):
    """Reads an exported corpus after checking every file against ``CONTENTS.json``.

    Raises:
        DataIntegrityError: for a missing, extra or altered file.
    """
    path = os.path.abspath(path)
    contents_path = os.path.join(path, CONTENTS_FILE)
    if not os.path.isfile(contents_path):
        raise DataIntegrityError('{} is not an exported corpus'.format(path))
    contents = read_json(contents_path)['files']
    for relpath, digest in contents.items():
        file_path = os.path.join(path, *relpath.split('/'))
        if not os.path.isfile(file_path) or sha256_file(file_path) != digest:
            raise DataIntegrityError('{} is missing or altered'.format(relpath))
    for dirpath, dirnames, filenames in os.walk(path):
        for name in filenames:
            relpath = os.path.relpath(os.path.join(dirpath, name), path).replace(os.sep, '/')
            if relpath != CONTENTS_FILE and relpath not in contents:
                raise DataIntegrityError('{} is not listed in {}'.format(relpath, CONTENTS_FILE))

    store = RunStore(os.path.dirname(path), os.path.basename(path))
    corpus = ImportedCorpus(store, RunManifest.from_dict(store.read_json(MANIFEST_FILE)), contents=contents)
    for iteration in store.completed_iterations():
        record = IterationRecord.from_dict(store.read_json(store.iteration_path(iteration)))
        corpus.iterations[iteration] = record
        for bundle in record.domains:
            for entry in bundle.documents:
                corpus.documents[entry.doc_id] = store.read_text(entry.document)
                corpus.assessments[entry.doc_id] = store.read_json(entry.assessment)
            corpus.similarity[(iteration, bundle.domain)] = SimilarityRecord.from_dict(
                store.read_json(bundle.similarity))
    return corpus
