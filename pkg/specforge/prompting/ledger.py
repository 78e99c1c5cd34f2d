import os
import threading

import specforge.global_config as gc
from specforge.prompting.prompts import PromptVersion, check_placeholders
from specforge.utilities.errors import EmptyRationale, LedgerIntegrityError, PreconditionError, WrongPromptKind
from specforge.utilities.io.files import read_json, read_text, sha256_text, write_json, write_text_atomic
from specforge.utilities.io.logger import MyLogger

ledger_loc = 'prompt_ledger'

LEDGER_FILE = 'ledger.json'


class PromptLedger(object):
    """Append-only record of prompt versions.

    Bodies live in ``<root>/<kind>/v<N>.txt``; ``<root>/ledger.json`` lists
    every version with its rationale, iteration and SHA-256 so later edits to
    a body file are detected.

    Args:
        root (str): Prompt directory of a run.
        seed (bool, optional): Whether to register the packaged v1 bodies when
            the ledger is new. (default: {True})
    """

    def __init__(self, root, seed=True):
        self.root = root
        self._lock = threading.Lock()
        self.path = os.path.join(root, LEDGER_FILE)
        if os.path.isfile(self.path):
            self.entries = read_json(self.path).get('entries', [])
        else:
            self.entries = []
            if seed:
                self._seed()

    def _seed(self):
        for kind in gc.prompt_kinds:
            body = read_text(os.path.join(gc.PROMPTS_PATH, kind, 'v1.txt'))
            self.register_refinement(kind, body, 'Initial version built from the persona, template, '
                                                 'chain-of-thought and zero-shot patterns', 1)

    def _body_path(self, kind, version_id):
        return os.path.join(self.root, kind, 'v{}.txt'.format(version_id))

    def __len__(self):
        return len(self.entries)

    def register_refinement(self, kind, new_body, rationale, iteration):
        """Appends a new version of a prompt kind.

        Args:
            kind (str): generation, completeness or dor.
            new_body (str): Body with placeholders of that kind.
            rationale (str): Why the prompt changed, must not be blank.
            iteration (int): Iteration whose analysis motivated the change.

        Returns:
            PromptVersion: the registered version, id = previous id + 1.
        """
        if kind not in gc.prompt_kinds:
            raise WrongPromptKind('Unknown prompt kind {!r}'.format(kind))
        if not rationale or not rationale.strip():
            raise EmptyRationale('A prompt refinement needs a rationale')
        if not new_body or not new_body.strip():
            raise PreconditionError('A prompt body must not be empty')
        if int(iteration) < 1:
            raise PreconditionError('Iterations are numbered from 1')
        check_placeholders(kind, new_body)

        with self._lock:
            version_id = len(self.versions(kind)) + 1
            path = self._body_path(kind, version_id)
            if os.path.exists(path):
                raise LedgerIntegrityError('{} exists but is not in the ledger'.format(path))
            write_text_atomic(path, new_body)
            self.entries.append({
                'id': version_id,
                'kind': kind,
                'rationale': rationale.strip(),
                'iteration': int(iteration),
                'sha256': sha256_text(new_body),
                'path': os.path.relpath(path, self.root).replace(os.sep, '/'),
            })
            write_json(self.path, {'entries': self.entries})

        MyLogger.print_and_log('Registered {} prompt v{}: {}'.format(kind, version_id, rationale.strip()),
                               ledger_loc)
        return PromptVersion(version_id, kind, new_body, rationale.strip(), int(iteration))

    def versions(self, kind):
        """Ledger entries of one kind in id order."""
        return [e for e in self.entries if e['kind'] == kind]

    def get(self, kind, version_id):
        """Loads a registered version, checking its body against the recorded hash."""
        for entry in self.versions(kind):
            if entry['id'] == int(version_id):
                body = read_text(os.path.join(self.root, entry['path']))
                if sha256_text(body) != entry['sha256']:
                    raise LedgerIntegrityError('{} v{} was modified after registration'.format(kind, version_id))
                return PromptVersion(entry['id'], kind, body, entry['rationale'], entry['iteration'])
        raise PreconditionError('No {} prompt version {}'.format(kind, version_id))

    def latest(self, kind):
        versions = self.versions(kind)
        if not versions:
            raise PreconditionError('No {} prompt registered'.format(kind))
        return self.get(kind, versions[-1]['id'])

    def resolve(self, version_ids=None):
        """Returns {kind: PromptVersion} for the given ids, the latest where an id is missing."""
        version_ids = version_ids or {}
        return {kind: self.get(kind, version_ids[kind]) if version_ids.get(kind) else self.latest(kind)
                for kind in gc.prompt_kinds}

    def verify(self):
        """Re-hashes every body and checks ids per kind are gapless from 1."""
        for kind in gc.prompt_kinds:
            ids = [e['id'] for e in self.versions(kind)]
            if ids != list(range(1, len(ids) + 1)):
                raise LedgerIntegrityError('{} prompt ids are not gapless: {}'.format(kind, ids))
            for version_id in ids:
                self.get(kind, version_id)
        return True
