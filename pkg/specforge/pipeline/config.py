from dataclasses import dataclass, field, replace

import yaml

import specforge.global_config as gc
from specforge.gateway.settings import ModelSetting
from specforge.utilities.errors import PreconditionError
from specforge.utilities.io.files import canonical_json, sha256_text

EMBEDDING_PROVIDERS = ('http', 'mock')


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines what a run produces.

    Attributes:
        run_id (str): Directory name of the run below the runs directory.
        domains (tuple): Domain abbreviations, all registered domains if empty.
        docs_per_domain (int): Documents generated per domain and iteration.
        prompt_versions (dict): Version id per prompt kind, None for the latest.
        settings (tuple): Every ModelSetting the run may use.
        generation_setting (str): Setting that generates and self-assesses.
        severity_scale (str): Scale file, packaged scale if empty.
        template (str): Template file, packaged template if empty.
        domain_registry (str): Registry file, packaged registry if empty.
        embedding (dict): ``provider`` (http or mock), ``dimension``, ``endpoint``.
        outlier_policy (str): below_q1 or tukey.
        nproc (int): Domains generated concurrently.
    """
    run_id: str = 'default'
    domains: tuple = ()
    docs_per_domain: int = gc.DOCS_PER_DOMAIN
    prompt_versions: dict = field(default_factory=dict)
    settings: tuple = ()
    generation_setting: str = ''
    severity_scale: str = ''
    template: str = ''
    domain_registry: str = ''
    embedding: dict = field(default_factory=dict)
    outlier_policy: str = gc.below_q1
    nproc: int = 1

    def __post_init__(self):
        if not self.run_id or '/' in self.run_id or self.run_id.startswith('.'):
            raise PreconditionError('Invalid run id {!r}'.format(self.run_id))
        if int(self.docs_per_domain) < 2:
            raise PreconditionError('docs_per_domain must be at least 2 for pairwise similarity')
        if not self.settings:
            raise PreconditionError('A run needs at least one model setting')
        ids = [s.setting_id for s in self.settings]
        if len(set(ids)) != len(ids):
            raise PreconditionError('Duplicate setting ids: {}'.format(ids))
        if self.generation_setting not in ids:
            raise PreconditionError('Generation setting {!r} is not configured'.format(self.generation_setting))
        unknown = set(self.prompt_versions) - set(gc.prompt_kinds)
        if unknown:
            raise PreconditionError('Unknown prompt kinds {}'.format(sorted(unknown)))
        if self.outlier_policy not in gc.outlier_policies:
            raise PreconditionError('Unknown outlier policy {!r}'.format(self.outlier_policy))
        if self.embedding.get('provider', 'http') not in EMBEDDING_PROVIDERS:
            raise PreconditionError('Unknown embedding provider {!r}'.format(self.embedding.get('provider')))
        if int(self.nproc) < 1:
            raise PreconditionError('nproc must be at least 1')

    def setting(self, setting_id):
        for setting in self.settings:
            if setting.setting_id == setting_id:
                return setting
        raise PreconditionError('Unknown model setting {!r}, configured: {}'.format(
            setting_id, [s.setting_id for s in self.settings]))

    @property
    def generator(self):
        return self.setting(self.generation_setting)

    def with_overrides(self, **changes):
        """Copy with the given non-None fields replaced."""
        changes = {k: v for k, v in changes.items() if v is not None}
        if 'domains' in changes:
            changes['domains'] = tuple(changes['domains'])
        return replace(self, **changes)

    def to_dict(self):
        return {
            'run_id': self.run_id,
            'domains': list(self.domains),
            'docs_per_domain': int(self.docs_per_domain),
            'prompt_versions': {k: self.prompt_versions.get(k) for k in gc.prompt_kinds},
            'settings': [s.to_dict() for s in self.settings],
            'generation_setting': self.generation_setting,
            'severity_scale': self.severity_scale,
            'template': self.template,
            'domain_registry': self.domain_registry,
            'embedding': dict(self.embedding),
            'outlier_policy': self.outlier_policy,
            'nproc': int(self.nproc),
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        known = cls.__dataclass_fields__.keys()
        unknown = set(data) - set(known)
        if unknown:
            raise PreconditionError('Unknown run config keys: {}'.format(sorted(unknown)))
        data['settings'] = tuple(ModelSetting.from_dict(s) for s in data.get('settings') or ())
        data['domains'] = tuple(data.get('domains') or ())
        data['prompt_versions'] = dict(data.get('prompt_versions') or {})
        data['embedding'] = dict(data.get('embedding') or {})
        for key in ('severity_scale', 'template', 'domain_registry'):
            data[key] = data.get(key) or ''
        return cls(**data)

    def config_hash(self):
        """SHA-256 of the canonical JSON form; nproc does not change results and is left out."""
        data = self.to_dict()
        data.pop('nproc')
        return sha256_text(canonical_json(data))


def load_run_config(path=gc.RUN_CONFIG_FILE):
    """Reads a YAML run configuration.

    Raises:
        PreconditionError: if the file is missing, is not valid YAML or holds unknown keys.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise PreconditionError('Cannot read run config {}: {}'.format(path, e))
    except yaml.YAMLError as e:
        raise PreconditionError('Run config {} is not valid YAML: {}'.format(path, e))
    if not isinstance(data, dict):
        raise PreconditionError('Run config {} must be a mapping'.format(path))
    return RunConfig.from_dict(data)
