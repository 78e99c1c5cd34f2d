from dataclasses import dataclass

import yaml

import specforge.global_config as gc
from specforge.utilities.errors import PreconditionError, UnknownDomain
from specforge.utilities.io.files import write_text_atomic
from specforge.utilities.io.logger import MyLogger

domains_loc = 'domains'


@dataclass(frozen=True)
class Domain:
    """Industry domain scenarios are generated for.

    Attributes:
        id (int): Position in the registry, starting at 1.
        name (str): Display name, e.g. ``Logistics``.
        abbreviation (str): Lowercase tag used in tables and paths, e.g. ``logi``.
    """
    id: int
    name: str
    abbreviation: str

    def to_dict(self):
        return {'id': self.id, 'name': self.name, 'abbreviation': self.abbreviation}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data['id']), str(data['name']), str(data['abbreviation']))


class DomainRegistry(object):
    """Ordered, validated collection of approved domains.

    Ids must be unique and contiguous from 1; abbreviations must be unique,
    non-empty and lowercase.
    """

    def __init__(self, domains=()):
        self._domains = []
        for domain in domains:
            self._append(domain)

    def _append(self, domain):
        expected_id = len(self._domains) + 1
        if domain.id != expected_id:
            raise PreconditionError('Domain ids must be contiguous from 1, expected {} but got {}'.format(
                expected_id, domain.id))
        if not domain.abbreviation or domain.abbreviation != domain.abbreviation.lower():
            raise PreconditionError('Domain abbreviation must be non-empty and lowercase: {!r}'.format(
                domain.abbreviation))
        if not domain.name.strip():
            raise PreconditionError('Domain name must not be empty')
        for other in self._domains:
            if other.abbreviation == domain.abbreviation:
                raise PreconditionError('Duplicate domain abbreviation {!r}'.format(domain.abbreviation))
            if other.name.lower() == domain.name.lower():
                raise PreconditionError('Duplicate domain name {!r}'.format(domain.name))
        self._domains.append(domain)

    def __iter__(self):
        return iter(list(self._domains))

    def __len__(self):
        return len(self._domains)

    def __contains__(self, domain):
        return isinstance(domain, Domain) and 0 < domain.id <= len(self._domains) \
            and self._domains[domain.id - 1] == domain

    def get(self, key):
        """Looks a domain up by id or abbreviation.

        Raises:
            UnknownDomain: if nothing matches.
        """
        if isinstance(key, int) and not isinstance(key, bool):
            if 0 < key <= len(self._domains):
                return self._domains[key - 1]
        else:
            for domain in self._domains:
                if domain.abbreviation == str(key).strip().lower():
                    return domain
        raise UnknownDomain('Unknown domain {!r}'.format(key))

    def select(self, keys):
        """Returns the domains for a list of ids/abbreviations, or all of them if keys is empty."""
        if not keys:
            return list(self._domains)
        return [self.get(key) for key in keys]

    def approve(self, name, abbreviation):
        """Records a human-approved domain proposal and returns the new Domain."""
        domain = Domain(len(self._domains) + 1, name.strip(), abbreviation.strip())
        self._append(domain)
        MyLogger.print_and_log('Approved domain {} ({})'.format(domain.name, domain.abbreviation), domains_loc)
        return domain

    def to_dict(self):
        return {'domains': [d.to_dict() for d in self._domains]}

    def dump_to_file(self, path):
        write_text_atomic(path, yaml.safe_dump(self.to_dict(), sort_keys=False, allow_unicode=True))


def load_registry(path=gc.DOMAINS_FILE):
    """Loads a domain registry from a YAML file with a top-level ``domains`` list."""
    with open(path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}
    return DomainRegistry(Domain.from_dict(d) for d in data.get('domains', []))
