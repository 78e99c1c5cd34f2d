import json
from dataclasses import dataclass
from functools import lru_cache

import specforge.global_config as gc
from specforge.utilities.errors import InvalidScale, UnknownSeverity


@dataclass(frozen=True)
class SeverityLevel:
    name: str
    deduction: float
    description: str = ''


@dataclass(frozen=True)
class SeverityScale:
    """Ordered severity levels, each with the fixed points it deducts from a DoR score.

    Deductions lie in (0, 1] and strictly increase with level order; a scale
    has at least two levels.
    """
    levels: tuple

    def __post_init__(self):
        if len(self.levels) < 2:
            raise InvalidScale('A severity scale needs at least 2 levels, got {}'.format(len(self.levels)))
        names = set()
        previous = 0.0
        for level in self.levels:
            if not level.name or level.name != level.name.strip().lower():
                raise InvalidScale('Severity level names must be non-empty lowercase: {!r}'.format(level.name))
            if level.name in names:
                raise InvalidScale('Duplicate severity level {!r}'.format(level.name))
            if not 0.0 < level.deduction <= 1.0:
                raise InvalidScale('Deduction of {!r} must lie in (0, 1]'.format(level.name))
            if level.deduction <= previous:
                raise InvalidScale('Deductions must strictly increase with level order')
            names.add(level.name)
            previous = level.deduction

    def names(self):
        return [level.name for level in self.levels]

    def deduction_for(self, name):
        """Returns the configured deduction of a level, matching names case-insensitively."""
        key = str(name).strip().lower()
        for level in self.levels:
            if level.name == key:
                return level.deduction
        raise UnknownSeverity('Unknown severity level {!r}, expected one of {}'.format(name, self.names()))

    def to_dict(self):
        return {'levels': [{'name': l.name, 'deduction': l.deduction, 'description': l.description}
                           for l in self.levels]}

    @classmethod
    def from_dict(cls, data):
        try:
            levels = tuple(SeverityLevel(str(l['name']).strip().lower(), float(l['deduction']),
                                         str(l.get('description', '')))
                           for l in data.get('levels', []))
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise InvalidScale('Invalid severity scale: {}'.format(e))
        return cls(levels)


def load_scale(path):
    with open(path, 'r', encoding='utf-8') as f:
        return SeverityScale.from_dict(json.load(f))


@lru_cache(maxsize=1)
def default_scale():
    """minor 0.02, moderate 0.05, major 0.10, critical 0.25"""
    return load_scale(gc.SEVERITY_SCALE_FILE)
