from dataclasses import dataclass
from functools import lru_cache

import yaml

import specforge.global_config as gc
from specforge.utilities.errors import TemplateConfigError


@dataclass(frozen=True)
class MainCategory:
    name: str
    sub_categories: tuple


@dataclass(frozen=True)
class Template:
    """Ordered main categories and their sub-categories.

    A scenario is complete when every (main, sub) pair of its template has
    non-empty text.
    """
    main_categories: tuple
    version: str

    def __post_init__(self):
        if not self.main_categories:
            raise TemplateConfigError('Template has no main categories')
        seen = set()
        for main in self.main_categories:
            if not main.sub_categories:
                raise TemplateConfigError('Main category {!r} has no sub-categories'.format(main.name))
            for name in (main.name,) + tuple(main.sub_categories):
                key = name.strip().lower()
                if not key:
                    raise TemplateConfigError('Template contains an empty category name')
                if key in seen:
                    raise TemplateConfigError('Duplicate category name {!r} in template'.format(name))
                seen.add(key)

    def sections(self):
        """All (main, sub) pairs in template order."""
        return [(main.name, sub) for main in self.main_categories for sub in main.sub_categories]

    def main_names(self):
        return [main.name for main in self.main_categories]

    def sub_categories(self, main_name):
        for main in self.main_categories:
            if main.name == main_name:
                return list(main.sub_categories)
        raise KeyError(main_name)

    def to_dict(self):
        return {
            'version': self.version,
            'main_categories': [{'name': m.name, 'sub_categories': list(m.sub_categories)}
                                for m in self.main_categories],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            mains = tuple(MainCategory(str(m['name']), tuple(str(s) for s in m['sub_categories']))
                          for m in data['main_categories'])
            version = str(data['version'])
        except (KeyError, TypeError) as e:
            raise TemplateConfigError('Invalid template config: {}'.format(e))
        return cls(mains, version)


def load_template(path):
    """Reads a template config file (YAML schema documented in data/template.yaml)."""
    with open(path, 'r', encoding='utf-8') as f:
        return Template.from_dict(yaml.safe_load(f) or {})


@lru_cache(maxsize=1)
def default_template():
    """The four main categories and 19 sub-categories scenarios are written against."""
    return load_template(gc.TEMPLATE_FILE)
