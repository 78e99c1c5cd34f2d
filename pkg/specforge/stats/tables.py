from dataclasses import dataclass

import pandas as pd

from specforge.stats.descriptive import describe, format_value
from specforge.utilities.errors import EmptyGroup, PreconditionError
from specforge.utilities.io.logger import MyLogger

tables_loc = 'stats_tables'

OVERALL = 'Overall'
SIZE_COLUMNS = ('mean', 'median', 'min', 'max', 'total')
SIMILARITY_COLUMNS = ('mean', 'median', 'sample_std', 'min', 'max')
DOR_COLUMNS = ('mean', 'median', 'sample_std', 'min', 'max')
RELIABILITY_COLUMNS = ('mean', 'sample_std', 'sample_variance', 'min', 'max', 'range', 'q1', 'q3')

COLUMN_TITLES = {
    'n': 'N',
    'mean': 'Mean',
    'median': 'Median',
    'sample_std': 'Std. Dev.',
    'sample_variance': 'Variance',
    'min': 'Min',
    'max': 'Max',
    'range': 'Range',
    'q1': 'Q1',
    'q3': 'Q3',
    'total': 'Total',
}


@dataclass(frozen=True)
class MetricRow:
    label: str
    stats: object
    sources: tuple = ()


@dataclass(frozen=True)
class MetricTable:
    """Per-domain statistics of one metric plus an overall row over the pooled values."""
    metric: str
    rows: tuple
    overall_row: MetricRow
    digits: int
    columns: tuple

    def all_rows(self):
        return list(self.rows) + [self.overall_row]

    def display_row(self, row):
        shown = row.stats.display(self.digits)
        return [row.label] + [shown[c] for c in self.columns]

    def to_frame(self):
        """Display strings as a pandas DataFrame, one row per domain and Overall last."""
        header = [self.metric] + [COLUMN_TITLES[c] for c in self.columns]
        return pd.DataFrame([self.display_row(r) for r in self.all_rows()], columns=header)

    def to_text(self):
        return self.to_frame().to_string(index=False)

    def to_dict(self):
        return {
            'metric': self.metric,
            'digits': self.digits,
            'columns': list(self.columns),
            'rows': [{'label': r.label, 'stats': r.stats.to_dict(), 'display': dict(zip(
                self.columns, self.display_row(r)[1:])), 'sources': list(r.sources)} for r in self.all_rows()],
        }


def aggregate_metric_table(groups, metric, digits=0, columns=SIZE_COLUMNS, sources=None):
    """Builds a MetricTable from values grouped by domain.

    Args:
        groups (dict): Domain label to list of values, in display order.
        metric (str): Name shown in the header, e.g. ``Words``.
        digits (int, optional): Display precision, 0 for counts and 2 for
            scores. (default: {0})
        columns (tuple, optional): DescriptiveStats fields to show.
        sources (dict, optional): Domain label to source references of its values.

    Raises:
        EmptyGroup: if a domain has no values.
    """
    sources = sources or {}
    rows = []
    pooled = []
    pooled_sources = []
    for label, values in groups.items():
        values = list(values)
        if not values:
            raise EmptyGroup('Domain {} has no {} values'.format(label, metric))
        pooled.extend(values)
        pooled_sources.extend(sources.get(label, ()))
        rows.append(MetricRow(label, describe(values), tuple(sources.get(label, ()))))
    if not rows:
        raise EmptyGroup('No domain groups given for {}'.format(metric))
    overall = MetricRow(OVERALL, describe(pooled), tuple(pooled_sources))
    return MetricTable(metric, tuple(rows), overall, digits, tuple(columns))


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


@dataclass(frozen=True)
class DorMatrix:
    """Mean recomputed DoR per (setting, domain) with row and column means.

    Cells without assessments hold None and are listed in empty_cells.
    """
    settings: tuple
    domains: tuple
    cells: dict
    counts: dict
    row_means: dict
    column_means: dict
    empty_cells: tuple
    sources: dict

    def cell(self, setting, domain):
        return self.cells[(setting, domain)]

    def to_frame(self, digits=2):
        rows = []
        for domain in self.domains:
            rows.append([domain] + [format_value(self.cells[(s, domain)], digits) for s in self.settings]
                        + [format_value(self.row_means[domain], digits)])
        rows.append(['Mean DoR per Model'] + [format_value(self.column_means[s], digits) for s in self.settings]
                    + [''])
        return pd.DataFrame(rows, columns=['Domain'] + list(self.settings) + ['Mean DoR per Domain'])

    def to_text(self, digits=2):
        return self.to_frame(digits).to_string(index=False)

    def to_dict(self, digits=2):
        return {
            'settings': list(self.settings),
            'domains': list(self.domains),
            'cells': [{'setting': s, 'domain': d, 'mean': self.cells[(s, d)], 'n': self.counts[(s, d)],
                       'display': format_value(self.cells[(s, d)], digits),
                       'sources': list(self.sources.get((s, d), ()))}
                      for d in self.domains for s in self.settings],
            'row_means': {d: self.row_means[d] for d in self.domains},
            'column_means': {s: self.column_means[s] for s in self.settings},
            'empty_cells': [list(c) for c in self.empty_cells],
        }


def _score(item):
    return item.recomputed_score if hasattr(item, 'recomputed_score') else float(item)


def dor_mean_matrix(grouped, settings=None, domains=None, sources=None):
    """Averages DoR scores per setting and domain.

    Args:
        grouped (dict): (setting_id, domain) to a list of DorAssessment or scores.
        settings (list, optional): Column order, first appearance by default.
        domains (list, optional): Row order, first appearance by default.
        sources (dict, optional): (setting_id, domain) to source references.

    Returns:
        DorMatrix: row means over settings, column means over domains, both
        taken over non-empty cells.
    """
    settings = list(settings) if settings else list(dict.fromkeys(s for s, _ in grouped))
    domains = list(domains) if domains else list(dict.fromkeys(d for _, d in grouped))
    if not settings or not domains:
        raise PreconditionError('A DoR matrix needs at least one setting and one domain')

    cells, counts, empty = {}, {}, []
    for domain in domains:
        for setting in settings:
            scores = [_score(item) for item in grouped.get((setting, domain), ())]
            counts[(setting, domain)] = len(scores)
            cells[(setting, domain)] = sum(scores) / len(scores) if scores else None
            if not scores:
                empty.append((setting, domain))
    if empty:
        MyLogger.print_and_log('{} empty DoR cells: {}'.format(len(empty), empty), tables_loc, level=1)

    row_means = {d: _mean(cells[(s, d)] for s in settings) for d in domains}
    column_means = {s: _mean(cells[(s, d)] for d in domains) for s in settings}
    return DorMatrix(tuple(settings), tuple(domains), cells, counts, row_means, column_means, tuple(empty),
                     dict(sources or {}))
