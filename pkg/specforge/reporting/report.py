import os
from dataclasses import dataclass

import pandas as pd

import specforge.global_config as gc
from specforge.pipeline import analysis
from specforge.stats.descriptive import format_value
from specforge.stats.tables import RELIABILITY_COLUMNS, aggregate_metric_table, dor_mean_matrix
from specforge.utilities.errors import DataIntegrityError, PreconditionError
from specforge.utilities.io.logger import MyLogger

report_loc = 'report'

TABLE_TITLES = {
    analysis.WORDS: 'Document size (words)',
    analysis.SIMILARITY: 'Semantic similarity per domain',
    analysis.DOR: 'Degree of realism (recomputed scores)',
}


@dataclass(frozen=True)
class ReportSection:
    name: str
    title: str
    text: str
    data: dict


@dataclass(frozen=True)
class Report:
    """Rendered tables of one iteration, or of the cross-iteration trend when iteration is None."""
    run_id: str
    iteration: object
    sections: tuple

    @property
    def name(self):
        return 'trend' if self.iteration is None else 'iteration-{}'.format(self.iteration)

    def section(self, name):
        for section in self.sections:
            if section.name == name:
                return section
        raise KeyError(name)

    def to_text(self):
        heading = 'Run {}, {}'.format(self.run_id, self.name.replace('-', ' '))
        parts = [heading, '=' * len(heading), '']
        for section in self.sections:
            parts += [section.title, '-' * len(section.title), section.text.rstrip(), '']
        return '\n'.join(parts)

    def to_dict(self):
        return {
            'run_id': self.run_id,
            'iteration': self.iteration,
            'sections': {s.name: dict(s.data, title=s.title) for s in self.sections},
        }


def _table_section(name, table):
    return ReportSection(name, TABLE_TITLES.get(name, name), table.to_text(), table.to_dict())


def _matrix_section(store, iteration):
    """DoR matrix rebuilt from the stored assessments the validation file points to."""
    relpath = 'validation/iteration-{}.json'.format(iteration)
    if not store.has(relpath):
        return None
    stored = store.read_json(relpath)
    grouped, sources = {}, {}
    for cell in stored['cells']:
        key = (cell['setting'], cell['domain'])
        sources[key] = list(cell['sources'])
        grouped[key] = [store.resolve(ref) for ref in cell['sources']]
    matrix = dor_mean_matrix(grouped, stored['settings'], stored['domains'], sources)
    data = matrix.to_dict()
    data['failures'] = stored.get('failures', {})
    return ReportSection('dor_matrix', 'Mean DoR per domain and model setting', matrix.to_text(), data)


def _reliability_section(store, iteration):
    prefix = 'iteration-{}/'.format(iteration)
    directory = store.reliability_dir
    if not os.path.isdir(directory):
        return None
    groups, sources, outliers = {}, {}, {}
    for name in sorted(os.listdir(directory)):
        if not name.endswith('.json'):
            continue
        relpath = 'reliability/{}'.format(name)
        study = store.read_json(relpath)
        if not study['document_id'].startswith(prefix):
            continue
        label = '{} ({})'.format(study['document_id'], study['setting_id'])
        groups[label] = study['scores']
        sources[label] = ['{}#scores.{}'.format(relpath, i) for i in range(len(study['scores']))]
        outliers[label] = study['outliers']
    if not groups:
        return None
    table = aggregate_metric_table(groups, 'Study', 2, RELIABILITY_COLUMNS, sources)
    lines = [table.to_text(), '']
    for label, flagged in outliers.items():
        for policy in gc.outlier_policies:
            lines.append('{} outliers ({}): {}'.format(label, policy,
                                                       ', '.join(format_value(v, 2) for v in flagged.get(policy, []))
                                                       or 'none'))
    data = table.to_dict()
    data['outliers'] = outliers
    return ReportSection('reliability', 'Assessment reliability', '\n'.join(lines), data)


def _summary_section(record, data):
    lines = [
        'Documents: {}'.format(len(data.scores)),
        'Score discrepancies (reported vs recomputed): {}'.format(', '.join(data.discrepancies) or 'none'),
        'Completeness disagreements (judge vs structure): {}'.format(', '.join(data.disagreements) or 'none'),
        'Outliers: {}'.format(', '.join(record.outliers) or 'none'),
    ]
    summary = {
        'documents': len(data.scores),
        'discrepancies': list(data.discrepancies),
        'disagreements': list(data.disagreements),
        'outliers': list(record.outliers),
    }
    return ReportSection('assessment_summary', 'Assessment cross-checks', '\n'.join(lines), summary)


def _decision_section(record):
    lines = ['Decision: {}'.format(record.decision)]
    if record.decision_rationale:
        lines.append('Rationale: {}'.format(record.decision_rationale))
    for doc_id, rating in sorted(record.subjective_ratings.items()):
        lines.append('Rating {}: {}'.format(doc_id, rating))
    data = {'decision': record.decision, 'rationale': record.decision_rationale,
            'subjective_ratings': dict(record.subjective_ratings), 'prompt_versions': dict(record.prompt_versions)}
    return ReportSection('decision', 'Decision log', '\n'.join(lines), data)


def build_iteration_report(store, iteration):
    """Report of one iteration from its stored files."""
    record = store.read_iteration(iteration)
    data = analysis.collect_iteration(store, record)
    sections = [_table_section(name, table) for name, table in analysis.iteration_tables(data).items()]
    for section in (_matrix_section(store, iteration), _reliability_section(store, iteration)):
        if section is not None:
            sections.append(section)
    sections += [_summary_section(record, data), _decision_section(record)]
    return Report(store.run_id, int(iteration), tuple(sections))


def build_trend_report(store):
    """Pooled means of words, DoR and similarity per completed iteration."""
    rows = analysis.trend(store)
    frame = pd.DataFrame([[row['iteration'], row['documents'], format_value(row[analysis.WORDS], 0),
                           format_value(row[analysis.DOR], 2), format_value(row[analysis.SIMILARITY], 2),
                           row['decision']] for row in rows],
                         columns=['Iteration', 'Documents', 'Mean words', 'Mean DoR', 'Mean similarity',
                                  'Decision'])
    for row in rows:
        row['sources'] = [store.stats_path(row['iteration'])]
    section = ReportSection('trend', 'Metric means per iteration', frame.to_string(index=False), {'rows': rows})
    return Report(store.run_id, None, (section,))


def render_report(store, report_format=None, iterations=None):
    """Writes one report per completed iteration plus the trend report to ``reports/``.

    Args:
        store (RunStore): Run to report on.
        report_format (str, optional): plain_table_text or structured, both when None.
        iterations (list, optional): Iterations to report, all completed ones by default.

    Returns:
        list of str: written paths relative to the run directory.

    Raises:
        NoCompletedIteration: if the run has no completed iteration.
    """
    completed = store.completed_iterations()
    if report_format is not None and report_format not in gc.report_formats:
        raise PreconditionError('Unknown report format {!r}'.format(report_format))
    formats = [report_format] if report_format else list(gc.report_formats)
    selected = [int(n) for n in iterations] if iterations else completed
    for n in selected:
        if n not in completed:
            raise PreconditionError('Iteration {} of run {} is not complete'.format(n, store.run_id))

    written = []
    for report in [build_iteration_report(store, n) for n in selected] + [build_trend_report(store)]:
        if gc.plain_table_text in formats:
            written.append(store.write_text('reports/{}.txt'.format(report.name), report.to_text()))
        if gc.structured in formats:
            written.append(store.write_json('reports/{}.json'.format(report.name), report.to_dict()))
    MyLogger.print_and_log('Wrote {} report files for run {}'.format(len(written), store.run_id), report_loc)
    return written


def _references(data):
    if isinstance(data, dict):
        for key, value in data.items():
            if key == 'sources' and isinstance(value, list):
                for ref in value:
                    yield ref
            else:
                for ref in _references(value):
                    yield ref
    elif isinstance(data, list):
        for item in data:
            for ref in _references(item):
                yield ref


def verify_sources(report, store):
    """Resolves every source reference of a report against the stored run.

    Returns:
        int: number of references checked.

    Raises:
        DataIntegrityError: for a reference that points nowhere.
    """
    data = report.to_dict() if isinstance(report, Report) else report
    count = 0
    for ref in _references(data):
        if store.resolve(ref) is None:
            raise DataIntegrityError('Source {} resolves to nothing'.format(ref))
        count += 1
    return count
