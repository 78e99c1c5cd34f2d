from dataclasses import dataclass, field

from specforge.stats.descriptive import describe, iteration_outliers
from specforge.stats.tables import DOR_COLUMNS, SIMILARITY_COLUMNS, SIZE_COLUMNS, aggregate_metric_table

WORDS = 'words'
SIMILARITY = 'similarity'
DOR = 'dor'


@dataclass
class IterationData:
    """Raw values of one iteration grouped by domain, each with its source reference."""
    iteration: int
    values: dict = field(default_factory=lambda: {WORDS: {}, SIMILARITY: {}, DOR: {}})
    sources: dict = field(default_factory=lambda: {WORDS: {}, SIMILARITY: {}, DOR: {}})
    scores: dict = field(default_factory=dict)
    discrepancies: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)

    def add(self, metric, domain, value, source):
        self.values[metric].setdefault(domain, []).append(value)
        self.sources[metric].setdefault(domain, []).append(source)

    def pooled(self, metric):
        return [v for values in self.values[metric].values() for v in values]


def collect_iteration(store, record):
    """Reads word counts, recomputed DoR scores and similarity scores back from the stored files."""
    data = IterationData(record.iteration)
    for bundle in record.domains:
        for entry in bundle.documents:
            stored = store.read_json(entry.assessment)
            data.add(WORDS, bundle.domain, stored['word_count'], entry.assessment + '#word_count')
            score = stored['dor']['recomputed_score']
            data.add(DOR, bundle.domain, score, entry.assessment + '#dor.recomputed_score')
            data.scores[entry.doc_id] = score
            if stored['dor']['discrepancy']:
                data.discrepancies.append(entry.doc_id)
            if not stored['completeness']['agreement']:
                data.disagreements.append(entry.doc_id)
        if bundle.similarity:
            pairs = store.read_json(bundle.similarity)['pairs']
            for i, pair in enumerate(pairs):
                data.add(SIMILARITY, bundle.domain, pair['score'], '{}#pairs.{}.score'.format(bundle.similarity, i))
    return data


def iteration_tables(data):
    """Size, similarity and DoR tables of one iteration, leaving out metrics without values."""
    layout = ((WORDS, 'Words', 0, SIZE_COLUMNS), (SIMILARITY, 'Similarity', 2, SIMILARITY_COLUMNS),
              (DOR, 'DoR', 2, DOR_COLUMNS))
    tables = {}
    for metric, title, digits, columns in layout:
        groups = {d: v for d, v in data.values[metric].items() if v}
        if groups:
            tables[metric] = aggregate_metric_table(groups, title, digits, columns, data.sources[metric])
    return tables


def iteration_snapshot(store, record, policy):
    """Structured statistics snapshot written to ``iteration-<N>/stats.json``."""
    data = collect_iteration(store, record)
    return {
        'iteration': int(record.iteration),
        'tables': {name: table.to_dict() for name, table in iteration_tables(data).items()},
        'outlier_policy': policy,
        'outliers': iteration_outliers(data.scores, policy),
        'discrepancies': list(data.discrepancies),
        'disagreements': list(data.disagreements),
    }


def trend(store):
    """Pooled metric means per completed iteration, oldest first."""
    rows = []
    for iteration in store.completed_iterations():
        record = store.read_iteration(iteration)
        data = collect_iteration(store, record)
        row = {'iteration': iteration, 'decision': record.decision, 'documents': len(data.scores)}
        for metric in (WORDS, DOR, SIMILARITY):
            pooled = data.pooled(metric)
            row[metric] = describe(pooled).mean if pooled else None
        rows.append(row)
    return rows
