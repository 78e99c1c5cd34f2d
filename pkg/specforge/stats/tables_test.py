import os
import unittest

from specforge.stats.descriptive import format_value
from specforge.stats.tables import OVERALL, SIMILARITY_COLUMNS, aggregate_metric_table, dor_mean_matrix
from specforge.utilities.errors import EmptyGroup
from specforge.utilities.io.files import read_json


class TestMetricTable(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.data = read_json(os.path.join(os.path.dirname(__file__), 'test_data', 'published_tables.json'))

    def test_word_table(self):
        table = aggregate_metric_table(self.data['document_words'], 'Words')
        self.assertEqual(10, len(table.rows))
        for row in table.rows:
            values = self.data['document_words'][row.label]
            shown = row.stats.display(0)
            self.assertEqual(self.data['word_means'][row.label], shown['mean'])
            self.assertEqual(min(values), row.stats.min)
            self.assertEqual(max(values), row.stats.max)
            self.assertEqual(sorted(values)[1], row.stats.median)
            self.assertEqual(sum(values), row.stats.total)
        overall = table.overall_row.stats.display(0)
        self.assertEqual(OVERALL, table.overall_row.label)
        self.assertEqual('716', overall['mean'])
        self.assertEqual('719', overall['median'])
        self.assertEqual('644', overall['min'])
        self.assertEqual('811', overall['max'])
        self.assertEqual('21478', overall['total'])

    def test_frame_and_text(self):
        table = aggregate_metric_table(self.data['document_words'], 'Words')
        frame = table.to_frame()
        self.assertEqual(['Words', 'Mean', 'Median', 'Min', 'Max', 'Total'], list(frame.columns))
        self.assertEqual(11, len(frame))
        self.assertEqual(OVERALL, frame.iloc[-1]['Words'])
        self.assertIn('21478', table.to_text())
        self.assertEqual(table.to_text(), aggregate_metric_table(self.data['document_words'], 'Words').to_text())

    def test_similarity_columns(self):
        groups = {'fin': [0.81, 0.84, 0.79], 'gov': [0.77, 0.80, 0.83]}
        table = aggregate_metric_table(groups, 'Similarity', digits=2, columns=SIMILARITY_COLUMNS,
                                       sources={'fin': ['iteration-1/fin/similarity.json']})
        self.assertEqual(['Similarity', 'Mean', 'Median', 'Std. Dev.', 'Min', 'Max'], list(table.to_frame().columns))
        self.assertEqual('0.81', table.to_dict()['rows'][0]['display']['mean'])
        self.assertEqual(('iteration-1/fin/similarity.json',), table.overall_row.sources)

    def test_empty_group(self):
        with self.assertRaises(EmptyGroup):
            aggregate_metric_table({'fin': [700], 'gov': []}, 'Words')
        with self.assertRaises(EmptyGroup):
            aggregate_metric_table({}, 'Words')


class TestDorMatrix(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.data = read_json(os.path.join(os.path.dirname(__file__), 'test_data', 'published_tables.json'))
        cls.settings = cls.data['dor_settings']
        cls.grouped = {}
        for domain, scores in cls.data['dor_cells'].items():
            for setting, score in zip(cls.settings, scores):
                cls.grouped[(setting, domain)] = [score]

    def test_published_matrix(self):
        matrix = dor_mean_matrix(self.grouped, self.settings, list(self.data['dor_cells']))
        for domain, expected in self.data['dor_row_means'].items():
            self.assertEqual(expected, format_value(matrix.row_means[domain], 2))
        for setting, expected in zip(self.settings, self.data['dor_column_means']):
            # One column mean sits exactly on a rounding tie, so compare within display precision.
            self.assertLessEqual(abs(matrix.column_means[setting] - expected), 0.005 + 1e-9)
        self.assertAlmostEqual(0.735, matrix.column_means['gpt-5.2-thinking'], places=12)
        self.assertEqual((), matrix.empty_cells)

    def test_cell_means_of_assessments(self):
        grouped = {('judge', 'fin'): [0.8, 0.9, 0.7], ('judge', 'gov'): [0.6]}
        matrix = dor_mean_matrix(grouped)
        self.assertAlmostEqual(0.8, matrix.cell('judge', 'fin'))
        self.assertEqual(3, matrix.counts[('judge', 'fin')])
        self.assertAlmostEqual(0.7, matrix.column_means['judge'])

    def test_empty_cells(self):
        grouped = {('a', 'fin'): [0.8], ('b', 'gov'): [0.6]}
        matrix = dor_mean_matrix(grouped, ['a', 'b'], ['fin', 'gov'])
        self.assertIsNone(matrix.cell('b', 'fin'))
        self.assertEqual((('b', 'fin'), ('a', 'gov')), matrix.empty_cells)
        self.assertAlmostEqual(0.8, matrix.row_means['fin'])
        self.assertAlmostEqual(0.6, matrix.column_means['b'])
        frame = matrix.to_frame()
        self.assertEqual('', frame.iloc[0]['b'])
        self.assertEqual('Mean DoR per Model', frame.iloc[-1]['Domain'])

    def test_deterministic_text(self):
        first = dor_mean_matrix(self.grouped, self.settings).to_text()
        second = dor_mean_matrix(dict(reversed(list(self.grouped.items()))), self.settings,
                                 list(self.data['dor_cells'])).to_text()
        self.assertEqual(first, second)


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
