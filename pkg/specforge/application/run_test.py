import os
import shutil
import tempfile
import unittest

from specforge.application.run import main
from specforge.specification.domains import load_registry
from specforge.testing import protocol_script
from specforge.utilities.io.files import read_json, write_json
from specforge.utilities.io.logger import MyLogger


class TestCommandLine(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        MyLogger.quiet = True
        cls.root = tempfile.mkdtemp()
        registry = load_registry()
        cls.scripts = os.path.join(cls.root, 'scripts')
        write_json(os.path.join(cls.scripts, 'protocol.json'),
                   protocol_script([registry.get('fin'), registry.get('edu')]))

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.root, ignore_errors=True)

    def run_cli(self, *argv, run='cli'):
        return main(list(argv) + ['--runs-dir', os.path.join(self.root, 'runs'), '--run', run])

    def test_full_protocol(self):
        mock = ['--mock', self.scripts]
        self.assertEqual(0, self.run_cli('generate', '--domains', 'fin,edu', *mock))
        run_dir = os.path.join(self.root, 'runs', 'cli')
        self.assertTrue(os.path.isfile(os.path.join(run_dir, 'iteration-1', 'fin', 'ssyrs-3.md')))
        self.assertTrue(os.path.isfile(os.path.join(run_dir, 'specforge.log')))
        self.assertEqual(0, self.run_cli('stats', '--policy', 'tukey', *mock))
        self.assertEqual('tukey', read_json(os.path.join(run_dir, 'stats.json'))['iterations']['1']['outlier_policy'])
        self.assertEqual(0, self.run_cli('decide', '--iteration', '1', '--decision', 'terminate',
                                         '--rationale', 'good enough', '--ratings', 'iteration-1/fin/ssyrs-1=4',
                                         *mock))
        self.assertEqual('terminate', read_json(os.path.join(run_dir, 'iteration-1', 'iteration.json'))['decision'])
        self.assertEqual(0, self.run_cli('report', *mock))
        self.assertTrue(os.path.isfile(os.path.join(run_dir, 'reports', 'iteration-1.txt')))
        out = os.path.join(self.root, 'export')
        self.assertEqual(0, self.run_cli('export', '--out', out, *mock))
        self.assertTrue(os.path.isfile(os.path.join(out, 'CONTENTS.json')))

        # a sealed iteration cannot be decided again
        self.assertEqual(4, self.run_cli('decide', '--iteration', '1', '--decision', 'continue',
                                         '--rationale', 'again', *mock))

    def test_propose_and_approve(self):
        script = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'gateway', 'test_data',
                              'domain_proposal.yaml')
        self.assertEqual(0, self.run_cli('propose-domains', '--count', '3', '--mock', script, run='domains'))
        run_dir = os.path.join(self.root, 'runs', 'domains')
        proposal = read_json(os.path.join(run_dir, 'domain_proposal.json'))
        self.assertEqual(['Agriculture', 'Energy and Utilities', 'Insurance'], proposal['names'])
        self.assertEqual(0, self.run_cli('approve-domains', 'Agriculture=agri', '--mock', script, run='domains'))
        self.assertTrue(os.path.isfile(os.path.join(run_dir, 'domains.yaml')))
        self.assertEqual(1, self.run_cli('approve-domains', 'Agronomy=agri', '--mock', script, run='domains'))

    def test_usage_errors(self):
        self.assertEqual(1, main(['bogus']))
        self.assertEqual(1, main([]))
        self.assertEqual(1, self.run_cli('reliability', '--runs', '3', run='usage'))
        self.assertEqual(1, self.run_cli('generate', '--mock', os.path.join(self.root, 'missing'), run='usage'))

    def test_malformed_config(self):
        bad = os.path.join(self.root, 'bad.yaml')
        with open(bad, 'w') as f:
            f.write('run_id: [unclosed\n')
        self.assertEqual(1, self.run_cli('generate', '--config', bad, '--mock', self.scripts, run='badyaml'))
        listing = os.path.join(self.root, 'list.yaml')
        with open(listing, 'w') as f:
            f.write('- fin\n- edu\n')
        self.assertEqual(1, self.run_cli('generate', '--config', listing, '--mock', self.scripts, run='badyaml'))

    def test_unusable_runs_dir(self):
        blocker = os.path.join(self.root, 'runs-blocker')
        with open(blocker, 'w') as f:
            f.write('a regular file')
        self.assertEqual(4, main(['generate', '--domains', 'fin', '--mock', self.scripts,
                                  '--runs-dir', os.path.join(blocker, 'runs'), '--run', 'blocked']))

    def test_provider_failure(self):
        empty = os.path.join(self.root, 'empty-scripts')
        write_json(os.path.join(empty, 'nothing.json'), {'contexts': {}})
        self.assertEqual(2, self.run_cli('generate', '--domains', 'fin', '--mock', empty, run='failing'))
        self.assertEqual(4, self.run_cli('report', '--mock', empty, run='failing'))


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
