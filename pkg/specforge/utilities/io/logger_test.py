import os
import shutil
import tempfile
import unittest

from specforge.utilities.io.logger import MyLogger, select_log_path


class TestMyLogger(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        """This method is run once before every test in this module."""
        cls.root = tempfile.mkdtemp()
        cls.previous = MyLogger.log_file, MyLogger.quiet

    @classmethod
    def tearDownClass(cls):
        MyLogger.log_file, MyLogger.quiet = cls.previous
        shutil.rmtree(cls.root, ignore_errors=True)

    def test_select_log_path(self):
        self.assertEqual(os.path.join(self.root, 'run.log'), select_log_path(self.root, 'run'))

    def test_unwritable_root_falls_back_to_cwd(self):
        blocker = os.path.join(self.root, 'blocker')
        with open(blocker, 'w') as f:
            f.write('a regular file')
        self.assertEqual(os.path.join(os.getcwd(), 'run.log'), select_log_path(blocker, 'run'))

    def test_failed_write_moves_log_to_cwd(self):
        blocker = os.path.join(self.root, 'blocked')
        with open(blocker, 'w') as f:
            f.write('a regular file')
        workdir = tempfile.mkdtemp(dir=self.root)
        cwd = os.getcwd()
        MyLogger.quiet = True
        MyLogger.log_file = os.path.join(blocker, 'moved.log')
        try:
            os.chdir(workdir)
            MyLogger.print_and_log('kept', 'logger_test')
        finally:
            os.chdir(cwd)
        self.assertEqual(os.path.realpath(os.path.join(workdir, 'moved.log')), os.path.realpath(MyLogger.log_file))
        with open(MyLogger.log_file) as f:
            self.assertTrue(f.read().rstrip('\n').endswith('kept'))

    def test_quiet_still_writes_log_file(self):
        MyLogger.quiet = True
        MyLogger.initialize_logFile(self.root, 'quiet')
        MyLogger.print_and_log('first line', 'logger_test')
        MyLogger.print_and_log('retrying', 'logger_test', level=1)
        with open(MyLogger.log_file) as f:
            lines = f.read().splitlines()
        self.assertEqual(2, len(lines))
        self.assertTrue(lines[0].startswith('INFO@logger_test'))
        self.assertTrue(lines[1].startswith('WARN@logger_test'))
        self.assertTrue(lines[1].endswith('retrying'))

    def test_initialize_clears_previous_log(self):
        MyLogger.quiet = True
        MyLogger.initialize_logFile(self.root, 'cleared')
        MyLogger.print_and_log('old', 'logger_test')
        MyLogger.initialize_logFile(self.root, 'cleared')
        self.assertFalse(os.path.exists(MyLogger.log_file))


if __name__ == '__main__':
    res = unittest.main(verbosity=3, exit=False)
