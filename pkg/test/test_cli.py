import io
import os
import tempfile
import unittest

import definitions
import grammar_learner.cli as cli
from grammar_learner.grammar import read_grammar_file
from grammar_learner.mdp import MdpTable


class TestCli(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def tagged(self, text):
        filename = self.path('sentences.tag')
        with open(filename, 'w', encoding='utf-8') as file:
            file.write(text)
        return filename

    def run_cli(self, *argv):
        """
        :return: (exit status, output)
        """
        out = io.StringIO()
        status = cli.main(list(argv), out=out)
        return status, out.getvalue()

    def test_parse(self):
        status, output = self.run_cli('parse', self.tagged('mary_NP1 barks_VVZ\n'))
        self.assertEqual(status, cli.EXIT_OK)
        lines = output.splitlines()
        self.assertEqual(lines[0], '#1 (S (NP mary) (VP (V barks)))')
        self.assertTrue(lines[1].startswith('# 1 edges='))
        self.assertIn('parses=1', lines[1])

    def test_no_parse(self):
        status, output = self.run_cli('parse', self.tagged('#ok mary_NP1 barks_VVZ\n#bad dog_NN1 dog_NN1\n'))
        self.assertEqual(status, cli.EXIT_NO_PARSE)
        self.assertIn('NO PARSE bad\n', output)
        self.assertIn('#ok (S (NP mary) (VP (V barks)))\n', output)

    def test_complete(self):
        filename = self.tagged('mary_NP1 barks_VVZ loudly_RR\n')
        self.assertEqual(self.run_cli('parse', filename)[0], cli.EXIT_NO_PARSE)
        status, output = self.run_cli('parse', filename, '--complete', '--max-parses', '2')
        self.assertEqual(status, cli.EXIT_OK)
        self.assertTrue(output.startswith('#1 (S '))

    def test_errors(self):
        """
        Usage errors and unreadable input exit with status 2.
        :return:
        """
        self.assertEqual(self.run_cli('frobnicate')[0], cli.EXIT_ERROR)
        self.assertEqual(self.run_cli('parse')[0], cli.EXIT_ERROR)
        self.assertEqual(self.run_cli('parse', self.path('missing.tag'))[0], cli.EXIT_ERROR)
        self.assertEqual(self.run_cli('parse', self.tagged('mary_NP1 barks_XYZ\n'))[0], cli.EXIT_ERROR)
        self.assertEqual(self.run_cli('parse', self.tagged('mary_NP1 barks\n'))[0], cli.EXIT_ERROR)
        self.assertEqual(self.run_cli('parse', self.tagged('mary_NP1\n'), '--max-parses', '0')[0], cli.EXIT_ERROR)

    def test_pretrain(self):
        output_file = self.path('table.mdp')
        status, output = self.run_cli('pretrain', '--output', output_file)
        self.assertEqual(status, cli.EXIT_OK)
        self.assertIn('Trained on 18 trees', output)
        with open(output_file, 'r', encoding='utf-8') as file:
            table = MdpTable.load(file.read())
        self.assertGreater(table.total, 0)

    def test_learn(self):
        table_file = self.path('table.mdp')
        self.assertEqual(self.run_cli('pretrain', '--output', table_file)[0], cli.EXIT_OK)

        grammar_file = self.path('G3.gram')
        outcomes_file = self.path('outcomes.csv')
        status, output = self.run_cli('learn', '--table', table_file, '--output', grammar_file, '--outcomes',
                                      outcomes_file)
        self.assertEqual(status, cli.EXIT_OK)
        self.assertIn('Grammar G3', output)
        seed = read_grammar_file(os.path.join(definitions.DATA_DIR, 'seed.gram'))
        self.assertGreater(len(read_grammar_file(grammar_file)), len(seed))
        self.assertTrue(os.path.isfile(outcomes_file))

    def test_eval(self):
        status, output = self.run_cli('eval')
        self.assertEqual(status, cli.EXIT_OK)
        self.assertTrue(output.startswith('coverage='))
        self.assertIn('plausibility=', output)

    def test_start(self):
        """
        Every corpus sentence has a verb, so none parses as a noun phrase.
        :return:
        """
        status, output = self.run_cli('eval', '--all', '--start', 'NP')
        self.assertEqual(status, cli.EXIT_OK)
        self.assertEqual(output.splitlines(), ['coverage=0.0', 'plausibility=absent'])
        self.assertNotEqual(self.run_cli('eval', '--all')[1].splitlines()[0], 'coverage=0.0')

    def test_unknown_configuration(self):
        with self.assertLogs('grammar_learner.cli', level='ERROR') as logs:
            self.assertEqual(self.run_cli('experiment', '--configs', 'A,E')[0], cli.EXIT_ERROR)
        self.assertIn('Unknown configuration E. Must be one of A, B, C, D', logs.output[0])


if __name__ == '__main__':
    unittest.main()
