import io
import json
from unittest import mock

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from calculus.tests.corpus import corpus_path


class WarplangCommandTests(SimpleTestCase):

    def run_command(self, *args):
        out = io.StringIO()
        call_command('warplang', *args, stdout=out)
        return out.getvalue().splitlines()

    def assertFails(self, returncode, *args):
        with self.assertRaises(CommandError) as raised:
            self.run_command(*args)
        self.assertEqual(raised.exception.returncode, returncode)
        return str(raised.exception)

    def test_check_prints_declared_types(self):
        lines = self.run_command('check', str(corpus_path('streams')))
        self.assertEqual(len(lines), 3)
        self.assertIn('nat : W (1 0) (Stream Int)', lines)
        self.assertIn('pos : W (0 1) (Stream Int)', lines)

    def test_check_single_definition(self):
        lines = self.run_command('check', str(corpus_path('thuemorse')), '--def', 'tm')
        self.assertEqual(lines, ['tm : Stream Bool'])

    def test_elab_prints_explicit_terms(self):
        lines = self.run_command('elab', str(corpus_path('zeroes')))
        self.assertEqual(lines, ['zeroes = rec (zeroes : Stream Int) -> 0 :: zeroes'])

    def test_eval_at_a_finite_step(self):
        lines = self.run_command('eval', str(corpus_path('zeroes')), '--steps', '3')
        self.assertEqual(lines, ['zeroes = 0 :: 0 :: 0 :: •'])

    def test_eval_uses_the_default_fuel(self):
        lines = self.run_command('eval', str(corpus_path('zeroes')))
        self.assertEqual(lines, ['zeroes = ' + ' :: '.join(['0'] * settings.WARPLANG['DEFAULT_STEPS'] + ['•'])])

    def test_eval_at_omega(self):
        lines = self.run_command('eval', str(corpus_path('zeroes')), '--steps', 'omega')
        self.assertEqual(lines, ['zeroes = <thunk>'])

    def test_eval_as_json(self):
        out = io.StringIO()
        call_command('warplang', 'eval', str(corpus_path('zeroes')), '--steps', '1', '--json', stdout=out)
        self.assertEqual(json.loads(out.getvalue()), {
            'zeroes': {'kind': 'cons', 'head': {'kind': 'scalar', 'value': 0}, 'tail': {'kind': 'stop'}},
        })

    def test_eval_single_definition(self):
        lines = self.run_command('eval', str(corpus_path('silent')), '--steps', '2', '--def', 'nothing')
        self.assertEqual(lines, ['nothing = ⌈(0)⌉(•)'])

    def test_warp_expressions(self):
        self.assertEqual(self.run_command('warp', '(1 0) * (0 1)'), ['(0 0 1 0)'])
        self.assertEqual(self.run_command('warp', '(4 0) \\ (1 3)'), ['(4 0 0 0)'])
        self.assertEqual(self.run_command('warp', '(1 0) @ 3'), ['2'])
        self.assertEqual(self.run_command('warp', '{0}(1) <= (1)'), ['true'])

    def test_malformed_warp(self):
        message = self.assertFails(2, 'warp', '(1 0')
        self.assertIn('end of input', message)

    def test_rejected_program(self):
        message = self.assertFails(1, 'check', str(corpus_path('nonproductive')))
        self.assertIn('nonproductive.wlp:3:', message)
        self.assertIn('[Rec]', message)

    def test_syntax_error_on_stdin(self):
        with mock.patch('sys.stdin', io.StringIO('def x : = 1')):
            message = self.assertFails(2, 'check', '-')
        self.assertTrue(message.startswith('<stdin>:1:'))

    def test_missing_file(self):
        self.assertFails(2, 'check', 'no/such/file.wlp')

    def test_invalid_step_counts(self):
        self.assertFails(2, 'eval', str(corpus_path('zeroes')), '--steps', 'many')
        self.assertFails(2, 'eval', str(corpus_path('zeroes')), '--steps', '100000')
        self.assertFails(2, 'eval', str(corpus_path('zeroes')), '--steps', '-1')

    def test_unknown_definition(self):
        message = self.assertFails(1, 'check', str(corpus_path('zeroes')), '--def', 'ones')
        self.assertIn("'ones'", message)
