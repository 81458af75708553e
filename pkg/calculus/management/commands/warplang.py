"""
Management command driving the warped stream calculus.

Usage:
    python manage.py warplang check calculus/corpus/streams.wlp
    python manage.py warplang elab calculus/corpus/zeroes.wlp
    python manage.py warplang eval calculus/corpus/zeroes.wlp --steps 3
    python manage.py warplang eval calculus/corpus/nat.wlp --steps omega --def nat --json
    python manage.py warplang warp "(1 0) * (0 1)"
"""
import json
import logging
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from core.expressions import evaluate_expression, format_result
from core.warps import OMEGA, WarpError
from calculus.constants import EXIT_CODES, OMEGA_STEPS
from calculus.elaboration import elaborate_program
from calculus.evaluator import evaluate_program
from calculus.exceptions import EvaluationError, ParseError, TypingError
from calculus.parser import parse_program
from calculus.printer import print_term, print_type
from calculus.values import render_value, value_to_json

logger = logging.getLogger(__name__)


def parse_steps(text: str):
    """Fuel from the command line: a natural number up to MAX_STEPS, or omega."""
    if text.strip().lower() in OMEGA_STEPS:
        return OMEGA
    try:
        steps = int(text)
    except ValueError:
        raise CommandError(f"Invalid step count: {text!r}", returncode=EXIT_CODES['parse'])
    limit = settings.WARPLANG['MAX_STEPS']
    if steps < 0 or steps > limit:
        raise CommandError(f"Step count must be between 0 and {limit}, got {steps}",
                           returncode=EXIT_CODES['parse'])
    return steps


class Command(BaseCommand):
    help = 'Type-check, elaborate and evaluate warplang programs, or evaluate warp expressions'

    def add_arguments(self, parser):
        parser.add_argument(
            'action',
            choices=['check', 'elab', 'eval', 'warp'],
            help='check: print types; elab: print explicit terms; eval: print values; '
                 'warp: evaluate a warp expression'
        )
        parser.add_argument(
            'source',
            type=str,
            help='Path of a .wlp program ("-" reads stdin), or a warp expression for "warp"'
        )
        parser.add_argument(
            '--steps',
            type=str,
            default=None,
            help='Evaluation fuel: a natural number or "omega" (default: WARPLANG DEFAULT_STEPS)'
        )
        parser.add_argument(
            '--def',
            dest='definition',
            type=str,
            default=None,
            help='Only print this definition'
        )
        parser.add_argument(
            '--json',
            action='store_true',
            help='Print values as JSON trees'
        )

    def handle(self, *args, **options):
        action = options['action']
        source = options['source']

        if action == 'warp':
            self._warp(source)
            return

        filename = '<stdin>' if source == '-' else source
        text = self._read(source)
        try:
            program = parse_program(text)
            elaborated = elaborate_program(program)
        except ParseError as e:
            raise CommandError(e.format(filename), returncode=EXIT_CODES['parse'])
        except TypingError as e:
            raise CommandError(e.format(filename), returncode=EXIT_CODES['typing'])
        logger.info(f"Elaborated {len(elaborated)} definitions from {filename}")

        wanted = options['definition']
        if wanted is not None and wanted not in [name for name, _, _ in elaborated]:
            raise CommandError(f"No definition named '{wanted}' in {filename}")

        if action == 'check':
            for name, ty, _ in elaborated:
                if wanted in (None, name):
                    self.stdout.write(f"{name} : {print_type(ty)}")
        elif action == 'elab':
            for name, _, term in elaborated:
                if wanted in (None, name):
                    self.stdout.write(f"{name} = {print_term(term)}")
        else:
            self._eval(elaborated, filename, wanted, options)

    def _read(self, source: str) -> str:
        if source == '-':
            return sys.stdin.read()
        try:
            with open(source, encoding='utf-8') as handle:
                return handle.read()
        except OSError as e:
            raise CommandError(f"Cannot read {source}: {e.strerror}", returncode=EXIT_CODES['parse'])

    def _warp(self, expression: str):
        try:
            result = evaluate_expression(expression)
        except WarpError as e:
            location = f"{e.line}:{e.column}: " if e.line is not None else ''
            raise CommandError(f"{location}{e.message}", returncode=EXIT_CODES['parse'])
        self.stdout.write(format_result(result))

    def _eval(self, elaborated, filename, wanted, options):
        steps = options['steps']
        steps = settings.WARPLANG['DEFAULT_STEPS'] if steps is None else parse_steps(steps)

        # only the definitions up to the requested one are needed
        if wanted is not None:
            names = [name for name, _, _ in elaborated]
            elaborated = elaborated[:names.index(wanted) + 1]

        sys.setrecursionlimit(max(sys.getrecursionlimit(), settings.WARPLANG['RECURSION_LIMIT']))
        try:
            values = evaluate_program(elaborated, steps)
        except EvaluationError as e:
            raise CommandError(e.format(filename), returncode=EXIT_CODES['typing'])
        except RecursionError:
            raise CommandError(f"{filename}: evaluation exceeded the recursion limit",
                               returncode=EXIT_CODES['typing'])
        logger.info(f"Evaluated {len(values)} definitions from {filename} at step {steps}")

        selected = [(name, value) for name, value in values if wanted in (None, name)]
        if options['json']:
            payload = {name: value_to_json(value) for name, value in selected}
            self.stdout.write(json.dumps(payload, ensure_ascii=False, indent=2))
            return
        for name, value in selected:
            self.stdout.write(f"{name} = {render_value(value)}")
