import sys
from functools import lru_cache

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from core.warps import ID, LATER, OMEGA, OMEGA_WARP, ZERO, Warp, warp_compose
from calculus.elaboration import elaborate_program
from calculus.evaluator import (
    coerce_value, evaluate, evaluate_program, iterate, purge, sample_value, truncate,
    value_has_type,
)
from calculus.exceptions import EvaluationError
from calculus.parser import parse_program
from calculus.syntax import (
    BOOL, INT, Arrow, By, Case, Concat, Cons, Decat, Delay, Fun, Head, Id, Inflate, OnStream, Prim,
    Rec, Scalar, Seq, Stream, Sum, Tail, Unwrap, Var, Warped, Wrap,
)
from calculus.tests.corpus import ACCEPTED, corpus_definitions, corpus_text
from calculus.values import (
    EMPTY_ENV, STOP, Closure, ConsV, Env, ScalarV, Thunk, WarpedV, render_value, stream_elements,
    value_to_json,
)

STEPS = range(9)


def w(text):
    return Warp.parse(text)


def stream_value(*elements):
    value = STOP
    for element in reversed(elements):
        value = ConsV(ScalarV(element), value)
    return value


def scalar(value):
    """Python value of a stream element, forcing a constant one if needed."""
    while isinstance(value, WarpedV):
        value = value.body
        if isinstance(value, Thunk):
            value = truncate(value, 1)
    return value.value


def elements(value):
    return [scalar(element) for element in stream_elements(value)]


@lru_cache(maxsize=None)
def program_values(name, steps):
    values = evaluate_program(list(corpus_definitions(name)), steps, check_values=False)
    return dict(values)


def zero_stream():
    return Rec('zs', Stream(INT), Cons(Scalar(0), Var('zs')))


def thue_morse(n):
    return [bin(k).count('1') % 2 == 1 for k in range(n)]


class EvaluatorTestCase(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        sys.setrecursionlimit(max(sys.getrecursionlimit(), settings.WARPLANG['RECURSION_LIMIT']))


class EvaluateTests(EvaluatorTestCase):

    def test_step_zero_and_omega(self):
        self.assertEqual(evaluate(Scalar(1), EMPTY_ENV, 0), STOP)
        self.assertEqual(evaluate(Scalar(1), EMPTY_ENV, OMEGA), Thunk(Scalar(1), EMPTY_ENV))
        self.assertEqual(evaluate(Scalar(1), EMPTY_ENV, 3), ScalarV(1))

    def test_by_moves_the_body_to_another_step(self):
        env = Env((('x', WarpedV(LATER, stream_value(1, 2))), ('y', ScalarV(0))))
        self.assertEqual(evaluate(By(Var('x'), LATER), env, 3), WarpedV(LATER, stream_value(1, 2)))
        with self.assertRaises(EvaluationError):
            evaluate(By(Var('y'), LATER), env, 3)

    def test_cons_takes_a_delayed_tail(self):
        env = Env((('xs', WarpedV(LATER, stream_value(2))),))
        self.assertEqual(evaluate(Cons(Scalar(1), Var('xs')), env, 2), stream_value(1, 2))
        with self.assertRaises(EvaluationError):
            evaluate(Cons(Scalar(1), Var('xs')), Env((('xs', stream_value(2)),)), 2)

    def test_ill_typed_terms_fail(self):
        with self.assertRaises(EvaluationError):
            evaluate(Head(Scalar(1)), EMPTY_ENV, 2)
        with self.assertRaises(EvaluationError):
            evaluate(Var('missing'), EMPTY_ENV, 2)

    def test_purge_keeps_exactly_warped_bindings(self):
        env = Env((
            ('x', WarpedV(LATER, ScalarV(1))),
            ('y', ScalarV(2)),
            ('z', WarpedV(ID, ScalarV(3))),
        ))
        self.assertEqual(purge(env, LATER), Env((('x', ScalarV(1)),)))
        self.assertEqual(purge(env, ID), Env((('z', ScalarV(3)),)))


class IterateTests(EvaluatorTestCase):
    body = Cons(Scalar(0), Var('zs'))

    def test_no_steps_left(self):
        for n in STEPS:
            value = stream_value(*[0] * n)
            with self.subTest(n=n):
                self.assertEqual(iterate('zs', self.body, EMPTY_ENV, value, n, n), value)

    def test_each_step_adds_an_element(self):
        for n in STEPS:
            with self.subTest(n=n):
                self.assertEqual(iterate('zs', self.body, EMPTY_ENV, STOP, 0, n), stream_value(*[0] * n))

    def test_resumes_from_an_earlier_prefix(self):
        self.assertEqual(iterate('zs', self.body, EMPTY_ENV, stream_value(0, 0), 2, 5),
                         stream_value(0, 0, 0, 0, 0))

    def test_prefixes_are_monotone(self):
        for n in STEPS:
            for m in range(n + 1):
                with self.subTest(n=n, m=m):
                    self.assertEqual(truncate(iterate('zs', self.body, EMPTY_ENV, STOP, 0, n), m),
                                     iterate('zs', self.body, EMPTY_ENV, STOP, 0, m))

    def test_bindings_keep_their_types_across_steps(self):
        closure = Fun('x', INT, Prim('add', (Var('x'), Var('y'))))
        env = Env.typed([('y', ScalarV(1), INT)])
        ty = Stream(Arrow(INT, INT))
        value = iterate('fs', Cons(closure, Var('fs')), env, STOP, 0, 3, annot=ty)
        self.assertTrue(value_has_type(value, ty, 3))
        self.assertFalse(value_has_type(value, Stream(Arrow(BOOL, INT)), 3))


class TruncateTests(EvaluatorTestCase):

    def test_streams(self):
        value = stream_value(1, 2, 3)
        self.assertEqual(truncate(value, 0), STOP)
        self.assertEqual(truncate(value, 1), stream_value(1))
        self.assertEqual(truncate(value, 3), value)
        self.assertEqual(truncate(value, OMEGA), value)

    def test_warped_values_truncate_their_body_at_the_warped_step(self):
        value = WarpedV(w('(2)'), stream_value(1, 2, 3, 4))
        self.assertEqual(truncate(value, 1), WarpedV(w('(2)'), stream_value(1, 2)))

    def test_thunks_are_forced(self):
        self.assertEqual(truncate(Thunk(Scalar(7), EMPTY_ENV), 2), ScalarV(7))

    def test_functorial(self):
        for name in ACCEPTED:
            for defined, value in program_values(name, 8).items():
                for k in STEPS:
                    for m in range(k + 1):
                        with self.subTest(program=name, definition=defined, k=k, m=m):
                            self.assertEqual(truncate(truncate(value, k), m), truncate(value, m))


class CoerceValueTests(EvaluatorTestCase):

    def test_identity(self):
        value = stream_value(1, 2)
        self.assertEqual(coerce_value(Id(), value, 2), value)

    def test_concat_merges_warp_tags(self):
        p, q = w('(0 1)'), w('(1 0)')
        value = WarpedV(p, WarpedV(q, stream_value(5)))
        self.assertEqual(coerce_value(Concat(p, q), value, 4), WarpedV(warp_compose(p, q), stream_value(5)))

    def test_inflate_suspends_a_scalar(self):
        self.assertEqual(coerce_value(Inflate(), ScalarV(5), 3),
                         WarpedV(OMEGA_WARP, Thunk(Scalar(5), EMPTY_ENV)))
        round_trip = Seq(Inflate(), Seq(Delay(OMEGA_WARP, ID), Unwrap()))
        self.assertEqual(coerce_value(round_trip, ScalarV(5), 3), ScalarV(5))

    def test_delay_truncates(self):
        value = WarpedV(ID, stream_value(1, 2, 3))
        self.assertEqual(coerce_value(Delay(ID, LATER), value, 3), WarpedV(LATER, stream_value(1, 2)))

    def test_stream_coercion_applies_to_every_element(self):
        expected = ConsV(WarpedV(ID, ScalarV(1)), ConsV(WarpedV(ID, ScalarV(2)), STOP))
        self.assertEqual(coerce_value(OnStream(Wrap()), stream_value(1, 2), 2), expected)

    def test_decat_at_a_silent_step(self):
        self.assertEqual(coerce_value(Decat(ZERO, ID), WarpedV(ZERO, STOP), 3), WarpedV(ZERO, STOP))

    def test_concat_over_a_suspended_value_warped_behind_the_identity(self):
        suspended = WarpedV(OMEGA_WARP, Thunk(Tail(zero_stream()), EMPTY_ENV))
        for n in range(1, 9):
            with self.subTest(n=n):
                value = coerce_value(Concat(OMEGA_WARP, LATER), suspended, n)
                self.assertEqual(value.warp, warp_compose(OMEGA_WARP, LATER))
                self.assertIsInstance(value.body, Thunk)
                for m in range(6):
                    self.assertEqual(elements(truncate(value.body, m)), [0] * m)

    def test_concat_over_a_suspended_slower_value(self):
        q = w('(1 0)')
        suspended = WarpedV(OMEGA_WARP, Thunk(By(zero_stream(), q), EMPTY_ENV))
        value = coerce_value(Concat(OMEGA_WARP, q), suspended, 3)
        self.assertEqual(value.warp, warp_compose(OMEGA_WARP, q))
        for m in range(6):
            with self.subTest(m=m):
                self.assertEqual(elements(truncate(value.body, m)), [0] * m)

    def test_mismatch(self):
        with self.assertRaises(EvaluationError):
            coerce_value(Unwrap(), ScalarV(1), 2)


class ValueTypingTests(EvaluatorTestCase):

    def test_examples(self):
        self.assertTrue(value_has_type(STOP, INT, 0))
        self.assertFalse(value_has_type(STOP, INT, 1))
        self.assertTrue(value_has_type(stream_value(0, 0), Stream(INT), 2))
        self.assertFalse(value_has_type(stream_value(0), Stream(INT), 2))
        self.assertFalse(value_has_type(stream_value(True), Stream(INT), 1))
        self.assertTrue(value_has_type(WarpedV(w('(1 0)'), stream_value(0)), Warped(w('(1 0)'), Stream(INT)), 2))
        self.assertFalse(value_has_type(WarpedV(LATER, stream_value(0)), Warped(w('(1 0)'), Stream(INT)), 2))

    def test_closures_are_checked_on_every_branch(self):
        ty = Arrow(Sum(INT, INT), INT)
        well_typed = Fun('s', Sum(INT, INT), Case(Var('s'), 'a', Var('a'), 'b', Var('b')))
        ill_typed = Fun('s', Sum(INT, INT), Case(Var('s'), 'a', Var('a'), 'b', Scalar(True)))
        for n in range(1, 5):
            with self.subTest(n=n):
                self.assertTrue(value_has_type(evaluate(well_typed, EMPTY_ENV, n), ty, n))
                self.assertFalse(value_has_type(evaluate(ill_typed, EMPTY_ENV, n), ty, n))

    def test_closures_are_checked_against_their_environment(self):
        body = Prim('add', (Var('x'), Var('y')))
        good = Closure('x', body, Env.typed([('y', ScalarV(1), INT)]), INT)
        self.assertTrue(value_has_type(good, Arrow(INT, INT), 2))
        self.assertFalse(value_has_type(good, Arrow(BOOL, INT), 2))
        wrong_value = Closure('x', body, Env.typed([('y', ScalarV(True), INT)]), INT)
        self.assertFalse(value_has_type(wrong_value, Arrow(INT, INT), 2))
        untyped = Closure('x', body, Env((('y', ScalarV(1)),)), INT)
        self.assertFalse(value_has_type(untyped, Arrow(INT, INT), 2))

    def test_sample_values_have_their_type(self):
        ty = Warped(LATER, Stream(BOOL))
        for n in STEPS:
            with self.subTest(n=n):
                self.assertTrue(value_has_type(sample_value(ty, n), ty, n))


class CorpusEvaluationTests(EvaluatorTestCase):

    def test_zeroes(self):
        for n in STEPS:
            self.assertEqual(elements(program_values('zeroes', n)['zeroes']), [0] * n)
        self.assertEqual(render_value(program_values('zeroes', 3)['zeroes']), '0 :: 0 :: 0 :: •')

    def test_naturals(self):
        for n in STEPS:
            with self.subTest(n=n):
                self.assertEqual(elements(program_values('nat', n)['nat']), list(range(n)))

    def test_mutually_recursive_naturals(self):
        for n in STEPS:
            with self.subTest(n=n):
                values = program_values('streams', n)
                self.assertEqual(elements(values['nat']), list(range((n + 1) // 2)))
                self.assertEqual(elements(values['pos']), list(range(1, n // 2 + 1)))

    def test_map(self):
        program = parse_program(corpus_text('map') + '''
            rec def ones : Stream Int = 1 :: ones
            def doubled : Stream Int = map (fun (x : Int) -> x + x) ones
        ''')
        definitions = elaborate_program(program)
        for n in STEPS:
            with self.subTest(n=n):
                values = dict(evaluate_program(definitions, n, check_values=True))
                self.assertEqual(elements(values['doubled']), [2] * n)

    def test_thue_morse(self):
        for name in ('thuemorse', 'thuemorse_weak'):
            for n in STEPS:
                with self.subTest(program=name, n=n):
                    self.assertEqual(elements(program_values(name, n)['tm']), thue_morse(n))

    def test_silent_stream(self):
        self.assertEqual(render_value(program_values('silent', 0)['nothing']), '•')
        for n in range(1, 9):
            with self.subTest(n=n):
                values = program_values('silent', n)
                self.assertEqual(values['nothing'], WarpedV(ZERO, STOP))
                self.assertEqual(values['nothing_refined'], values['nothing'])
        self.assertEqual(render_value(program_values('silent', 2)['nothing']), '⌈(0)⌉(•)')

    def test_constant_stream_at_several_rates(self):
        for n in range(1, 9):
            with self.subTest(n=n):
                values = program_values('constant', n)
                self.assertEqual(elements(values['zeroes']), [0] * n)
                self.assertEqual(values['late'].warp, LATER)
                self.assertEqual(elements(values['late']), [0] * (n - 1))
                self.assertEqual(elements(values['fast']), [0] * (2 * n))
                self.assertEqual(elements(values['one_then_zeroes']), [1] + [0] * (n - 1))
                self.assertEqual(elements(values['ones']), [1] * n)

    def test_suspended_stream_reshaped_behind_the_identity(self):
        program = parse_program('''
            def f : W (w) (W {0}(1) (Stream Int)) = (tail (rec (zs : Stream Int) -> 0 :: zs)) by (w)
            def g : W (w) (Stream Int) = f
        ''')
        definitions = elaborate_program(program)
        self.assertEqual(dict(evaluate_program(definitions, 0, check_values=True))['g'], STOP)
        for n in list(range(1, 9)) + [OMEGA]:
            with self.subTest(n=n):
                values = dict(evaluate_program(definitions, n, check_values=True))
                if n == OMEGA:
                    self.assertIsInstance(values['g'], Thunk)
                    continue
                self.assertEqual(values['g'].warp, OMEGA_WARP)
                for m in range(5):
                    self.assertEqual(elements(truncate(values['g'].body, m)), [0] * m)

    def test_values_have_their_declared_types(self):
        for name in ACCEPTED:
            for n in list(STEPS) + [OMEGA]:
                values = program_values(name, n)
                for defined, ty, _ in corpus_definitions(name):
                    with self.subTest(program=name, definition=defined, n=n):
                        self.assertTrue(value_has_type(values[defined], ty, n))

    def test_evaluation_is_monotone(self):
        for name in ACCEPTED:
            for n in STEPS:
                for m in range(n + 1):
                    later, earlier = program_values(name, n), program_values(name, m)
                    for defined in later:
                        with self.subTest(program=name, definition=defined, n=n, m=m):
                            self.assertEqual(truncate(later[defined], m), earlier[defined])

    def test_checked_evaluation_follows_the_setting(self):
        definitions = [('wrong', BOOL, Scalar(1))]
        self.assertEqual(evaluate_program(definitions, 2, check_values=False), [('wrong', ScalarV(1))])
        with self.assertRaises(EvaluationError):
            evaluate_program(definitions, 2, check_values=True)
        with override_settings(WARPLANG={**settings.WARPLANG, 'CHECK_VALUES': True}):
            with self.assertRaises(EvaluationError):
                evaluate_program(definitions, 2)
            evaluate_program(list(corpus_definitions('nat')), 4)


class RenderTests(SimpleTestCase):

    def test_render(self):
        self.assertEqual(render_value(STOP), '•')
        self.assertEqual(render_value(stream_value(True, False)), 'true :: false :: •')
        self.assertEqual(render_value(WarpedV(w('(1 0)'), stream_value(0))), '⌈(1 0)⌉(0 :: •)')
        self.assertEqual(render_value(Thunk(Scalar(1), EMPTY_ENV)), '<thunk>')
        nested = ConsV(stream_value(1), STOP)
        self.assertEqual(render_value(nested), '(1 :: •) :: •')

    def test_json(self):
        tree = value_to_json(WarpedV(LATER, stream_value(3)))
        self.assertEqual(tree, {
            'kind': 'warped',
            'warp': '{0}(1)',
            'body': {'kind': 'cons', 'head': {'kind': 'scalar', 'value': 3}, 'tail': {'kind': 'stop'}},
        })
