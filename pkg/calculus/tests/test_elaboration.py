import hypothesis
from django.test import SimpleTestCase

from core.warps import LATER, Warp
from calculus.checker import check_explicit
from calculus.elaboration import elaborate, elaborate_program
from calculus.exceptions import TypingError
from calculus.parser import parse_program, parse_term, parse_type
from calculus.printer import print_term
from calculus.subtyping import coe, equivalent
from calculus.syntax import (
    BOOL, INT, Arrow, By, CoeL, CoeR, Context, Definition, Stream, Sum, Warped, children, erase,
)
from calculus.tests.corpus import (
    ACCEPTED, corpus_definition, corpus_definitions, corpus_program, corpus_text,
)
from calculus.tests.strategies import implicit_terms

PROPERTY_SETTINGS = hypothesis.settings(
    max_examples=500,
    deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.filter_too_much, hypothesis.HealthCheck.too_slow],
)

# Variables the random implicit terms may use
RANDOM_CONTEXT = Context.of([
    ('x', INT),
    ('y', Warped(LATER, INT)),
    ('xs', Stream(INT)),
    ('ys', Warped(LATER, Stream(INT))),
    ('f', Arrow(INT, INT)),
    ('g', Warped(Warp.parse('(w)'), Arrow(Stream(INT), Stream(INT)))),
])


def subterms(term):
    yield term
    for child in children(term):
        yield from subterms(child)


class ElaborateTermTests(SimpleTestCase):

    def elaborate(self, text, **bindings):
        ctx = Context.of(bindings.items())
        ty, term = elaborate(ctx, parse_term(text))
        self.assertEqual(check_explicit(ctx, term), ty)
        return ty, term

    def test_implicit_terms_without_subtyping_are_unchanged(self):
        term = parse_term('fun (x : Int) -> x + 1')
        ty, explicit = elaborate(Context(), term)
        self.assertEqual(ty, Arrow(INT, INT))
        self.assertEqual(explicit, term)

    def test_cons_delays_its_tail(self):
        ty, term = self.elaborate('0 :: xs', xs=Stream(INT))
        self.assertEqual(ty, Stream(INT))
        self.assertIsInstance(term.tail, CoeR)

    def test_by_divides_only_the_variables_it_uses(self):
        ty, term = self.elaborate('xs by {0}(1)', xs=Stream(INT), b=BOOL)
        self.assertIsInstance(term, CoeL)
        self.assertEqual(term.coercions.names(), ['xs'])
        self.assertIsInstance(term.body, By)
        self.assertIsNotNone(coe(Stream(INT), ty))
        self.assertIsNotNone(coe(ty, Warped(LATER, Stream(INT))))

    def test_application_through_a_warp(self):
        ty, term = self.elaborate('g 1', g=Warped(Warp.parse('(w)'), Arrow(INT, INT)))
        self.assertTrue(equivalent(ty, INT))
        self.assertIsInstance(term.fn, CoeR)

    def test_case_joins_its_branches(self):
        ty, _ = self.elaborate('match s with { inl a -> a ; inr b -> 0 }', s=Sum(INT, BOOL))
        self.assertEqual(ty, INT)
        ty, _ = self.elaborate('match s with { inl a -> a ; inr b -> xs }',
                               s=Sum(Stream(INT), BOOL), xs=Warped(LATER, Stream(INT)))
        self.assertTrue(equivalent(ty, Warped(LATER, Stream(INT))))

    def test_constant_ground_values_are_usable_now(self):
        ty, _ = self.elaborate('x + 1', x=Warped(Warp.parse('(w)'), INT))
        self.assertEqual(ty, INT)
        with self.assertRaises(TypingError):
            self.elaborate('x + 1', x=Warped(LATER, INT))

    def test_rejections_name_the_rule(self):
        cases = [
            ('Prim', 'true + 1', {}),
            ('Head', 'head (tail xs)', {'xs': Stream(INT)}),
            ('Rec', 'rec (s : Stream Int) -> s', {}),
            ('App', 'x 1', {'x': INT}),
            ('Var', 'z', {}),
            ('Case', 'match s with { inl a -> a ; inr b -> b }', {'s': Sum(INT, Stream(INT))}),
        ]
        for rule, text, bindings in cases:
            with self.subTest(text=text):
                with self.assertRaises(TypingError) as raised:
                    elaborate(Context.of(bindings.items()), parse_term(text))
                self.assertEqual(raised.exception.rule, rule)

    def test_errors_are_positioned_at_the_subterm(self):
        with self.assertRaises(TypingError) as raised:
            elaborate(Context(), parse_term('1 +\n  true'))
        self.assertEqual((raised.exception.line, raised.exception.column), (2, 3))

    def test_minimal_type_against_a_hand_written_refiner(self):
        inner = Context.of([('s', Warped(LATER, parse_type('W (0) (Stream Int)')))])
        refiner = parse_term('s :> concat{{0}(1),(0)}')
        refined_type = check_explicit(inner, refiner)
        minimal, _ = elaborate(inner, erase(refiner))
        self.assertIsNotNone(coe(minimal, refined_type))

        refiner = parse_term('fun (x : Int) -> x :> inflate')
        minimal, _ = elaborate(Context(), erase(refiner))
        self.assertIsNotNone(coe(minimal, check_explicit(Context(), refiner)))

    @hypothesis.given(implicit_terms())
    @PROPERTY_SETTINGS
    def test_refiners_check_and_erase_back(self, term):
        try:
            ty, explicit = elaborate(RANDOM_CONTEXT, term)
        except TypingError:
            hypothesis.assume(False)
        self.assertEqual(check_explicit(RANDOM_CONTEXT, explicit), ty)
        self.assertEqual(erase(explicit), term)

    @hypothesis.given(implicit_terms())
    @PROPERTY_SETTINGS
    def test_deterministic(self, term):
        try:
            first = elaborate(RANDOM_CONTEXT, term)
        except TypingError:
            hypothesis.assume(False)
        second = elaborate(RANDOM_CONTEXT, term)
        self.assertEqual(first, second)
        self.assertEqual(print_term(first[1]), print_term(second[1]))


class ElaborateProgramTests(SimpleTestCase):

    def test_corpus_refiners_erase_to_the_source(self):
        for name in ACCEPTED:
            sources = {d.name: d.body for d in corpus_program(name).definitions
                       if isinstance(d, Definition)}
            for defined, _, term in corpus_definitions(name):
                if defined not in sources:
                    continue
                with self.subTest(program=name, definition=defined):
                    self.assertEqual(erase(term), erase(sources[defined]))

    def test_map_coerces_the_function_in_the_recursive_call(self):
        _, term = corpus_definition('map', 'map')
        coerced = [node.coercions.names() for node in subterms(term) if isinstance(node, CoeL)]
        self.assertTrue(any('f' in names for names in coerced))

    def test_mutual_recursion_exposes_each_member(self):
        definitions = corpus_definitions('streams')
        self.assertEqual([name for name, _, _ in definitions], ['cmap', 'nat', 'pos'])
        _, ty, _ = definitions[1]
        self.assertEqual(ty, parse_type('W (1 0) (Stream Int)'))

    def test_nonproductive_definition_is_rejected(self):
        with self.assertRaises(TypingError) as raised:
            elaborate_program(parse_program(corpus_text('nonproductive')))
        self.assertEqual(raised.exception.rule, 'Rec')
        self.assertEqual(raised.exception.line, 3)
        self.assertIn('cannot coerce', raised.exception.message)

    def test_declared_type_must_be_a_supertype(self):
        with self.assertRaises(TypingError) as raised:
            elaborate_program(parse_program('def zero : Int = 0\ndef wrong : Bool = zero'))
        self.assertEqual(raised.exception.rule, 'Def')
        self.assertEqual(raised.exception.line, 2)

    def test_later_definitions_see_declared_types(self):
        program = parse_program('''
            def late : W {0}(1) Int = 1
            def now : Int = late
        ''')
        with self.assertRaises(TypingError):
            # W {0}(1) Int is not a subtype of Int: nothing is known at step 1
            elaborate_program(program)

    def test_elaboration_is_deterministic(self):
        for name in ACCEPTED:
            with self.subTest(program=name):
                again = tuple(elaborate_program(parse_program(corpus_text(name))))
                self.assertEqual(again, corpus_definitions(name))
