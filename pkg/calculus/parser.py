"""
Parser for warplang source files (.wlp).

The grammar reuses the warp literal fragment of core.expressions and adds
types, implicit and explicit terms, coercions and top-level definitions.
"""
import logging
from typing import List, Optional

from lark import Lark, v_args
from lark.exceptions import UnexpectedInput, VisitError

from core.expressions import WARP_GRAMMAR, WarpBuilder, describe_syntax_error
from core.warps import LATER, WarpError

from .exceptions import ParseError
from .syntax import (
    BOOL, INT, App, Arrow, By, Case, CoeL, CoeR, Concat, Cons, CtxCoercion, Decat,
    Definition, Delay, Dist, Fact, Fun, Head, Id, Inflate, Inj, OnArrow, OnProd, OnStream,
    OnSum, OnWarp, Pair, Prim, Prod, Program, Proj, Rec, RecGroup, Scalar, Seq, Span,
    Stream, Sum, Tail, Term, Unwrap, Var, Warped, Wrap, component, free_vars, let, product_of,
)

logger = logging.getLogger(__name__)

PROGRAM_GRAMMAR = r'''
program: toplevel*

?toplevel: "def" NAME ":" type "=" term                              -> definition
         | "rec" "def" rec_member ("and" rec_member)*                -> rec_group

rec_member: NAME ":" type "=" term

// ---------------------------------------------------------------- types
?type: sum_type "->" type                                            -> arrow_type
     | sum_type

?sum_type: sum_type "+" prod_type                                    -> sum_of
         | prod_type

?prod_type: prod_type "*" type_app                                   -> prod_of
          | type_app

?type_app: "Stream" type_atom                                        -> stream_type
         | "W" warp type_atom                                        -> warped_type
         | type_atom

?type_atom: "Int"                                                    -> int_type
          | "Bool"                                                   -> bool_type
          | "(" type ")"

// ---------------------------------------------------------------- terms
?term: "fun" "(" NAME ":" type ")" "->" term                         -> fun
     | "rec" "(" NAME ":" type ")" "->" term                         -> rec
     | "let" NAME ":" type "=" term "in" term                        -> let
     | "match" term "with" "{" "inl" NAME "->" term ";" "inr" NAME "->" term "}"  -> case
     | "coe" "[" ctx_bindings? "]" "in" term                         -> coe_left
     | cons

ctx_bindings: ctx_binding ("," ctx_binding)*
ctx_binding: NAME ":=" coercion

?cons: equality "::" cons                                            -> cons
     | equality

?equality: additive "==" additive                                    -> eq
         | additive

?additive: additive "+" multiplicative                               -> add
         | additive "-" multiplicative                               -> sub
         | multiplicative

?multiplicative: multiplicative "*" postfix                          -> mul
               | postfix

?postfix: postfix "by" warp                                          -> by
        | postfix ":>" coercion_atom                                 -> coe_right
        | application

?application: application atom                                      -> app
            | prefix

?prefix: "head" atom                                                 -> head
       | "tail" atom                                                 -> tail
       | "fst" atom                                                  -> fst
       | "snd" atom                                                  -> snd
       | "not" atom                                                  -> not_
       | "inl" "[" type "]" atom                                     -> inl
       | "inr" "[" type "]" atom                                     -> inr
       | atom

?atom: NAME                                                          -> var
     | INT                                                           -> int_scalar
     | "true"                                                        -> true_scalar
     | "false"                                                       -> false_scalar
     | "(" term "," term ")"                                         -> pair
     | "(" term ")"

// ---------------------------------------------------------------- coercions
?coercion: coercion_atom ";" coercion                                -> seq
         | coercion_atom

?coercion_atom: "id"                                                 -> id_coercion
              | "wrap"                                               -> wrap
              | "unwrap"                                             -> unwrap
              | "inflate"                                            -> inflate
              | "dist"                                               -> dist
              | "fact"                                               -> fact
              | "stream" "(" coercion ")"                            -> on_stream
              | "arrow" "(" coercion "," coercion ")"                -> on_arrow
              | "prod" "(" coercion "," coercion ")"                 -> on_prod
              | "sum" "(" coercion "," coercion ")"                  -> on_sum
              | "warp" "{" warp "}" "(" coercion ")"                 -> on_warp
              | "concat" "{" warp "," warp "}"                       -> concat
              | "decat" "{" warp "," warp "}"                        -> decat
              | "delay" "{" warp "," warp "}"                        -> delay
              | "(" coercion ")"

NAME: /[a-z_][A-Za-z0-9_']*/
COMMENT: /--[^\n]*/
''' + WARP_GRAMMAR + r'''
%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
'''


def _span(meta) -> Optional[Span]:
    if getattr(meta, 'empty', True):
        return None
    return Span(meta.line, meta.column)


@v_args(inline=True, meta=True)
class ProgramBuilder(WarpBuilder):
    """Builds syntax trees from parse trees, desugaring let and rec groups."""

    # ------------------------------------------------------------ program

    def program(self, meta, *toplevels):
        seen = set()
        for toplevel in toplevels:
            for name in toplevel.names:
                if name in seen:
                    raise ParseError.at(toplevel.span, f"Duplicate top-level name '{name}'")
                seen.add(name)
        return Program(tuple(toplevels))

    def definition(self, meta, name, annot, body):
        return Definition(str(name), annot, body, span=_span(meta))

    def rec_member(self, meta, name, annot, body):
        return str(name), annot, body, _span(meta)

    def rec_group(self, meta, *members):
        span = _span(meta)
        if len(members) == 1:
            name, annot, body, member_span = members[0]
            return Definition(name, annot, Rec(name, annot, body, span=member_span), span=span)

        names = [name for name, _, _, _ in members]
        if len(set(names)) != len(names):
            raise ParseError.at(span, "Duplicate name in recursive group")
        taken = set(names)
        for _, _, body, _ in members:
            taken |= free_vars(body)
        group_name = '_'.join(names)
        while group_name in taken:
            group_name += "'"

        annot = product_of([ty for _, ty, _, _ in members])
        body = _tuple([b for _, _, b, _ in members], span)
        # innermost let binds the last member
        for index in reversed(range(len(members))):
            name, ty, _, member_span = members[index]
            projected = component(Var(group_name, span=member_span), index, len(members), member_span)
            body = let(name, Warped(LATER, ty), projected, body, span=member_span)

        members_types = tuple((name, ty) for name, ty, _, _ in members)
        return RecGroup(group_name, members_types, Rec(group_name, annot, body, span=span), span=span)

    # ------------------------------------------------------------ types

    def arrow_type(self, meta, dom, cod):
        return Arrow(dom, cod)

    def sum_of(self, meta, left, right):
        return Sum(left, right)

    def prod_of(self, meta, left, right):
        return Prod(left, right)

    def stream_type(self, meta, elem):
        return Stream(elem)

    def warped_type(self, meta, warp, body):
        return Warped(warp, body)

    def int_type(self, meta):
        return INT

    def bool_type(self, meta):
        return BOOL

    # ------------------------------------------------------------ terms

    def fun(self, meta, name, annot, body):
        return Fun(str(name), annot, body, span=_span(meta))

    def rec(self, meta, name, annot, body):
        return Rec(str(name), annot, body, span=_span(meta))

    def let(self, meta, name, annot, bound, body):
        return let(str(name), annot, bound, body, span=_span(meta))

    def case(self, meta, scrutinee, left_name, left_branch, right_name, right_branch):
        return Case(scrutinee, str(left_name), left_branch, str(right_name), right_branch,
                    span=_span(meta))

    def coe_left(self, meta, *children):
        # the binding list is optional: `coe [] in t`
        coercions = children[0] if len(children) == 2 else CtxCoercion()
        return CoeL(coercions, children[-1], span=_span(meta))

    def ctx_bindings(self, meta, *bindings):
        return CtxCoercion(tuple(bindings))

    def ctx_binding(self, meta, name, coercion):
        return str(name), coercion

    def cons(self, meta, head, tail):
        return Cons(head, tail, span=_span(meta))

    def eq(self, meta, left, right):
        return Prim('eq', (left, right), span=_span(meta))

    def add(self, meta, left, right):
        return Prim('add', (left, right), span=_span(meta))

    def sub(self, meta, left, right):
        return Prim('sub', (left, right), span=_span(meta))

    def mul(self, meta, left, right):
        return Prim('mul', (left, right), span=_span(meta))

    def not_(self, meta, body):
        return Prim('not', (body,), span=_span(meta))

    def by(self, meta, body, warp):
        return By(body, warp, span=_span(meta))

    def coe_right(self, meta, body, coercion):
        return CoeR(body, coercion, span=_span(meta))

    def app(self, meta, fn, arg):
        return App(fn, arg, span=_span(meta))

    def head(self, meta, body):
        return Head(body, span=_span(meta))

    def tail(self, meta, body):
        return Tail(body, span=_span(meta))

    def fst(self, meta, body):
        return Proj(1, body, span=_span(meta))

    def snd(self, meta, body):
        return Proj(2, body, span=_span(meta))

    def inl(self, meta, other, body):
        return Inj(1, other, body, span=_span(meta))

    def inr(self, meta, other, body):
        return Inj(2, other, body, span=_span(meta))

    def var(self, meta, name):
        return Var(str(name), span=_span(meta))

    def int_scalar(self, meta, token):
        return Scalar(int(token), span=_span(meta))

    def true_scalar(self, meta):
        return Scalar(True, span=_span(meta))

    def false_scalar(self, meta):
        return Scalar(False, span=_span(meta))

    def pair(self, meta, left, right):
        return Pair(left, right, span=_span(meta))

    # ------------------------------------------------------------ coercions

    def seq(self, meta, first, second):
        return Seq(first, second)

    def id_coercion(self, meta):
        return Id()

    def wrap(self, meta):
        return Wrap()

    def unwrap(self, meta):
        return Unwrap()

    def inflate(self, meta):
        return Inflate()

    def dist(self, meta):
        return Dist()

    def fact(self, meta):
        return Fact()

    def on_stream(self, meta, inner):
        return OnStream(inner)

    def on_arrow(self, meta, dom, cod):
        return OnArrow(dom, cod)

    def on_prod(self, meta, left, right):
        return OnProd(left, right)

    def on_sum(self, meta, left, right):
        return OnSum(left, right)

    def on_warp(self, meta, warp, inner):
        return OnWarp(warp, inner)

    def concat(self, meta, outer, inner):
        return Concat(outer, inner)

    def decat(self, meta, outer, inner):
        return Decat(outer, inner)

    def delay(self, meta, source, target):
        # not validated here: the checker rejects delays that speed data up
        return Delay(source, target)


def _tuple(terms: List[Term], span: Optional[Span]) -> Term:
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = Pair(term, result, span=span)
    return result


_parser = Lark(
    PROGRAM_GRAMMAR,
    start=['program', 'term', 'type', 'coercion'],
    parser='lalr',
    propagate_positions=True,
)


def _parse(text: str, start: str):
    try:
        tree = _parser.parse(text, start=start)
        return ProgramBuilder().transform(tree)
    except UnexpectedInput as e:
        raise ParseError(describe_syntax_error(e), getattr(e, 'line', None), getattr(e, 'column', None)) from e
    except VisitError as e:
        # errors raised while building the tree come back wrapped by lark
        original = e.orig_exc
        if isinstance(original, ParseError):
            raise original from None
        if isinstance(original, WarpError):
            raise ParseError(original.message, original.line, original.column) from original
        raise


def parse_program(text: str) -> Program:
    """
    Parse a whole source file.

    Args:
        text: Program text, a sequence of `def` and `rec def ... and ...` definitions

    Returns:
        The Program, with let bindings and recursive groups desugared

    Raises:
        ParseError: on syntax errors or duplicate top-level names
    """
    program = _parse(text, 'program')
    logger.debug(f"Parsed {len(program.definitions)} top-level definitions")
    return program


def parse_term(text: str):
    return _parse(text, 'term')


def parse_type(text: str):
    return _parse(text, 'type')


def parse_coercion(text: str):
    return _parse(text, 'coercion')
