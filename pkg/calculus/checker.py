"""
Syntax-directed type checker for explicit terms.

Every explicit term has at most one type. Weakening is built into the
rules: variables are looked up in the whole context, `by p` keeps only the
bindings warped by exactly p, and a context coercion restricts the context
to the variables it names.
"""
import logging
from typing import Iterable

from core.warps import LATER, Warp

from .constants import PRIMITIVES
from .exceptions import CoercionMismatch, TypingError
from .printer import print_type
from .subtyping import coercion_target
from .syntax import (
    App, Arrow, By, Case, CoeL, CoeR, Cons, Context, CtxCoercion, Fun, Ground, Head, Inj, Pair,
    Prim, Prod, Proj, Rec, Scalar, Stream, Sum, Tail, Term, Type, Var, Warped,
)

logger = logging.getLogger(__name__)


def ctx_restrict(ctx: Context, names: Iterable[str]) -> Context:
    """The largest subcontext binding only the given names, in order."""
    wanted = set(names)
    return Context(tuple((n, t) for n, t in ctx if n in wanted))


def ctx_unwarp(ctx: Context, p: Warp) -> Context:
    """Bindings x : W p σ, rebound as x : σ; every other binding is dropped."""
    return Context(tuple(
        (name, ty.body) for name, ty in ctx
        if isinstance(ty, Warped) and ty.warp == p
    ))


def check_ctx_coercion(coercions: CtxCoercion, ctx: Context) -> Context:
    """
    Apply a context coercion to a context.

    Args:
        coercions: Coercion per variable
        ctx: The context it is applied to

    Returns:
        The context restricted to the coerced names, each binding replaced
        by its coercion's target type

    Raises:
        TypingError: when a coerced name is unbound or a coercion does not
            accept its binding's type
    """
    for name in coercions.names():
        if name not in ctx:
            raise TypingError(f"Context coercion names unbound variable '{name}'", rule='SubL')
    return Context(tuple(
        (name, coercion_target(coercions.get(name), ty))
        for name, ty in ctx if coercions.get(name) is not None
    ))


class TypeChecker:
    """Checks explicit terms; one instance can be reused across terms."""

    def __init__(self):
        self._handlers = {
            Var: self._check_var,
            Fun: self._check_fun,
            App: self._check_app,
            Pair: self._check_pair,
            Proj: self._check_proj,
            Inj: self._check_inj,
            Case: self._check_case,
            Scalar: self._check_scalar,
            Prim: self._check_prim,
            Rec: self._check_rec,
            By: self._check_by,
            Head: self._check_head,
            Tail: self._check_tail,
            Cons: self._check_cons,
            CoeR: self._check_coe_right,
            CoeL: self._check_coe_left,
        }

    def check(self, ctx: Context, term: Term) -> Type:
        handler = self._handlers.get(type(term))
        if not handler:
            raise TypingError(f"Unknown term node {type(term).__name__}")
        return handler(ctx, term)

    # =========================================================================
    # Helpers
    # =========================================================================

    def _fail(self, term: Term, rule: str, message: str):
        raise TypingError.at(term.span, message, rule=rule)

    def _expect(self, term: Term, rule: str, actual: Type, expected: Type):
        if actual != expected:
            self._fail(term, rule, f"expected {print_type(expected)}, got {print_type(actual)}")

    # =========================================================================
    # Rules
    # =========================================================================

    def _check_var(self, ctx, term):
        ty = ctx.lookup(term.name)
        if ty is None:
            self._fail(term, 'Var', f"unbound variable '{term.name}'")
        return ty

    def _check_fun(self, ctx, term):
        return Arrow(term.annot, self.check(ctx.extend(term.param, term.annot), term.body))

    def _check_app(self, ctx, term):
        fn_type = self.check(ctx, term.fn)
        if not isinstance(fn_type, Arrow):
            self._fail(term, 'App', f"applying a non-function of type {print_type(fn_type)}")
        self._expect(term.arg, 'App', self.check(ctx, term.arg), fn_type.dom)
        return fn_type.cod

    def _check_pair(self, ctx, term):
        return Prod(self.check(ctx, term.left), self.check(ctx, term.right))

    def _check_proj(self, ctx, term):
        ty = self.check(ctx, term.body)
        if not isinstance(ty, Prod):
            self._fail(term, 'Proj', f"projecting from non-product {print_type(ty)}")
        return ty.left if term.index == 1 else ty.right

    def _check_inj(self, ctx, term):
        ty = self.check(ctx, term.body)
        return Sum(ty, term.other) if term.index == 1 else Sum(term.other, ty)

    def _check_case(self, ctx, term):
        ty = self.check(ctx, term.scrutinee)
        if not isinstance(ty, Sum):
            self._fail(term, 'Case', f"matching on non-sum {print_type(ty)}")
        left = self.check(ctx.extend(term.left_name, ty.left), term.left_branch)
        right = self.check(ctx.extend(term.right_name, ty.right), term.right_branch)
        self._expect(term.right_branch, 'Case', right, left)
        return left

    def _check_scalar(self, ctx, term):
        return term.ground

    def _check_prim(self, ctx, term):
        signature = PRIMITIVES.get(term.op)
        if signature is None:
            self._fail(term, 'Prim', f"unknown primitive '{term.op}'")
        arg_types, result = signature
        if len(arg_types) != len(term.args):
            self._fail(term, 'Prim', f"'{term.op}' takes {len(arg_types)} arguments")
        for arg, expected in zip(term.args, arg_types):
            self._expect(arg, 'Prim', self.check(ctx, arg), Ground(expected))
        return Ground(result)

    def _check_rec(self, ctx, term):
        body = self.check(ctx.extend(term.name, Warped(LATER, term.annot)), term.body)
        self._expect(term, 'Rec', body, term.annot)
        return term.annot

    def _check_by(self, ctx, term):
        return Warped(term.warp, self.check(ctx_unwarp(ctx, term.warp), term.body))

    def _stream(self, ctx, term, rule) -> Stream:
        ty = self.check(ctx, term.body)
        if not isinstance(ty, Stream):
            self._fail(term, rule, f"expected a stream, got {print_type(ty)}")
        return ty

    def _check_head(self, ctx, term):
        return self._stream(ctx, term, 'Head').elem

    def _check_tail(self, ctx, term):
        return Warped(LATER, self._stream(ctx, term, 'Tail'))

    def _check_cons(self, ctx, term):
        elem = self.check(ctx, term.head)
        stream = Stream(elem)
        self._expect(term.tail, 'Cons', self.check(ctx, term.tail), Warped(LATER, stream))
        return stream

    def _check_coe_right(self, ctx, term):
        ty = self.check(ctx, term.body)
        try:
            return coercion_target(term.coercion, ty)
        except CoercionMismatch as e:
            raise CoercionMismatch.at(term.span, e.message, rule='SubR', coercion=e.coercion, actual=e.actual) from e

    def _check_coe_left(self, ctx, term):
        try:
            coerced = check_ctx_coercion(term.coercions, ctx)
        except TypingError as e:
            raise TypingError.at(term.span, e.message, rule='SubL') from e
        return self.check(coerced, term.body)


def check_explicit(ctx: Context, term: Term) -> Type:
    """
    The type of an explicit term.

    Raises:
        TypingError: naming the failing rule, positioned at the offending node
    """
    try:
        return TypeChecker().check(ctx, term)
    except TypingError as e:
        logger.debug(f"Explicit term rejected by [{e.rule}]: {e.message}")
        raise
