"""
Elaboration of implicit terms into explicit ones.

The elaborator computes a type for an implicit term and a refiner: the same
term decorated with the coercions (CoeR) and context coercions (CoeL) that
make it check with calculus.checker. Subtyping is applied only where a rule
needs a particular shape: a function type at an application, a product at
a projection, a stream at head/tail/cons, and the declared type at a
recursive binder.
"""
import logging
from typing import List, Tuple

from core.warps import LATER

from .checker import check_ctx_coercion
from .constants import PRIMITIVES
from .exceptions import CoercionMismatch, TypingError
from .printer import print_type
from .subtyping import coe, coercion_target, normalize, type_div, type_sup
from .syntax import (
    App, Arrow, By, Case, CoeL, CoeR, Coercion, Cons, Context, CtxCoercion, Fun,
    Ground, Head, Id, Inj, Pair, Prim, Prod, Program, Proj, Rec, RecGroup, Scalar, Stream, Sum,
    Tail, Term, Type, Var, Warped, component, free_vars,
)

logger = logging.getLogger(__name__)

Elaborated = Tuple[Type, Term]


def coerce(term: Term, coercion: Coercion) -> Term:
    """term :> coercion, or term itself for the identity."""
    if isinstance(coercion, Id):
        return term
    return CoeR(term, coercion, span=term.span)


class Elaborator:
    """Elaborates implicit terms; one instance can be reused across terms."""

    def __init__(self):
        self._handlers = {
            Var: self._elab_var,
            Fun: self._elab_fun,
            App: self._elab_app,
            Pair: self._elab_pair,
            Proj: self._elab_proj,
            Inj: self._elab_inj,
            Case: self._elab_case,
            Scalar: self._elab_scalar,
            Prim: self._elab_prim,
            Rec: self._elab_rec,
            By: self._elab_by,
            Head: self._elab_head,
            Tail: self._elab_tail,
            Cons: self._elab_cons,
            CoeR: self._elab_coe_right,
            CoeL: self._elab_coe_left,
        }

    def elaborate(self, ctx: Context, term: Term) -> Elaborated:
        handler = self._handlers.get(type(term))
        if not handler:
            raise TypingError(f"Unknown term node {type(term).__name__}")
        return handler(ctx, term)

    # =========================================================================
    # Helpers
    # =========================================================================

    def _fail(self, term: Term, rule: str, message: str):
        raise TypingError.at(term.span, message, rule=rule)

    def _coe(self, term: Term, rule: str, source: Type, target: Type) -> Coercion:
        found = coe(source, target)
        if found is None:
            self._fail(term, rule, f"cannot coerce {print_type(source)} to {print_type(target)}")
        return found

    def _coerced(self, term: Term, rule: str, elaborated: Elaborated, target: Type) -> Term:
        source, explicit = elaborated
        return coerce(explicit, self._coe(term, rule, source, target))

    def _expose(self, term: Term, rule: str, ty: Type, former: type, what: str) -> Type:
        """
        The bare type former hidden under a warp of ty, for instance the
        Stream σ of a type normalizing to W p (Stream σ).
        """
        normal = normalize(ty)
        if not (isinstance(normal, Warped) and isinstance(normal.body, former)):
            self._fail(term, rule, f"expected {what}, got {print_type(ty)}")
        return normal.body

    # =========================================================================
    # Rules
    # =========================================================================

    def _elab_var(self, ctx, term):
        ty = ctx.lookup(term.name)
        if ty is None:
            self._fail(term, 'Var', f"unbound variable '{term.name}'")
        return ty, term

    def _elab_fun(self, ctx, term):
        body_type, body = self.elaborate(ctx.extend(term.param, term.annot), term.body)
        return Arrow(term.annot, body_type), Fun(term.param, term.annot, body, span=term.span)

    def _elab_app(self, ctx, term):
        fn_type, fn = self.elaborate(ctx, term.fn)
        if isinstance(fn_type, Arrow):
            arrow = fn_type
        else:
            arrow = self._expose(term.fn, 'App', fn_type, Arrow, "a function")
            fn = coerce(fn, self._coe(term.fn, 'App', fn_type, arrow))
        arg = self._coerced(term.arg, 'App', self.elaborate(ctx, term.arg), arrow.dom)
        return arrow.cod, App(fn, arg, span=term.span)

    def _elab_pair(self, ctx, term):
        left_type, left = self.elaborate(ctx, term.left)
        right_type, right = self.elaborate(ctx, term.right)
        return Prod(left_type, right_type), Pair(left, right, span=term.span)

    def _elab_proj(self, ctx, term):
        ty, body = self.elaborate(ctx, term.body)
        if not isinstance(ty, Prod):
            normal = normalize(ty)
            if not isinstance(normal, Prod):
                self._fail(term, 'Proj', f"projecting from non-product {print_type(ty)}")
            body = coerce(body, self._coe(term, 'Proj', ty, normal))
            ty = normal
        picked = ty.left if term.index == 1 else ty.right
        return picked, Proj(term.index, body, span=term.span)

    def _elab_inj(self, ctx, term):
        ty, body = self.elaborate(ctx, term.body)
        result = Sum(ty, term.other) if term.index == 1 else Sum(term.other, ty)
        return result, Inj(term.index, term.other, body, span=term.span)

    def _elab_case(self, ctx, term):
        ty, scrutinee = self.elaborate(ctx, term.scrutinee)
        if not isinstance(ty, Sum):
            summands = self._expose(term.scrutinee, 'Case', ty, Sum, "a sum")
            scrutinee = coerce(scrutinee, self._coe(term.scrutinee, 'Case', ty, summands))
            ty = summands

        left = self.elaborate(ctx.extend(term.left_name, ty.left), term.left_branch)
        right = self.elaborate(ctx.extend(term.right_name, ty.right), term.right_branch)
        if coe(right[0], left[0]) is not None:
            joined = left[0]
        elif coe(left[0], right[0]) is not None:
            joined = right[0]
        else:
            joined = type_sup(left[0], right[0])
            if joined is None:
                self._fail(term, 'Case', f"branches have incompatible types "
                                         f"{print_type(left[0])} and {print_type(right[0])}")

        explicit = Case(
            scrutinee,
            term.left_name, self._coerced(term.left_branch, 'Case', left, joined),
            term.right_name, self._coerced(term.right_branch, 'Case', right, joined),
            span=term.span,
        )
        return joined, explicit

    def _elab_scalar(self, ctx, term):
        return term.ground, term

    def _elab_prim(self, ctx, term):
        signature = PRIMITIVES.get(term.op)
        if signature is None:
            self._fail(term, 'Prim', f"unknown primitive '{term.op}'")
        arg_types, result = signature
        if len(arg_types) != len(term.args):
            self._fail(term, 'Prim', f"'{term.op}' takes {len(arg_types)} arguments")
        args = tuple(
            self._coerced(arg, 'Prim', self.elaborate(ctx, arg), Ground(expected))
            for arg, expected in zip(term.args, arg_types)
        )
        return Ground(result), Prim(term.op, args, span=term.span)

    def _elab_rec(self, ctx, term):
        inner = ctx.extend(term.name, Warped(LATER, term.annot))
        body = self._coerced(term, 'Rec', self.elaborate(inner, term.body), term.annot)
        return term.annot, Rec(term.name, term.annot, body, span=term.span)

    def _elab_by(self, ctx, term):
        used = free_vars(term.body)
        divided = []
        coercions = []
        for name, ty in ctx:
            if name not in used:
                continue
            quotient = type_div(ty, term.warp)
            divided.append((name, quotient))
            coercions.append((name, self._coe(term, 'By', ty, Warped(term.warp, quotient))))

        body_type, body = self.elaborate(Context(tuple(divided)), term.body)
        explicit = CoeL(CtxCoercion.from_pairs(coercions), By(body, term.warp, span=term.span),
                        span=term.span)
        return Warped(term.warp, body_type), explicit

    def _stream(self, ctx, term, rule) -> Tuple[Stream, Term]:
        ty, body = self.elaborate(ctx, term.body)
        if isinstance(ty, Stream):
            return ty, body
        stream = self._expose(term, rule, ty, Stream, "a stream")
        return stream, coerce(body, self._coe(term, rule, ty, stream))

    def _elab_head(self, ctx, term):
        stream, body = self._stream(ctx, term, 'Head')
        return stream.elem, Head(body, span=term.span)

    def _elab_tail(self, ctx, term):
        stream, body = self._stream(ctx, term, 'Tail')
        return Warped(LATER, stream), Tail(body, span=term.span)

    def _elab_cons(self, ctx, term):
        head = self.elaborate(ctx, term.head)
        tail = self.elaborate(ctx, term.tail)
        tail_elem = self._expose(term.tail, 'Cons', tail[0], Stream, "a stream").elem

        if coe(tail_elem, head[0]) is not None:
            elem = head[0]
        else:
            elem = type_sup(head[0], tail_elem)
            if elem is None:
                self._fail(term, 'Cons', f"head of type {print_type(head[0])} does not fit "
                                         f"a stream of {print_type(tail_elem)}")

        explicit = Cons(
            self._coerced(term.head, 'Cons', head, elem),
            self._coerced(term.tail, 'Cons', tail, Warped(LATER, Stream(elem))),
            span=term.span,
        )
        return Stream(elem), explicit

    def _elab_coe_right(self, ctx, term):
        ty, body = self.elaborate(ctx, term.body)
        try:
            target = coercion_target(term.coercion, ty)
        except CoercionMismatch as e:
            raise CoercionMismatch.at(term.span, e.message, rule='SubR', coercion=e.coercion, actual=e.actual) from e
        return target, CoeR(body, term.coercion, span=term.span)

    def _elab_coe_left(self, ctx, term):
        try:
            coerced = check_ctx_coercion(term.coercions, ctx)
        except TypingError as e:
            raise TypingError.at(term.span, e.message, rule='SubL') from e
        ty, body = self.elaborate(coerced, term.body)
        return ty, CoeL(term.coercions, body, span=term.span)


def elaborate(ctx: Context, term: Term) -> Elaborated:
    """
    Type an implicit term and build its explicit refiner.

    Args:
        ctx: Typing context
        term: Implicit term; explicit nodes are accepted and kept as written

    Returns:
        (τ, e) where erasing the coercions of e gives back term and e checks
        against ctx with type τ

    Raises:
        TypingError: naming the rule that failed, positioned at the sub-term
    """
    return Elaborator().elaborate(ctx, term)


def elaborate_program(program: Program) -> List[Tuple[str, Type, Term]]:
    """
    Elaborate every definition of a program in order.

    Each definition sees the declared types of the ones before it, and its
    elaborated term is coerced to its own declared type. A recursive group is
    elaborated once, as the recursive product, and each member is exposed
    as a projection of it.

    Returns:
        (name, declared type, explicit term) per defined name
    """
    elaborator = Elaborator()
    ctx = Context()
    results = []

    for definition in program.definitions:
        ty, term = elaborator.elaborate(ctx, definition.body)
        found = coe(ty, definition.annot)
        if found is None:
            logger.warning(f"Rejected definition '{'/'.join(definition.names)}'")
            raise TypingError.at(
                definition.span,
                f"'{' and '.join(definition.names)}' has type {print_type(ty)}, "
                f"which is not a subtype of the declared {print_type(definition.annot)}",
                rule='Def',
            )
        term = coerce(term, found)

        if isinstance(definition, RecGroup):
            size = len(definition.members)
            for index, (name, annot) in enumerate(definition.members):
                results.append((name, annot, component(term, index, size, definition.span)))
                ctx = ctx.extend(name, annot)
        else:
            results.append((definition.name, definition.annot, term))
            ctx = ctx.extend(definition.name, definition.annot)
        logger.debug(f"Elaborated {', '.join(definition.names)} : {print_type(definition.annot)}")

    return results
