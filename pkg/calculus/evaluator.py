"""
Fuel-indexed big-step evaluator.

evaluate(e, γ, n) computes the prefix of length n of the value of an
explicit term. Step 0 always yields Stop and step ω suspends the term in a
Thunk; every other step runs the usual call-by-value rules, with `by p`
moving the body to step p(n) and `rec` iterating its body from Stop.
"""
import functools
import logging
import operator
from typing import List, Optional, Tuple

from django.conf import settings

from core.warps import (
    ID, LATER, OMEGA, OMEGA_WARP, Warp, stabilization_point, warp_compose, warp_leq,
    warp_residual,
)

from .constants import (
    SAMPLE_STREAM_NAME, THUNK_SAMPLE_STEPS, WRAPPED_ARGUMENT_NAME, WRAPPED_FUNCTION_NAME,
)
from .checker import check_explicit
from .exceptions import EvaluationError, TypingError
from .printer import print_coercion, print_type
from .subtyping import coercion_source, coercion_target
from .syntax import (
    App, Arrow, By, Case, CoeL, CoeR, Coercion, Concat, Cons, Context, Decat, Delay, Dist, Fact,
    Fun, Ground, Head, Id, Inflate, Inj, OnArrow, OnProd, OnStream, OnSum, OnWarp, Pair, Prim,
    Prod, Proj, Rec, Scalar, Seq, Stream, Sum, Tail, Term, Type, Unwrap, Var, Warped, Wrap,
    free_vars,
)
from .values import (
    EMPTY_ENV, STOP, Closure, ConsV, Env, InjV, PairV, ScalarV, Stop, Thunk, TypeInfo, Value,
    WarpedV,
)

logger = logging.getLogger(__name__)

PRIMITIVE_OPERATIONS = {
    'add': operator.add,
    'sub': operator.sub,
    'mul': operator.mul,
    'eq': operator.eq,
    'not': operator.not_,
}


def predecessor(n):
    return n if n == OMEGA else n - 1


def purge(env: Env, p: Warp) -> Env:
    """Keep the bindings x ↦ ⌈p⌉(v) as x ↦ v; drop every other binding."""
    def unwarp(ty):
        return ty.body if isinstance(ty, Warped) and ty.warp == p else None

    return Env.typed(
        (name, value.body, derived_type(info, unwarp))
        for name, value, info in env.entries()
        if isinstance(value, WarpedV) and value.warp == p
    )


# =============================================================================
# BINDING TYPES
# =============================================================================

def resolve_type(info: TypeInfo) -> Optional[Type]:
    if info is None or isinstance(info, Type):
        return info
    return info()


def derived_type(info: TypeInfo, derive) -> TypeInfo:
    """The type obtained from a binding's type by `derive`, computed on demand."""
    if info is None:
        return None

    @functools.cache
    def compute():
        ty = resolve_type(info)
        if ty is None:
            return None
        try:
            return derive(ty)
        except TypingError:
            return None
    return compute


def env_context(env: Env, names) -> Optional[Context]:
    """The typing context of the named bindings, or None if a type is unknown."""
    pairs = []
    for name, _, info in env.entries():
        if name not in names:
            continue
        ty = resolve_type(info)
        if ty is None:
            return None
        pairs.append((name, ty))
    if len(pairs) != len(set(names)):
        return None
    return Context.of(pairs)


def term_type(term: Term, env: Env) -> Optional[Type]:
    ctx = env_context(env, free_vars(term))
    if ctx is None:
        return None
    try:
        return check_explicit(ctx, term)
    except TypingError:
        return None


def closure_type(closure: Closure) -> Optional[Type]:
    if closure.annot is None:
        return None
    cod = term_type(closure.body, closure.env.extend(closure.param, STOP, closure.annot))
    return None if cod is None else Arrow(closure.annot, cod)


class Evaluator:
    """
    Evaluation, truncation and coercion application, which are mutually
    recursive: forcing a thunk evaluates, and evaluating applies coercions.
    """

    def __init__(self):
        self._handlers = {
            Var: self._eval_var,
            Fun: self._eval_fun,
            App: self._eval_app,
            Pair: self._eval_pair,
            Proj: self._eval_proj,
            Inj: self._eval_inj,
            Case: self._eval_case,
            Scalar: self._eval_scalar,
            Prim: self._eval_prim,
            Rec: self._eval_rec,
            By: self._eval_by,
            Head: self._eval_head,
            Tail: self._eval_tail,
            Cons: self._eval_cons,
            CoeR: self._eval_coe_right,
            CoeL: self._eval_coe_left,
        }
        self._coercions = {
            Id: self._apply_id,
            Seq: self._apply_seq,
            OnStream: self._apply_on_stream,
            OnArrow: self._apply_on_arrow,
            OnProd: self._apply_on_prod,
            OnSum: self._apply_on_sum,
            OnWarp: self._apply_on_warp,
            Wrap: self._apply_wrap,
            Unwrap: self._apply_unwrap,
            Concat: self._apply_concat,
            Decat: self._apply_decat,
            Inflate: self._apply_inflate,
            Dist: self._apply_dist,
            Fact: self._apply_fact,
            Delay: self._apply_delay,
        }

    # =========================================================================
    # Evaluation
    # =========================================================================

    def evaluate(self, term: Term, env: Env, n) -> Value:
        if n == 0:
            return STOP
        if n == OMEGA:
            return Thunk(term, env)
        handler = self._handlers.get(type(term))
        if not handler:
            raise EvaluationError(f"Unknown term node {type(term).__name__}")
        return handler(term, env, n)

    def _shape(self, term: Term, expected: str, value: Value):
        raise EvaluationError.at(term.span, f"expected {expected}, got {type(value).__name__}", rule='eval')

    def _eval_var(self, term, env, n):
        value = env.lookup(term.name)
        if value is None:
            raise EvaluationError.at(term.span, f"unbound variable '{term.name}'", rule='eval')
        return value

    def _eval_fun(self, term, env, n):
        return Closure(term.param, term.body, env, term.annot)

    def _eval_app(self, term, env, n):
        fn = self.evaluate(term.fn, env, n)
        arg = self.evaluate(term.arg, env, n)
        if not isinstance(fn, Closure):
            self._shape(term.fn, 'a closure', fn)
        return self.evaluate(fn.body, fn.env.extend(fn.param, arg, fn.annot), n)

    def _eval_pair(self, term, env, n):
        return PairV(self.evaluate(term.left, env, n), self.evaluate(term.right, env, n))

    def _eval_proj(self, term, env, n):
        pair = self.evaluate(term.body, env, n)
        if not isinstance(pair, PairV):
            self._shape(term, 'a pair', pair)
        return pair.left if term.index == 1 else pair.right

    def _eval_inj(self, term, env, n):
        return InjV(term.index, self.evaluate(term.body, env, n))

    def _eval_case(self, term, env, n):
        scrutinee = self.evaluate(term.scrutinee, env, n)
        if not isinstance(scrutinee, InjV):
            self._shape(term, 'an injection', scrutinee)
        summands = derived_type(functools.partial(term_type, term.scrutinee, env),
                                lambda ty: ty if isinstance(ty, Sum) else None)
        if scrutinee.index == 1:
            ty = derived_type(summands, lambda summed: summed.left)
            return self.evaluate(term.left_branch, env.extend(term.left_name, scrutinee.body, ty), n)
        ty = derived_type(summands, lambda summed: summed.right)
        return self.evaluate(term.right_branch, env.extend(term.right_name, scrutinee.body, ty), n)

    def _eval_scalar(self, term, env, n):
        return ScalarV(term.value)

    def _eval_prim(self, term, env, n):
        args = []
        for arg in term.args:
            value = self.evaluate(arg, env, n)
            if not isinstance(value, ScalarV):
                self._shape(arg, 'a scalar', value)
            args.append(value.value)
        return ScalarV(PRIMITIVE_OPERATIONS[term.op](*args))

    def _eval_rec(self, term, env, n):
        return self.iterate(term.name, term.body, env, STOP, 0, n, annot=term.annot)

    def _eval_by(self, term, env, n):
        return WarpedV(term.warp, self.evaluate(term.body, purge(env, term.warp), term.warp(n)))

    def _cons(self, term, env, n) -> ConsV:
        value = self.evaluate(term.body, env, n)
        if not isinstance(value, ConsV):
            self._shape(term, 'a stream', value)
        return value

    def _eval_head(self, term, env, n):
        return self._cons(term, env, n).head

    def _eval_tail(self, term, env, n):
        return WarpedV(LATER, self._cons(term, env, n).tail)

    def _eval_cons(self, term, env, n):
        head = self.evaluate(term.head, env, n)
        tail = self.evaluate(term.tail, env, n)
        if not (isinstance(tail, WarpedV) and tail.warp == LATER):
            self._shape(term.tail, f"a tail warped by {LATER}", tail)
        return ConsV(head, tail.body)

    def _eval_coe_right(self, term, env, n):
        return self.coerce(term.coercion, self.evaluate(term.body, env, n), n)

    def _eval_coe_left(self, term, env, n):
        coerced = []
        for name, coercion in term.coercions:
            value = env.lookup(name)
            if value is None:
                raise EvaluationError.at(term.span, f"unbound variable '{name}'", rule='eval')
            ty = derived_type(env.type_of(name), functools.partial(coercion_target, coercion))
            coerced.append((name, self.coerce(coercion, value, n), ty))
        return self.evaluate(term.body, Env.typed(coerced), n)

    def iterate(self, name: str, body: Term, env: Env, value: Value, m, n,
                annot: Optional[Type] = None) -> Value:
        """
        Unfold a recursive definition from the approximation `value` at step
        m up to step n. Each round evaluates the body one step further with
        the previous approximation bound, delayed by one step.
        """
        bound_type = None if annot is None else Warped(LATER, annot)
        while m < n:
            bound = truncate_env(self, env, m + 1).extend(name, WarpedV(LATER, value), bound_type)
            value = self.evaluate(body, bound, m + 1)
            m += 1
        return value

    # =========================================================================
    # Truncation
    # =========================================================================

    def truncate(self, value: Value, n) -> Value:
        if n == 0:
            return STOP
        if n == OMEGA:
            return value
        if isinstance(value, Thunk):
            return self.evaluate(value.term, truncate_env(self, value.env, n), n)
        if isinstance(value, (Stop, ScalarV)):
            return value
        if isinstance(value, ConsV):
            return ConsV(self.truncate(value.head, n), self.truncate(value.tail, n - 1))
        if isinstance(value, Closure):
            return Closure(value.param, value.body, truncate_env(self, value.env, n), value.annot)
        if isinstance(value, PairV):
            return PairV(self.truncate(value.left, n), self.truncate(value.right, n))
        if isinstance(value, InjV):
            return InjV(value.index, self.truncate(value.body, n))
        if isinstance(value, WarpedV):
            return WarpedV(value.warp, self.truncate(value.body, value.warp(n)))
        raise EvaluationError(f"Cannot truncate {value!r}")

    # =========================================================================
    # Coercion application
    # =========================================================================

    def coerce(self, coercion: Coercion, value: Value, n) -> Value:
        if n == 0:
            return STOP
        if n == OMEGA and isinstance(value, Thunk):
            return Thunk(CoeR(value.term, coercion), value.env)
        handler = self._coercions.get(type(coercion))
        if not handler:
            raise EvaluationError(f"Unknown coercion {type(coercion).__name__}")
        return handler(coercion, value, n)

    def _mismatch(self, coercion: Coercion, value: Value):
        raise EvaluationError(
            f"Coercion {print_coercion(coercion)} cannot be applied to {type(value).__name__}", rule='coercion')

    def _warped(self, coercion: Coercion, value: Value, warp: Warp) -> WarpedV:
        if not (isinstance(value, WarpedV) and value.warp == warp):
            self._mismatch(coercion, value)
        return value

    def _apply_id(self, coercion, value, n):
        return value

    def _apply_seq(self, coercion, value, n):
        return self.coerce(coercion.second, self.coerce(coercion.first, value, n), n)

    def _apply_on_stream(self, coercion, value, n):
        if not isinstance(value, ConsV):
            self._mismatch(coercion, value)
        return ConsV(self.coerce(coercion.inner, value.head, n),
                     self.coerce(coercion, value.tail, predecessor(n)))

    def _apply_on_arrow(self, coercion, value, n):
        if not isinstance(value, Closure):
            self._mismatch(coercion, value)
        # fun y% -> (f% (y% :> dom)) :> cod, with f% bound to the original closure
        argument = CoeR(Var(WRAPPED_ARGUMENT_NAME), coercion.dom)
        body = CoeR(App(Var(WRAPPED_FUNCTION_NAME), argument), coercion.cod)
        annot = None
        if value.annot is not None:
            try:
                annot = coercion_source(coercion.dom, value.annot)
            except TypingError:
                annot = None
        env = EMPTY_ENV.extend(WRAPPED_FUNCTION_NAME, value, functools.partial(closure_type, value))
        return Closure(WRAPPED_ARGUMENT_NAME, body, env, annot)

    def _apply_on_prod(self, coercion, value, n):
        if not isinstance(value, PairV):
            self._mismatch(coercion, value)
        return PairV(self.coerce(coercion.left, value.left, n),
                     self.coerce(coercion.right, value.right, n))

    def _apply_on_sum(self, coercion, value, n):
        if not isinstance(value, InjV):
            self._mismatch(coercion, value)
        inner = coercion.left if value.index == 1 else coercion.right
        return InjV(value.index, self.coerce(inner, value.body, n))

    def _apply_on_warp(self, coercion, value, n):
        warped = self._warped(coercion, value, coercion.warp)
        return WarpedV(warped.warp, self.coerce(coercion.inner, warped.body, warped.warp(n)))

    def _apply_wrap(self, coercion, value, n):
        return WarpedV(ID, value)

    def _apply_unwrap(self, coercion, value, n):
        return self._warped(coercion, value, ID).body

    def _apply_concat(self, coercion, value, n):
        p, q = coercion.outer, coercion.inner
        composed = warp_compose(p, q)
        inner = self._warped(coercion, value, p).body
        if isinstance(inner, Stop):
            return WarpedV(composed, STOP)
        if isinstance(inner, WarpedV) and inner.warp == q:
            return WarpedV(composed, inner.body)
        if not isinstance(inner, Thunk):
            self._mismatch(coercion, value)

        # the inner layer sits at step ω: only q(ω) steps of its payload are needed
        settled = stabilization_point(q)
        if settled is not None:
            forced = self.truncate(inner, settled)
            if isinstance(forced, Stop):
                return WarpedV(composed, STOP)
            return WarpedV(composed, self._warped(coercion, forced, q).body)
        if warp_leq(ID, q):
            return WarpedV(composed, Thunk(CoeR(inner.term, Seq(Delay(q, ID), Unwrap())), inner.env))
        return WarpedV(composed, self._sooner_thunk(inner, q))

    def _sooner_thunk(self, inner: Thunk, q: Warp) -> Thunk:
        """
        The payload of a suspended ⌈q⌉(v) when q falls behind the identity.

        Forcing it at m evaluates the stored term at r(m), the least step
        with q(r(m)) >= m, through `by r` over an environment warped by r.
        """
        r = warp_residual(ID, q)
        rq = warp_compose(r, q)
        env = Env.typed(
            (name, WarpedV(r, value), derived_type(info, functools.partial(Warped, r)))
            for name, value, info in inner.env.entries()
        )
        reshape = Seq(Concat(r, q), Seq(Delay(rq, ID), Unwrap()))
        return Thunk(CoeR(By(inner.term, r), reshape), env)

    def _apply_decat(self, coercion, value, n):
        p, q = coercion.outer, coercion.inner
        warped = self._warped(coercion, value, warp_compose(p, q))
        if p(n) == 0:
            return WarpedV(p, STOP)
        return WarpedV(p, WarpedV(q, warped.body))

    def _apply_inflate(self, coercion, value, n):
        if not isinstance(value, ScalarV):
            self._mismatch(coercion, value)
        return WarpedV(OMEGA_WARP, Thunk(Scalar(value.value), EMPTY_ENV))

    def _apply_dist(self, coercion, value, n):
        if not isinstance(value, WarpedV):
            self._mismatch(coercion, value)
        p, inner = value.warp, value.body
        if isinstance(inner, PairV):
            return PairV(WarpedV(p, inner.left), WarpedV(p, inner.right))
        if isinstance(inner, Stop):
            return PairV(WarpedV(p, STOP), WarpedV(p, STOP))
        if isinstance(inner, Thunk):
            return PairV(WarpedV(p, Thunk(Proj(1, inner.term), inner.env)),
                         WarpedV(p, Thunk(Proj(2, inner.term), inner.env)))
        self._mismatch(coercion, value)

    def _apply_fact(self, coercion, value, n):
        if not (isinstance(value, PairV) and isinstance(value.left, WarpedV)
                and isinstance(value.right, WarpedV) and value.left.warp == value.right.warp):
            self._mismatch(coercion, value)
        p = value.left.warp
        if p(n) == 0:
            return WarpedV(p, STOP)
        return WarpedV(p, PairV(value.left.body, value.right.body))

    def _apply_delay(self, coercion, value, n):
        warped = self._warped(coercion, value, coercion.source)
        return WarpedV(coercion.target, self.truncate(warped.body, coercion.target(n)))


def truncate_env(evaluator: Evaluator, env: Env, n) -> Env:
    return Env.typed((name, evaluator.truncate(value, n), info) for name, value, info in env.entries())


_evaluator = Evaluator()


# =============================================================================
# PUBLIC API
# =============================================================================

def evaluate(term: Term, env: Env, n) -> Value:
    """
    Evaluate an explicit term at step n.

    Args:
        term: A well-typed explicit term
        env: Values for its free variables, all at step n
        n: Fuel, a natural number or OMEGA

    Returns:
        The n-step prefix of the term's value

    Raises:
        EvaluationError: only for ill-typed terms
    """
    return _evaluator.evaluate(term, env, n)


def truncate(value: Value, n) -> Value:
    return _evaluator.truncate(value, n)


def coerce_value(coercion: Coercion, value: Value, n) -> Value:
    return _evaluator.coerce(coercion, value, n)


def iterate(name: str, body: Term, env: Env, value: Value, m, n, annot: Optional[Type] = None) -> Value:
    return _evaluator.iterate(name, body, env, value, m, n, annot=annot)


# =============================================================================
# VALUE TYPING
# =============================================================================

def sample_term(ty: Type) -> Term:
    """A closed explicit term of the given type."""
    if isinstance(ty, Ground):
        return Scalar(0 if ty.name == 'Int' else False)
    if isinstance(ty, Stream):
        return Rec(SAMPLE_STREAM_NAME, ty, Cons(sample_term(ty.elem), Var(SAMPLE_STREAM_NAME)))
    if isinstance(ty, Arrow):
        return Fun(WRAPPED_ARGUMENT_NAME, ty.dom, sample_term(ty.cod))
    if isinstance(ty, Prod):
        return Pair(sample_term(ty.left), sample_term(ty.right))
    if isinstance(ty, Sum):
        return Inj(1, ty.right, sample_term(ty.left))
    if isinstance(ty, Warped):
        return By(sample_term(ty.body), ty.warp)
    raise TypeError(f"Not a type: {ty!r}")


def sample_value(ty: Type, n) -> Value:
    return evaluate(sample_term(ty), EMPTY_ENV, n)


def value_has_type(value: Value, ty: Type, n) -> bool:
    """
    Whether a value is an n-step prefix of type ty.

    Closures are checked by type-checking their body against the context
    rebuilt from their environment, whose values must also have their types.
    Thunks are checked by forcing them at a few finite steps, so a True
    answer for those is an approximation.
    """
    if isinstance(value, Stop):
        return n == 0
    if isinstance(value, Thunk):
        if n != OMEGA:
            return False
        return all(value_has_type(truncate(value, s), ty, s) for s in THUNK_SAMPLE_STEPS)

    if isinstance(ty, Ground):
        if not (isinstance(value, ScalarV) and n != OMEGA):
            return False
        return isinstance(value.value, bool) == (ty.name == 'Bool')
    if isinstance(ty, Stream):
        if not (isinstance(value, ConsV) and n != OMEGA):
            return False
        return value_has_type(value.head, ty.elem, n) and value_has_type(value.tail, ty, n - 1)
    if isinstance(ty, Arrow):
        if not isinstance(value, Closure) or value.annot != ty.dom:
            return False
        names = free_vars(value.body) - {value.param}
        ctx = env_context(value.env, names)
        if ctx is None:
            return False
        if not all(value_has_type(value.env.lookup(name), bound, n) for name, bound in ctx):
            return False
        return closure_type(value) == ty
    if isinstance(ty, Prod):
        return (isinstance(value, PairV) and value_has_type(value.left, ty.left, n)
                and value_has_type(value.right, ty.right, n))
    if isinstance(ty, Sum):
        if not isinstance(value, InjV):
            return False
        summand = ty.left if value.index == 1 else ty.right
        return value_has_type(value.body, summand, n)
    if isinstance(ty, Warped):
        return (isinstance(value, WarpedV) and value.warp == ty.warp
                and value_has_type(value.body, ty.body, ty.warp(n)))
    raise TypeError(f"Not a type: {ty!r}")


# =============================================================================
# PROGRAMS
# =============================================================================

def evaluate_program(
    definitions: List[Tuple[str, Type, Term]],
    steps,
    check_values: Optional[bool] = None,
) -> List[Tuple[str, Value]]:
    """
    Evaluate elaborated definitions in order at a common step.

    Args:
        definitions: (name, type, explicit term), as produced by elaborate_program
        steps: Fuel shared by every definition
        check_values: Assert value_has_type on each result; defaults to the
            WARPLANG CHECK_VALUES setting

    Returns:
        (name, value) per definition
    """
    if check_values is None:
        check_values = settings.WARPLANG['CHECK_VALUES']

    env = EMPTY_ENV
    results = []
    for name, ty, term in definitions:
        value = evaluate(term, env, steps)
        if check_values and not value_has_type(value, ty, steps):
            logger.error(f"Value of '{name}' at step {steps} does not have type {print_type(ty)}")
            raise EvaluationError(f"Value of '{name}' does not have type {print_type(ty)}", rule='eval')
        logger.debug(f"Evaluated {name} at step {steps}")
        env = env.extend(name, value, ty)
        results.append((name, value))
    return results
