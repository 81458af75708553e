"""
Pretty-printer for types, coercions and terms.

Output uses the concrete syntax accepted by calculus.parser and inserts only
the parentheses precedence requires, so printing then parsing gives back an
equal tree.
"""
from core.warps import Warp

from .constants import INFIX_PRIMITIVES
from .syntax import (
    App, Arrow, By, Case, CoeL, CoeR, Coercion, Concat, Cons, CtxCoercion, Decat, Delay, Dist,
    Fact, Fun, Ground, Head, Id, Inflate, Inj, OnArrow, OnProd, OnStream, OnSum, OnWarp, Pair,
    Prim, Prod, Proj, Rec, Scalar, Seq, Stream, Sum, Tail, Term, Type, Unwrap, Var, Warped, Wrap,
)

# Term precedence levels, loosest first
BINDER, CONS, EQUALITY, ADDITIVE, MULTIPLICATIVE, POSTFIX, APPLICATION, PREFIX, ATOM = range(9)

BINARY_LEVELS = {
    'eq': EQUALITY,
    'add': ADDITIVE,
    'sub': ADDITIVE,
    'mul': MULTIPLICATIVE,
}

PREFIX_KEYWORDS = {Head: 'head', Tail: 'tail'}


def print_warp(p: Warp) -> str:
    return str(p)


# =============================================================================
# TYPES
# =============================================================================

def print_type(ty: Type) -> str:
    return _type(ty, 0)


def _type(ty: Type, level: int) -> str:
    if isinstance(ty, Ground):
        return ty.name
    if isinstance(ty, Arrow):
        text, own = f"{_type(ty.dom, 1)} -> {_type(ty.cod, 0)}", 0
    elif isinstance(ty, Sum):
        text, own = f"{_type(ty.left, 1)} + {_type(ty.right, 2)}", 1
    elif isinstance(ty, Prod):
        text, own = f"{_type(ty.left, 2)} * {_type(ty.right, 3)}", 2
    elif isinstance(ty, Stream):
        text, own = f"Stream {_type(ty.elem, 4)}", 3
    elif isinstance(ty, Warped):
        text, own = f"W {ty.warp} {_type(ty.body, 4)}", 3
    else:
        raise TypeError(f"Not a type: {ty!r}")
    return f"({text})" if own < level else text


# =============================================================================
# COERCIONS
# =============================================================================

def print_coercion(coercion: Coercion) -> str:
    return _coercion(coercion, 0)


def _coercion(c: Coercion, level: int) -> str:
    if isinstance(c, Seq):
        text = f"{_coercion(c.first, 1)}; {_coercion(c.second, 0)}"
        return f"({text})" if level > 0 else text
    if isinstance(c, Id):
        return 'id'
    if isinstance(c, Wrap):
        return 'wrap'
    if isinstance(c, Unwrap):
        return 'unwrap'
    if isinstance(c, Inflate):
        return 'inflate'
    if isinstance(c, Dist):
        return 'dist'
    if isinstance(c, Fact):
        return 'fact'
    if isinstance(c, OnStream):
        return f"stream({_coercion(c.inner, 0)})"
    if isinstance(c, OnArrow):
        return f"arrow({_coercion(c.dom, 0)}, {_coercion(c.cod, 0)})"
    if isinstance(c, OnProd):
        return f"prod({_coercion(c.left, 0)}, {_coercion(c.right, 0)})"
    if isinstance(c, OnSum):
        return f"sum({_coercion(c.left, 0)}, {_coercion(c.right, 0)})"
    if isinstance(c, OnWarp):
        return f"warp{{{c.warp}}}({_coercion(c.inner, 0)})"
    if isinstance(c, Concat):
        return f"concat{{{c.outer},{c.inner}}}"
    if isinstance(c, Decat):
        return f"decat{{{c.outer},{c.inner}}}"
    if isinstance(c, Delay):
        return f"delay{{{c.source},{c.target}}}"
    raise TypeError(f"Not a coercion: {c!r}")


def print_ctx_coercion(coercions: CtxCoercion) -> str:
    inner = ', '.join(f"{name} := {_coercion(c, 0)}" for name, c in coercions)
    return f"[{inner}]"


# =============================================================================
# TERMS
# =============================================================================

def print_term(term: Term) -> str:
    return _term(term, BINDER)


def _wrap(text: str, own: int, level: int) -> str:
    return f"({text})" if own < level else text


def _term(t: Term, level: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Scalar):
        if isinstance(t.value, bool):
            return 'true' if t.value else 'false'
        return str(t.value)
    if isinstance(t, Pair):
        return f"({_term(t.left, BINDER)}, {_term(t.right, BINDER)})"

    if isinstance(t, App) and isinstance(t.fn, Fun):
        # sugar: let x : τ = t1 in t2
        fn = t.fn
        text = (f"let {fn.param} : {print_type(fn.annot)} = {_term(t.arg, BINDER)} "
                f"in {_term(fn.body, BINDER)}")
        return _wrap(text, BINDER, level)
    if isinstance(t, Fun):
        return _wrap(f"fun ({t.param} : {print_type(t.annot)}) -> {_term(t.body, BINDER)}", BINDER, level)
    if isinstance(t, Rec):
        return _wrap(f"rec ({t.name} : {print_type(t.annot)}) -> {_term(t.body, BINDER)}", BINDER, level)
    if isinstance(t, Case):
        text = (f"match {_term(t.scrutinee, BINDER)} with "
                f"{{ inl {t.left_name} -> {_term(t.left_branch, BINDER)} ; "
                f"inr {t.right_name} -> {_term(t.right_branch, BINDER)} }}")
        return _wrap(text, BINDER, level)
    if isinstance(t, CoeL):
        return _wrap(f"coe {print_ctx_coercion(t.coercions)} in {_term(t.body, BINDER)}", BINDER, level)

    if isinstance(t, Cons):
        return _wrap(f"{_term(t.head, EQUALITY)} :: {_term(t.tail, CONS)}", CONS, level)
    if isinstance(t, Prim) and t.op in INFIX_PRIMITIVES:
        own = BINARY_LEVELS[t.op]
        left_level = ADDITIVE if own == EQUALITY else own
        left, right = t.args
        text = f"{_term(left, left_level)} {INFIX_PRIMITIVES[t.op]} {_term(right, own + 1)}"
        return _wrap(text, own, level)
    if isinstance(t, By):
        return _wrap(f"{_term(t.body, POSTFIX)} by {t.warp}", POSTFIX, level)
    if isinstance(t, CoeR):
        return _wrap(f"{_term(t.body, POSTFIX)} :> {_coercion(t.coercion, 1)}", POSTFIX, level)
    if isinstance(t, App):
        return _wrap(f"{_term(t.fn, APPLICATION)} {_term(t.arg, ATOM)}", APPLICATION, level)

    if isinstance(t, Prim):
        # the only prefix primitive is `not`
        return _wrap(f"not {_term(t.args[0], ATOM)}", PREFIX, level)
    if isinstance(t, (Head, Tail)):
        return _wrap(f"{PREFIX_KEYWORDS[type(t)]} {_term(t.body, ATOM)}", PREFIX, level)
    if isinstance(t, Proj):
        keyword = 'fst' if t.index == 1 else 'snd'
        return _wrap(f"{keyword} {_term(t.body, ATOM)}", PREFIX, level)
    if isinstance(t, Inj):
        keyword = 'inl' if t.index == 1 else 'inr'
        return _wrap(f"{keyword} [{print_type(t.other)}] {_term(t.body, ATOM)}", PREFIX, level)
    raise TypeError(f"Not a term: {t!r}")
