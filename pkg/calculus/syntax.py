"""
Abstract syntax of the warped stream calculus.

Types, coercions, terms and programs are immutable dataclass trees. Implicit
terms are the coercion-free fragment written by programmers; explicit terms
add CoeR (coerce the result) and CoeL (coerce the context) and are what the
elaborator produces and the checker and evaluator consume.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from core.warps import Warp


@dataclass(frozen=True)
class Span:
    line: int
    column: int


# =============================================================================
# TYPES
# =============================================================================

class Type:
    """Base class of types."""
    __slots__ = ()


@dataclass(frozen=True)
class Ground(Type):
    name: str  # 'Int' or 'Bool'


@dataclass(frozen=True)
class Stream(Type):
    elem: Type


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Sum(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Warped(Type):
    warp: Warp
    body: Type


INT = Ground('Int')
BOOL = Ground('Bool')


# =============================================================================
# COERCIONS
# =============================================================================

class Coercion:
    """Base class of coercions, the proof terms of subtyping."""
    __slots__ = ()


@dataclass(frozen=True)
class Id(Coercion):
    pass


@dataclass(frozen=True)
class Seq(Coercion):
    first: Coercion
    second: Coercion


@dataclass(frozen=True)
class OnStream(Coercion):
    inner: Coercion


@dataclass(frozen=True)
class OnArrow(Coercion):
    dom: Coercion  # contravariant
    cod: Coercion


@dataclass(frozen=True)
class OnProd(Coercion):
    left: Coercion
    right: Coercion


@dataclass(frozen=True)
class OnSum(Coercion):
    left: Coercion
    right: Coercion


@dataclass(frozen=True)
class OnWarp(Coercion):
    warp: Warp
    inner: Coercion


@dataclass(frozen=True)
class Wrap(Coercion):
    """τ <: W (1) τ"""


@dataclass(frozen=True)
class Unwrap(Coercion):
    """W (1) τ <: τ"""


@dataclass(frozen=True)
class Concat(Coercion):
    """W p (W q τ) <: W (p * q) τ"""
    outer: Warp
    inner: Warp


@dataclass(frozen=True)
class Decat(Coercion):
    """W (p * q) τ <: W p (W q τ)"""
    outer: Warp
    inner: Warp


@dataclass(frozen=True)
class Inflate(Coercion):
    """ν <: W (ω) ν for ground types ν"""


@dataclass(frozen=True)
class Dist(Coercion):
    """W p (τ1 × τ2) <: W p τ1 × W p τ2"""


@dataclass(frozen=True)
class Fact(Coercion):
    """W p τ1 × W p τ2 <: W p (τ1 × τ2)"""


@dataclass(frozen=True)
class Delay(Coercion):
    """W p τ <: W q τ, valid when q <= p."""
    source: Warp
    target: Warp


ID_COERCION = Id()


def seq(*coercions: Coercion) -> Coercion:
    """Right-nested sequence of coercions, dropping identities."""
    parts = [c for c in coercions if not isinstance(c, Id)]
    if not parts:
        return ID_COERCION
    result = parts[-1]
    for c in reversed(parts[:-1]):
        result = Seq(c, result)
    return result


def flatten_seq(coercion: Coercion) -> List[Coercion]:
    if isinstance(coercion, Seq):
        return flatten_seq(coercion.first) + flatten_seq(coercion.second)
    return [coercion]


@dataclass(frozen=True)
class CtxCoercion:
    """A finite map from variable names to coercions, in binding order."""
    bindings: Tuple[Tuple[str, Coercion], ...] = ()

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, Coercion]]) -> 'CtxCoercion':
        return cls(tuple(pairs))

    def names(self) -> List[str]:
        return [name for name, _ in self.bindings]

    def get(self, name: str) -> Optional[Coercion]:
        for bound, coercion in self.bindings:
            if bound == name:
                return coercion
        return None

    def __iter__(self) -> Iterator[Tuple[str, Coercion]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)


# =============================================================================
# TERMS
# =============================================================================

@dataclass(frozen=True)
class Term:
    """Base class of implicit and explicit terms."""
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Fun(Term):
    param: str
    annot: Type
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Proj(Term):
    index: int  # 1 or 2
    body: Term


@dataclass(frozen=True)
class Inj(Term):
    index: int  # 1 or 2
    other: Type  # the summand not inhabited by body
    body: Term


@dataclass(frozen=True)
class Case(Term):
    scrutinee: Term
    left_name: str
    left_branch: Term
    right_name: str
    right_branch: Term


@dataclass(frozen=True)
class Scalar(Term):
    value: Union[int, bool]

    @property
    def ground(self) -> Ground:
        return BOOL if isinstance(self.value, bool) else INT


@dataclass(frozen=True)
class Prim(Term):
    op: str
    args: Tuple[Term, ...]


@dataclass(frozen=True)
class Rec(Term):
    name: str
    annot: Type
    body: Term


@dataclass(frozen=True)
class By(Term):
    body: Term
    warp: Warp


@dataclass(frozen=True)
class Head(Term):
    body: Term


@dataclass(frozen=True)
class Tail(Term):
    body: Term


@dataclass(frozen=True)
class Cons(Term):
    head: Term
    tail: Term


@dataclass(frozen=True)
class CoeR(Term):
    body: Term
    coercion: Coercion


@dataclass(frozen=True)
class CoeL(Term):
    coercions: CtxCoercion
    body: Term


def let(name: str, annot: Type, bound: Term, body: Term, span: Optional[Span] = None) -> Term:
    """`let x : τ = t1 in t2` is sugar for `(fun (x : τ) -> t2) t1`."""
    return App(Fun(name, annot, body, span=span), bound, span=span)


def free_vars(term: Term) -> FrozenSet[str]:
    """Free variables of an implicit or explicit term."""
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, (Fun, Rec)):
        bound = term.param if isinstance(term, Fun) else term.name
        return free_vars(term.body) - {bound}
    if isinstance(term, Case):
        return (free_vars(term.scrutinee)
                | (free_vars(term.left_branch) - {term.left_name})
                | (free_vars(term.right_branch) - {term.right_name}))
    if isinstance(term, CoeL):
        # the coercion covers exactly the variables it names
        return free_vars(term.body) | frozenset(term.coercions.names())
    if isinstance(term, Scalar):
        return frozenset()
    result = frozenset()
    for child in children(term):
        result |= free_vars(child)
    return result


def children(term: Term) -> Tuple[Term, ...]:
    """Immediate subterms, in source order."""
    if isinstance(term, (Var, Scalar)):
        return ()
    if isinstance(term, (Fun, Rec, Proj, Inj, By, Head, Tail, CoeR, CoeL)):
        return (term.body,)
    if isinstance(term, App):
        return (term.fn, term.arg)
    if isinstance(term, (Pair,)):
        return (term.left, term.right)
    if isinstance(term, Cons):
        return (term.head, term.tail)
    if isinstance(term, Case):
        return (term.scrutinee, term.left_branch, term.right_branch)
    if isinstance(term, Prim):
        return term.args
    raise TypeError(f"Not a term: {term!r}")


def erase(term: Term) -> Term:
    """Drop every CoeR and CoeL node, leaving an implicit term."""
    if isinstance(term, CoeR):
        return erase(term.body)
    if isinstance(term, CoeL):
        return erase(term.body)
    if isinstance(term, (Var, Scalar)):
        return term
    if isinstance(term, Fun):
        return Fun(term.param, term.annot, erase(term.body), span=term.span)
    if isinstance(term, Rec):
        return Rec(term.name, term.annot, erase(term.body), span=term.span)
    if isinstance(term, App):
        return App(erase(term.fn), erase(term.arg), span=term.span)
    if isinstance(term, Pair):
        return Pair(erase(term.left), erase(term.right), span=term.span)
    if isinstance(term, Proj):
        return Proj(term.index, erase(term.body), span=term.span)
    if isinstance(term, Inj):
        return Inj(term.index, term.other, erase(term.body), span=term.span)
    if isinstance(term, Case):
        return Case(erase(term.scrutinee), term.left_name, erase(term.left_branch),
                    term.right_name, erase(term.right_branch), span=term.span)
    if isinstance(term, Prim):
        return Prim(term.op, tuple(erase(a) for a in term.args), span=term.span)
    if isinstance(term, By):
        return By(erase(term.body), term.warp, span=term.span)
    if isinstance(term, Head):
        return Head(erase(term.body), span=term.span)
    if isinstance(term, Tail):
        return Tail(erase(term.body), span=term.span)
    if isinstance(term, Cons):
        return Cons(erase(term.head), erase(term.tail), span=term.span)
    raise TypeError(f"Not a term: {term!r}")


def is_implicit(term: Term) -> bool:
    if isinstance(term, (CoeR, CoeL)):
        return False
    return all(is_implicit(child) for child in children(term))


# =============================================================================
# CONTEXTS
# =============================================================================

@dataclass(frozen=True)
class Context:
    """Ordered typing context; names are pairwise distinct."""
    bindings: Tuple[Tuple[str, Type], ...] = ()

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, Type]] = ()) -> 'Context':
        ctx = cls()
        for name, ty in pairs:
            ctx = ctx.extend(name, ty)
        return ctx

    def lookup(self, name: str) -> Optional[Type]:
        for bound, ty in self.bindings:
            if bound == name:
                return ty
        return None

    def extend(self, name: str, ty: Type) -> 'Context':
        """Bind name, shadowing any previous binding of it."""
        kept = tuple((n, t) for n, t in self.bindings if n != name)
        return Context(kept + ((name, ty),))

    def names(self) -> List[str]:
        return [name for name, _ in self.bindings]

    def as_dict(self) -> Dict[str, Type]:
        return dict(self.bindings)

    def __contains__(self, name: str) -> bool:
        return self.lookup(name) is not None

    def __iter__(self) -> Iterator[Tuple[str, Type]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)


# =============================================================================
# PROGRAMS
# =============================================================================

@dataclass(frozen=True)
class Definition:
    """`def x : τ = t`"""
    name: str
    annot: Type
    body: Term
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def names(self) -> List[str]:
        return [self.name]


@dataclass(frozen=True)
class RecGroup:
    """
    `rec def x1 : τ1 = t1 and ... and xk : τk = tk`

    Stored desugared: body is a single Rec named `name` over the right-nested
    product τ1 × (τ2 × ...), whose components are bound to x1 ... xk inside.
    """
    name: str
    members: Tuple[Tuple[str, Type], ...]
    body: Term
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @property
    def names(self) -> List[str]:
        return [member for member, _ in self.members]

    @property
    def annot(self) -> Type:
        return product_of([ty for _, ty in self.members])


TopLevel = Union[Definition, RecGroup]


@dataclass(frozen=True)
class Program:
    definitions: Tuple[TopLevel, ...] = ()

    def names(self) -> List[str]:
        return [name for d in self.definitions for name in d.names]


def product_of(types: List[Type]) -> Type:
    """Right-nested product τ1 × (τ2 × (... × τk))."""
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Prod(ty, result)
    return result


def component(term: Term, index: int, size: int, span: Optional[Span] = None) -> Term:
    """Projection of the index-th (0-based) component of a right-nested product of `size`."""
    for _ in range(index):
        term = Proj(2, term, span=span)
    if index < size - 1:
        term = Proj(1, term, span=span)
    return term
