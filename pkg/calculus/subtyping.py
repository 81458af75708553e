"""
Subtyping: type normalization, coercion synthesis and checking, type
division by a warp, and type suprema/infima.

A normal type puts exactly one warp above every type former other than
products. Two types are equivalent exactly when their normal forms are
equal, and τ1 <: τ2 holds exactly when coe(τ1, τ2) is defined.

Partial operations (precedence, coe, type_sup, type_inf) return None when
undefined; coercion_target and coercion_source raise CoercionMismatch.
"""
import logging
from typing import List, Optional, Tuple

from core.warps import (
    ID, OMEGA_WARP, Warp, warp_compose, warp_inf, warp_leq, warp_residual, warp_sup,
)

from .exceptions import CoercionMismatch
from .printer import print_coercion, print_type
from .syntax import (
    ID_COERCION, Arrow, Coercion, Concat, Decat, Delay, Dist, Fact, Ground, Id, Inflate,
    OnArrow, OnProd, OnStream, OnSum, OnWarp, Prod, Seq, Stream, Sum, Type, Unwrap, Warped,
    Wrap, flatten_seq, seq,
)

logger = logging.getLogger(__name__)


# =============================================================================
# NORMALIZATION
# =============================================================================

def normalize(ty: Type) -> Type:
    """
    Normal form of a type.

    Ground types get the constant warp (ω); streams, arrows and sums get
    the identity warp; products are normalized componentwise; a warp above
    a normal type is pushed through products and composed with the warp it
    meets.
    """
    if isinstance(ty, Ground):
        return Warped(OMEGA_WARP, ty)
    if isinstance(ty, Stream):
        return Warped(ID, Stream(normalize(ty.elem)))
    if isinstance(ty, Arrow):
        return Warped(ID, Arrow(normalize(ty.dom), normalize(ty.cod)))
    if isinstance(ty, Sum):
        return Warped(ID, Sum(normalize(ty.left), normalize(ty.right)))
    if isinstance(ty, Prod):
        return Prod(normalize(ty.left), normalize(ty.right))
    if isinstance(ty, Warped):
        return warp_normal(ty.warp, normalize(ty.body))
    raise TypeError(f"Not a type: {ty!r}")


def warp_normal(p: Warp, normal: Type) -> Type:
    """Normal form of W p τ given the normal form of τ."""
    if isinstance(normal, Prod):
        return Prod(warp_normal(p, normal.left), warp_normal(p, normal.right))
    return Warped(warp_compose(p, normal.warp), normal.body)


def is_normal(ty: Type) -> bool:
    if isinstance(ty, Prod):
        return is_normal(ty.left) and is_normal(ty.right)
    if not isinstance(ty, Warped):
        return False
    rump = ty.body
    if isinstance(rump, Ground):
        return True
    if isinstance(rump, Stream):
        return is_normal(rump.elem)
    if isinstance(rump, Arrow):
        return is_normal(rump.dom) and is_normal(rump.cod)
    if isinstance(rump, Sum):
        return is_normal(rump.left) and is_normal(rump.right)
    return False


def norm_coercions(ty: Type) -> Tuple[Coercion, Coercion]:
    """
    Coercions between a type and its normal form.

    Returns:
        (into, out) with into : τ <: normalize(τ) and out : normalize(τ) <: τ
    """
    if isinstance(ty, Ground):
        return Inflate(), Seq(Delay(OMEGA_WARP, ID), Unwrap())
    if isinstance(ty, Stream):
        into, out = norm_coercions(ty.elem)
        return Seq(OnStream(into), Wrap()), Seq(Unwrap(), OnStream(out))
    if isinstance(ty, Arrow):
        dom_in, dom_out = norm_coercions(ty.dom)
        cod_in, cod_out = norm_coercions(ty.cod)
        return Seq(OnArrow(dom_out, cod_in), Wrap()), Seq(Unwrap(), OnArrow(dom_in, cod_out))
    if isinstance(ty, Sum):
        left_in, left_out = norm_coercions(ty.left)
        right_in, right_out = norm_coercions(ty.right)
        return Seq(OnSum(left_in, right_in), Wrap()), Seq(Unwrap(), OnSum(left_out, right_out))
    if isinstance(ty, Prod):
        left_in, left_out = norm_coercions(ty.left)
        right_in, right_out = norm_coercions(ty.right)
        return OnProd(left_in, right_in), OnProd(left_out, right_out)
    if isinstance(ty, Warped):
        into, out = norm_coercions(ty.body)
        normal = normalize(ty.body)
        return (Seq(OnWarp(ty.warp, into), _warp_into(ty.warp, normal)),
                Seq(_warp_out(ty.warp, normal), OnWarp(ty.warp, out)))
    raise TypeError(f"Not a type: {ty!r}")


def _warp_into(p: Warp, normal: Type) -> Coercion:
    """W p N <: warp_normal(p, N)"""
    if isinstance(normal, Prod):
        return Seq(Dist(), OnProd(_warp_into(p, normal.left), _warp_into(p, normal.right)))
    return Concat(p, normal.warp)


def _warp_out(p: Warp, normal: Type) -> Coercion:
    """warp_normal(p, N) <: W p N"""
    if isinstance(normal, Prod):
        return Seq(OnProd(_warp_out(p, normal.left), _warp_out(p, normal.right)), Fact())
    return Decat(p, normal.warp)


# =============================================================================
# COERCION TYPING
# =============================================================================

def _mismatch(coercion: Coercion, ty: Type, expected: str) -> CoercionMismatch:
    return CoercionMismatch(
        f"Coercion {print_coercion(coercion)} expects {expected}, got {print_type(ty)}",
        coercion=coercion,
        actual=ty,
    )


def coercion_target(coercion: Coercion, ty: Type) -> Type:
    """
    The unique τ' with coercion : τ <: τ'.

    Raises:
        CoercionMismatch: when the coercion does not accept τ
    """
    c = coercion
    if isinstance(c, Id):
        return ty
    if isinstance(c, Seq):
        return coercion_target(c.second, coercion_target(c.first, ty))
    if isinstance(c, OnStream):
        if not isinstance(ty, Stream):
            raise _mismatch(c, ty, "a stream type")
        return Stream(coercion_target(c.inner, ty.elem))
    if isinstance(c, OnArrow):
        if not isinstance(ty, Arrow):
            raise _mismatch(c, ty, "a function type")
        return Arrow(coercion_source(c.dom, ty.dom), coercion_target(c.cod, ty.cod))
    if isinstance(c, OnProd):
        if not isinstance(ty, Prod):
            raise _mismatch(c, ty, "a product type")
        return Prod(coercion_target(c.left, ty.left), coercion_target(c.right, ty.right))
    if isinstance(c, OnSum):
        if not isinstance(ty, Sum):
            raise _mismatch(c, ty, "a sum type")
        return Sum(coercion_target(c.left, ty.left), coercion_target(c.right, ty.right))
    if isinstance(c, OnWarp):
        if not (isinstance(ty, Warped) and ty.warp == c.warp):
            raise _mismatch(c, ty, f"a type warped by {c.warp}")
        return Warped(c.warp, coercion_target(c.inner, ty.body))
    if isinstance(c, Wrap):
        return Warped(ID, ty)
    if isinstance(c, Unwrap):
        if not (isinstance(ty, Warped) and ty.warp == ID):
            raise _mismatch(c, ty, f"a type warped by {ID}")
        return ty.body
    if isinstance(c, Concat):
        if not (isinstance(ty, Warped) and ty.warp == c.outer
                and isinstance(ty.body, Warped) and ty.body.warp == c.inner):
            raise _mismatch(c, ty, f"W {c.outer} (W {c.inner} _)")
        return Warped(warp_compose(c.outer, c.inner), ty.body.body)
    if isinstance(c, Decat):
        if not (isinstance(ty, Warped) and ty.warp == warp_compose(c.outer, c.inner)):
            raise _mismatch(c, ty, f"a type warped by {warp_compose(c.outer, c.inner)}")
        return Warped(c.outer, Warped(c.inner, ty.body))
    if isinstance(c, Inflate):
        if not isinstance(ty, Ground):
            raise _mismatch(c, ty, "a ground type")
        return Warped(OMEGA_WARP, ty)
    if isinstance(c, Dist):
        if not (isinstance(ty, Warped) and isinstance(ty.body, Prod)):
            raise _mismatch(c, ty, "a warped product")
        return Prod(Warped(ty.warp, ty.body.left), Warped(ty.warp, ty.body.right))
    if isinstance(c, Fact):
        if not (isinstance(ty, Prod) and isinstance(ty.left, Warped) and isinstance(ty.right, Warped)
                and ty.left.warp == ty.right.warp):
            raise _mismatch(c, ty, "a product of types warped alike")
        return Warped(ty.left.warp, Prod(ty.left.body, ty.right.body))
    if isinstance(c, Delay):
        if not warp_leq(c.target, c.source):
            raise _mismatch(c, ty, f"a delay, but {c.target} is not below {c.source}")
        if not (isinstance(ty, Warped) and ty.warp == c.source):
            raise _mismatch(c, ty, f"a type warped by {c.source}")
        return Warped(c.target, ty.body)
    raise TypeError(f"Not a coercion: {c!r}")


def coercion_source(coercion: Coercion, ty: Type) -> Type:
    """The unique τ with coercion : τ <: τ' where τ' is the given type."""
    c = coercion
    if isinstance(c, Id):
        return ty
    if isinstance(c, Seq):
        return coercion_source(c.first, coercion_source(c.second, ty))
    if isinstance(c, OnStream):
        if not isinstance(ty, Stream):
            raise _mismatch(c, ty, "a stream type")
        return Stream(coercion_source(c.inner, ty.elem))
    if isinstance(c, OnArrow):
        if not isinstance(ty, Arrow):
            raise _mismatch(c, ty, "a function type")
        return Arrow(coercion_target(c.dom, ty.dom), coercion_source(c.cod, ty.cod))
    if isinstance(c, OnProd):
        if not isinstance(ty, Prod):
            raise _mismatch(c, ty, "a product type")
        return Prod(coercion_source(c.left, ty.left), coercion_source(c.right, ty.right))
    if isinstance(c, OnSum):
        if not isinstance(ty, Sum):
            raise _mismatch(c, ty, "a sum type")
        return Sum(coercion_source(c.left, ty.left), coercion_source(c.right, ty.right))
    if isinstance(c, OnWarp):
        if not (isinstance(ty, Warped) and ty.warp == c.warp):
            raise _mismatch(c, ty, f"a type warped by {c.warp}")
        return Warped(c.warp, coercion_source(c.inner, ty.body))
    if isinstance(c, Wrap):
        if not (isinstance(ty, Warped) and ty.warp == ID):
            raise _mismatch(c, ty, f"a type warped by {ID}")
        return ty.body
    if isinstance(c, Unwrap):
        return Warped(ID, ty)
    if isinstance(c, Concat):
        if not (isinstance(ty, Warped) and ty.warp == warp_compose(c.outer, c.inner)):
            raise _mismatch(c, ty, f"a type warped by {warp_compose(c.outer, c.inner)}")
        return Warped(c.outer, Warped(c.inner, ty.body))
    if isinstance(c, Decat):
        if not (isinstance(ty, Warped) and ty.warp == c.outer
                and isinstance(ty.body, Warped) and ty.body.warp == c.inner):
            raise _mismatch(c, ty, f"W {c.outer} (W {c.inner} _)")
        return Warped(warp_compose(c.outer, c.inner), ty.body.body)
    if isinstance(c, Inflate):
        if not (isinstance(ty, Warped) and ty.warp == OMEGA_WARP and isinstance(ty.body, Ground)):
            raise _mismatch(c, ty, "a ground type warped by (w)")
        return ty.body
    if isinstance(c, Dist):
        if not (isinstance(ty, Prod) and isinstance(ty.left, Warped) and isinstance(ty.right, Warped)
                and ty.left.warp == ty.right.warp):
            raise _mismatch(c, ty, "a product of types warped alike")
        return Warped(ty.left.warp, Prod(ty.left.body, ty.right.body))
    if isinstance(c, Fact):
        if not (isinstance(ty, Warped) and isinstance(ty.body, Prod)):
            raise _mismatch(c, ty, "a warped product")
        return Prod(Warped(ty.warp, ty.body.left), Warped(ty.warp, ty.body.right))
    if isinstance(c, Delay):
        if not warp_leq(c.target, c.source):
            raise _mismatch(c, ty, f"a delay, but {c.target} is not below {c.source}")
        if not (isinstance(ty, Warped) and ty.warp == c.target):
            raise _mismatch(c, ty, f"a type warped by {c.target}")
        return Warped(c.source, ty.body)
    raise TypeError(f"Not a coercion: {c!r}")


def delay(source: Warp, target: Warp) -> Coercion:
    """Checked Delay: only built when target <= source."""
    if not warp_leq(target, source):
        raise ValueError(f"Cannot delay from {source} to {target}")
    return Delay(source, target)


# =============================================================================
# PRECEDENCE AND COE
# =============================================================================

def precedence(source: Type, target: Type) -> Optional[Coercion]:
    """
    Coercion between two normal types, found by walking them in lockstep.

    Returns:
        The coercion, or None when the shapes differ or a warp is too slow
    """
    if isinstance(source, Prod) and isinstance(target, Prod):
        left = precedence(source.left, target.left)
        right = precedence(source.right, target.right)
        if left is None or right is None:
            return None
        return OnProd(left, right)
    if isinstance(source, Warped) and isinstance(target, Warped):
        if not warp_leq(target.warp, source.warp):
            return None
        rump = _rump_precedence(source.body, target.body)
        if rump is None:
            return None
        return Seq(delay(source.warp, target.warp), OnWarp(target.warp, rump))
    return None


def _rump_precedence(source: Type, target: Type) -> Optional[Coercion]:
    if isinstance(source, Ground) and isinstance(target, Ground):
        return ID_COERCION if source == target else None
    if isinstance(source, Stream) and isinstance(target, Stream):
        inner = precedence(source.elem, target.elem)
        return None if inner is None else OnStream(inner)
    if isinstance(source, Sum) and isinstance(target, Sum):
        left = precedence(source.left, target.left)
        right = precedence(source.right, target.right)
        if left is None or right is None:
            return None
        return OnSum(left, right)
    if isinstance(source, Arrow) and isinstance(target, Arrow):
        dom = precedence(target.dom, source.dom)
        cod = precedence(source.cod, target.cod)
        if dom is None or cod is None:
            return None
        return OnArrow(dom, cod)
    return None


def coe(source: Type, target: Type) -> Optional[Coercion]:
    """
    A coercion from source to target, or None when source is not a subtype.

    Normalizes both sides, relates the normal forms with precedence and
    returns the simplified composite.
    """
    if source == target:
        return ID_COERCION
    found = precedence(normalize(source), normalize(target))
    if found is None:
        logger.debug(f"No coercion from {print_type(source)} to {print_type(target)}")
        return None
    into, _ = norm_coercions(source)
    _, out = norm_coercions(target)
    return simplify(Seq(into, Seq(found, out)))


def is_subtype(source: Type, target: Type) -> bool:
    return coe(source, target) is not None


def equivalent(left: Type, right: Type) -> bool:
    return normalize(left) == normalize(right)


# =============================================================================
# SIMPLIFICATION
# =============================================================================

def simplify(coercion: Coercion) -> Coercion:
    """
    Peephole simplification preserving the source and target types.

    Identities are dropped, inverse pairs cancel, consecutive delays merge
    and consecutive structural coercions of the same shape are fused.
    """
    stack: List[Coercion] = []
    for part in flatten_seq(coercion):
        for piece in flatten_seq(_simplify_node(part)):
            _push(stack, piece)
    return seq(*stack)


def _simplify_node(c: Coercion) -> Coercion:
    if isinstance(c, Seq):
        return simplify(c)
    if isinstance(c, OnStream):
        inner = simplify(c.inner)
        return ID_COERCION if isinstance(inner, Id) else OnStream(inner)
    if isinstance(c, OnWarp):
        inner = simplify(c.inner)
        return ID_COERCION if isinstance(inner, Id) else OnWarp(c.warp, inner)
    if isinstance(c, (OnArrow, OnProd, OnSum)):
        first, second = (c.dom, c.cod) if isinstance(c, OnArrow) else (c.left, c.right)
        first, second = simplify(first), simplify(second)
        if isinstance(first, Id) and isinstance(second, Id):
            return ID_COERCION
        return type(c)(first, second)
    if isinstance(c, Delay) and c.source == c.target:
        return ID_COERCION
    return c


_INVERSE_PAIRS = [(Wrap, Unwrap), (Unwrap, Wrap), (Dist, Fact), (Fact, Dist)]


def _push(stack: List[Coercion], c: Coercion) -> None:
    if isinstance(c, Id):
        return
    if (isinstance(c, Unwrap) and len(stack) >= 2 and isinstance(stack[-2], Inflate)
            and stack[-1] == Delay(OMEGA_WARP, ID)):
        # inflate; delay{(w),(1)}; unwrap is the identity on ground types
        del stack[-2:]
        return
    if stack:
        combined = _combine(stack[-1], c)
        if combined is not None:
            stack.pop()
            for piece in flatten_seq(combined):
                _push(stack, piece)
            return
    stack.append(c)


def _combine(first: Coercion, second: Coercion) -> Optional[Coercion]:
    """Fuse two adjacent coercions, or None when no rule applies."""
    for a, b in _INVERSE_PAIRS:
        if isinstance(first, a) and isinstance(second, b):
            return ID_COERCION
    if (isinstance(first, Concat) and isinstance(second, Decat)) or \
            (isinstance(first, Decat) and isinstance(second, Concat)):
        if (first.outer, first.inner) == (second.outer, second.inner):
            return ID_COERCION
        return None
    if isinstance(first, Delay) and isinstance(second, Delay) and first.target == second.source:
        return _simplify_node(Delay(first.source, second.target))
    if isinstance(first, OnWarp) and isinstance(second, OnWarp) and first.warp == second.warp:
        return _simplify_node(OnWarp(first.warp, Seq(first.inner, second.inner)))
    if isinstance(first, OnStream) and isinstance(second, OnStream):
        return _simplify_node(OnStream(Seq(first.inner, second.inner)))
    if isinstance(first, OnProd) and isinstance(second, OnProd):
        return _simplify_node(OnProd(Seq(first.left, second.left), Seq(first.right, second.right)))
    if isinstance(first, OnSum) and isinstance(second, OnSum):
        return _simplify_node(OnSum(Seq(first.left, second.left), Seq(first.right, second.right)))
    if isinstance(first, OnArrow) and isinstance(second, OnArrow):
        return _simplify_node(OnArrow(Seq(second.dom, first.dom), Seq(first.cod, second.cod)))
    return None


# =============================================================================
# DIVISION AND BOUNDS
# =============================================================================

def type_div(ty: Type, p: Warp) -> Type:
    """
    τ \\ p, the best σ with τ <: W p σ.

    Products divide componentwise and W q τ divides to W (q \\ p) τ; other
    types are normalized first.
    """
    normal = normalize(ty)
    return _div_normal(normal, p)


def _div_normal(normal: Type, p: Warp) -> Type:
    if isinstance(normal, Prod):
        return Prod(_div_normal(normal.left, p), _div_normal(normal.right, p))
    return Warped(warp_residual(normal.warp, p), normal.body)


def type_sup(left: Type, right: Type) -> Optional[Type]:
    """Least common supertype (normal), or None when the shapes are incompatible."""
    return _bound(normalize(left), normalize(right), upper=True)


def type_inf(left: Type, right: Type) -> Optional[Type]:
    """Greatest common subtype (normal), or None when the shapes are incompatible."""
    return _bound(normalize(left), normalize(right), upper=False)


def _bound(left: Type, right: Type, upper: bool) -> Optional[Type]:
    if isinstance(left, Prod) and isinstance(right, Prod):
        first = _bound(left.left, right.left, upper)
        second = _bound(left.right, right.right, upper)
        if first is None or second is None:
            return None
        return Prod(first, second)
    if isinstance(left, Warped) and isinstance(right, Warped):
        rump = _rump_bound(left.body, right.body, upper)
        if rump is None:
            return None
        # a slower warp is a supertype
        warp = warp_inf(left.warp, right.warp) if upper else warp_sup(left.warp, right.warp)
        return Warped(warp, rump)
    return None


def _rump_bound(left: Type, right: Type, upper: bool) -> Optional[Type]:
    if isinstance(left, Ground) and isinstance(right, Ground):
        return left if left == right else None
    if isinstance(left, Stream) and isinstance(right, Stream):
        elem = _bound(left.elem, right.elem, upper)
        return None if elem is None else Stream(elem)
    if isinstance(left, Sum) and isinstance(right, Sum):
        first = _bound(left.left, right.left, upper)
        second = _bound(left.right, right.right, upper)
        if first is None or second is None:
            return None
        return Sum(first, second)
    if isinstance(left, Arrow) and isinstance(right, Arrow):
        dom = _bound(left.dom, right.dom, not upper)
        cod = _bound(left.cod, right.cod, upper)
        if dom is None or cod is None:
            return None
        return Arrow(dom, cod)
    return None
