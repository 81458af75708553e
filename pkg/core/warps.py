"""
Time warps presented as running sums of ultimately periodic sequences.

A warp is written {u}(v): the finite prefix u followed by the period v,
repeated forever. Its value at n is the sum of the first n elements of that
sequence, and its value at ω is the supremum of those sums. Elements range
over the naturals extended with ω.

Every Warp is stored in canonical form, so two Warps denote the same function
exactly when they compare equal.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

OMEGA = math.inf

ExtNat = Union[int, float]


class WarpError(Exception):
    """Raised for malformed warp literals and warp expressions."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.message)


# =============================================================================
# EXTENDED NATURALS
# =============================================================================

def is_omega(value: ExtNat) -> bool:
    return value == OMEGA


def ext_sub(larger: ExtNat, smaller: ExtNat) -> ExtNat:
    """Difference of two running sums, with larger >= smaller."""
    if larger == OMEGA:
        return 0 if smaller == OMEGA else OMEGA
    return larger - smaller


def format_ext_nat(value: ExtNat) -> str:
    return 'w' if value == OMEGA else str(int(value))


def _check_element(element) -> ExtNat:
    if element == OMEGA:
        return OMEGA
    if isinstance(element, bool) or not isinstance(element, int) or element < 0:
        raise WarpError(f"Warp elements must be naturals or ω, got {element!r}")
    return element


# =============================================================================
# CANONICAL FORM
# =============================================================================

def canonical_form(prefix: Sequence[ExtNat], period: Sequence[ExtNat]) -> Tuple[tuple, tuple]:
    """
    Compute the canonical (prefix, period) pair of an ultimately periodic sequence.

    Everything after the first ω is irrelevant, so the sequence is cut there
    and continued with zeroes. Otherwise the period is shrunk to its smallest
    repeating block, then the prefix is folded into the period while its last
    element matches the period's last element.
    """
    prefix = tuple(_check_element(e) for e in prefix)
    period = tuple(_check_element(e) for e in period)
    if not period:
        raise WarpError("The period of a warp cannot be empty")

    unrolled = prefix + period
    if OMEGA in unrolled:
        cut = unrolled.index(OMEGA) + 1
        prefix, period = unrolled[:cut], (0,)
    else:
        size = len(period)
        for block in range(1, size + 1):
            if size % block == 0 and period == period[:block] * (size // block):
                period = period[:block]
                break

    while prefix and prefix[-1] == period[-1]:
        period = (prefix[-1],) + period[:-1]
        prefix = prefix[:-1]
    return prefix, period


@dataclass(frozen=True)
class Warp:
    """
    A time warp n ↦ sum of the first n elements of prefix·period^∞.

    Instances are immutable and always canonical. Call a warp to evaluate it:
    ``Warp((0,), (1,))(3) == 2``.
    """
    prefix: Tuple[ExtNat, ...]
    period: Tuple[ExtNat, ...]

    def __init__(self, prefix: Iterable[ExtNat] = (), period: Iterable[ExtNat] = (1,)):
        canonical_prefix, canonical_period = canonical_form(tuple(prefix), tuple(period))
        object.__setattr__(self, 'prefix', canonical_prefix)
        object.__setattr__(self, 'period', canonical_period)

    @classmethod
    def parse(cls, text: str) -> 'Warp':
        from core.expressions import parse_warp
        return parse_warp(text)

    def __call__(self, n: ExtNat) -> ExtNat:
        return warp_eval(self, n)

    def __str__(self) -> str:
        period = ' '.join(format_ext_nat(e) for e in self.period)
        if not self.prefix:
            return f"({period})"
        prefix = ' '.join(format_ext_nat(e) for e in self.prefix)
        return f"{{{prefix}}}({period})"

    def __repr__(self) -> str:
        return f"Warp({self})"

    def element(self, index: int) -> ExtNat:
        if index < len(self.prefix):
            return self.prefix[index]
        return self.period[(index - len(self.prefix)) % len(self.period)]

    @property
    def has_omega(self) -> bool:
        # canonical forms keep ω only as the last prefix element
        return bool(self.prefix) and self.prefix[-1] == OMEGA

    @property
    def total(self) -> ExtNat:
        """The value at ω."""
        if self.has_omega or sum(self.period) > 0:
            return OMEGA
        return sum(self.prefix)

    def rate(self, span: int) -> ExtNat:
        """Growth of the running sum over `span` steps once past the prefix."""
        if self.has_omega:
            return OMEGA
        return sum(self.period) * (span // len(self.period))


# =============================================================================
# OPERATIONS
# =============================================================================

def warp_canonicalize(p: Warp) -> Warp:
    return Warp(*canonical_form(p.prefix, p.period))


def warp_eval(p: Warp, n: ExtNat) -> ExtNat:
    """
    Evaluate p at n ∈ ω+1.

    Args:
        p: The warp
        n: A natural number or OMEGA

    Returns:
        The sum of the first n elements of p's sequence (its supremum at ω)
    """
    if n == OMEGA:
        return p.total
    if n < 0:
        raise WarpError(f"Cannot evaluate a warp at negative step {n}")
    n = int(n)
    if n <= len(p.prefix):
        return sum(p.prefix[:n])
    full, rest = divmod(n - len(p.prefix), len(p.period))
    total = sum(p.prefix) + sum(p.period[:rest])
    if full:
        total += full * sum(p.period)
    return total


def warp_equiv(p: Warp, q: Warp) -> bool:
    return p == q


def stabilization_point(p: Warp) -> Optional[int]:
    """A step m with p(m) = p(ω), or None when p(ω) = ω."""
    if p.total == OMEGA:
        return None
    return len(p.prefix)


def _from_sums(sums: List[ExtNat], start: int, span: int) -> Warp:
    """Build the warp whose running sums are `sums`, periodic from `start` with period `span`."""
    elements = [ext_sub(sums[i + 1], sums[i]) for i in range(start + span)]
    return Warp(elements[:start], elements[start:start + span])


def _emit(elements: Iterable[ExtNat], q: Warp, cursor: int, out: List[ExtNat]) -> Tuple[int, bool]:
    """Emit, for each element k, the sum of the next k elements of q."""
    for k in elements:
        if k == OMEGA:
            out.append(ext_sub(q.total, q(cursor)))
            return cursor, True
        out.append(ext_sub(q(cursor + k), q(cursor)))
        cursor += k
    return cursor, False


def warp_compose(p: Warp, q: Warp) -> Warp:
    """
    p ∗ q, the warp n ↦ q(p(n)).

    p is unfolded until the weight of its prefix covers q's prefix, and its
    period is repeated until its weight is a multiple of q's period length.
    Each element k of p then emits the sum of the next k elements of q.
    """
    prefix = list(p.prefix)
    period = list(p.period)
    weight = sum(period)

    if not p.has_omega and weight > 0:
        while sum(prefix) < len(q.prefix):
            prefix.extend(period)
        period = period * (math.lcm(weight, len(q.period)) // weight)

    emitted_prefix: List[ExtNat] = []
    cursor, stopped = _emit(prefix, q, 0, emitted_prefix)
    if stopped or weight == 0:
        return Warp(emitted_prefix, (0,))

    emitted_period: List[ExtNat] = []
    _emit(period, q, cursor, emitted_period)
    return Warp(emitted_prefix, emitted_period)


def warp_residual(q: Warp, p: Warp) -> Warp:
    """
    q \\ p, the largest r with r ∘ p <= q.

    r(n) = q(m) for the least m with p(m) >= n, and ω when no step of p
    reaches n. The running sums of r are materialized up to the point where
    they provably become periodic, then differenced.
    """
    if p.has_omega:
        start, span = p(len(p.prefix) - 1) + 1, 1
    elif sum(p.period) == 0:
        start, span = p.total + 1, 1
    else:
        weight = sum(p.period)
        repeats = len(q.period) // math.gcd(len(p.period), len(q.period))
        start = p(max(len(p.prefix), len(q.prefix))) + 1
        span = repeats * weight

    ceiling = p.total
    sums: List[ExtNat] = []
    m = 0
    for n in range(start + span + 1):
        if n > ceiling:
            sums.append(OMEGA)
            continue
        while p(m) < n:
            m += 1
        sums.append(q(m))
    return _from_sums(sums, start, span)


def warp_leq(p: Warp, q: Warp) -> bool:
    """
    Pointwise order p <= q.

    Running sums are compared on a window covering both prefixes and one
    common period; the period weights over that common period must also be
    ordered, otherwise the sums cross beyond the window.
    """
    span = math.lcm(len(p.period), len(q.period))
    if p.rate(span) > q.rate(span):
        return False
    window = max(len(p.prefix), len(q.prefix)) + span
    return all(p(n) <= q(n) for n in range(window + 1))


def _pointwise(p: Warp, q: Warp, pick) -> Warp:
    start = max(len(p.prefix), len(q.prefix))
    span = math.lcm(len(p.period), len(q.period))
    rate_p, rate_q = p.rate(span), q.rate(span)

    if rate_p != rate_q:
        # past some point one argument wins forever; find a full period where it does
        leader = p if pick(rate_p, rate_q) == rate_p else q
        while any(pick(p(n), q(n)) != leader(n) for n in range(start, start + span + 1)):
            start += span

    sums = [pick(p(n), q(n)) for n in range(start + span + 1)]
    return _from_sums(sums, start, span)


def warp_sup(p: Warp, q: Warp) -> Warp:
    """Least upper bound: running sums are the pointwise maximum."""
    return _pointwise(p, q, max)


def warp_inf(p: Warp, q: Warp) -> Warp:
    """Greatest lower bound: running sums are the pointwise minimum."""
    return _pointwise(p, q, min)


# =============================================================================
# CONSTANTS
# =============================================================================

ID = Warp((), (1,))
ZERO = Warp((), (0,))
LATER = Warp((0,), (1,))
OMEGA_WARP = Warp((), (OMEGA,))
SOONER = Warp((2,), (1,))
