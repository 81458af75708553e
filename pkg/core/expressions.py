"""
Parser for warp literals and warp arithmetic expressions.

Literals are written (e1 e2 ...) for a purely periodic sequence and
{u1 ...}(e1 ...) for prefix plus period, with w (or ω) standing for ω.
Expressions combine literals with * (composition), \\ (residual, dividend on
the left), sup, inf, <= and @ n (evaluation at a step); square brackets group.
"""
import logging
from typing import Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from .warps import (
    OMEGA, ExtNat, Warp, WarpError, format_ext_nat, warp_compose, warp_eval, warp_inf,
    warp_leq, warp_residual, warp_sup,
)

logger = logging.getLogger(__name__)

# Shared with the program grammar of the calculus app.
WARP_GRAMMAR = r'''
warp: "{" warp_prefix "}" "(" warp_period ")"      -> prefixed_warp
    | "(" warp_period ")"                          -> periodic_warp

warp_prefix: warp_element*
warp_period: warp_element+

warp_element: INT                                  -> finite_element
            | "w"                                  -> omega_element
            | "ω"                                  -> omega_element
'''

EXPRESSION_GRAMMAR = r'''
?query: lattice "<=" lattice                       -> leq
      | lattice "@" step                           -> at
      | lattice

?lattice: lattice "sup" product                    -> sup
        | lattice "inf" product                    -> inf
        | product

?product: product "*" primary                      -> compose
        | product "\\" primary                     -> residual
        | primary

?primary: warp
        | "[" lattice "]"

step: INT                                          -> finite_step
    | "w"                                          -> omega_step
    | "ω"                                          -> omega_step
''' + WARP_GRAMMAR + r'''
%import common.INT
%import common.WS
%ignore WS
'''


@v_args(inline=True)
class WarpBuilder(Transformer):
    """Turns warp literal parse trees into Warp values."""

    def prefixed_warp(self, prefix, period):
        return Warp(prefix, period)

    def periodic_warp(self, period):
        return Warp((), period)

    def warp_prefix(self, *elements):
        return tuple(elements)

    def warp_period(self, *elements):
        return tuple(elements)

    def finite_element(self, token):
        return int(token)

    def omega_element(self):
        return OMEGA


@v_args(inline=True)
class ExpressionEvaluator(WarpBuilder):
    """Evaluates a warp expression bottom-up."""

    def compose(self, p, q):
        return warp_compose(p, q)

    def residual(self, q, p):
        return warp_residual(q, p)

    def sup(self, p, q):
        return warp_sup(p, q)

    def inf(self, p, q):
        return warp_inf(p, q)

    def leq(self, p, q):
        return warp_leq(p, q)

    def at(self, p, n):
        return warp_eval(p, n)

    def finite_step(self, token):
        return int(token)

    def omega_step(self):
        return OMEGA


_parser = Lark(EXPRESSION_GRAMMAR, start=['query', 'warp'], parser='lalr')


def describe_syntax_error(error: UnexpectedInput) -> str:
    """One-line description of a lark syntax error."""
    if isinstance(error, UnexpectedEOF):
        return "unexpected end of input"
    if isinstance(error, UnexpectedToken):
        if error.token.type == '$END':
            return "unexpected end of input"
        return f"unexpected token {str(error.token)!r}"
    if isinstance(error, UnexpectedCharacters):
        return f"unexpected character {error.char!r}"
    return "syntax error"


def _parse(text: str, start: str):
    try:
        return _parser.parse(text, start=start)
    except UnexpectedInput as e:
        line = getattr(e, 'line', None)
        column = getattr(e, 'column', None)
        raise WarpError(describe_syntax_error(e), line, column) from e


def parse_warp(text: str) -> Warp:
    """Parse a single warp literal such as ``{0}(1)``."""
    return WarpBuilder().transform(_parse(text, 'warp'))


def evaluate_expression(text: str) -> Union[Warp, bool, ExtNat]:
    """
    Evaluate a warp expression.

    Returns:
        A canonical Warp, a boolean for ``<=`` queries, or an extended
        natural for ``@`` queries
    """
    result = ExpressionEvaluator().transform(_parse(text, 'query'))
    logger.debug(f"Warp expression {text!r} evaluated to {result}")
    return result


def format_result(result: Union[Warp, bool, ExtNat]) -> str:
    if isinstance(result, Warp):
        return str(result)
    if isinstance(result, bool):
        return 'true' if result else 'false'
    return format_ext_nat(result)
