"""
Runtime values and environments, and their text and JSON renderings.

A value always describes a prefix: the value of a term at step n carries
exactly n steps' worth of data. `Stop` is the empty prefix, `Thunk` a
suspended computation standing for the whole infinite object, and
`WarpedV` a value whose payload was computed at a warped step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Tuple, Union

from core.warps import Warp

from .constants import CLOSURE_TEXT, STOP_TEXT, THUNK_TEXT
from .syntax import Term, Type

# A binding's type: known, computed on demand, or unknown
TypeInfo = Union[Type, Callable[[], Optional[Type]], None]


class Value:
    """Base class of runtime values."""
    __slots__ = ()


@dataclass(frozen=True)
class Stop(Value):
    pass


@dataclass(frozen=True)
class ScalarV(Value):
    value: Union[int, bool]


@dataclass(frozen=True)
class ConsV(Value):
    head: Value
    tail: Value


@dataclass(frozen=True)
class Closure(Value):
    param: str
    body: Term
    env: 'Env'
    annot: Optional[Type] = None


@dataclass(frozen=True)
class PairV(Value):
    left: Value
    right: Value


@dataclass(frozen=True)
class InjV(Value):
    index: int
    body: Value


@dataclass(frozen=True)
class Thunk(Value):
    term: Term
    env: 'Env'


@dataclass(frozen=True)
class WarpedV(Value):
    warp: Warp
    body: Value


STOP = Stop()


@dataclass(frozen=True)
class Env:
    """
    Immutable environment; later bindings shadow earlier ones.

    `types` runs parallel to `bindings` and records the static type of each
    binding where the evaluator knows it. It only serves value typing and
    takes no part in equality.
    """
    bindings: Tuple[Tuple[str, Value], ...] = ()
    types: Tuple[TypeInfo, ...] = field(default=(), compare=False, repr=False)

    @classmethod
    def typed(cls, entries: Iterable[Tuple[str, Value, TypeInfo]]) -> 'Env':
        entries = tuple(entries)
        return cls(tuple((name, value) for name, value, _ in entries),
                   tuple(info for _, _, info in entries))

    def entries(self) -> Iterator[Tuple[str, Value, TypeInfo]]:
        for index, (name, value) in enumerate(self.bindings):
            yield name, value, self.types[index] if index < len(self.types) else None

    def lookup(self, name: str):
        for bound, value in self.bindings:
            if bound == name:
                return value
        return None

    def type_of(self, name: str) -> TypeInfo:
        for bound, _, info in self.entries():
            if bound == name:
                return info
        return None

    def extend(self, name: str, value: Value, ty: TypeInfo = None) -> 'Env':
        kept = tuple(entry for entry in self.entries() if entry[0] != name)
        return Env.typed(kept + ((name, value, ty),))

    def names(self):
        return [name for name, _ in self.bindings]

    def __iter__(self) -> Iterator[Tuple[str, Value]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)


EMPTY_ENV = Env()


# =============================================================================
# RENDERING
# =============================================================================

def render_value(value: Value) -> str:
    """
    Text form of a value: scalars bare, streams as `v1 :: v2 :: •`, warped
    values as `⌈p⌉(v)`.
    """
    if isinstance(value, Stop):
        return STOP_TEXT
    if isinstance(value, ScalarV):
        if isinstance(value.value, bool):
            return 'true' if value.value else 'false'
        return str(value.value)
    if isinstance(value, ConsV):
        head = render_value(value.head)
        if isinstance(value.head, ConsV):
            head = f"({head})"
        return f"{head} :: {render_value(value.tail)}"
    if isinstance(value, Closure):
        return CLOSURE_TEXT
    if isinstance(value, Thunk):
        return THUNK_TEXT
    if isinstance(value, PairV):
        return f"({render_value(value.left)}, {render_value(value.right)})"
    if isinstance(value, InjV):
        body = render_value(value.body)
        if isinstance(value.body, (ConsV, InjV)):
            body = f"({body})"
        return f"{'inl' if value.index == 1 else 'inr'} {body}"
    if isinstance(value, WarpedV):
        return f"⌈{value.warp}⌉({render_value(value.body)})"
    raise TypeError(f"Not a value: {value!r}")


def value_to_json(value: Value) -> Dict[str, Any]:
    """JSON-serializable tree; every node has a `kind`."""
    if isinstance(value, Stop):
        return {'kind': 'stop'}
    if isinstance(value, ScalarV):
        return {'kind': 'scalar', 'value': value.value}
    if isinstance(value, ConsV):
        return {'kind': 'cons', 'head': value_to_json(value.head), 'tail': value_to_json(value.tail)}
    if isinstance(value, Closure):
        return {'kind': 'closure', 'param': value.param}
    if isinstance(value, Thunk):
        return {'kind': 'thunk'}
    if isinstance(value, PairV):
        return {'kind': 'pair', 'left': value_to_json(value.left), 'right': value_to_json(value.right)}
    if isinstance(value, InjV):
        return {'kind': 'inj', 'index': value.index, 'body': value_to_json(value.body)}
    if isinstance(value, WarpedV):
        return {'kind': 'warped', 'warp': str(value.warp), 'body': value_to_json(value.body)}
    raise TypeError(f"Not a value: {value!r}")


def stream_elements(value: Value) -> list:
    """The elements of a cons-list prefix, looking through warp tags."""
    elements = []
    while True:
        if isinstance(value, WarpedV):
            value = value.body
        elif isinstance(value, ConsV):
            elements.append(value.head)
            value = value.tail
        else:
            return elements
