"""Field configurations, cylinder sets and the finite event algebra.

A configuration on the first ``2n`` links is written as a bit-string whose
character ``a - 1`` is the field on ``l_a``.  Internally it is the integer
with bit ``a - 1`` set accordingly, so the four children of a configuration
at extent ``n`` differ from it by multiples of ``4**n``.

Events are finite unions of cylinder sets, held as a set of admitted
configurations at some extent.  Set operations return the canonical form,
at the time extent (the smallest extent at which membership is decided);
equality and hashing always compare canonical forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

# refinement beyond this would enumerate more than 4**12 cylinders
MAX_EXTENT = 12


class EventError(ValueError):
    pass


@dataclass(frozen=True)
class FieldConfig:
    bits: str

    def __post_init__(self):
        if len(self.bits) % 2 or set(self.bits) - {"0", "1"}:
            raise EventError(f"field configuration must be an even-length 0/1 string, got {self.bits!r}")

    @property
    def extent(self) -> int:
        return len(self.bits) // 2

    @property
    def index(self) -> int:
        return config_index(self.bits)

    @classmethod
    def from_index(cls, index: int, extent: int) -> "FieldConfig":
        return cls(config_bits(index, extent))


def config_index(bits: str) -> int:
    return sum(1 << a for a, ch in enumerate(bits) if ch == "1")


def config_bits(index: int, extent: int) -> str:
    return "".join("1" if index >> a & 1 else "0" for a in range(2 * extent))


def hamming(a: FieldConfig | str, b: FieldConfig | str) -> int:
    a = a.bits if isinstance(a, FieldConfig) else a
    b = b.bits if isinstance(b, FieldConfig) else b
    if len(a) != len(b):
        raise EventError(f"extent mismatch: {len(a) // 2} vs {len(b) // 2}")
    return sum(x != y for x, y in zip(a, b))


def _check_extent(m: int) -> None:
    if m < 0:
        raise EventError(f"negative extent {m}")
    if m > MAX_EXTENT:
        raise EventError(f"extent {m} exceeds the representable maximum {MAX_EXTENT}")


def _coarsen(extent: int, configs: frozenset[int]) -> tuple[int, frozenset[int]]:
    while extent > 0:
        block = 4 ** (extent - 1)
        parents: dict[int, int] = {}
        for c in configs:
            p = c % block
            parents[p] = parents.get(p, 0) + 1
        if any(count != 4 for count in parents.values()):
            break
        configs = frozenset(parents)
        extent -= 1
    if not configs:
        extent = 0
    return extent, configs


def _refined(extent: int, configs: Iterable[int], m: int) -> frozenset[int]:
    if m == extent:
        return frozenset(configs)
    base = 4 ** extent
    offsets = np.arange(4 ** (m - extent), dtype=np.int64) * base
    return frozenset(int(c + o) for c in configs for o in offsets)


class Event:
    """An element of the event algebra, as admitted configurations at ``extent``."""

    __slots__ = ("extent", "configs")

    def __init__(self, extent: int, configs: Iterable[int]):
        _check_extent(extent)
        configs = frozenset(int(c) for c in configs)
        if any(not 0 <= c < 4 ** extent for c in configs):
            raise EventError(f"configuration index out of range for extent {extent}")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "configs", configs)

    def __setattr__(self, name, value):
        raise AttributeError("Event is immutable")

    @classmethod
    def canonical_of(cls, extent: int, configs: Iterable[int]) -> "Event":
        return cls(*_coarsen(extent, frozenset(configs)))

    def canonical(self) -> "Event":
        return Event.canonical_of(self.extent, self.configs)

    @classmethod
    def omega(cls) -> "Event":
        return cls(0, [0])

    @classmethod
    def empty(cls) -> "Event":
        return cls(0, [])

    @classmethod
    def from_bits(cls, configs: Iterable[str], extent: int | None = None) -> "Event":
        configs = [FieldConfig(b) for b in configs]
        extents = {c.extent for c in configs}
        if extent is None:
            if len(extents) > 1:
                raise EventError(f"mixed extents {sorted(extents)}; pass an explicit extent")
            extent = extents.pop() if extents else 0
        out = frozenset()
        for c in configs:
            if c.extent > extent:
                raise EventError(f"configuration {c.bits!r} is longer than extent {extent}")
            out |= _refined(c.extent, [c.index], extent)
        return cls(extent, out)

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return a.extent == b.extent and a.configs == b.configs

    def __hash__(self):
        c = self.canonical()
        return hash((c.extent, c.configs))

    def __repr__(self):
        return f"Event({self.to_text()!r})"

    def __len__(self):
        return len(self.configs)

    @property
    def is_empty(self) -> bool:
        return not self.configs

    @property
    def time_extent(self) -> int:
        return self.canonical().extent

    def configs_at(self, m: int) -> np.ndarray:
        """Sorted config indices of the cylinders making up this event at extent ``m``."""
        if m < self.extent:
            raise EventError(f"cannot represent an extent-{self.extent} event at extent {m}")
        _check_extent(m)
        return np.array(sorted(_refined(self.extent, self.configs, m)), dtype=np.int64)

    def bits(self) -> list[str]:
        return [config_bits(c, self.extent) for c in sorted(self.configs)]

    def contains(self, history: str) -> bool:
        """Membership of a configuration given on at least the first ``2 * extent`` links."""
        if len(history) < 2 * self.extent:
            raise EventError(f"history too short to decide an extent-{self.extent} event")
        return config_index(history[: 2 * self.extent]) in self.configs

    # set algebra -----------------------------------------------------------

    def _pair(self, other: "Event") -> tuple[int, frozenset[int], frozenset[int]]:
        m = max(self.extent, other.extent)
        return (m, _refined(self.extent, self.configs, m),
                _refined(other.extent, other.configs, m))

    def union(self, other: "Event") -> "Event":
        m, a, b = self._pair(other)
        return Event.canonical_of(m, a | b)

    def intersect(self, other: "Event") -> "Event":
        m, a, b = self._pair(other)
        return Event.canonical_of(m, a & b)

    def difference(self, other: "Event") -> "Event":
        m, a, b = self._pair(other)
        return Event.canonical_of(m, a - b)

    def complement(self) -> "Event":
        m = self.extent
        return Event.canonical_of(m, frozenset(range(4 ** m)) - self.configs)

    def disjoint(self, other: "Event") -> bool:
        return self.intersect(other).is_empty

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __invert__ = complement

    # serialization ---------------------------------------------------------

    def to_text(self) -> str:
        """``"<extent>;<config>,<config>,..."``; the empty config is ``-``."""
        body = ",".join(b if b else "-" for b in self.bits())
        return f"{self.extent};{body}"

    @classmethod
    def from_text(cls, text: str) -> "Event":
        try:
            head, body = text.strip().split(";", 1)
            extent = int(head)
        except ValueError:
            raise EventError(f"malformed event text {text!r}") from None
        items = [s.strip() for s in body.split(",") if s.strip()]
        configs = ["" if s == "-" else s for s in items]
        return cls.from_bits(configs, extent)


def cylinder(config: FieldConfig | str) -> Event:
    if isinstance(config, str):
        config = FieldConfig(config)
    return Event(config.extent, [config.index])


def refine(event: Event, m: int) -> Event:
    """The same set of histories written with ``4**(m - n)`` cylinders per parent."""
    if m < event.extent:
        raise EventError(f"cannot refine an extent-{event.extent} event to {m}")
    _check_extent(m)
    return Event(m, _refined(event.extent, event.configs, m))


def union(a: Event, b: Event) -> Event:
    return a.union(b)


def intersect(a: Event, b: Event) -> Event:
    return a.intersect(b)


def complement(a: Event) -> Event:
    return a.complement()


def time_extent(event: Event) -> int:
    return event.canonical().extent


def field_value_event(a: int, value: int = 1) -> Event:
    """``{Phi : Phi(l_a) = value}``; with ``a = 2k`` this is the event E_k."""
    if a < 1:
        raise EventError("link labels start at 1")
    extent = (a + 1) // 2
    configs = [c for c in range(4 ** extent) if (c >> (a - 1) & 1) == value]
    return Event.canonical_of(extent, configs)


class JointEvent:
    """A finite union of cylinders ``Cyl(Phi^n, alpha^n)`` on a product history space.

    Stored as pairs of config indices at one extent (not coarsened; equality
    compares at the larger extent).
    """

    __slots__ = ("extent", "pairs")

    def __init__(self, extent: int, pairs: Iterable[tuple[int, int]]):
        _check_extent(extent)
        pairs = frozenset((int(p), int(q)) for p, q in pairs)
        if any(not (0 <= p < 4 ** extent and 0 <= q < 4 ** extent) for p, q in pairs):
            raise EventError(f"configuration index out of range for extent {extent}")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "pairs", pairs)

    def __setattr__(self, name, value):
        raise AttributeError("JointEvent is immutable")

    @classmethod
    def product(cls, first: Event, second: Event) -> "JointEvent":
        m = max(first.extent, second.extent)
        a, b = first.configs_at(m), second.configs_at(m)
        return cls(m, ((int(p), int(q)) for p in a for q in b))

    @classmethod
    def omega(cls) -> "JointEvent":
        return cls(0, [(0, 0)])

    def pairs_at(self, m: int) -> list[tuple[int, int]]:
        if m < self.extent:
            raise EventError(f"cannot represent an extent-{self.extent} event at extent {m}")
        _check_extent(m)
        if m == self.extent:
            return sorted(self.pairs)
        base = 4 ** self.extent
        offs = range(4 ** (m - self.extent))
        return sorted((p + i * base, q + j * base) for p, q in self.pairs for i in offs for j in offs)

    def _pair(self, other):
        m = max(self.extent, other.extent)
        return m, frozenset(self.pairs_at(m)), frozenset(other.pairs_at(m))

    def union(self, other: "JointEvent") -> "JointEvent":
        m, a, b = self._pair(other)
        return JointEvent(m, a | b)

    def intersect(self, other: "JointEvent") -> "JointEvent":
        m, a, b = self._pair(other)
        return JointEvent(m, a & b)

    def disjoint(self, other: "JointEvent") -> bool:
        return not self.intersect(other).pairs

    def __eq__(self, other):
        if not isinstance(other, JointEvent):
            return NotImplemented
        m, a, b = self._pair(other)
        return a == b

    def __hash__(self):
        # invariant under refinement: fraction of the product space covered
        return hash(len(self.pairs) / 16 ** self.extent)

    def __repr__(self):
        return f"JointEvent(extent={self.extent}, cylinders={len(self.pairs)})"


def as_joint(event) -> JointEvent:
    """Accept a JointEvent or a ``(first, second)`` pair of events."""
    if isinstance(event, JointEvent):
        return event
    first, second = event
    return JointEvent.product(first, second)
