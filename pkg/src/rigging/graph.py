"""Content-addressed twist storage and the relations between twists.

All queries take a store first.  A query that needs a twist the store does
not hold raises :class:`~rigging.errors.UnknownReference` rather than
answering ``False``.
"""

from __future__ import annotations

import threading
from collections.abc import Iterable, Iterator, Mapping, Sequence
from pathlib import Path

from .encoding import HashRef, Twist, decode_twist, encode_twist, hash_twist
from .errors import (
    EncodingError,
    LengthUndefined,
    NoFastPredecessor,
    NotAligned,
    RiggingError,
    UnknownReference,
)
from .trie import RiggingTrie

Line = tuple[HashRef, ...]

TWIST_SUFFIX = ".twist"


class TwistStore(Mapping):
    """Append-only map from ``hash_twist(t)`` to ``t``.

    A store may sit over a ``fallback`` store whose entries it can read but
    never writes.  It also keeps the rigging tries it was given, so that a
    prover can later produce inclusion and exclusion proofs against the roots
    stored in twists.  Reads are lock-free; writes are serialised.
    """

    def __init__(self, twists: Iterable[Twist] = (), fallback: "TwistStore | None" = None,
                 path: str | Path | None = None):
        self._twists: dict[HashRef, Twist] = {}
        self._tries: dict[HashRef, RiggingTrie] = {}
        self._lock = threading.Lock()
        self.fallback = fallback
        self.path = Path(path) if path is not None else None
        if self.path is not None:
            self.path.mkdir(parents=True, exist_ok=True)
        for t in twists:
            self.put(t)

    # Mapping protocol

    def __getitem__(self, ref: HashRef) -> Twist:
        t = self._twists.get(ref)
        if t is None and self.fallback is not None:
            return self.fallback[ref]
        if t is None:
            raise UnknownReference(ref)
        return t

    def __contains__(self, ref) -> bool:
        if ref in self._twists:
            return True
        return self.fallback is not None and ref in self.fallback

    def __iter__(self) -> Iterator[HashRef]:
        yield from self._twists
        if self.fallback is not None:
            for ref in self.fallback:
                if ref not in self._twists:
                    yield ref

    def __len__(self) -> int:
        if self.fallback is None:
            return len(self._twists)
        return sum(1 for _ in self)

    def get_twist(self, ref: HashRef) -> Twist:
        return self[ref]

    def put(self, t: Twist) -> HashRef:
        ref = hash_twist(t)
        if ref in self._twists:
            return ref
        with self._lock:
            if ref not in self._twists:
                self._twists[ref] = t
                if self.path is not None:
                    (self.path / (ref.hex() + TWIST_SUFFIX)).write_bytes(encode_twist(t))
        return ref

    def put_trie(self, pairs) -> HashRef:
        trie = pairs if isinstance(pairs, RiggingTrie) else RiggingTrie(pairs)
        if not trie.root.is_null:
            with self._lock:
                self._tries.setdefault(trie.root, trie)
        return trie.root

    def trie(self, root: HashRef) -> RiggingTrie:
        if root.is_null:
            return RiggingTrie()
        trie = self._tries.get(root)
        if trie is None and self.fallback is not None:
            return self.fallback.trie(root)
        if trie is None:
            raise UnknownReference(root, f"no trie contents for root {root}")
        return trie

    def overlay(self, twists: Iterable[Twist] = ()) -> "TwistStore":
        """A new store reading through to this one, holding ``twists`` on top."""
        return TwistStore(twists, fallback=self)

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for ref in self:
            (directory / (ref.hex() + TWIST_SUFFIX)).write_bytes(encode_twist(self[ref]))

    @classmethod
    def load(cls, directory: str | Path) -> "TwistStore":
        """Read every ``<hex>.twist`` file, checking each name against its content."""
        directory = Path(directory)
        store = cls()
        for file in sorted(directory.glob("*" + TWIST_SUFFIX)):
            t = decode_twist(file.read_bytes())
            ref = hash_twist(t)
            if ref.hex() != file.name[: -len(TWIST_SUFFIX)]:
                raise EncodingError(f"{file.name}: content hashes to {ref.hex()}")
            store.put(t)
        return store


def put(store: TwistStore, t: Twist) -> HashRef:
    return store.put(t)


def _ancestors(store: Mapping, x: HashRef) -> set[HashRef]:
    """Strict predecessors of ``x`` that the store can reach."""
    seen: set[HashRef] = set()
    cur = x
    while cur in store:
        prev = store[cur].prev
        if prev.is_null or prev in seen:
            break
        seen.add(prev)
        cur = prev
    return seen


def precedes(store: Mapping, x: HashRef, y: HashRef) -> bool:
    """``x ≺ y``: ``x`` is reached by following prev from ``y`` at least once.

    The walk from ``y`` stops early with ``False`` when it passes a known
    ancestor of ``x`` without meeting ``x``; predecessors form a tree, so
    ``x`` cannot lie further back.
    """
    if x == y:
        return False
    if y not in store:
        raise UnknownReference(y)
    below_x: set[HashRef] | None = None
    seen: set[HashRef] = set()
    cur = y
    while True:
        prev = store[cur].prev
        if prev == x:
            return True
        if prev.is_null:
            return False
        if prev in seen:
            raise RiggingError(f"prev cycle through {prev!r}")
        seen.add(prev)
        if below_x is None:
            below_x = _ancestors(store, x) if x in store else set()
        if prev in below_x:
            return False
        if prev not in store:
            raise UnknownReference(prev, f"cannot follow prev past {prev}")
        cur = prev


def precedes_or_equal(store: Mapping, x: HashRef, y: HashRef) -> bool:
    return x == y or precedes(store, x, y)


def aligned(store: Mapping, x: HashRef, y: HashRef) -> bool:
    """``x ≼ y`` or ``y ≼ x``; unknown only if neither direction can be settled."""
    if x == y:
        return True
    unknown: UnknownReference | None = None
    for a, b in ((x, y), (y, x)):
        try:
            if precedes(store, a, b):
                return True
        except UnknownReference as exc:
            unknown = exc
    if unknown is not None:
        raise unknown
    return False


def line_between(store: Mapping, a: HashRef, b: HashRef) -> Line:
    """The unique line ``[a, ..., b]``."""
    if a == b:
        if a not in store:
            raise UnknownReference(a)
        return (a,)
    if not precedes(store, a, b):
        raise NotAligned(f"{a!r} does not precede {b!r}")
    out = [b]
    cur = b
    while cur != a:
        cur = store[cur].prev
        out.append(cur)
    if a not in store:
        raise UnknownReference(a)
    out.reverse()
    return tuple(out)


def is_line(store: Mapping, line: Sequence[HashRef]) -> bool:
    if not line:
        return False
    for a, b in zip(line, line[1:]):
        if store[b].prev != a:
            return False
    return True


def fast_previous(store: Mapping, x: HashRef) -> HashRef:
    """The nearest strict predecessor of ``x`` that is fast."""
    seen = set()
    cur = store[x].prev
    while True:
        if cur.is_null:
            raise NoFastPredecessor(f"no fast twist precedes {x!r}")
        if cur in seen:
            raise RiggingError(f"prev cycle through {cur!r}")
        seen.add(cur)
        t = store[cur]
        if t.is_fast:
            return cur
        cur = t.prev


def fast_tether(store: Mapping, x: HashRef) -> HashRef:
    """The tether of ``x`` if fast, else the tether's fast previous."""
    t = store[x]
    if t.is_loose:
        raise ValueError(f"{x!r} is loose and has no tether")
    tether = t.tether
    if store[tether].is_fast:
        return tether
    return fast_previous(store, tether)


def fast_line_length(store: Mapping, line: Sequence[HashRef]) -> int:
    if not line:
        raise LengthUndefined("empty line")
    if store[line[0]].is_loose or store[line[-1]].is_loose:
        raise LengthUndefined("length is only defined on lines with fast endpoints")
    return sum(1 for ref in line if store[ref].is_fast) - 1


def enveloping_line(store: Mapping, lines: Iterable[Sequence[HashRef]]) -> Line | None:
    """The minimal line containing every twist of every given line, or ``None``."""
    lines = [tuple(line) for line in lines]
    if not lines or any(not line for line in lines):
        raise ValueError("enveloping_line needs non-empty lines")
    end = lines[0][-1]
    for line in lines[1:]:
        e = line[-1]
        if e == end or precedes(store, e, end):
            continue
        if precedes(store, end, e):
            end = e
        else:
            return None
    starts = {line[0] for line in lines}
    walk = [end]
    pending = set(starts) - {end}
    cur = end
    while pending:
        cur = store[cur].prev
        if cur.is_null:
            raise NotAligned("line starts are not predecessors of the envelope end")
        walk.append(cur)
        pending.discard(cur)
    walk.reverse()
    envelope = tuple(walk)
    members = set(envelope)
    for line in lines:
        if not set(line) <= members:
            raise NotAligned("input is not a line")
    return envelope
