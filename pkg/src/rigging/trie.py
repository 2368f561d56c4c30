"""Path-compressed binary Merkle trie keyed on hash digests.

Nodes:

* leaf    ``0x4C ‖ key ‖ value``
* branch  ``0x42 ‖ d ‖ prefix ‖ left ‖ right``

A branch splits its keys on bit ``d`` (0 = most significant bit of the
digest); every key below it shares the first ``d`` bits, stored as
``prefix`` in ``ceil(d / 8)`` bytes with the unused low bits zero.  A node's
identity is the SHA-256 of its encoding; the empty trie has the null root.

A proof lists the branches met while following a key from the root, each
as ``(d, prefix, sibling)``, and ends in a terminal: the leaf reached, the
branch whose prefix the key leaves (a divergence witness), or nothing for
the empty trie.  Verification is total and returns :class:`Bound`,
:class:`Absent` or :class:`Invalid`.

``key_bits`` below 256 gives a toy trie addressing only the top bits of each
key, small enough to enumerate exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .encoding import ALGO_SHA256, NULL, HashRef, decode_ref
from .errors import EncodingError, TrieError

LEAF_TAG = 0x4C
BRANCH_TAG = 0x42
EMPTY_TAG = 0x00

FULL_WIDTH = 256


def key_path(key: HashRef, key_bits: int = FULL_WIDTH) -> int:
    return int.from_bytes(key.digest, "big") >> (FULL_WIDTH - key_bits)


def key_bit(key: HashRef, d: int) -> int:
    return (key.digest[d >> 3] >> (7 - (d & 7))) & 1


def key_prefix(key: HashRef, d: int) -> bytes:
    """First ``d`` bits of ``key`` packed into ``ceil(d/8)`` bytes."""
    n = (d + 7) // 8
    raw = bytearray(key.digest[:n])
    if d % 8:
        raw[-1] &= (0xFF << (8 - d % 8)) & 0xFF
    return bytes(raw)


@dataclass(frozen=True)
class Leaf:
    key: HashRef
    value: HashRef

    def encode(self) -> bytes:
        return bytes((LEAF_TAG,)) + self.key.encode() + self.value.encode()


@dataclass(frozen=True)
class Branch:
    d: int
    prefix: bytes
    left: HashRef
    right: HashRef

    def encode(self) -> bytes:
        return (
            bytes((BRANCH_TAG, self.d))
            + self.prefix
            + self.left.encode()
            + self.right.encode()
        )


Node = Union[Leaf, Branch]


def node_hash(node: Node) -> HashRef:
    return HashRef.of(node.encode())


@dataclass(frozen=True)
class Step:
    d: int
    prefix: bytes
    sibling: HashRef


@dataclass(frozen=True)
class TrieProof:
    steps: tuple[Step, ...] = ()
    terminal: Node | None = None

    def encode(self) -> bytes:
        out = bytearray(len(self.steps).to_bytes(2, "big"))
        for s in self.steps:
            out.append(s.d)
            out += s.prefix
            out += s.sibling.encode()
        if self.terminal is None:
            out.append(EMPTY_TAG)
        else:
            out += self.terminal.encode()
        return bytes(out)


def _read_prefix(data: bytes, pos: int, d: int) -> tuple[bytes, int]:
    n = (d + 7) // 8
    if pos + n > len(data):
        raise EncodingError("truncated prefix")
    prefix = bytes(data[pos:pos + n])
    if d % 8 and prefix[-1] & (0xFF >> (d % 8)):
        raise EncodingError("non-zero padding bits in prefix")
    return prefix, pos + n


def read_proof(data: bytes, pos: int = 0) -> tuple[TrieProof, int]:
    if pos + 2 > len(data):
        raise EncodingError("truncated proof header")
    count = int.from_bytes(data[pos:pos + 2], "big")
    pos += 2
    steps = []
    for _ in range(count):
        if pos >= len(data):
            raise EncodingError("truncated proof step")
        d = data[pos]
        prefix, pos = _read_prefix(data, pos + 1, d)
        sibling, pos = decode_ref(data, pos)
        steps.append(Step(d, prefix, sibling))
    if pos >= len(data):
        raise EncodingError("truncated proof terminal")
    tag = data[pos]
    pos += 1
    terminal: Node | None
    if tag == EMPTY_TAG:
        terminal = None
    elif tag == LEAF_TAG:
        key, pos = decode_ref(data, pos)
        value, pos = decode_ref(data, pos)
        terminal = Leaf(key, value)
    elif tag == BRANCH_TAG:
        if pos >= len(data):
            raise EncodingError("truncated branch")
        d = data[pos]
        prefix, pos = _read_prefix(data, pos + 1, d)
        left, pos = decode_ref(data, pos)
        right, pos = decode_ref(data, pos)
        terminal = Branch(d, prefix, left, right)
    else:
        raise EncodingError(f"unknown proof terminal tag 0x{tag:02x}")
    return TrieProof(tuple(steps), terminal), pos


def decode_proof(data: bytes) -> TrieProof:
    proof, pos = read_proof(data, 0)
    if pos != len(data):
        raise EncodingError("trailing bytes after proof")
    return proof


@dataclass(frozen=True)
class Bound:
    value: HashRef


@dataclass(frozen=True)
class Absent:
    pass


@dataclass(frozen=True)
class Invalid:
    reason: str = ""


Verdict = Union[Bound, Absent, Invalid]


def _normalise(pairs) -> dict[HashRef, HashRef]:
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    out: dict[HashRef, HashRef] = {}
    for key, value in items:
        if key.is_null:
            raise TrieError("null key")
        if key in out and out[key] != value:
            raise TrieError(f"conflicting values for key {key!r}")
        out[key] = value
    return out


class RiggingTrie:
    """An immutable key/value trie that can prove the value bound to any key."""

    def __init__(
        self,
        pairs: Mapping[HashRef, HashRef] | Iterable[tuple[HashRef, HashRef]] = (),
        key_bits: int = FULL_WIDTH,
    ):
        if not 1 <= key_bits <= FULL_WIDTH:
            raise TrieError("key_bits must be in 1..256")
        self.key_bits = key_bits
        self.pairs = _normalise(pairs)
        self.nodes: dict[HashRef, Node] = {}
        paths: dict[int, HashRef] = {}
        for key in self.pairs:
            p = key_path(key, key_bits)
            if p in paths:
                raise TrieError(f"keys {paths[p]!r} and {key!r} share a {key_bits}-bit path")
            paths[p] = key
        ordered = sorted(self.pairs, key=lambda k: key_path(k, key_bits))
        self.root = self._build(ordered) if ordered else NULL

    def _build(self, keys: list[HashRef]) -> HashRef:
        if len(keys) == 1:
            node: Node = Leaf(keys[0], self.pairs[keys[0]])
        else:
            lo = key_path(keys[0], self.key_bits)
            hi = key_path(keys[-1], self.key_bits)
            d = self.key_bits - (lo ^ hi).bit_length()
            split = next(i for i, k in enumerate(keys) if key_bit(k, d))
            node = Branch(
                d,
                key_prefix(keys[0], d),
                self._build(keys[:split]),
                self._build(keys[split:]),
            )
        ref = node_hash(node)
        self.nodes[ref] = node
        return ref

    def __len__(self) -> int:
        return len(self.pairs)

    def get(self, key: HashRef) -> HashRef | None:
        return self.pairs.get(key)

    def prove(self, key: HashRef) -> TrieProof:
        if key.is_null:
            raise TrieError("null key")
        if self.root.is_null:
            return TrieProof()
        steps = []
        ref = self.root
        while True:
            node = self.nodes[ref]
            if isinstance(node, Leaf):
                return TrieProof(tuple(steps), node)
            if key_prefix(key, node.d) != node.prefix:
                return TrieProof(tuple(steps), node)
            if key_bit(key, node.d):
                steps.append(Step(node.d, node.prefix, node.left))
                ref = node.right
            else:
                steps.append(Step(node.d, node.prefix, node.right))
                ref = node.left


def trie_build(pairs, key_bits: int = FULL_WIDTH) -> HashRef:
    return RiggingTrie(pairs, key_bits).root


def trie_prove(pairs, key: HashRef, key_bits: int = FULL_WIDTH) -> TrieProof:
    return RiggingTrie(pairs, key_bits).prove(key)


def trie_verify(
    root: HashRef, key: HashRef, proof: TrieProof, key_bits: int = FULL_WIDTH
) -> Verdict:
    """Decide what ``root`` binds to ``key`` according to ``proof``.

    Never raises; anything that does not reconstruct ``root`` along the
    path ``key`` dictates is :class:`Invalid`.
    """
    try:
        return _verify(root, key, proof, key_bits)
    except (EncodingError, TypeError, AttributeError, IndexError, ValueError) as exc:
        return Invalid(f"malformed proof: {exc}")


def _verify(root: HashRef, key: HashRef, proof: TrieProof, key_bits: int) -> Verdict:
    if key.is_null or key.algo != ALGO_SHA256:
        return Invalid("key must be a non-null digest")
    if root.is_null:
        if proof.steps or proof.terminal is not None:
            return Invalid("empty trie admits only the empty proof")
        return Absent()
    if proof.terminal is None:
        return Invalid("empty terminal under a non-null root")

    last = -1
    for step in proof.steps:
        if not last < step.d < key_bits:
            return Invalid("branch bits must increase along the path")
        if step.prefix != key_prefix(key, step.d):
            return Invalid("path leaves the key's prefix")
        if step.sibling.algo != ALGO_SHA256:
            return Invalid("null sibling")
        last = step.d

    term = proof.terminal
    if isinstance(term, Leaf):
        if term.key.algo != ALGO_SHA256:
            return Invalid("leaf with null key")
        for step in proof.steps:
            if key_prefix(term.key, step.d) != step.prefix or key_bit(term.key, step.d) != key_bit(key, step.d):
                return Invalid("leaf is not on the key's path")
        verdict: Verdict = Bound(term.value) if term.key == key else Absent()
    elif isinstance(term, Branch):
        if not last < term.d < key_bits:
            return Invalid("divergence branch out of order")
        if term.left.algo != ALGO_SHA256 or term.right.algo != ALGO_SHA256:
            return Invalid("branch with null child")
        if len(term.prefix) != (term.d + 7) // 8:
            return Invalid("prefix length does not match branch bit")
        # the branch must sit on the path (agree with the key through the last
        # step's bit) and then disagree with the key somewhere after it
        upto = last + 1
        if key_prefix(_as_key(term.prefix, term.d), upto) != key_prefix(key, upto):
            return Invalid("divergence branch is not on the key's path")
        if term.prefix == key_prefix(key, term.d):
            return Invalid("key continues below this branch; proof stops early")
        verdict = Absent()
    else:
        return Invalid("unknown terminal")

    ref = node_hash(term)
    for step in reversed(proof.steps):
        if key_bit(key, step.d):
            ref = node_hash(Branch(step.d, step.prefix, step.sibling, ref))
        else:
            ref = node_hash(Branch(step.d, step.prefix, ref, step.sibling))
    if ref != root:
        return Invalid("proof does not reconstruct the root")
    return verdict


def _as_key(prefix: bytes, d: int) -> HashRef:
    return HashRef(ALGO_SHA256, prefix + bytes(32 - len(prefix)))
