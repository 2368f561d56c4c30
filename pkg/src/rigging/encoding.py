"""Canonical byte layout of hash references and twists.

A hash reference is an algorithm byte followed by a digest whose length the
algorithm byte fixes.  ``0x00`` is the null reference (no digest) and
``0x01`` is SHA-256 (32 bytes).  A twist is the concatenation of its three
references in the order prev, tether, rigging.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import EncodingError

ALGO_NULL = 0x00
ALGO_SHA256 = 0x01

DIGEST_SIZES = {ALGO_NULL: 0, ALGO_SHA256: 32}


@dataclass(frozen=True, order=True)
class HashRef:
    algo: int
    digest: bytes = b""

    def __post_init__(self):
        size = DIGEST_SIZES.get(self.algo)
        if size is None:
            raise EncodingError(f"unknown hash algorithm byte 0x{self.algo:02x}")
        if not isinstance(self.digest, bytes) or len(self.digest) != size:
            raise EncodingError(
                f"algorithm 0x{self.algo:02x} needs a {size}-byte digest, "
                f"got {len(self.digest)}"
            )

    @classmethod
    def of(cls, data: bytes) -> "HashRef":
        """SHA-256 reference to ``data``."""
        return cls(ALGO_SHA256, hashlib.sha256(data).digest())

    @classmethod
    def from_hex(cls, text: str) -> "HashRef":
        """Parse a 64-hex-digit SHA-256 digest, or the full 66-digit encoding."""
        try:
            raw = bytes.fromhex(text)
        except ValueError as exc:
            raise EncodingError(f"not hex: {text!r}") from exc
        if len(raw) == 32:
            return cls(ALGO_SHA256, raw)
        ref, end = decode_ref(raw, 0)
        if end != len(raw):
            raise EncodingError("trailing bytes after hash reference")
        return ref

    @property
    def is_null(self) -> bool:
        return self.algo == ALGO_NULL

    def encode(self) -> bytes:
        return bytes((self.algo,)) + self.digest

    def hex(self) -> str:
        return self.digest.hex() if self.digest else "null"

    def short(self) -> str:
        return self.digest.hex()[:10] if self.digest else "null"

    def __repr__(self) -> str:
        return f"HashRef({self.short()})"

    def __str__(self) -> str:
        return self.hex()


NULL = HashRef(ALGO_NULL)


def decode_ref(data: bytes, offset: int = 0) -> tuple[HashRef, int]:
    """Read one reference at ``offset``; return it and the offset after it."""
    if offset >= len(data):
        raise EncodingError("truncated: expected hash algorithm byte")
    algo = data[offset]
    size = DIGEST_SIZES.get(algo)
    if size is None:
        raise EncodingError(f"unknown hash algorithm byte 0x{algo:02x}")
    end = offset + 1 + size
    if end > len(data):
        raise EncodingError("truncated digest")
    return HashRef(algo, bytes(data[offset + 1:end])), end


@dataclass(frozen=True)
class Twist:
    prev: HashRef = NULL
    tether: HashRef = NULL
    rigging: HashRef = NULL

    @property
    def is_fast(self) -> bool:
        return not self.tether.is_null

    @property
    def is_loose(self) -> bool:
        return self.tether.is_null

    @property
    def is_origin(self) -> bool:
        return self.prev.is_null

    def encode(self) -> bytes:
        return encode_twist(self)

    @cached_property
    def ref(self) -> HashRef:
        return hash_twist(self)


def encode_twist(t: Twist) -> bytes:
    for field in (t.prev, t.tether, t.rigging):
        if not isinstance(field, HashRef):
            raise EncodingError(f"twist field is not a HashRef: {field!r}")
    return t.prev.encode() + t.tether.encode() + t.rigging.encode()


def decode_twist(data: bytes) -> Twist:
    prev, pos = decode_ref(data, 0)
    tether, pos = decode_ref(data, pos)
    rigging, pos = decode_ref(data, pos)
    if pos != len(data):
        raise EncodingError(f"{len(data) - pos} trailing bytes after twist")
    return Twist(prev, tether, rigging)


def read_twist(data: bytes, offset: int) -> tuple[Twist, int]:
    """Streaming variant of :func:`decode_twist` for container formats."""
    prev, pos = decode_ref(data, offset)
    tether, pos = decode_ref(data, pos)
    rigging, pos = decode_ref(data, pos)
    return Twist(prev, tether, rigging), pos


def hash_twist(t: Twist) -> HashRef:
    return HashRef.of(encode_twist(t))
