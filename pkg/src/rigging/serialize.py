"""Binary encoding of certificates and the ``RIG1`` rig file.

Certificates refer to twists by their 33-byte hash reference; a resolver
turns references back into twists when decoding.  Counts are big-endian
``u16``.  The derivation tree is written in pre-order:

* ``0x01`` half-hitch leaf: half-hitch, cork prefix refs, cork suffix refs
* ``0x02`` splice: post inclusion proof, bridge refs, left, right
* ``0x03`` lash: bottom half-hitch, upper

A half-hitch is its topline refs, footline refs, hoist inclusion proof and
then one exclusion proof per interior topline twist (the count is implied).

A rig file is ``b"RIG1" ‖ version ‖ mode ‖ [twists] ‖ tree``.  Mode ``0x00``
is detached (twists come from a store); mode ``0x01`` embeds every twist the
tree references as ``u32`` count followed by encodings in hash order.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping

from .encoding import HashRef, Twist, decode_ref, encode_twist, read_twist
from .errors import EncodingError, UnknownReference
from .hitch import HalfHitchCert
from .rig import HalfHitchLeaf, LashNode, RigCert, SpliceNode
from .trie import read_proof

MAGIC = b"RIG1"
VERSION = 0x01
MODE_DETACHED = 0x00
MODE_EMBEDDED = 0x01

TAG_LEAF = 0x01
TAG_SPLICE = 0x02
TAG_LASH = 0x03

Resolver = Callable[[HashRef], Twist]


def _u16(n: int) -> bytes:
    if not 0 <= n < 1 << 16:
        raise EncodingError(f"count {n} does not fit in u16")
    return n.to_bytes(2, "big")


def _refs(twists) -> bytes:
    return _u16(len(twists)) + b"".join(t.ref.encode() for t in twists)


def encode_half_hitch(cert: HalfHitchCert) -> bytes:
    if len(cert.firstness_exclusions) != max(len(cert.topline) - 2, 0):
        raise EncodingError("exclusion count must match the topline interior")
    return b"".join(
        [
            _refs(cert.topline),
            _refs(cert.footline),
            cert.hoist_inclusion.encode(),
            *(p.encode() for p in cert.firstness_exclusions),
        ]
    )


def encode_rig(cert: RigCert) -> bytes:
    out = bytearray()
    _encode_node(cert, out)
    return bytes(out)


def _encode_node(node: RigCert, out: bytearray) -> None:
    if isinstance(node, HalfHitchLeaf):
        out.append(TAG_LEAF)
        out += encode_half_hitch(node.half)
        out += _refs(node.cork_prefix)
        out += _refs(node.cork_suffix)
    elif isinstance(node, SpliceNode):
        out.append(TAG_SPLICE)
        out += node.post_inclusion.encode()
        out += _refs(node.bridge)
        _encode_node(node.left, out)
        _encode_node(node.right, out)
    elif isinstance(node, LashNode):
        out.append(TAG_LASH)
        out += encode_half_hitch(node.bottom)
        _encode_node(node.upper, out)
    else:
        raise EncodingError(f"cannot encode {type(node).__name__}")


class _Reader:
    def __init__(self, data: bytes, resolve: Resolver, pos: int = 0):
        self.data = data
        self.pos = pos
        self.resolve = resolve
        self.seen: set[HashRef] = set()

    def byte(self) -> int:
        if self.pos >= len(self.data):
            raise EncodingError("truncated certificate")
        b = self.data[self.pos]
        self.pos += 1
        return b

    def u16(self) -> int:
        if self.pos + 2 > len(self.data):
            raise EncodingError("truncated count")
        n = int.from_bytes(self.data[self.pos:self.pos + 2], "big")
        self.pos += 2
        return n

    def twists(self) -> tuple[Twist, ...]:
        out = []
        for _ in range(self.u16()):
            ref, self.pos = decode_ref(self.data, self.pos)
            if ref.is_null:
                raise EncodingError("null twist reference")
            t = self.resolve(ref)
            if t.ref != ref:
                raise EncodingError(f"resolver returned a twist that does not hash to {ref}")
            self.seen.add(ref)
            out.append(t)
        return tuple(out)

    def proof(self):
        proof, self.pos = read_proof(self.data, self.pos)
        return proof

    def half(self) -> HalfHitchCert:
        top = self.twists()
        foot = self.twists()
        if len(top) < 2:
            raise EncodingError("topline needs at least two twists")
        hoist = self.proof()
        exclusions = tuple(self.proof() for _ in range(len(top) - 2))
        return HalfHitchCert(top, foot, hoist, exclusions)

    def node(self, depth: int = 0) -> RigCert:
        if depth > 4096:
            raise EncodingError("derivation too deep")
        tag = self.byte()
        if tag == TAG_LEAF:
            half = self.half()
            return HalfHitchLeaf(half, self.twists(), self.twists())
        if tag == TAG_SPLICE:
            proof = self.proof()
            bridge = self.twists()
            left = self.node(depth + 1)
            right = self.node(depth + 1)
            return SpliceNode(left, right, proof, bridge)
        if tag == TAG_LASH:
            bottom = self.half()
            return LashNode(bottom, self.node(depth + 1))
        raise EncodingError(f"unknown node tag 0x{tag:02x}")


def _store_resolver(store: Mapping) -> Resolver:
    def resolve(ref: HashRef) -> Twist:
        return store[ref]
    return resolve


def decode_rig(data: bytes, resolve: Resolver | Mapping) -> RigCert:
    if isinstance(resolve, Mapping):
        resolve = _store_resolver(resolve)
    reader = _Reader(data, resolve)
    cert = reader.node()
    if reader.pos != len(data):
        raise EncodingError("trailing bytes after certificate")
    return cert


def encode_rig_file(cert: RigCert, embed: bool = False) -> bytes:
    out = bytearray(MAGIC)
    out.append(VERSION)
    if embed:
        out.append(MODE_EMBEDDED)
        twists = sorted(cert.twists.values(), key=lambda t: t.ref.digest)
        out += len(twists).to_bytes(4, "big")
        for t in twists:
            out += encode_twist(t)
    else:
        out.append(MODE_DETACHED)
    out += encode_rig(cert)
    return bytes(out)


def decode_rig_file(data: bytes, store: Mapping | None = None) -> RigCert:
    """Decode a rig file; detached files resolve their twists through ``store``.

    Raises :class:`EncodingError` on any deviation from the canonical
    layout and :class:`UnknownReference` when a referenced twist is missing.
    """
    if data[:4] != MAGIC:
        raise EncodingError("not a rig file (bad magic)")
    if len(data) < 6:
        raise EncodingError("truncated rig file header")
    if data[4] != VERSION:
        raise EncodingError(f"unsupported rig file version {data[4]}")
    mode = data[5]
    pos = 6
    if mode == MODE_DETACHED:
        if store is None:
            raise UnknownReference(None, "detached rig file needs a twist store")
        return decode_rig(data[pos:], store)
    if mode != MODE_EMBEDDED:
        raise EncodingError(f"unknown rig file mode 0x{mode:02x}")
    if pos + 4 > len(data):
        raise EncodingError("truncated twist count")
    count = int.from_bytes(data[pos:pos + 4], "big")
    pos += 4
    embedded: dict[HashRef, Twist] = {}
    last = None
    for _ in range(count):
        t, pos = read_twist(data, pos)
        ref = t.ref
        if last is not None and ref.digest <= last:
            raise EncodingError("embedded twists must be in strictly increasing hash order")
        last = ref.digest
        embedded[ref] = t

    def resolve(ref: HashRef) -> Twist:
        try:
            return embedded[ref]
        except KeyError:
            raise UnknownReference(ref) from None

    reader = _Reader(data, resolve, pos)
    cert = reader.node()
    if reader.pos != len(data):
        raise EncodingError("trailing bytes after certificate")
    if reader.seen != embedded.keys():
        raise EncodingError("embedded twists not referenced by the certificate")
    return cert
