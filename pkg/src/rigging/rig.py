"""Rig certificates for the half-hitch guild and its splice/lash closure.

A certificate is the derivation tree of the rig:

* :class:`HalfHitchLeaf` -- a single half-hitch whose topline sits inside
  the corkline (optionally extended by fill twists on either side);
* :class:`SpliceNode` -- a length-1 rig spliced on the past side of another
  rig, with the proof that the junction's post binds the left lead to the
  left hoist, plus any corkline twists needed to bridge the two corklines;
* :class:`LashNode` -- a half-hitch whose topline lies on the leadline of
  an upper rig, taking over that rig's corkline.

Every twist needed to check the tree travels inside it, so
:func:`verify_rig` runs without a store.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property

from .causal import (
    Chain,
    HoldsFastWitness,
    Link,
    LinkKind,
    holds_fast_check,
    prev_chain_refs,
)
from .encoding import HashRef, Twist
from .errors import (
    ConstructionError,
    NoFastPredecessor,
    NotAligned,
    Reason,
    Rejected,
    RiggingError,
    UnknownReference,
)
from .graph import (
    Line,
    TwistStore,
    enveloping_line,
    fast_line_length,
    fast_previous,
    fast_tether,
    line_between,
    precedes,
)
from .hitch import HalfHitchCert, HitchCert, assemble_half_hitch, verify_half_hitch, verify_hitch
from .trie import TrieProof

GUILD_HALF_HITCH = "GH"
GUILD_UP = "GUp"


class RigCert:
    """Common behaviour of the three derivation node kinds."""

    @cached_property
    def twists(self) -> dict[HashRef, Twist]:
        out: dict[HashRef, Twist] = {}
        for t in self._own_twists():
            out.setdefault(t.ref, t)
        for child in self._children():
            for ref, t in child.twists.items():
                out.setdefault(ref, t)
        return out

    @cached_property
    def local_store(self) -> TwistStore:
        return TwistStore(self.twists.values())

    @cached_property
    def leadline(self) -> Line:
        raise NotImplementedError

    @cached_property
    def corkline(self) -> Line:
        raise NotImplementedError

    @property
    def first_half(self) -> HalfHitchCert:
        raise NotImplementedError

    def halves(self) -> list[HalfHitchCert]:
        raise NotImplementedError

    def _own_twists(self) -> tuple[Twist, ...]:
        return ()

    def _children(self) -> tuple["RigCert", ...]:
        return ()


@dataclass(frozen=True, eq=True)
class HalfHitchLeaf(RigCert):
    half: HalfHitchCert
    cork_prefix: tuple[Twist, ...] = ()
    cork_suffix: tuple[Twist, ...] = ()

    def _own_twists(self):
        return self.cork_prefix + self.half.twists + self.cork_suffix

    @cached_property
    def leadline(self) -> Line:
        return self.half.footline_refs

    @cached_property
    def corkline(self) -> Line:
        return (
            tuple(t.ref for t in self.cork_prefix)
            + self.half.topline_refs
            + tuple(t.ref for t in self.cork_suffix)
        )

    @property
    def first_half(self) -> HalfHitchCert:
        return self.half

    def halves(self):
        return [self.half]


@dataclass(frozen=True, eq=True)
class SpliceNode(RigCert):
    left: RigCert
    right: RigCert
    post_inclusion: TrieProof
    bridge: tuple[Twist, ...] = ()

    def _own_twists(self):
        return self.bridge

    def _children(self):
        return (self.left, self.right)

    @cached_property
    def leadline(self) -> Line:
        return self.left.leadline + self.right.leadline[1:]

    @cached_property
    def corkline(self) -> Line:
        env = enveloping_line(self.local_store, [self.left.corkline, self.right.corkline])
        if env is None:
            raise NotAligned("corklines of the spliced rigs are not aligned")
        return env

    @property
    def first_half(self) -> HalfHitchCert:
        return self.left.first_half

    @property
    def hitch(self) -> HitchCert:
        """The hitch that adds the right rig's first meet as post of the left half-hitch."""
        return HitchCert(
            self.left.first_half, self.right.first_half.footline[1:], self.post_inclusion
        )

    def halves(self):
        return self.left.halves() + self.right.halves()


@dataclass(frozen=True, eq=True)
class LashNode(RigCert):
    bottom: HalfHitchCert
    upper: RigCert

    def _own_twists(self):
        return self.bottom.twists

    def _children(self):
        return (self.upper,)

    @cached_property
    def leadline(self) -> Line:
        return self.bottom.footline_refs

    @cached_property
    def corkline(self) -> Line:
        return self.upper.corkline

    @property
    def first_half(self) -> HalfHitchCert:
        return self.bottom

    def halves(self):
        return [self.bottom] + self.upper.halves()


# construction


def half_hitch_rig(
    store: TwistStore,
    fastener: HashRef,
    lead: HashRef,
    meet: HashRef,
    hoist: HashRef,
    cork_start: HashRef | None = None,
    cork_end: HashRef | None = None,
) -> HalfHitchLeaf:
    """A G_H rig for the half-hitch, its corkline spanning ``[cork_start, cork_end]``.

    By default the corkline is the topline, reaching back to the fast
    previous of the fastener when the fastener is loose so that the rig's
    height is defined.
    """
    half = assemble_half_hitch(store, fastener, lead, meet, hoist)
    if cork_start is None:
        cork_start = fastener
        if store[fastener].is_loose:
            try:
                cork_start = fast_previous(store, fastener)
            except (NoFastPredecessor, UnknownReference):
                pass
    prefix = line_between(store, cork_start, fastener)[:-1]
    suffix = line_between(store, hoist, cork_end)[1:] if cork_end is not None else ()
    return HalfHitchLeaf(
        half,
        tuple(store[r] for r in prefix),
        tuple(store[r] for r in suffix),
    )


def spliceable(r0: RigCert, r1: RigCert, store: TwistStore) -> bool:
    """Whether ``(r0, r1)`` is a spliceable pair; ``store`` supplies the post's trie."""
    try:
        splice(r0, r1, store)
    except UnknownReference:
        raise
    except (Rejected, RiggingError):
        return False
    return True


def splice(r0: RigCert, r1: RigCert, store: TwistStore) -> SpliceNode:
    if not r0.leadline or not r1.leadline or r0.leadline[-1] != r1.leadline[0]:
        raise ConstructionError(Reason.NOT_SPLICEABLE, "leadlines do not meet")
    h0, h1 = r0.first_half, r1.first_half
    post = store[h1.meet] if h1.meet in store else h1.footline[-1]
    try:
        proof = store.trie(post.rigging).prove(h0.lead)
    except UnknownReference:
        raise ConstructionError(Reason.POST_INCLUSION_FAILED, "post trie unavailable") from None
    view = store.overlay(list(r0.twists.values()) + list(r1.twists.values()))
    env = enveloping_line(view, [r0.corkline, r1.corkline])
    if env is None:
        raise ConstructionError(Reason.CORKLINES_MISALIGNED)
    known = r0.twists.keys() | r1.twists.keys()
    bridge = tuple(view[ref] for ref in env if ref not in known)
    node = SpliceNode(r0, r1, proof, bridge)
    try:
        _check_splice(node)
    except Rejected as exc:
        raise ConstructionError(exc.reason, exc.detail) from None
    return node


def lashable(h0: RigCert, r1: RigCert) -> bool:
    try:
        lash(h0, r1)
    except Rejected:
        return False
    return True


def lash(h0: RigCert, r1: RigCert) -> LashNode:
    if not isinstance(h0, HalfHitchLeaf):
        raise ConstructionError(Reason.NOT_LASHABLE, "only a single half-hitch can be lashed")
    if not _is_subline(h0.corkline, r1.leadline):
        raise ConstructionError(Reason.NOT_LASHABLE, "bottom corkline is not inside the upper leadline")
    node = LashNode(h0.half, r1)
    try:
        _check_lash(node)
    except Rejected as exc:
        raise ConstructionError(exc.reason, exc.detail) from None
    return node


def _is_subline(inner, outer) -> bool:
    if not inner:
        return False
    try:
        i = outer.index(inner[0])
    except ValueError:
        return False
    return tuple(outer[i:i + len(inner)]) == tuple(inner)


# measurements


def rig_length(r: RigCert) -> int:
    return fast_line_length(r.local_store, r.leadline)


def _view(r: RigCert, store: Mapping | None) -> Mapping:
    if store is None:
        return r.local_store
    if isinstance(store, TwistStore):
        return store.overlay(r.twists.values())
    return store


def rig_height(r: RigCert, store: Mapping | None = None) -> int:
    """Least ``n`` with the n-th fast tether of the leadline's first twist on the corkline."""
    view = _view(r, store)
    cork = set(r.corkline)
    x = r.leadline[0]
    n = 0
    limit = len(r.twists) + 1 if store is None else len(view) + 1
    while x not in cork:
        x = fast_tether(view, x)
        n += 1
        if n > limit:
            raise RiggingError("fast tether iteration does not reach the corkline")
    return n


def tetherline(r: RigCert, store: Mapping | None = None) -> frozenset[HashRef]:
    """Twists connecting the leadline's first twist to the corkline through tethers."""
    view = _view(r, store)
    cork = set(r.corkline)
    x = r.leadline[0]
    members = {x}
    limit = len(view) + 1
    while x not in cork:
        tether = view[x].tether
        ft = fast_tether(view, x)
        members.update(line_between(view, ft, tether))
        x = ft
        limit -= 1
        if limit < 0:
            raise RiggingError("tetherline does not reach the corkline")
    return frozenset(members)


def tetherline_height(r: RigCert, members, store: Mapping | None = None) -> int:
    """Number of tether hops recorded in a tetherline: its fast twists off the corkline."""
    view = _view(r, store)
    cork = set(r.corkline)
    return sum(1 for ref in members if ref not in cork and view[ref].is_fast)


# holds-fast witnesses


def holds_fast_witness(r: RigCert) -> HoldsFastWitness:
    store = r.local_store
    return HoldsFastWitness(
        ascent=_ascent(r, store),
        span=prev_chain_refs(store, r.leadline),
        descent=_descent(r, store),
    )


def _upto(line: Line, ref: HashRef) -> Line:
    return line[: line.index(ref) + 1]


def _from(line: Line, ref: HashRef) -> Line:
    return line[line.index(ref):]


def _ascent(r: RigCert, store) -> Chain:
    if isinstance(r, HalfHitchLeaf):
        h = r.half
        return prev_chain_refs(store, _upto(r.corkline, h.fastener)) + (
            Link(LinkKind.TETHER, h.fastener, h.footline[0]),
        )
    if isinstance(r, SpliceNode):
        return prev_chain_refs(store, _upto(r.corkline, r.left.corkline[0])) + _ascent(r.left, store)
    if isinstance(r, LashNode):
        b = r.bottom
        return (
            _ascent(r.upper, store)
            + prev_chain_refs(store, _upto(r.upper.leadline, b.fastener))
            + (Link(LinkKind.TETHER, b.fastener, b.footline[0]),)
        )
    raise TypeError(r)


def _descent(r: RigCert, store) -> Chain:
    if isinstance(r, HalfHitchLeaf):
        h = r.half
        return (
            Link(LinkKind.RIGGING, h.meet, h.topline[-1], h.lead, h.hoist_inclusion),
        ) + prev_chain_refs(store, _from(r.corkline, h.hoist))
    if isinstance(r, SpliceNode):
        return _descent(r.right, store) + prev_chain_refs(
            store, _from(r.corkline, r.right.corkline[-1])
        )
    if isinstance(r, LashNode):
        b = r.bottom
        return (
            (Link(LinkKind.RIGGING, b.meet, b.topline[-1], b.lead, b.hoist_inclusion),)
            + prev_chain_refs(store, _from(r.upper.leadline, b.hoist))
            + _descent(r.upper, store)
        )
    raise TypeError(r)


# verification


def verify_rig(cert: RigCert) -> str:
    """Check ``cert`` against the guild definitions; return ``"GH"`` or ``"GUp"``.

    Raises :class:`Rejected` naming the failing node and rule.
    """
    _verify(cert, "root")
    return GUILD_HALF_HITCH if isinstance(cert, HalfHitchLeaf) else GUILD_UP


def _verify(r: RigCert, where: str) -> None:
    if isinstance(r, HalfHitchLeaf):
        _local(where, verify_half_hitch, r.half)
        _local(where, _check_leaf, r)
    elif isinstance(r, SpliceNode):
        _verify(r.left, where + ".left")
        _verify(r.right, where + ".right")
        _local(where, _check_splice, r)
    elif isinstance(r, LashNode):
        _local(where + ".bottom", verify_half_hitch, r.bottom)
        _verify(r.upper, where + ".upper")
        _local(where, _check_lash, r)
    else:
        raise Rejected(Reason.MALFORMED, f"unknown node {type(r).__name__}", where)
    _local(where, _check_rig, r)


def _local(where: str, check, *args) -> None:
    try:
        check(*args)
    except Rejected as exc:
        raise exc.at(where) from None
    except UnknownReference as exc:
        raise Rejected(Reason.UNKNOWN_REFERENCE, str(exc), where) from None


def _check_leaf(r: HalfHitchLeaf) -> None:
    line = r.cork_prefix + r.half.topline + r.cork_suffix
    if any(b.prev != a.ref for a, b in zip(line, line[1:])):
        raise Rejected(Reason.CORK_FILL, "corkline fill is not consecutive with the topline")


def _check_splice(r: SpliceNode) -> None:
    left, right = r.left, r.right
    try:
        if rig_length(left) != 1:
            raise Rejected(Reason.NOT_SPLICEABLE, "left rig must have length 1")
    except RiggingError as exc:
        raise Rejected(Reason.NOT_SPLICEABLE, str(exc)) from None
    a = left.leadline
    if a[-1] != right.leadline[0]:
        raise Rejected(Reason.NOT_SPLICEABLE, "leadlines do not share the junction twist")
    h0, h1 = left.first_half, right.first_half
    if (h0.lead, h0.meet) != (a[0], a[-1]) or h1.lead != a[-1]:
        raise Rejected(Reason.NOT_SPLICEABLE, "junction half-hitches do not match the leadlines")
    verify_hitch(r.hitch)
    try:
        cork = r.corkline
    except NotAligned as exc:
        raise Rejected(Reason.CORKLINES_MISALIGNED, str(exc)) from None
    except UnknownReference as exc:
        raise Rejected(Reason.CORKLINES_MISALIGNED, f"gap between corklines: {exc}") from None
    known = left.twists.keys() | right.twists.keys()
    members = set(cork)
    seen = set()
    for t in r.bridge:
        ref = t.ref
        if ref in known or ref not in members or ref in seen:
            raise Rejected(Reason.UNUSED_BRIDGE, f"bridge twist {ref!r} is not a missing corkline twist")
        seen.add(ref)


def _check_lash(r: LashNode) -> None:
    if not _is_subline(r.bottom.topline_refs, r.upper.leadline):
        raise Rejected(Reason.NOT_LASHABLE, "bottom topline is not inside the upper leadline")
    bottom = {t.ref for t in r.bottom.twists}
    if bottom & set(r.upper.corkline):
        raise Rejected(Reason.CORKLINE_REUSE, "an upper corkline twist appears in the bottom half-hitch")


def _check_rig(r: RigCert) -> None:
    try:
        cork = r.corkline
    except (NotAligned, UnknownReference) as exc:
        raise Rejected(Reason.CORKLINES_MISALIGNED, str(exc)) from None
    lower = set()
    for half in r.halves():
        lower.update(half.footline_refs)
    reused = lower.intersection(cork)
    if reused:
        raise Rejected(Reason.CORKLINE_REUSE, f"{len(reused)} corkline twist(s) also lie on a footline")
    check_tether_precedence(r.local_store, r.leadline[0], set(cork))
    holds_fast_check(r.leadline, cork, holds_fast_witness(r))


def check_tether_precedence(store: Mapping, x: HashRef, stop: set[HashRef] = frozenset()) -> None:
    """Reject if some ``(*t)^n(x)``, ``n > 0``, is aligned with ``x`` without preceding it.

    Iteration ends at a twist in ``stop`` or wherever the data runs out;
    an undecidable alignment is not a violation.
    """
    cur = x
    for _ in range(len(store) + 1):
        if cur in stop and cur != x:
            return
        try:
            cur = fast_tether(store, cur)
        except (UnknownReference, NoFastPredecessor, ValueError):
            return
        if cur == x:
            raise Rejected(Reason.TETHER_PRECEDENCE, "fast tether iteration returns to its start")
        try:
            ahead = precedes(store, x, cur)
        except UnknownReference:
            ahead = False
        if ahead:
            raise Rejected(Reason.TETHER_PRECEDENCE, f"{cur!r} is a fast tether of {x!r} yet succeeds it")
    raise Rejected(Reason.TETHER_PRECEDENCE, "fast tether iteration does not terminate")
