"""Hitches and half-hitches: assembly from a store and local verification.

A half-hitch certificate carries its topline ``[fastener, ..., hoist]`` and
footline ``[lead, ..., meet]`` as twists, the proof that the hoist's trie
binds lead to meet, and one absence proof for every topline twist strictly
between fastener and hoist (the hoist is the first to bind the lead).  A
hitch adds the twists after the meet up to the post and the proof that the
post binds lead to hoist.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from .causal import Chain, Link, LinkKind, prev_chain, verify_chain
from .encoding import HashRef, Twist
from .errors import (
    ConstructionError,
    NoFastPredecessor,
    NotAligned,
    Reason,
    Rejected,
    UnknownReference,
)
from .graph import TwistStore, fast_previous, line_between
from .trie import Absent, Bound, TrieProof, trie_verify


@dataclass(frozen=True)
class HalfHitchCert:
    topline: tuple[Twist, ...]
    footline: tuple[Twist, ...]
    hoist_inclusion: TrieProof
    firstness_exclusions: tuple[TrieProof, ...]

    @property
    def fastener(self) -> HashRef:
        return self.topline[0].ref

    @property
    def hoist(self) -> HashRef:
        return self.topline[-1].ref

    @property
    def lead(self) -> HashRef:
        return self.footline[0].ref

    @property
    def meet(self) -> HashRef:
        return self.footline[-1].ref

    @cached_property
    def topline_refs(self) -> tuple[HashRef, ...]:
        return tuple(t.ref for t in self.topline)

    @cached_property
    def footline_refs(self) -> tuple[HashRef, ...]:
        return tuple(t.ref for t in self.footline)

    @property
    def twists(self) -> tuple[Twist, ...]:
        return self.topline + self.footline


@dataclass(frozen=True)
class HitchCert:
    half: HalfHitchCert
    post_fill: tuple[Twist, ...]
    post_inclusion: TrieProof

    @property
    def post(self) -> HashRef:
        return self.post_fill[-1].ref

    @property
    def extended_footline(self) -> tuple[Twist, ...]:
        return self.half.footline + self.post_fill

    @property
    def twists(self) -> tuple[Twist, ...]:
        return self.half.twists + self.post_fill


def _resolve(store: Mapping, ref: HashRef) -> Twist:
    try:
        return store[ref]
    except UnknownReference:
        raise ConstructionError(Reason.UNKNOWN_REFERENCE, f"store lacks {ref}") from None


def assemble_half_hitch(
    store: TwistStore, fastener: HashRef, lead: HashRef, meet: HashRef, hoist: HashRef
) -> HalfHitchCert:
    """Collect the twists and proofs of a half-hitch, checking every relation.

    Raises :class:`ConstructionError` naming the first relation that fails.
    """
    lead_t = _resolve(store, lead)
    for ref in (fastener, meet, hoist):
        _resolve(store, ref)
    if lead_t.tether != fastener:
        raise ConstructionError(Reason.FASTENER_MISMATCH, "fastener is not the lead's tether")
    if lead_t.is_loose:
        raise ConstructionError(Reason.LEAD_NOT_FAST)
    if store[meet].is_loose:
        raise ConstructionError(Reason.MEET_NOT_FAST)
    try:
        if fast_previous(store, meet) != lead:
            raise ConstructionError(Reason.LEAD_NOT_FAST_PREVIOUS)
    except NoFastPredecessor:
        raise ConstructionError(Reason.LEAD_NOT_FAST_PREVIOUS) from None
    try:
        footline = line_between(store, lead, meet)
        topline = line_between(store, fastener, hoist)
    except NotAligned as exc:
        raise ConstructionError(Reason.TOPLINE_TOO_SHORT, str(exc)) from None
    except UnknownReference as exc:
        raise ConstructionError(Reason.UNKNOWN_REFERENCE, str(exc)) from None
    if len(topline) < 2:
        raise ConstructionError(Reason.TOPLINE_TOO_SHORT, "fastener must strictly precede hoist")
    if set(topline) & set(footline):
        raise ConstructionError(Reason.SELF_TETHERED)

    hoist_t = store[hoist]
    trie = store.trie(hoist_t.rigging)
    if trie.get(lead) != meet:
        raise ConstructionError(Reason.HOIST_INCLUSION_FAILED, "hoist does not bind lead to meet")
    exclusions = []
    for ref in topline[1:-1]:
        inner = store.trie(store[ref].rigging)
        if inner.get(lead) is not None:
            raise ConstructionError(
                Reason.NOT_FIRST_SUCCESSOR, f"{ref!r} binds the lead before the hoist"
            )
        exclusions.append(inner.prove(lead))
    return HalfHitchCert(
        topline=tuple(store[r] for r in topline),
        footline=tuple(store[r] for r in footline),
        hoist_inclusion=trie.prove(lead),
        firstness_exclusions=tuple(exclusions),
    )


def assemble_hitch(
    store: TwistStore,
    fastener: HashRef,
    lead: HashRef,
    meet: HashRef,
    hoist: HashRef,
    post: HashRef,
) -> HitchCert:
    half = assemble_half_hitch(store, fastener, lead, meet, hoist)
    return extend_to_hitch(store, half, post)


def extend_to_hitch(store: TwistStore, half: HalfHitchCert, post: HashRef) -> HitchCert:
    _resolve(store, post)
    try:
        if fast_previous(store, post) != half.meet:
            raise ConstructionError(Reason.MEET_NOT_FAST_PREVIOUS)
        fill = line_between(store, half.meet, post)[1:]
    except NoFastPredecessor:
        raise ConstructionError(Reason.MEET_NOT_FAST_PREVIOUS) from None
    except (NotAligned, UnknownReference) as exc:
        raise ConstructionError(Reason.MEET_NOT_FAST_PREVIOUS, str(exc)) from None
    trie = store.trie(store[post].rigging)
    if trie.get(half.lead) != half.hoist:
        raise ConstructionError(Reason.POST_INCLUSION_FAILED, "post does not bind lead to hoist")
    return HitchCert(half, tuple(store[r] for r in fill), trie.prove(half.lead))


def _consecutive(twists: Sequence[Twist]) -> bool:
    return all(b.prev == a.ref for a, b in zip(twists, twists[1:]))


def verify_half_hitch(cert: HalfHitchCert) -> None:
    """Re-derive every half-hitch relation from the certificate's own twists.

    Returns ``None`` on acceptance and raises :class:`Rejected` with the first
    failing rule otherwise.
    """
    top, foot = cert.topline, cert.footline
    if len(top) < 2:
        raise Rejected(Reason.TOPLINE_TOO_SHORT, "fastener must strictly precede hoist")
    if len(foot) < 2:
        raise Rejected(Reason.FOOTLINE_TOO_SHORT)
    if not _consecutive(top):
        raise Rejected(Reason.NOT_CONSECUTIVE, "topline")
    if not _consecutive(foot):
        raise Rejected(Reason.NOT_CONSECUTIVE, "footline")
    if foot[0].is_loose:
        raise Rejected(Reason.LEAD_NOT_FAST)
    if foot[-1].is_loose:
        raise Rejected(Reason.MEET_NOT_FAST)
    if any(t.is_fast for t in foot[1:-1]):
        raise Rejected(Reason.LEAD_NOT_FAST_PREVIOUS, "a fast twist lies between lead and meet")
    if foot[0].tether != cert.fastener:
        raise Rejected(Reason.FASTENER_MISMATCH)
    if set(cert.topline_refs) & set(cert.footline_refs):
        raise Rejected(Reason.SELF_TETHERED, "topline and footline share twists")

    lead = cert.lead
    verdict = trie_verify(top[-1].rigging, lead, cert.hoist_inclusion)
    if verdict != Bound(cert.meet):
        raise Rejected(Reason.HOIST_INCLUSION_FAILED, _describe(verdict))

    between = top[1:-1]
    if len(cert.firstness_exclusions) != len(between):
        raise Rejected(
            Reason.INCOMPLETE_FIRSTNESS,
            f"{len(between)} twists between fastener and hoist, "
            f"{len(cert.firstness_exclusions)} exclusion proofs",
        )
    for i, (t, proof) in enumerate(zip(between, cert.firstness_exclusions)):
        verdict = trie_verify(t.rigging, lead, proof)
        if isinstance(verdict, Bound):
            raise Rejected(Reason.NOT_FIRST_SUCCESSOR, f"topline twist {i + 1} binds the lead")
        if not isinstance(verdict, Absent):
            raise Rejected(Reason.INVALID_EXCLUSION, f"topline twist {i + 1}: {verdict.reason}")


def verify_hitch(cert: HitchCert) -> None:
    verify_half_hitch(cert.half)
    fill = cert.post_fill
    if not fill:
        raise Rejected(Reason.MEET_NOT_FAST_PREVIOUS, "no post")
    if not _consecutive(cert.half.footline[-1:] + fill):
        raise Rejected(Reason.NOT_CONSECUTIVE, "meet to post")
    if any(t.is_fast for t in fill[:-1]):
        raise Rejected(Reason.MEET_NOT_FAST_PREVIOUS, "a fast twist lies between meet and post")
    if fill[-1].ref in set(cert.half.topline_refs):
        raise Rejected(Reason.SELF_TETHERED, "post lies on the topline")
    verdict = trie_verify(fill[-1].rigging, cert.half.lead, cert.post_inclusion)
    if isinstance(verdict, Bound):
        if verdict.value != cert.half.hoist:
            raise Rejected(Reason.POST_BINDING_MISMATCH, "post binds the lead to another hoist")
        return
    raise Rejected(Reason.POST_INCLUSION_FAILED, _describe(verdict))


def _describe(verdict) -> str:
    if isinstance(verdict, Bound):
        return f"bound to {verdict.value!r}"
    if isinstance(verdict, Absent):
        return "key absent"
    return f"invalid proof ({verdict.reason})"


def hitch_chronology_witness(cert: HalfHitchCert | HitchCert) -> list[Chain]:
    """Chains for ``f ≺≺ l``, ``l ≺≺ m``, ``m ≺≺ h`` and, for hitches, ``h ≺≺ n``."""
    half = cert.half if isinstance(cert, HitchCert) else cert
    lead = half.lead
    segments: list[Chain] = [
        (Link(LinkKind.TETHER, half.fastener, half.footline[0]),),
        prev_chain(half.footline),
        (Link(LinkKind.RIGGING, half.meet, half.topline[-1], lead, half.hoist_inclusion),),
    ]
    if isinstance(cert, HitchCert):
        segments.append(
            (Link(LinkKind.RIGGING, half.hoist, cert.post_fill[-1], lead, cert.post_inclusion),)
        )
    return segments


def verify_chronology(cert: HalfHitchCert | HitchCert, segments: Sequence[Chain]) -> None:
    half = cert.half if isinstance(cert, HitchCert) else cert
    points = [half.fastener, half.lead, half.meet, half.hoist]
    if isinstance(cert, HitchCert):
        points.append(cert.post)
    if len(segments) != len(points) - 1:
        raise Rejected(Reason.BROKEN_CHAIN, "wrong number of segments")
    for seg, a, b in zip(segments, points, points[1:]):
        if not seg:
            raise Rejected(Reason.BROKEN_CHAIN, "causal precedence is strict; empty segment")
        verify_chain(seg, a, b)


__all__ = [
    "HalfHitchCert",
    "HitchCert",
    "assemble_half_hitch",
    "assemble_hitch",
    "extend_to_hitch",
    "hitch_chronology_witness",
    "verify_chronology",
    "verify_half_hitch",
    "verify_hitch",
]
