"""Explicit witnesses of causal precedence.

Causal precedence is never decided in the abstract here.  It is shown by a
chain of links, each one a twist whose encoding includes the previous link's
hash: as its prev, as its tether, or through a trie proof under its rigging
root.  A chain checks out from the twists it carries alone.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

from .encoding import HashRef, Twist
from .errors import Reason, Rejected
from .trie import Bound, TrieProof, trie_verify


class LinkKind(str, Enum):
    PREV = "prev"
    TETHER = "tether"
    RIGGING = "rigging"


@dataclass(frozen=True)
class Link:
    kind: LinkKind
    source: HashRef
    twist: Twist
    key: HashRef | None = None
    proof: TrieProof | None = None

    @property
    def target(self) -> HashRef:
        return self.twist.ref


Chain = tuple[Link, ...]


def link_holds(link: Link) -> bool:
    t = link.twist
    if link.kind is LinkKind.PREV:
        return t.prev == link.source
    if link.kind is LinkKind.TETHER:
        return t.tether == link.source
    if link.kind is LinkKind.RIGGING:
        if link.key is None or link.proof is None:
            return False
        verdict = trie_verify(t.rigging, link.key, link.proof)
        return isinstance(verdict, Bound) and link.source in (link.key, verdict.value)
    return False


def verify_chain(chain: Sequence[Link], source: HashRef, target: HashRef) -> None:
    """Check that ``chain`` leads from ``source`` to ``target``.

    An empty chain is accepted only when the endpoints coincide.
    """
    cur = source
    for i, link in enumerate(chain):
        if link.source != cur:
            raise Rejected(Reason.BROKEN_CHAIN, f"link {i} starts at {link.source!r}, expected {cur!r}")
        if not link_holds(link):
            raise Rejected(Reason.BROKEN_CHAIN, f"link {i} ({link.kind.value}) does not include {cur!r}")
        cur = link.target
    if cur != target:
        raise Rejected(Reason.BROKEN_CHAIN, f"chain ends at {cur!r}, expected {target!r}")


def prev_chain(twists: Sequence[Twist]) -> Chain:
    """Links along consecutive twists ``[t0, ..., tk]``, from t0 to tk."""
    return tuple(
        Link(LinkKind.PREV, a.ref, b) for a, b in zip(twists, twists[1:])
    )


def prev_chain_refs(store: Mapping[HashRef, Twist], refs: Sequence[HashRef]) -> Chain:
    return prev_chain([store[r] for r in refs])


@dataclass(frozen=True)
class HoldsFastWitness:
    """Chains for ``z_α ≺≺ a_α``, ``a_α ≼ a_ω`` and ``a_ω ≺≺ z_ω``."""

    ascent: Chain
    span: Chain
    descent: Chain


def holds_fast_check(
    leadline: Sequence[HashRef], corkline: Sequence[HashRef], witness: HoldsFastWitness
) -> None:
    """Raise :class:`Rejected` unless ``witness`` shows leadline holds fast to corkline."""
    if not leadline or not corkline:
        raise Rejected(Reason.MALFORMED, "empty line")
    try:
        verify_chain(witness.ascent, corkline[0], leadline[0])
    except Rejected as exc:
        raise Rejected(Reason.BROKEN_CHAIN, "ascent: " + exc.detail) from None
    if any(link.kind is not LinkKind.PREV for link in witness.span):
        raise Rejected(Reason.BROKEN_CHAIN, "span: leadline links must be prev links")
    try:
        verify_chain(witness.span, leadline[0], leadline[-1])
    except Rejected as exc:
        raise Rejected(Reason.BROKEN_CHAIN, "span: " + exc.detail) from None
    try:
        verify_chain(witness.descent, leadline[-1], corkline[-1])
    except Rejected as exc:
        raise Rejected(Reason.BROKEN_CHAIN, "descent: " + exc.detail) from None


def compose_witness(lower: HoldsFastWitness, upper: HoldsFastWitness) -> HoldsFastWitness:
    """A holds fast to B (``lower``) and B to Z (``upper``) give A holds fast to Z."""
    return HoldsFastWitness(
        ascent=upper.ascent + lower.ascent,
        span=lower.span,
        descent=lower.descent + upper.descent,
    )
