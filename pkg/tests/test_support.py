import pytest

from rigging.encoding import NULL, HashRef, Twist
from rigging.errors import EquivocationDetected
from rigging.graph import TwistStore
from rigging.scenarios import (
    build_scenario,
    double_spend_scenario,
    forked_scenario,
    random_pool,
)
from rigging.support import (
    Verdict,
    forge_second_meet,
    oracle_supportive,
    relate,
    unique_successor,
)

ANCHOR = HashRef.of(b"anchor")


def test_same_rig_aligned(chain3):
    rig = chain3.rigs["chain"]
    assert relate(chain3.store, rig, rig).verdict is Verdict.ALIGNED


def test_forked_corklines_disjoint():
    sc = forked_scenario()
    rel = relate(sc.store, sc.rigs["piece2"], sc.rigs["piece3"])
    assert rel.verdict is Verdict.DISJOINT


def test_double_spend_pair_misaligned():
    sc = double_spend_scenario()
    rel = relate(sc.store, sc.rigs["honest"], sc.rigs["rival"])
    assert rel.verdict is Verdict.MISALIGNED
    assert rel.evidence == (sc.notes["a0"], sc.notes["honest"], sc.notes["rival"])


def test_consecutive_pieces_aligned(chain3):
    rig = chain3.rigs["chain"]
    assert relate(chain3.store, rig.left, rig.right).verdict is Verdict.ALIGNED


def test_unique_successor():
    sc = double_spend_scenario()
    honest, rival = sc.rigs["honest"], sc.rigs["rival"]
    a0 = sc.notes["a0"]
    z = rival.corkline[-1]
    assert unique_successor(sc.store, z, a0, []) is None
    assert unique_successor(sc.store, z, a0, [honest]) == sc.notes["honest"]
    # the rival fails verification and is ignored
    assert unique_successor(sc.store, z, a0, [honest, rival]) == sc.notes["honest"]
    # taking both on trust exposes the conflict
    with pytest.raises(EquivocationDetected) as e:
        unique_successor(sc.store, z, a0, [honest, rival], verified=True)
    assert e.value.twist == a0


def test_oracle_minimal_pool(minimal):
    report = oracle_supportive(minimal.store)
    assert len(report.rigs) == 1
    assert report.misaligned == [] and report.equivocations == []


def test_oracle_double_spend_pool():
    sc = double_spend_scenario()
    report = oracle_supportive(sc.store)
    successors = {r.leadline[1] for r in report.rigs if r.leadline[0] == sc.notes["a0"]}
    assert successors == {sc.notes["honest"]}
    assert report.misaligned == [] and report.equivocations == []


def test_oracle_two_forks():
    s = TwistStore()
    z0 = s.put(Twist(NULL, ANCHOR, NULL))
    leads = []
    for tag in (b"a", b"b"):
        l = s.put(Twist(NULL, z0, s.put_trie({HashRef.of(tag): z0})))
        m = s.put(Twist(l, z0, NULL))
        s.put(Twist(z0, NULL, s.put_trie({l: m})))
        leads.append(l)
    report = oracle_supportive(s)
    assert {r.leadline[0] for r in report.rigs} == set(leads)
    assert report.pairs and all(rel.verdict is Verdict.DISJOINT for _, _, rel in report.pairs)


def test_oracle_refuses_large_pool():
    sc = build_scenario("lashed(3)")
    assert len(sc.store) > 14
    with pytest.raises(ValueError):
        oracle_supportive(sc.store)


def test_oracle_report_deterministic():
    a = oracle_supportive(random_pool(7)).lines()
    b = oracle_supportive(random_pool(7)).lines()
    assert a == b


def test_forge_second_meet_outcomes(chain3):
    loom = chain3.notes["loom"]
    hh = loom.half_hitch(loom.strands["A"].fast[0])
    before = len(loom.store)
    outcomes = {a.strategy: a for a in forge_second_meet(loom.store, hh)}
    assert len(loom.store) == before
    assert outcomes["later-hoist/assemble"].reason == "NotFirstSuccessor"
    assert outcomes["later-hoist/inclusion-as-exclusion"].reason == "NotFirstSuccessor"
    assert outcomes["later-hoist/omit-exclusion"].reason == "IncompleteFirstness"
    assert outcomes["same-hoist/rewritten-leaf"].reason == "HoistInclusionFailed"
    forked = outcomes["forked-corkline/at-fastener"]
    assert forked.accepted and forked.relation is Verdict.DISJOINT
    assert not any(a.conflicting for a in outcomes.values())
