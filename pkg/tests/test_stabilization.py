"""Stabilization, dilation, certificates, and the stable-range prober."""

import pytest

from schur_orbits.covers import BranchData, branch_data, enumerate_tuples, make_tuple
from schur_orbits.moves import induced_orbit_map, move_catalog, orbits
from schur_orbits.stabilization import (
    StabilizationError,
    certificate,
    dilate,
    handle_stabilize,
    puncture_stabilize,
    stable_orbits,
    surger_handles,
    u_threshold,
)

from conftest import get_group, transposition_class


def sample_tuple(G, tc, n):
    v = BranchData.from_dict({(tc, 1): n})
    return enumerate_tuples(G, 0, v, surjective=True)[0]


def test_puncture_stabilize_bookkeeping(s3):
    tc = transposition_class(s3)
    t = sample_tuple(s3, tc, 4)
    s = puncture_stabilize(t, tc)
    v = branch_data(t).as_dict()
    w = branch_data(s).as_dict()
    assert w[(tc, 1)] == v.get((tc, 1), 0) + 1
    assert w[(tc, -1)] == v.get((tc, -1), 0) + 1
    assert s.n == t.n + 2
    assert s.relation_product() == 0
    # the appended pair is (x, +1), (x^{-1}, -1)
    (x, o1), (y, o2) = s.punctures[-2:]
    assert o1 == 1 and o2 == -1 and s3.mul[x][y] == 0


def test_puncture_stabilize_rejects_identity(s3):
    t = sample_tuple(s3, transposition_class(s3), 4)
    with pytest.raises(StabilizationError):
        puncture_stabilize(t, s3.class_of[0])


def test_handle_stabilize(s3):
    tc = transposition_class(s3)
    t = sample_tuple(s3, tc, 4)
    s = handle_stabilize(t)
    assert s.genus == t.genus + 1
    assert s.handles[-1] == (0, 0)
    assert branch_data(s) == branch_data(t)


@pytest.mark.parametrize("name", ["s3", "a4", "q8"])
def test_dilate_cardinality(name):
    G = get_group(name)
    # one positive and one negative puncture in some class of order >= 3
    cls = next(c for c, r in enumerate(G.class_reps)
               if r != 0 and G.element_order(r) >= 3)
    x = G.class_reps[cls]
    t = make_tuple(G, 1, [(0, 1)], [(x, 1), (G.inv[x], -1)])
    s = dilate(t)
    w = branch_data(t)
    expected = t.n + sum(
        (G.element_order(G.class_reps[cid]) - 2) * m
        for (cid, sign), m in w.counts if sign == -1
    )
    assert s.n == expected
    assert all(o == 1 for _, o in s.punctures)
    assert s.relation_product() == 0


def test_dilate_fixes_positive_tuples(s3):
    tc = transposition_class(s3)
    t = sample_tuple(s3, tc, 4)
    assert dilate(t) == t


def test_u_threshold_values(s3):
    tc = transposition_class(s3)
    # 3 transpositions, conjugation by one swaps the other two: U = 3*2
    assert u_threshold(s3, tc).as_dict() == {(tc, 1): 6}
    three = next(c for c, r in enumerate(s3.class_reps)
                 if r != 0 and s3.element_order(r) == 3)
    # 2 three-cycles, conjugation by one fixes both: U = 2*1
    assert u_threshold(s3, three).as_dict() == {(three, 1): 2}


def test_certificate_handle_flip(s3):
    cert_at = certificate(s3, (), s3.order, BranchData.from_dict({}))
    cert_past = certificate(s3, (), s3.order + 1, BranchData.from_dict({}))
    assert not cert_at.handle_surjective
    assert cert_past.handle_surjective


def test_certificate_puncture_flip(s3):
    tc = transposition_class(s3)
    u = u_threshold(s3, tc).as_dict()[(tc, 1)]
    at = BranchData.from_dict({(tc, 1): u, (tc, -1): 1})
    past = BranchData.from_dict({(tc, 1): u + 1, (tc, -1): 1})
    assert not certificate(s3, (tc,), 0, at).puncture_surjective[tc]
    assert certificate(s3, (tc,), 0, past).puncture_surjective[tc]


def test_certificate_dilation_witness(s3):
    tc = transposition_class(s3)
    c = certificate(s3, (tc,), 0, BranchData.from_dict({(tc, 1): 4}))
    assert c.dilation_surjective
    assert c.dilation_witness[tc][0] == 4
    c2 = certificate(s3, (tc,), 0, BranchData.from_dict({}))
    assert not c2.dilation_surjective


def test_stabilizations_commute_as_tuple_maps(s3):
    tc = transposition_class(s3)
    t = sample_tuple(s3, tc, 4)
    assert handle_stabilize(puncture_stabilize(t, tc)) == \
        puncture_stabilize(handle_stabilize(t), tc)


def test_round_map_induces_welldefined_orbit_map(s3):
    # the composite (puncture stabilize, then dilate) descends to orbit
    # sets and is surjective between consecutive transposition levels
    tc = transposition_class(s3)
    v4 = BranchData.from_dict({(tc, 1): 4})
    v6 = BranchData.from_dict({(tc, 1): 6})
    lvl4 = enumerate_tuples(s3, 0, v4)
    lvl6 = enumerate_tuples(s3, 0, v6)
    t4 = orbits(lvl4, move_catalog(s3, 0, 4))
    t6 = orbits(lvl6, move_catalog(s3, 0, 6))

    def f(t):
        return dilate(puncture_stabilize(t, tc))

    members = {i: [] for i in range(t4.num_orbits)}
    for t in lvl4:
        members[t4.orbit_id(t)].append(t)
    flags = induced_orbit_map(f, t4, t6, exhaustive_members=members)
    assert flags["surjective"]


def test_stable_orbits_s3_transposition_track(s3):
    tc = transposition_class(s3)
    r = stable_orbits(s3, (tc,), v_seed=BranchData.from_dict({(tc, 1): 4}),
                      g_seed=0)
    assert r.verdict == "empirical-match"
    assert r.stable_count == 1 and r.m_order == 1
    assert [lv["orbits"] for lv in r.levels] == [1, 1, 1]
    assert all(lv["g"] == 0 for lv in r.levels)


def test_stable_orbits_k4_unbranched_track(k4):
    r = stable_orbits(k4, ())
    assert r.verdict == "empirical-match"
    assert r.stable_count == 2 and r.m_order == 2
    assert [lv["orbits"] for lv in r.levels][:4] == [1, 2, 2, 2]
    assert not r.levels[1]["induced_map"]["surjective"]
    assert r.levels[2]["induced_map"]["surjective"]
    assert r.levels[2]["induced_map"]["injective"]


def test_stable_orbits_inconclusive_when_capped(k4):
    r = stable_orbits(k4, (), max_rounds=1)
    assert r.verdict == "inconclusive"


def test_stable_orbits_rejects_bad_seed(s3, k4):
    tc = transposition_class(s3)
    with pytest.raises(StabilizationError):
        stable_orbits(k4, (), v_seed=BranchData.from_dict({(1, 1): 2}))


def test_surger_handles(k4):
    t = make_tuple(k4, 1, [(1, 2)], [])
    out = surger_handles(t, [([1], [2])])
    assert out.genus == 0 and out.n == 4
    assert out.relation_product() == 0
    # letters: a, b, a^{-1}, b^{-1} with signs +,+,-,-
    assert [o for _, o in out.punctures] == [1, 1, -1, -1]
    with pytest.raises(StabilizationError):
        surger_handles(t, [([1, 1], [2])])  # 1*1 = 0 != a
    with pytest.raises(StabilizationError):
        surger_handles(t, [])
