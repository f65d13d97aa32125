"""Move catalog soundness, invertibility, and orbit determinism."""

import random

import pytest

from schur_orbits.covers import BranchData, branch_data, enumerate_tuples, make_tuple
from schur_orbits.homology import sch_unbranched
from schur_orbits.moves import (
    Move,
    MoveError,
    apply_move,
    canonicalize,
    move_catalog,
    orbits,
)

from conftest import get_group, transposition_class

GRID = [(0, 3), (0, 6), (1, 2), (2, 1), (2, 2), (3, 0), (3, 6)]
GROUPS = ["s3", "d4", "a4", "s4"]

_INVERSE_KIND = {
    "Braid": "BraidInv", "BraidInv": "Braid",
    "TwistA": "TwistAInv", "TwistAInv": "TwistA",
    "TwistB": "TwistBInv", "TwistBInv": "TwistB",
    "ChainTwist": "ChainTwistInv", "ChainTwistInv": "ChainTwist",
}


def random_tuple(G, g, n, rng):
    for _ in range(500):
        handles = tuple((rng.randrange(G.order), rng.randrange(G.order))
                        for _ in range(g))
        p = 0
        for a, b in handles:
            p = G.mul[p][G.commutator(a, b)]
        letters = []
        for _ in range(max(0, n - 1)):
            w = rng.randrange(1, G.order)
            letters.append((w, rng.choice((1, -1))))
            p = G.mul[p][w]
        if n == 0:
            if p != 0:
                continue
        else:
            w_last = G.inv[p]
            if w_last == 0:
                continue
            letters.append((w_last, rng.choice((1, -1))))
        return make_tuple(G, g, handles, letters)
    return None


@pytest.mark.parametrize("name", GROUPS)
def test_move_soundness_random(name):
    G = get_group(name)
    rng = random.Random(hash(name) & 0xFFFF)
    applications = 0
    for g, n in GRID:
        cat = move_catalog(G, g, n)
        for _ in range(12):
            t = random_tuple(G, g, n, rng)
            if t is None:
                continue
            bd = branch_data(t)
            for m in cat:
                s = apply_move(m, t)
                assert s.relation_product() == 0
                assert branch_data(s) == bd
                applications += 1
    assert applications >= 1000


@pytest.mark.parametrize("name", GROUPS)
def test_move_inverses(name):
    G = get_group(name)
    rng = random.Random(1 + (hash(name) & 0xFFFF))
    for g, n in GRID:
        cat = move_catalog(G, g, n)
        for _ in range(6):
            t = random_tuple(G, g, n, rng)
            if t is None:
                continue
            for m in cat:
                inv = None
                if m.kind in _INVERSE_KIND:
                    inv = Move(_INVERSE_KIND[m.kind], m.index)
                elif m.kind == "GlobalConj":
                    inv = Move("GlobalConj", element=G.inv[m.element])
                if inv is None:
                    continue
                assert apply_move(inv, apply_move(m, t)) == t
                assert apply_move(m, apply_move(inv, t)) == t


@pytest.mark.parametrize("name,g,n", [("k4", 2, 0), ("s3", 1, 2), ("s3", 0, 4)])
def test_every_move_permutes_the_level(name, g, n):
    # invertibility of the conjugation-style moves (HandleSwap,
    # HandleBlockTwist, BoundaryBlockTwist) shows up as bijectivity on an
    # exhaustive level
    G = get_group(name)
    if n == 0:
        v = BranchData.from_dict({})
    else:
        tc = transposition_class(G)
        v = BranchData.from_dict({(tc, 1): n})
    level = enumerate_tuples(G, g, v, surjective=False)
    keys = {t.key() for t in level}
    for m in move_catalog(G, g, n):
        image = {apply_move(m, t).key() for t in level}
        assert image == keys, m.kind


def test_braid_moves_signs_with_letters(s3):
    tc = transposition_class(s3)
    a = s3.class_reps[tc]
    t = make_tuple(s3, 1, [(0, 1)], [(a, -1), (s3.inv[a], 1)])
    s = apply_move(Move("Braid", 0), t)
    # the first slot now carries the old second letter (conjugated), with
    # its own sign; the second slot carries the old first letter and sign
    assert s.punctures[1] == (a, -1)
    assert s.punctures[0][1] == 1
    assert branch_data(s) == branch_data(t)


def test_chain_twist_mixes_abelian_handles(k4):
    # without the chain twist no catalog move changes the unordered pair
    # of handle contents for an abelian group
    t = make_tuple(k4, 2, [(1, 1), (2, 2)], [])
    s = apply_move(Move("ChainTwist", 0), t)
    assert s.relation_product() == 0
    assert {t.handles[0], t.handles[1]} != {s.handles[0], s.handles[1]}


def test_k4_genus2_needs_chain_twist(k4):
    level = enumerate_tuples(k4, 2, BranchData.from_dict({}), surjective=True)
    full = orbits(level, move_catalog(k4, 2, 0))
    assert full.num_orbits == 2
    reduced_cat = [m for m in move_catalog(k4, 2, 0)
                   if not m.kind.startswith("ChainTwist")]
    reduced = orbits(level, reduced_cat)
    assert reduced.num_orbits > full.num_orbits


def test_subcatalog_monotonicity(s3):
    tc = transposition_class(s3)
    v = BranchData.from_dict({(tc, 1): 4})
    level = enumerate_tuples(s3, 0, v)
    cat = move_catalog(s3, 0, 4)
    full = orbits(level, cat)
    sub = orbits(level, [m for m in cat if m.kind != "Braid"])
    assert sub.num_orbits >= full.num_orbits


def test_orbits_deterministic_across_threads(s3):
    tc = transposition_class(s3)
    v = BranchData.from_dict({(tc, 1): 4})
    level = enumerate_tuples(s3, 0, v)
    cat = move_catalog(s3, 0, 4)
    t1 = orbits(level, cat, threads=1)
    t4 = orbits(level, cat, threads=4)
    assert t1.to_json() == t4.to_json()
    shuffled = list(level)
    random.Random(7).shuffle(shuffled)
    t_s = orbits(shuffled, cat, threads=2)
    assert t_s.to_json() == t1.to_json()


def test_orbits_counts_multiplicity(s3):
    tc = transposition_class(s3)
    v = BranchData.from_dict({(tc, 1): 4})
    level = enumerate_tuples(s3, 0, v)
    tab = orbits(level + level, move_catalog(s3, 0, 4))
    assert sum(tab.sizes) == 2 * len(level)


def test_orbits_rejects_non_closed_input(s3):
    tc = transposition_class(s3)
    v = BranchData.from_dict({(tc, 1): 4})
    level = enumerate_tuples(s3, 0, v)
    with pytest.raises(MoveError):
        orbits(level[:3], move_catalog(s3, 0, 4))


def test_canonicalize_idempotent_and_conj_invariant(s3, s4):
    rng = random.Random(9)
    for G in (s3, s4):
        for g, n in [(1, 2), (2, 0)]:
            t = random_tuple(G, g, n, rng)
            if t is None:
                continue
            c = canonicalize(t)
            assert canonicalize(c) == c
            for x in range(1, G.order):
                s = apply_move(Move("GlobalConj", element=x), t)
                assert canonicalize(s) == c


@pytest.mark.parametrize("name", ["s3", "k4", "q8"])
def test_sch_invariant_under_moves(name):
    G = get_group(name)
    rng = random.Random(11)
    level = enumerate_tuples(G, 2, BranchData.from_dict({}), surjective=False)
    sample = rng.sample(level, min(25, len(level)))
    cat = move_catalog(G, 2, 0)
    count = 0
    for t in sample:
        base = sch_unbranched(G, t.handles)
        for m in cat:
            s = apply_move(m, t)
            assert sch_unbranched(G, s.handles) == base
            count += 1
    assert count >= 100
