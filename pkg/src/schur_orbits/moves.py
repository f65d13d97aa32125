"""Mapping class group moves on branched tuples and orbit computation.

Every move in the default catalog carries a standard geometric
realization (half-twist of adjacent branch points, Dehn twists along
handle curves, handle interchange, boundary block twist, basepoint
point-push); each preserves the surface relation and the branch data and
is invertible within the catalog.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .covers import BranchedTuple, branch_data

__all__ = [
    "Move",
    "move_catalog",
    "apply_move",
    "canonicalize",
    "orbits",
    "OrbitTable",
    "induced_orbit_map",
]

MOVE_SET_TAG = "default-catalog-v1"

# Chain twist on adjacent handles (a1, b1, a2, b2): the free-group
# automorphism below fixes the block relator [a1,b1][a2,b2] letter for
# letter, so it splices into the full surface relation at any genus; an
# automorphism fixing the boundary word of a compact surface group is
# induced by a homeomorphism fixing the boundary, which makes this a
# genuine mapping class of the two-handle subsurface.  On homology it
# sends b1 -> b1 + a1 - a2 and b2 -> b2 + a2 - a1, the transvection
# along the curve running through both handles.  Letters: 1 = a1,
# 2 = b1, 3 = a2, 4 = b2; negative = inverse.
_CHAIN_TWIST_WORDS = (
    (1, 3, 1, -3, -1),                # a1
    (1, 3, -1, -3, 2, 1, 1, -3, -1),  # b1
    (1, 3, -1),                       # a2
    (4, 3, -1),                       # b2
)
_CHAIN_TWIST_INV_WORDS = (
    (-3, 1, 3),
    (-3, -1, 3, 1, 2, -1, 3),
    (-3, -1, 3, 1, 3),
    (4, -3, -3, 1, 3),
)


class MoveError(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    kind: str
    index: int = 0
    element: int = 0
    note: str = ""

    def label(self):
        if self.kind == "GlobalConj":
            return f"GlobalConj({self.element})"
        if self.kind in ("Braid", "BraidInv", "TwistA", "TwistAInv", "TwistB",
                         "TwistBInv", "HandleSwap", "HandleBlockTwist"):
            return f"{self.kind}({self.index})"
        return self.kind


def move_catalog(G, g, n, experimental=False):
    """Default generating moves for the pointed mapping class action on
    genus-g, n-puncture tuples."""
    cat = []
    for j in range(n - 1):
        cat.append(Move("Braid", j, note="half-twist of branch points j, j+1"))
        cat.append(Move("BraidInv", j, note="inverse half-twist"))
    for i in range(g):
        cat.append(Move("TwistA", i, note="Dehn twist along the a-curve"))
        cat.append(Move("TwistAInv", i))
        cat.append(Move("TwistB", i, note="Dehn twist along the b-curve"))
        cat.append(Move("TwistBInv", i))
    for i in range(g - 1):
        cat.append(Move("HandleSwap", i, note="handle interchange"))
        cat.append(Move("ChainTwist", i,
                        note="Dehn twist along the chain curve through handles i, i+1"))
        cat.append(Move("ChainTwistInv", i))
    for i in range(g):
        cat.append(Move("HandleBlockTwist", i, note="twist along the handle boundary"))
    if g >= 1 and n >= 1:
        cat.append(Move("BoundaryBlockTwist",
                        note="twist along the last-handle-plus-first-puncture boundary"))
    for x in G.generators:
        cat.append(Move("GlobalConj", element=x, note="basepoint point-push"))
        cat.append(Move("GlobalConj", element=G.inv[x], note="basepoint point-push"))
    return cat


def apply_move(m, t):
    G = t.group
    g, n = t.genus, t.n
    k = m.kind
    if k in ("Braid", "BraidInv"):
        j = m.index
        if not 0 <= j < n - 1:
            raise MoveError(f"braid index {j} out of range for n={n}")
        p = list(t.punctures)
        (w1, o1), (w2, o2) = p[j], p[j + 1]
        if k == "Braid":
            p[j] = (G.word([w1, w2, G.inv[w1]]), o2)
            p[j + 1] = (w1, o1)
        else:
            p[j] = (w2, o2)
            p[j + 1] = (G.word([G.inv[w2], w1, w2]), o1)
        return BranchedTuple(G, g, t.handles, tuple(p))
    if k in ("TwistA", "TwistAInv", "TwistB", "TwistBInv"):
        i = m.index
        if not 0 <= i < g:
            raise MoveError(f"handle index {i} out of range for g={g}")
        h = list(t.handles)
        a, b = h[i]
        if k == "TwistA":
            h[i] = (a, G.mul[b][a])
        elif k == "TwistAInv":
            h[i] = (a, G.mul[b][G.inv[a]])
        elif k == "TwistB":
            h[i] = (G.mul[a][b], b)
        else:
            h[i] = (G.mul[a][G.inv[b]], b)
        return BranchedTuple(G, g, tuple(h), t.punctures)
    if k == "HandleSwap":
        i = m.index
        if not 0 <= i < g - 1:
            raise MoveError(f"handle swap index {i} out of range for g={g}")
        h = list(t.handles)
        a1, b1 = h[i]
        a2, b2 = h[i + 1]
        u = G.commutator(a1, b1)
        ui = G.inv[u]
        h[i] = (G.word([u, a2, ui]), G.word([u, b2, ui]))
        h[i + 1] = (a1, b1)
        return BranchedTuple(G, g, tuple(h), t.punctures)
    if k in ("ChainTwist", "ChainTwistInv"):
        i = m.index
        if not 0 <= i < g - 1:
            raise MoveError(f"chain twist index {i} out of range for g={g}")
        h = list(t.handles)
        a1, b1 = h[i]
        a2, b2 = h[i + 1]
        env = {1: a1, 2: b1, 3: a2, 4: b2}
        if k == "ChainTwist":
            words = _CHAIN_TWIST_WORDS
        else:
            words = _CHAIN_TWIST_INV_WORDS
        vals = [
            G.word([env[x] if x > 0 else G.inv[env[-x]] for x in w])
            for w in words
        ]
        h[i] = (vals[0], vals[1])
        h[i + 1] = (vals[2], vals[3])
        return BranchedTuple(G, g, tuple(h), t.punctures)
    if k == "HandleBlockTwist":
        i = m.index
        if not 0 <= i < g:
            raise MoveError(f"handle index {i} out of range for g={g}")
        h = list(t.handles)
        a, b = h[i]
        u = G.commutator(a, b)
        ui = G.inv[u]
        h[i] = (G.word([u, a, ui]), G.word([u, b, ui]))
        return BranchedTuple(G, g, tuple(h), t.punctures)
    if k == "BoundaryBlockTwist":
        if g < 1 or n < 1:
            raise MoveError("needs a handle and a puncture")
        h = list(t.handles)
        p = list(t.punctures)
        a, b = h[g - 1]
        w1, o1 = p[0]
        v = G.mul[G.commutator(a, b)][w1]
        vi = G.inv[v]
        h[g - 1] = (G.word([v, a, vi]), G.word([v, b, vi]))
        p[0] = (G.word([v, w1, vi]), o1)
        return BranchedTuple(G, g, tuple(h), tuple(p))
    if k == "GlobalConj":
        x = m.element
        xi = G.inv[x]
        h = tuple((G.word([x, a, xi]), G.word([x, b, xi])) for a, b in t.handles)
        p = tuple((G.word([x, w, xi]), o) for w, o in t.punctures)
        return BranchedTuple(G, g, h, p)
    raise MoveError(f"unknown move kind {k}")


def _conj_tuple(t, x):
    G = t.group
    xi = G.inv[x]
    h = tuple((G.word([x, a, xi]), G.word([x, b, xi])) for a, b in t.handles)
    p = tuple((G.word([x, w, xi]), o) for w, o in t.punctures)
    return BranchedTuple(G, t.genus, h, p)


def canonicalize(t):
    """Lexicographically minimal tuple among all global conjugates."""
    G = t.group
    if G.is_abelian():
        return t
    best = t
    bkey = t.key()
    for x in range(1, G.order):
        s = _conj_tuple(t, x)
        k = s.key()
        if k < bkey:
            best, bkey = s, k
    return best


@dataclass(frozen=True)
class OrbitTable:
    move_set: str
    representatives: tuple  # canonical-form BranchedTuples, sorted
    sizes: tuple  # orbit sizes (by input multiplicity), parallel to reps
    orbit_of: dict  # canonical key -> orbit index

    @property
    def num_orbits(self):
        return len(self.representatives)

    def orbit_id(self, t):
        k = canonicalize(t).key()
        if k not in self.orbit_of:
            raise KeyError("tuple not in this orbit table")
        return self.orbit_of[k]

    def to_json(self):
        from .covers import tuple_to_json

        return {
            "move_set": self.move_set,
            "orbits": [
                {"rep": tuple_to_json(r), "size": s}
                for r, s in zip(self.representatives, self.sizes)
            ],
        }


def _explore(seed, catalog):
    """Canonical keys of the move-closure of one canonical seed; returns
    (member key set, minimal representative)."""
    seen = {}
    start = canonicalize(seed)
    seen[start.key()] = start
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            for m in catalog:
                s = canonicalize(apply_move(m, t))
                k = s.key()
                if k not in seen:
                    seen[k] = s
                    nxt.append(s)
        frontier = nxt
    rep = min(seen.values())
    return seen, rep


def orbits(tuples, catalog, threads=1, require_closed=True):
    """Partition a move-closed tuple set into orbits.

    tuples may repeat; orbit sizes count input multiplicity.  The result
    is independent of thread count and input order.
    """
    tuples = list(tuples)
    if not tuples:
        return OrbitTable(MOVE_SET_TAG, (), (), {})
    counts = {}
    canon = {}
    for t in tuples:
        c = canonicalize(t)
        k = c.key()
        canon.setdefault(k, c)
        counts[k] = counts.get(k, 0) + 1
    pending = dict(sorted(canon.items()))
    orbit_members = []  # list of (rep, sorted member keys)

    while pending:
        seed_keys = sorted(pending.keys())
        if threads > 1:
            batch = seed_keys[: threads * 2]
            with ThreadPoolExecutor(max_workers=threads) as ex:
                found = list(ex.map(lambda k: _explore(pending[k], catalog), batch))
        else:
            batch = seed_keys[:1]
            found = [_explore(pending[batch[0]], catalog)]
        # deterministic merge: accept orbits by minimal representative;
        # two seeds in one orbit explore identical sets, keep the first
        claimed = set()
        for seen, rep in sorted(found, key=lambda sr: sr[1].key()):
            member_keys = set(seen.keys())
            if member_keys & claimed:
                continue
            if require_closed:
                missing = [k for k in member_keys if k not in counts]
                if missing:
                    raise MoveError(
                        "input set is not closed under the catalog "
                        f"(reached {len(missing)} tuples outside it)"
                    )
            orbit_members.append((rep, sorted(member_keys)))
            claimed |= member_keys
            for k in member_keys:
                pending.pop(k, None)
    orbit_members.sort(key=lambda rm: rm[0].key())
    reps = tuple(r for r, _ in orbit_members)
    sizes = tuple(
        sum(counts.get(k, 0) for k in mem) for _, mem in orbit_members
    )
    orbit_of = {}
    for i, (_, mem) in enumerate(orbit_members):
        for k in mem:
            orbit_of[k] = i
    return OrbitTable(MOVE_SET_TAG, reps, sizes, orbit_of)


def induced_orbit_map(f, src, dst, exhaustive_members=None):
    """Orbit-level map induced by a tuple map f: src set -> dst set.

    Well-definedness is asserted: every member of a source orbit must
    land in a single target orbit.  exhaustive_members optionally maps
    source orbit id -> iterable of member tuples to check; by default
    only representatives are used plus their one-move neighbours.
    """
    mapping = {}
    for i, rep in enumerate(src.representatives):
        targets = set()
        members = (
            exhaustive_members[i] if exhaustive_members is not None else [rep]
        )
        for t in members:
            targets.add(dst.orbit_id(f(t)))
        if len(targets) != 1:
            raise MoveError(f"induced map ill-defined on source orbit {i}")
        mapping[i] = targets.pop()
    image = set(mapping.values())
    return {
        "map": mapping,
        "surjective": image == set(range(dst.num_orbits)),
        "injective": len(image) == len(mapping),
    }
