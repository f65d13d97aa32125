"""Group homology through the normalized bar complex.

Second homology H2(G) is computed as ker d2 / im d3 on the normalized
bar bases (symbols with an identity entry are dropped, so the k-basis
has (|G|-1)^k symbols).  On top of that sit the branch-class reductions:
the subgroup of torus classes with meridian in a chosen union of
conjugacy classes C, the reduced multiplier M(G)_C, the branch-type
lattice N, and the homology of the C-branched classifying space
reported as the (non-natural) direct sum M(G)_C + N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covers import BranchData
from .groups import abelianization, centralizer, quotient_by_normal_closure
from .intlinalg import (
    IntegerLattice,
    PresentedAbelianGroup,
    cokernel,
    kernel_lattice,
    snf_with_inverse,
)

__all__ = [
    "boundary_matrix",
    "h2_group",
    "H2Group",
    "torus_cycle",
    "c_tori_subgroup",
    "m_g_c",
    "n_lattice",
    "h2_bgc",
    "h1_bgc",
    "pi1_bgc_order",
    "BgcH2",
    "sch_unbranched",
    "hom_branch_type",
]

BAR_SIZE_CAP = 32  # group order cap for bar-complex computations

_INT64_SAFE = 1 << 31


class HomologyError(ValueError):
    pass


def _pair_index(G, x, y):
    m = G.order - 1
    return (x - 1) * m + (y - 1)


def boundary_matrix(G, k):
    """Dense matrix of d_k on normalized bar bases, columns indexed
    lexicographically by element indices."""
    if G.order > BAR_SIZE_CAP:
        raise HomologyError(f"group order {G.order} over bar-complex cap")
    m = G.order - 1
    if k == 2:
        rows, cols = m, m * m
        M = [[0] * cols for _ in range(rows)]
        for x in range(1, G.order):
            for y in range(1, G.order):
                j = _pair_index(G, x, y)
                M[y - 1][j] += 1
                M[x - 1][j] += 1
                xy = G.mul[x][y]
                if xy:
                    M[xy - 1][j] -= 1
        return M
    if k == 3:
        rows, cols = m * m, m * m * m
        M = [[0] * cols for _ in range(rows)]
        j = 0
        for col, entries in _d3_columns(G):
            for i, c in entries:
                M[i][col] += c
        return M
    raise HomologyError(f"unsupported boundary degree {k}")


def _d3_columns(G):
    """Sparse columns of d3: yields (column index, [(row, coeff), ...])."""
    m = G.order - 1
    j = 0
    for x in range(1, G.order):
        for y in range(1, G.order):
            xy = G.mul[x][y]
            for z in range(1, G.order):
                yz = G.mul[y][z]
                d = {}
                d[_pair_index(G, y, z)] = d.get(_pair_index(G, y, z), 0) + 1
                if xy:
                    i = _pair_index(G, xy, z)
                    d[i] = d.get(i, 0) - 1
                if yz:
                    i = _pair_index(G, x, yz)
                    d[i] = d.get(i, 0) + 1
                i = _pair_index(G, x, y)
                d[i] = d.get(i, 0) - 1
                entries = [(i, c) for i, c in sorted(d.items()) if c]
                if entries:
                    yield j, entries
                j += 1


def _chain_vector(G, chain):
    """Dict {(x, y): coeff} -> dense coefficient list over the 2-basis.
    Symbols containing the identity are dropped."""
    m = G.order - 1
    v = [0] * (m * m)
    for (x, y), c in chain.items():
        if x == 0 or y == 0 or c == 0:
            continue
        v[_pair_index(G, x, y)] += c
    return v


@dataclass
class H2Group:
    group: object
    presentation: PresentedAbelianGroup  # over kernel coordinates
    _rank2: int  # rank of d2 (count of nonzero Smith pivots)
    _vinv: object  # numpy matrix, V^{-1} of the d2 Smith form
    _diag: tuple

    @property
    def invariant_factors(self):
        return self.presentation.invariant_factors

    def kernel_coords(self, chain):
        """Coordinates of a 2-cycle in the kernel lattice of d2; raises
        if the chain is not a cycle."""
        v = _chain_vector(self.group, chain)
        y = self._vinv @ np.array(v, dtype=self._vinv.dtype)
        r = self._rank2
        if any(int(t) != 0 for t in y[:r]):
            raise HomologyError("chain is not a d2-cycle")
        return [int(t) for t in y[r:]]

    def cycle_class(self, chain):
        """H2 coordinates of a 2-cycle given as {(x, y): coeff}."""
        return self.presentation.to_coords(self.kernel_coords(chain))


def _unit_pivot_cokernel(rows, K):
    """Cokernel of the column span of the transposed row list inside Z^K.

    Fast path for the big echelonized image bases: eliminates around
    +-1 pivots with whole-matrix numpy updates, then hands the small
    residual block to the generic Smith engine.
    """
    R = len(rows)
    if R == 0:
        return cokernel([], ambient_dim=K) if K == 0 else cokernel(
            [[0] for _ in range(K)], ambient_dim=K
        )
    obj = False
    M = np.array([[rows[j][i] for j in range(R)] for i in range(K)], dtype=object)
    if int(np.abs(M.astype(object)).max()) <= _INT64_SAFE:
        M = M.astype(np.int64)
    else:
        obj = True
    U = np.eye(K, dtype=M.dtype)
    if obj:
        U = U.astype(object)
    row_active = np.ones(K, dtype=bool)
    col_active = np.ones(R, dtype=bool)
    killed = []  # rows eliminated with unit pivots (modulus 1 slots)

    def promote():
        nonlocal M, U, obj
        if not obj:
            M = M.astype(object)
            U = U.astype(object)
            obj = True

    while True:
        sub = M[np.ix_(row_active, col_active)]
        if sub.size == 0:
            break
        hit = np.argwhere(np.abs(sub) == 1)
        if hit.size == 0:
            break
        ri = np.nonzero(row_active)[0]
        ci = np.nonzero(col_active)[0]
        i, j = int(ri[hit[0][0]]), int(ci[hit[0][1]])
        s = int(M[i, j])
        if s == -1:
            M[i, :] = -M[i, :]
            U[i, :] = -U[i, :]
        factor = M[:, j].copy()
        factor[i] = 0
        if not obj:
            fm = int(np.abs(factor).max()) if factor.size else 0
            mm = max(int(np.abs(M[i]).max()), int(np.abs(U[i]).max()))
            if fm and fm * mm > _INT64_SAFE:
                promote()
                factor = factor.astype(object)
        M -= np.outer(factor, M[i, :])
        U -= np.outer(factor, U[i, :])
        row_active[i] = False
        col_active[j] = False
        killed.append(i)
        if not obj and M.size and max(int(np.abs(M).max()), int(np.abs(U).max())) > _INT64_SAFE:
            promote()

    rest_rows = [i for i in range(K) if row_active[i]]
    rest_cols = [j for j in range(R) if col_active[j]]
    slots = []  # (modulus, transform row)
    if rest_rows:
        sub = [[int(M[i, j]) for j in rest_cols] for i in rest_rows]
        if rest_cols:
            from .intlinalg import snf_with_inverse as _snf

            res = _snf(sub)
            for a, i in enumerate(rest_rows):
                d = res.diag[a] if a < len(res.diag) else 0
                if d == 1:
                    continue
                trow = [
                    sum(res.U[a][b] * int(U[rest_rows[b], k]) for b in range(len(rest_rows)))
                    for k in range(K)
                ]
                slots.append((d, tuple(trow)))
        else:
            for i in rest_rows:
                slots.append((0, tuple(int(x) for x in U[i, :])))
    torsion = sorted([s for s in slots if s[0]], key=lambda s: s[0])
    free = [s for s in slots if s[0] == 0]
    ordered = torsion + free
    return PresentedAbelianGroup(
        ambient_dim=K,
        moduli=tuple(d for d, _ in ordered),
        transform=tuple(row for _, row in ordered),
    )


_H2_CACHE = {}


def h2_group(G):
    """H2(G) from the normalized bar complex, with a cycle classifier."""
    key = G.digest
    if key in _H2_CACHE:
        return _H2_CACHE[key]
    if G.order > BAR_SIZE_CAP:
        raise HomologyError(f"group order {G.order} over bar-complex cap")
    m = G.order - 1
    c = m * m
    if m == 0:
        pres = cokernel([], ambient_dim=0)
        res = None
        out = H2Group(G, pres, 0, np.zeros((0, 0), dtype=np.int64), ())
        _H2_CACHE[key] = out
        return out
    D2 = boundary_matrix(G, 2)
    res = snf_with_inverse(D2)
    r = res.rank
    vinv_max = max(abs(x) for row in res.Vinv for x in row)
    dtype = np.int64 if vinv_max <= _INT64_SAFE else object
    Vinv = np.array(res.Vinv, dtype=dtype)
    K = c - r
    lattice = IntegerLattice(K)
    for _, entries in _d3_columns(G):
        y = Vinv[:, entries[0][0]] * entries[0][1]
        for i, coeff in entries[1:]:
            y = y + Vinv[:, i] * coeff
        if any(int(t) != 0 for t in y[:r]):
            raise HomologyError("d2 . d3 != 0 (bar complex bug)")
        coords = y[r:]
        if coords.size and np.any(coords):
            lattice.add([int(t) for t in coords])
    pres = _unit_pivot_cokernel(lattice.basis(), K)
    out = H2Group(G, pres, r, Vinv, tuple(res.diag))
    _H2_CACHE[key] = out
    return out


def torus_cycle(G, a, b):
    """The 2-cycle [a|b] - [b|a] of a commuting pair."""
    if G.mul[a][b] != G.mul[b][a]:
        raise HomologyError("torus cycle needs a commuting pair")
    chain = {}
    chain[(a, b)] = chain.get((a, b), 0) + 1
    chain[(b, a)] = chain.get((b, a), 0) - 1
    return {k: v for k, v in chain.items() if v and 0 not in k}


def c_tori_subgroup(G, class_ids):
    """H2 coordinates of all torus classes [c|t] - [t|c] with c running
    over representatives of the classes in C and t over the centralizer
    of c.  One representative per class suffices since conjugation acts
    trivially on H2."""
    H2 = h2_group(G)
    out = []
    for cid in sorted(set(class_ids)):
        c = G.class_reps[cid]
        for t in centralizer(G, c):
            out.append(H2.cycle_class(torus_cycle(G, c, t)))
    return out


def m_g_c(G, class_ids):
    """(M(G)_C, projection from H2 coordinates)."""
    H2 = h2_group(G)
    gens = c_tori_subgroup(G, class_ids)
    from .intlinalg import subgroup_quotient

    return subgroup_quotient(H2.presentation, gens)


def _c_class_ids(G, class_ids):
    return sorted(set(class_ids))


def n_lattice(G, class_ids):
    """Basis (list of rows) of the kernel N of Z^{C//G} -> G_ab sending a
    class to the abelianized image of its representative."""
    cids = _c_class_ids(G, class_ids)
    k = len(cids)
    if k == 0:
        return []
    A, proj = abelianization(G)
    s = A.num_slots
    cols = []
    for cid in cids:
        cols.append(list(proj(G.class_reps[cid])))
    for i, d in enumerate(A.moduli):
        if d:
            cols.append([d if j == i else 0 for j in range(s)])
    if s == 0:
        return [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    M = [[col[i] for col in cols] for i in range(s)]
    basis = kernel_lattice(M)
    lat = IntegerLattice(k)
    for v in basis:
        lat.add(v[:k])
    return lat.basis()


@dataclass(frozen=True)
class BgcH2:
    m_part: PresentedAbelianGroup
    n_rank: int
    n_basis: tuple
    splitting: str = "non-canonical"

    @property
    def torsion_order(self):
        return self.m_part.order()

    def describe(self):
        parts = [f"Z/{d}" for d in self.m_part.invariant_factors]
        parts += ["Z"] * self.n_rank
        return " x ".join(parts) if parts else "0"


def h2_bgc(G, class_ids):
    M, _ = m_g_c(G, class_ids)
    N = n_lattice(G, class_ids)
    return BgcH2(m_part=M, n_rank=len(N), n_basis=tuple(tuple(r) for r in N))


def h1_bgc(G, class_ids):
    elems = [x for x in range(G.order) if G.class_of[x] in set(class_ids)]
    Q, _ = quotient_by_normal_closure(G, elems)
    A, _ = abelianization(Q)
    return A


def pi1_bgc_order(G, class_ids):
    elems = [x for x in range(G.order) if G.class_of[x] in set(class_ids)]
    Q, _ = quotient_by_normal_closure(G, elems)
    return Q.order


def unbranched_cycle(G, handles):
    """The polygon 2-chain of a closed tuple with commutator word 1.

    For the relator word g_1 ... g_{4g} = a_1 b_1 a_1' b_1' ... (primes
    are inverses) the chain is sum_k [p_k | g_{k+1}] over partial
    products p_k, minus sum_i ([a_i|a_i'] + [b_i|b_i']).
    """
    word = []
    for a, b in handles:
        word.extend([a, b, G.inv[a], G.inv[b]])
    p = 0
    for w in word:
        p = G.mul[p][w]
    if p != 0:
        raise HomologyError("commutator word is not the identity")
    chain = {}

    def bump(x, y, c):
        if x and y and c:
            chain[(x, y)] = chain.get((x, y), 0) + c

    p = word[0] if word else 0
    for k in range(1, len(word)):
        bump(p, word[k], 1)
        p = G.mul[p][word[k]]
    for a, b in handles:
        bump(a, G.inv[a], -1)
        bump(b, G.inv[b], -1)
    return {k: v for k, v in chain.items() if v}


def sch_unbranched(G, handles):
    """H2 class of a closed unbranched tuple (list of handle pairs with
    total commutator word the identity)."""
    H2 = h2_group(G)
    return H2.cycle_class(unbranched_cycle(G, handles))


def hom_branch_type(G, class_ids, v):
    """Net branch vector [v] over the classes of C plus membership in N.

    [v](cbar) = v(cbar,+1) - v(cbar,-1); membership in N is necessary for
    realizability by a closed connected cover.
    """
    cids = _c_class_ids(G, class_ids)
    d = v.as_dict() if isinstance(v, BranchData) else dict(v)
    vec = [d.get((cid, 1), 0) - d.get((cid, -1), 0) for cid in cids]
    basis = n_lattice(G, cids)
    lat = IntegerLattice(len(cids))
    for row in basis:
        lat.add(row)
    return vec, lat.contains(vec)
