"""Descendant generation: p-covers, nucleus, allowable subspaces, orbit dedup.

Given a consistent ring M of p-class c, the p-cover is built by the tails
method: every non-defining table entry gets a fresh central generator of
additive order p, and the consistency defects (Jacobi on basis triples,
p-linearity on all ordered pairs) cut the tail space down to the
multiplicator Z.  Immediate descendants of a target order are the quotients
of the cover by orbit representatives of the allowable subspaces of Z under
the extended automorphism action.

Automorphism groups are computed by lifting along the ring's own quotient
chain: Aut of the 2-dimensional top quotient is GL(2, p); at each step the
liftable subgroup is the stabilizer of the subspace presenting the next
quotient (found by orbit-stabilizer with Schreier generators), and the
kernel is generated by central translations of the generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gfplin
from .gfplin import Subspace
from .rings import (
    LieRing,
    StdForm,
    Subgroup,
    is_consistent,
    lower_p_central_series,
    quotient,
    standard_form,
    truncate_std,
)


@dataclass
class PCover:
    """p-covering ring of a standard-form parent.

    tail_positions index the cover coordinates spanning the multiplicator Z
    (central, elementary abelian, cover/Z isomorphic to the parent);
    tail_info records the relation each tail sits on, in parent indices.
    """

    parent: LieRing           # standard form, with definitions
    cover: LieRing
    parent_pos: list[int]     # cover position of each parent basis element
    tail_positions: list[int]
    tail_info: list[tuple]    # ("prod", i, j) with i < j, or ("p", i)
    nucleus: Subspace         # inside Z, in tail coordinates

    @property
    def z_dim(self) -> int:
        return len(self.tail_positions)

    def embed_parent(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros(self.cover.n, dtype=np.int64)
        out[self.parent_pos] = v
        return out

    def z_subgroup(self, rows: np.ndarray) -> Subgroup:
        """Subgroup of the cover spanned by Z-coordinate rows."""
        H = Subgroup(self.cover)
        for row in np.atleast_2d(np.array(rows, dtype=np.int64)):
            vec = np.zeros(self.cover.n, dtype=np.int64)
            vec[self.tail_positions] = row
            H.insert(vec)
        return H


def _definition_sets(M: LieRing):
    prod_defs = set()
    pmul_defs = set()
    if M.definitions is None:
        raise ValueError("ring has no definitions; run standard_form first")
    for i, df in enumerate(M.definitions):
        if df is None:
            continue
        if df[0] == "prod":
            prod_defs.add(frozenset((df[1], df[2])))
        else:
            pmul_defs.add(df[1])
    return prod_defs, pmul_defs


def p_cover(M: LieRing) -> PCover:
    """p-covering ring of M (M in standard form with definitions)."""
    p, n = M.p, M.n
    c = int(M.weights.max(initial=0))
    prod_defs, pmul_defs = _definition_sets(M)

    tails = []  # (weight, info)
    for i in range(n):
        for j in range(i + 1, n):
            if frozenset((i, j)) not in prod_defs:
                tails.append((int(M.weights[i] + M.weights[j]), ("prod", i, j)))
    for i in range(n):
        if i not in pmul_defs:
            tails.append((int(M.weights[i]) + 1, ("p", i)))
    # weight-ascending tail order: defect elimination then only ever rewrites
    # a tail in terms of tails of weight >= its own, keeping labels valid
    tails.sort()
    m = len(tails)

    # weight-sorted naive basis: parent elements first within each weight
    items = [(int(M.weights[i]), 0, i) for i in range(n)] + [
        (w, 1, t) for t, (w, _) in enumerate(tails)
    ]
    items.sort()
    pos_parent = [0] * n
    pos_tail = [0] * m
    for newpos, (_, kind, idx) in enumerate(items):
        if kind == 0:
            pos_parent[idx] = newpos
        else:
            pos_tail[idx] = newpos
    N = n + m

    weights = np.array([it[0] for it in items], dtype=np.int64)

    def embed(v):
        out = np.zeros(N, dtype=np.int64)
        out[pos_parent] = v
        return out

    products = {}
    pmults = {}
    tail_of_pair = {}
    tail_of_pmul = {}
    for t, (_, info) in enumerate(tails):
        if info[0] == "prod":
            tail_of_pair[(info[1], info[2])] = t
        else:
            tail_of_pmul[info[1]] = t
    for i in range(n):
        for j in range(i + 1, n):
            vec = embed(M.prod[i, j])
            t = tail_of_pair.get((i, j))
            if t is not None:
                vec[pos_tail[t]] = (vec[pos_tail[t]] + 1) % p
            a, b = pos_parent[i], pos_parent[j]
            if a < b:
                products[(a, b)] = vec
            else:
                products[(b, a)] = (-vec) % p  # cannot happen with sorted weights
    for i in range(n):
        vec = embed(M.pmult[i])
        t = tail_of_pmul.get(i)
        if t is not None:
            vec[pos_tail[t]] = (vec[pos_tail[t]] + 1) % p
        pmults[pos_parent[i]] = vec

    naive = LieRing(p, weights, products, pmults, check=True)

    # consistency defects, supported on the tail coordinates
    tail_cols = [pos_tail[t] for t in range(m)]
    defects = []

    def record(vec):
        if vec.any():
            par = np.delete(vec, tail_cols)
            if par.any():
                raise AssertionError("consistency defect escapes the tail space")
            defects.append(vec[tail_cols])

    for i in range(n):
        pi = pos_parent[i]
        for j in range(n):
            pj = pos_parent[j]
            lhs = naive.mul_basis(naive.pmult[pi], pj)
            rhs = naive.pmul(naive.prod[pi, pj])
            record(naive.sub(lhs, rhs))
    for i in range(n):
        for j in range(i + 1, n):
            pi, pj = pos_parent[i], pos_parent[j]
            vij = naive.prod[pi, pj]
            for k in range(j + 1, n):
                pk = pos_parent[k]
                t1 = naive.mul_basis(vij, pk)
                t2 = naive.mul_basis(naive.prod[pj, pk], pi)
                t3 = naive.mul_basis(naive.prod[pk, pi], pj)
                record(naive.normalize(t1 + t2 + t3))

    if defects:
        D, rank = gfplin.rref(np.array(defects, dtype=np.int64), p)
        D = D[:rank]
    else:
        D, rank = np.zeros((0, m), dtype=np.int64), 0

    # eliminate the pivot tails by substitution
    pivots = [int(np.nonzero(row)[0][0]) for row in D]
    pivot_cols = [tail_cols[t] for t in pivots]
    keep = [x for x in range(N) if x not in pivot_cols]
    subst = np.zeros((N, len(keep)), dtype=np.int64)
    newpos = {x: k for k, x in enumerate(keep)}
    for x in keep:
        subst[x, newpos[x]] = 1
    for row, t in zip(D, pivots):
        free = [u for u in range(m) if row[u] and u != t]
        for u in free:
            subst[tail_cols[t], newpos[tail_cols[u]]] = (-row[u]) % p

    products2 = {}
    pmults2 = {}
    for a_idx in range(len(keep)):
        i = keep[a_idx]
        pmults2[a_idx] = (naive.pmult[i] @ subst) % p
        for b_idx in range(a_idx + 1, len(keep)):
            j = keep[b_idx]
            products2[(a_idx, b_idx)] = (naive.prod[i, j] @ subst) % p

    defs2 = []
    inv_parent = {pos_parent[i]: i for i in range(n)}
    for x in keep:
        if x in inv_parent:
            df = M.definitions[inv_parent[x]]
            if df is None:
                defs2.append(None)
            elif df[0] == "prod":
                defs2.append(("prod", newpos[pos_parent[df[1]]], newpos[pos_parent[df[2]]]))
            else:
                defs2.append(("p", newpos[pos_parent[df[1]]]))
        else:
            defs2.append(None)
    cover = LieRing(p, weights[keep], products2, pmults2, definitions=defs2)
    if not is_consistent(cover):
        raise AssertionError("p-cover failed the consistency gate")

    parent_pos2 = [newpos[pos_parent[i]] for i in range(n)]
    surviving = [t for t in range(m) if tail_cols[t] in newpos]
    tail_positions = [newpos[tail_cols[t]] for t in surviving]
    tail_info = [tails[t][1] for t in surviving]

    # the multiplicator is central and elementary abelian by construction;
    # verify cover/Z reproduces the parent tables
    zsub = Subgroup(cover, [cover.basis(x) for x in tail_positions])
    Q, _ = quotient(cover, zsub, check=False)
    if Q.table_key() != M.table_key():
        raise AssertionError("cover/Z does not reproduce the parent")

    pc = PCover(
        parent=M,
        cover=cover,
        parent_pos=parent_pos2,
        tail_positions=tail_positions,
        tail_info=tail_info,
        nucleus=_nucleus_subspace(cover, tail_positions, c),
    )
    return pc


def _nucleus_subspace(cover: LieRing, tail_positions: list[int], c: int) -> Subspace:
    series = lower_p_central_series(cover)
    zdim = len(tail_positions)
    if len(series) <= c + 1:
        return Subspace.from_rows(np.zeros((0, zdim), dtype=np.int64), cover.p, zdim)
    term = series[c]  # index c is the (c+1)-st term L_{c+1}
    rows = []
    for r in term.basis_rows():
        outside = np.delete(r, tail_positions)
        if outside.any():
            raise AssertionError("nucleus escapes the multiplicator")
        rows.append(r[tail_positions])
    if not rows:
        return Subspace.from_rows(np.zeros((0, zdim), dtype=np.int64), cover.p, zdim)
    return Subspace.from_rows(np.array(rows, dtype=np.int64), cover.p, zdim)


def nucleus(cov: PCover) -> Subspace:
    """The (c+1)-st lower p-central term of the cover, inside Z."""
    return cov.nucleus


def is_terminal_cover(cov: PCover) -> bool:
    return cov.nucleus.dim == 0


def extend_to_cover(cov: PCover, A: np.ndarray, preimage_shift=None) -> tuple[np.ndarray, np.ndarray]:
    """Extend an automorphism of the parent (matrix A on parent coordinates)
    to the cover; returns (full cover matrix, action on Z in tail coordinates).

    preimage_shift optionally adds a fixed Z-element (tail-coordinate vector)
    to every generator preimage; the induced Z-action must not depend on it,
    which the tests exercise.
    """
    M, C = cov.parent, cov.cover
    n = M.n
    img = np.zeros((C.n, C.n), dtype=np.int64)

    def alpha_parent_vec(v):
        acc = np.zeros(C.n, dtype=np.int64)
        for i in np.nonzero(v)[0]:
            acc = acc + int(v[i]) * img[cov.parent_pos[i]]
        return C.normalize(acc)

    for i in range(n):
        df = M.definitions[i]
        pi = cov.parent_pos[i]
        if df is None:
            img[pi] = cov.embed_parent(A[i])
            if preimage_shift is not None:
                shift = np.zeros(C.n, dtype=np.int64)
                shift[cov.tail_positions] = preimage_shift
                img[pi] = C.add(img[pi], shift)
        elif df[0] == "prod":
            img[pi] = C.mul(img[cov.parent_pos[df[1]]], img[cov.parent_pos[df[2]]])
        else:
            img[pi] = C.pmul(img[cov.parent_pos[df[1]]])
    for t, info in enumerate(cov.tail_info):
        pt = cov.tail_positions[t]
        if info[0] == "prod":
            i, j = info[1], info[2]
            val = C.sub(
                C.mul(img[cov.parent_pos[i]], img[cov.parent_pos[j]]),
                alpha_parent_vec(M.prod[i, j]),
            )
        else:
            i = info[1]
            val = C.sub(C.pmul(img[cov.parent_pos[i]]), alpha_parent_vec(M.pmult[i]))
        outside = np.delete(val, cov.tail_positions)
        if outside.any():
            raise AssertionError("tail image escapes the multiplicator")
        img[pt] = val
    zmat = img[np.ix_(cov.tail_positions, cov.tail_positions)] % C.p
    return img, zmat


def gl_generators(d: int, p: int) -> list[np.ndarray]:
    """A generating pair for GL(d, p) (single generator for d = 1)."""
    w = gfplin.primitive_root(p)
    if d == 1:
        return [np.array([[w]], dtype=np.int64)]
    if d == 2:
        return [
            np.array([[w, 0], [0, 1]], dtype=np.int64),
            np.array([[p - 1, 1], [p - 1, 0]], dtype=np.int64),
        ]
    raise NotImplementedError("only 1- and 2-generator rings are supported")


def gl_order(d: int, p: int) -> int:
    out = 1
    for i in range(d):
        out *= p**d - p**i
    return out


@dataclass
class AutAction:
    """Generators of Aut(M) as basis matrices on M's coordinates."""

    ring: LieRing
    gens: list[np.ndarray]
    order: int
    std: StdForm
    gens_std: list[np.ndarray]

    def check(self) -> bool:
        """Every generator preserves the product and p-multiple tables."""
        R = self.ring
        for A in self.gens:
            gfplin.inverse(np.mod(A, R.p), R.p)
            for i in range(R.n):
                if not np.array_equal(R.apply_map(R.pmult[i], A), R.pmul(A[i])):
                    return False
                for j in range(i + 1, R.n):
                    if not np.array_equal(
                        R.apply_map(R.prod[i, j], A), R.mul(A[i], A[j])
                    ):
                        return False
        return True


def _dedupe_maps(mats, n):
    seen = set()
    out = []
    ident = np.eye(n, dtype=np.int64)
    for A in mats:
        key = A.tobytes()
        if key in seen or np.array_equal(A, ident):
            continue
        seen.add(key)
        out.append(A)
    return out


def _orbit_stabilizer(Q: LieRing, cov: PCover, gens_full: list[np.ndarray],
                      start_rows: np.ndarray) -> tuple[int, list[np.ndarray]]:
    """Orbit of the subspace spanned by start_rows (tail coordinates) under
    the generators (full matrices on Q = cov.parent), with Schreier
    stabilizer generators as full matrices on Q."""
    p = Q.p
    exts = [extend_to_cover(cov, A) for A in gens_full]
    zmats = [z for (_, z) in exts]
    start = Subspace.from_rows(start_rows, p, cov.z_dim)
    ident = np.eye(Q.n, dtype=np.int64)
    transversal = {start.key(): (start, ident)}
    queue = [start]
    stab = []
    while queue:
        T = queue.pop(0)
        U = transversal[T.key()][1]
        for A, z in zip(gens_full, zmats):
            T2 = T.apply(z)
            carrier = Q.compose_maps(U, A)
            got = transversal.get(T2.key())
            if got is None:
                transversal[T2.key()] = (T2, carrier)
                queue.append(T2)
            else:
                schreier = Q.compose_maps(carrier, Q.invert_map(got[1]))
                stab.append(schreier)
    return len(transversal), _dedupe_maps(stab, Q.n)


def automorphisms(M: LieRing, std: StdForm | None = None) -> AutAction:
    """A generating set for Aut(M), by lifting along the quotient chain.

    Completeness: at each lower-p-central level the liftable automorphisms
    form the stabilizer of the subspace presenting the next quotient, and
    the kernel is generated by central generator translations; both parts
    are carried along, so the returned set generates the full group.
    """
    if std is None:
        std = standard_form(M)
    S = std.ring
    c = int(S.weights.max(initial=0))
    d = len(S.generator_indices)
    if S.n and S.weights[0] != 1:
        raise AssertionError("standard form must start at weight 1")

    gens = [A.copy() for A in gl_generators(d, S.p)]
    order = gl_order(d, S.p)
    for k in range(1, c):
        Qk = truncate_std(S, k)
        Qk1 = truncate_std(S, k + 1)
        cov = p_cover(Qk)
        nk, nk1 = Qk.n, Qk1.n
        vdim = nk1 - nk
        # tail images in the next quotient determine the presenting subspace
        tmap = np.zeros((cov.z_dim, vdim), dtype=np.int64)
        for t, info in enumerate(cov.tail_info):
            if info[0] == "prod":
                i, j = info[1], info[2]
                diff = Qk1.sub(Qk1.prod[i, j], np.concatenate([Qk.prod[i, j], np.zeros(vdim, dtype=np.int64)]))
            else:
                i = info[1]
                diff = Qk1.sub(Qk1.pmult[i], np.concatenate([Qk.pmult[i], np.zeros(vdim, dtype=np.int64)]))
            if diff[:nk].any():
                raise AssertionError("quotient chain tables do not nest")
            tmap[t] = diff[nk:]
        T_rows = gfplin.nullspace(tmap.T, S.p)
        T_sub = Subspace.from_rows(T_rows, S.p, cov.z_dim)
        if T_sub.dim != cov.z_dim - vdim:
            raise AssertionError("presenting subspace has wrong codimension")
        if T_sub.sum(cov.nucleus).dim != cov.z_dim:
            raise AssertionError("presenting subspace is not allowable")

        orbit_size, stab = _orbit_stabilizer(Qk, cov, gens, T_rows)
        if order % orbit_size:
            raise AssertionError("orbit size does not divide the group order")
        order = order // orbit_size

        # lift the stabilizer through cover/T ~ next quotient
        tail_img = [np.concatenate([np.zeros(nk, dtype=np.int64), row]) for row in tmap]

        def project(v):
            acc = np.zeros(nk1, dtype=np.int64)
            acc[:nk] += v[cov.parent_pos]
            for t, pt in enumerate(cov.tail_positions):
                if v[pt]:
                    acc += int(v[pt]) * tail_img[t]
            return Qk1.normalize(acc)

        sections = []
        for i in range(nk1):
            if i < nk:
                vec = np.zeros(cov.cover.n, dtype=np.int64)
                vec[cov.parent_pos[i]] = 1
            else:
                df = Qk1.definitions[i]
                if df is None:
                    raise AssertionError("new layer element lacks a definition")
                if df[0] == "prod":
                    vec = cov.cover.prod[cov.parent_pos[df[1]], cov.parent_pos[df[2]]]
                else:
                    vec = cov.cover.pmult[cov.parent_pos[df[1]]]
            sections.append(vec)

        lifted = []
        for A in stab:
            full, _ = extend_to_cover(cov, A)
            B = np.array([project(cov.cover.apply_map(svec, full)) for svec in sections])
            lifted.append(B)

        translations = []
        for g in range(d):
            for z in range(nk, nk1):
                B = np.eye(nk1, dtype=np.int64)
                B[g, z] = 1
                translations.append(B)
        gens = _dedupe_maps(lifted + translations, nk1)
        if not gens:
            gens = [np.eye(nk1, dtype=np.int64)]
        order *= S.p ** (d * vdim)

    gens_std = gens
    to_orig = [
        M.rownorm(std.old_in_new @ A @ std.new_in_old) for A in gens_std
    ]
    return AutAction(ring=M, gens=to_orig, order=order, std=std, gens_std=gens_std)


def allowable_subspaces(cov: PCover, target_exp: int) -> list[Subspace]:
    """All T < Z with T + nucleus = Z and |cover/T| = p^target_exp.

    target_exp must lie strictly between the parent's order exponent and the
    cover's.
    """
    zdim = cov.z_dim
    p = cov.parent.p
    r = target_exp - cov.parent.n
    if not (1 <= r <= zdim) or target_exp >= cov.cover.n:
        raise ValueError("impossible target order")
    nuc = cov.nucleus
    if r == 1:
        # T + N = Z for a hyperplane T = ker(lam) iff lam does not kill N
        cands = gfplin.hyperplanes(zdim, p)
        if nuc.dim == 0:
            return []
        nmat = nuc.matrix()
        out = []
        for T in cands:
            lam = gfplin.hyperplane_normal(T)
            if (nmat @ lam % p).any():
                out.append(T)
        return out
    cands = gfplin.subspaces_of_dim(zdim, zdim - r, p)
    return [T for T in cands if T.sum(nuc).dim == zdim]


def is_terminal(M: LieRing) -> bool:
    """True iff the nucleus of the cover is zero (no immediate descendants)."""
    std = standard_form(M)
    return p_cover(std.ring).nucleus.dim == 0


@dataclass
class DescendantSet:
    parent: LieRing
    target_exp: int
    cover: PCover
    aut: AutAction
    representatives: list[LieRing]
    chosen_subspaces: list[Subspace]
    orbit_sizes: list[int]
    orbit_lookup: dict  # allowable subspace key -> representative index

    @property
    def count(self) -> int:
        return len(self.representatives)


def immediate_descendants(
    M: LieRing,
    target_exp: int,
    aut: AutAction | None = None,
) -> DescendantSet:
    """A complete irredundant set of immediate descendants of order p^target_exp."""
    if aut is None:
        aut = automorphisms(M)
    std = aut.std
    cov = p_cover(std.ring)
    if cov.nucleus.dim == 0:
        return DescendantSet(M, target_exp, cov, aut, [], [], [], {})
    cands = allowable_subspaces(cov, target_exp)
    zmats = _dedupe_maps([extend_to_cover(cov, A)[1] for A in aut.gens_std], cov.z_dim)
    if not zmats:
        zmats = [np.eye(cov.z_dim, dtype=np.int64)]
    orbs = gfplin.subspace_orbits(zmats, cands, M.p)
    orbs.sort(key=lambda ro: ro[0].basis)
    reps, subs, sizes = [], [], []
    lookup = {}
    c = int(std.ring.weights.max(initial=0))
    for idx, (rep, orbit) in enumerate(orbs):
        H = cov.z_subgroup(rep.matrix())
        D, _ = quotient(cov.cover, H, check=False)
        if D.n != target_exp:
            raise AssertionError("descendant has wrong order")
        series = lower_p_central_series(D)
        if len(series) - 1 != c + 1:
            raise AssertionError("descendant has wrong p-class")
        reps.append(D)
        subs.append(rep)
        sizes.append(len(orbit))
        for T in orbit:
            lookup[T.key()] = idx
    return DescendantSet(M, target_exp, cov, aut, reps, subs, sizes, lookup)
