"""Exact linear algebra and multiplicative-group combinatorics over GF(p).

Matrices are numpy int64 arrays with entries reduced mod p.  Vectors are row
vectors; a matrix acts on the right (v -> v @ A).  Subspaces of GF(p)^d are
stored by their reduced row-echelon basis, which is unique, so two Subspace
values are equal iff their basis arrays are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(math.isqrt(n)) + 1):
        if n % d == 0:
            return False
    return True


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest positive primitive root mod p (fixed so output is reproducible)."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if p == 2:
        return 1
    # g is primitive iff g^((p-1)/q) != 1 for every prime q | p-1
    qs = []
    m = p - 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            qs.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        qs.append(m)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("no primitive root found")


@lru_cache(maxsize=None)
def dlog_table(p: int) -> dict[int, int]:
    """Discrete logs base primitive_root(p) for all of GF(p)*."""
    w = primitive_root(p)
    tab = {}
    v = 1
    for j in range(p - 1):
        tab[v] = j
        v = v * w % p
    return tab


def power_coset_transversal(p: int, k: int) -> list[int]:
    """Transversal {w^0, ..., w^(g-1)} of the k-th power subgroup of GF(p)*.

    g = gcd(p-1, k) is the index of {a^k : a in GF(p)*}, so the list has g
    elements, one per coset.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = math.gcd(p - 1, k)
    w = primitive_root(p)
    return [pow(w, i, p) for i in range(g)]


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, int]:
    """Reduced row-echelon form of mat over GF(p), with its rank.

    The input is not mutated.  RREF over a field is unique, so this doubles
    as a canonical form.
    """
    m = np.array(mat, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    nrows, ncols = m.shape
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(m[row:, col])[0]
        if len(nz) == 0:
            continue
        piv = nz[0] + row
        if piv != row:
            m[[row, piv]] = m[[piv, row]]
        m[row] = m[row] * pow(int(m[row, col]), -1, p) % p
        for r in range(nrows):
            if r != row and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[row]) % p
        row += 1
    return m, row


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Row basis (in RREF) of {v : mat @ v = 0} over GF(p)."""
    m = np.array(mat, dtype=np.int64) % p
    r, rank = rref(m, p)
    ncols = m.shape[1]
    pivots = []
    for i in range(rank):
        pivots.append(int(np.nonzero(r[i])[0][0]))
    free = [j for j in range(ncols) if j not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, j]) % p
    return rref(basis, p)[0] if len(free) else basis


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over GF(p); raises if singular."""
    m = np.array(mat, dtype=np.int64) % p
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("matrix must be square")
    aug = np.hstack([m, np.eye(n, dtype=np.int64)])
    r, rank = rref(aug, p)
    if rank < n or not np.array_equal(r[:, :n], np.eye(n, dtype=np.int64)):
        raise ValueError("matrix is singular over GF(p)")
    return r[:, n:]


@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(p)^d, canonically represented by its RREF basis."""

    p: int
    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]  # RREF rows, no zero rows

    @staticmethod
    def from_rows(rows: np.ndarray, p: int, ambient_dim: int | None = None) -> "Subspace":
        rows = np.atleast_2d(np.array(rows, dtype=np.int64))
        if ambient_dim is None:
            ambient_dim = rows.shape[1]
        r, rank = rref(rows, p)
        return Subspace(p, ambient_dim, tuple(tuple(int(x) for x in row) for row in r[:rank]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.array(self.basis, dtype=np.int64)

    def key(self) -> tuple:
        return (self.ambient_dim, self.basis)

    def contains_vector(self, v: np.ndarray) -> bool:
        v = np.array(v, dtype=np.int64) % self.p
        for row in self.matrix():
            lead = int(np.nonzero(row)[0][0]) if row.any() else None
            if lead is not None and v[lead]:
                v = (v - v[lead] * row) % self.p
        return not v.any()

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(np.array(row)) for row in other.basis)

    def apply(self, A: np.ndarray) -> "Subspace":
        """Image subspace under v -> v @ A, re-canonicalized."""
        return Subspace.from_rows(self.matrix() @ A, self.p, self.ambient_dim)

    def sum(self, other: "Subspace") -> "Subspace":
        rows = np.vstack([self.matrix(), other.matrix()])
        return Subspace.from_rows(rows, self.p, self.ambient_dim)


def hyperplane_from_normal(normal: np.ndarray, p: int) -> Subspace:
    """ker(normal) as a Subspace, built in RREF directly.

    With j* the last nonzero coordinate, the kernel has the RREF basis
    e_i - (normal_i / normal_j*) e_j* over i != j*.
    """
    d = len(normal)
    nz = np.nonzero(normal)[0]
    if len(nz) == 0:
        raise ValueError("zero functional")
    jstar = int(nz[-1])
    scale = pow(int(normal[jstar]), -1, p)
    rows = []
    for i in range(d):
        if i == jstar:
            continue
        row = [0] * d
        row[i] = 1
        row[jstar] = (-int(normal[i]) * scale) % p
        rows.append(tuple(row))
    return Subspace(p, d, tuple(rows))


def hyperplane_normal(s: Subspace) -> np.ndarray:
    """The kernel functional of a hyperplane, scaled to leading coefficient 1."""
    d = s.ambient_dim
    B = s.matrix()
    if s.dim != d - 1:
        raise ValueError("not a hyperplane")
    pivots = [int(np.nonzero(r)[0][0]) for r in B]
    free = [j for j in range(d) if j not in pivots]
    f = free[0] if free else d - 1
    lam = np.zeros(d, dtype=np.int64)
    lam[f] = 1
    for i, pc in enumerate(pivots):
        lam[pc] = (-B[i, f]) % s.p
    lead = int(np.nonzero(lam)[0][0])
    return lam * pow(int(lam[lead]), -1, s.p) % s.p


def hyperplanes(d: int, p: int) -> list[Subspace]:
    """All (d-1)-dimensional subspaces of GF(p)^d, count (p^d - 1)/(p - 1).

    Each hyperplane is the kernel of a functional; normals are enumerated as
    projective points with first nonzero coordinate 1, in lexicographic order.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    out = []
    for lead in range(d):
        # normal = (0,...,0,1,*,...,*) with the 1 at position `lead`
        tail = d - lead - 1
        for idx in range(p**tail):
            normal = np.zeros(d, dtype=np.int64)
            normal[lead] = 1
            rem = idx
            for t in range(tail - 1, -1, -1):
                normal[lead + 1 + t] = rem % p
                rem //= p
            out.append(hyperplane_from_normal(normal, p))
    return out


def subspaces_of_dim(d: int, k: int, p: int) -> list[Subspace]:
    """All k-dimensional subspaces of GF(p)^d by RREF pivot-pattern enumeration.

    Intended for small Grassmannians (the pipeline only ever needs k = d-1);
    the count is the Gaussian binomial [d choose k]_p.
    """
    if k == 0:
        return [Subspace.from_rows(np.zeros((0, d), dtype=np.int64), p, d)]
    from itertools import combinations

    out = []
    for pivots in combinations(range(d), k):
        free_pos = [
            (i, j)
            for i in range(k)
            for j in range(d)
            if j > pivots[i] and j not in pivots
        ]
        base = np.zeros((k, d), dtype=np.int64)
        for i, c in enumerate(pivots):
            base[i, c] = 1
        for idx in range(p ** len(free_pos)):
            m = base.copy()
            rem = idx
            for (i, j) in free_pos:
                m[i, j] = rem % p
                rem //= p
            out.append(Subspace(p, d, tuple(tuple(int(x) for x in row) for row in m)))
    return out


def subspace_orbits(
    gens: list[np.ndarray], spaces: list[Subspace], p: int
) -> list[tuple[Subspace, list[Subspace]]]:
    """Partition `spaces` into orbits under the matrix group generated by `gens`.

    Action: S -> image of S under v -> v @ A, re-canonicalized by RREF.
    Returns one (representative, orbit_members) pair per orbit; the
    representative is the lexicographically least member, and orbits appear
    in order of first appearance in `spaces`.
    """
    gens = [np.array(g, dtype=np.int64) % p for g in gens]
    for g in gens:
        inverse(g, p)  # raises if a generator is singular
        if spaces and g.shape[0] != spaces[0].ambient_dim:
            raise ValueError("generator dimension mismatch")
    if spaces and all(s.dim == s.ambient_dim - 1 for s in spaces):
        return _hyperplane_orbits(gens, spaces, p)
    index = {s.key(): s for s in spaces}
    seen: set[tuple] = set()
    orbits = []
    for s in spaces:
        if s.key() in seen:
            continue
        orbit = [s]
        seen.add(s.key())
        frontier = [s]
        while frontier:
            nxt = []
            for t in frontier:
                for g in gens:
                    u = t.apply(g)
                    if u.key() not in seen:
                        if u.key() not in index:
                            raise ValueError("action does not preserve the input set")
                        seen.add(u.key())
                        orbit.append(u)
                        nxt.append(u)
            frontier = nxt
        rep = min(orbit, key=lambda t: t.basis)
        orbits.append((rep, orbit))
    return orbits


def _hyperplane_orbits(gens, spaces, p):
    """Hyperplane orbits computed on dual projective normals, vectorized.

    T = ker(lam) maps under v -> v @ A to ker(lam @ inverse(A).T), so each
    generator acts on the stacked normal vectors by one matrix product;
    orbits are the components of the resulting functional graphs, found by
    min-label propagation.
    """
    d = spaces[0].ambient_dim
    m = len(spaces)
    inv_table = np.array([0] + [pow(v, -1, p) for v in range(1, p)], dtype=np.int64)

    normals = np.zeros((m, d), dtype=np.int64)
    for row, s in enumerate(spaces):
        B = s.matrix()
        if s.dim != d - 1:
            raise ValueError("not a hyperplane")
        pivots = [int(np.nonzero(r)[0][0]) for r in B]
        free = [j for j in range(d) if j not in pivots]
        f = free[0] if free else d - 1
        lam = np.zeros(d, dtype=np.int64)
        lam[f] = 1
        for i, pc in enumerate(pivots):
            lam[pc] = (-B[i, f]) % p
        normals[row] = lam

    def canon(arr):
        lead = (arr != 0).argmax(axis=1)
        lv = arr[np.arange(len(arr)), lead]
        return arr * inv_table[lv][:, None] % p

    normals = canon(normals)
    powers = np.array([p** (d - 1 - j) for j in range(d)], dtype=np.int64)
    packed = normals @ powers
    order = np.argsort(packed, kind="stable")
    sorted_pk = packed[order]
    if len(np.unique(sorted_pk)) != m:
        raise ValueError("duplicate subspaces in input")

    labels = np.arange(m)
    image_idx = []
    for g in gens:
        B = inverse(np.transpose(g), p)
        qk = canon(normals @ B % p) @ powers
        pos = np.searchsorted(sorted_pk, qk)
        if (pos >= m).any() or (sorted_pk[np.minimum(pos, m - 1)] != qk).any():
            raise ValueError("action does not preserve the input set")
        image_idx.append(order[pos])
    changed = True
    while changed:
        changed = False
        for idx in image_idx:
            nl = np.minimum(labels, labels[idx])
            np.minimum.at(nl, idx, labels)
            if not np.array_equal(nl, labels):
                labels = nl
                changed = True

    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(int(labels[i]), []).append(i)
    orbits = []
    for root in sorted(groups):
        orbit = [spaces[i] for i in groups[root]]
        rep = min(orbit, key=lambda t: t.basis)
        orbits.append((rep, orbit))
    return orbits
