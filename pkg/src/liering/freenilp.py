"""Free nilpotent Lie rings of bounded p-class on d generators.

The underlying free Lie ring is handled on a Hall basis with exact integer
structure constants; the bounded-p-class object then has one basis element
per pair (Hall element h, shift s) representing p^s * h, so instantiating a
presentation is a quotient of this ring.
"""

from __future__ import annotations

from functools import lru_cache

from .rings import LieRing


class HallAlgebra:
    """Hall basis of the free Lie ring on d generators up to a weight bound.

    Elements are integer ids; the Hall order is (weight, id).  Products are
    expanded to integer combinations of basis elements by Jacobi rewriting,
    truncating anything beyond the weight bound.
    """

    def __init__(self, d: int, max_weight: int):
        self.d = d
        self.max_weight = max_weight
        self.weight: list[int] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.by_weight: dict[int, list[int]] = {w: [] for w in range(1, max_weight + 1)}
        self._node_id: dict[tuple[int, int], int] = {}
        self._mul_cache: dict[tuple[int, int], dict[int, int]] = {}
        for g in range(d):
            self._new(1, -1, g)  # generators; right slot reused as generator index
        for w in range(2, max_weight + 1):
            for wv in range(1, w):
                wu = w - wv
                for v in self.by_weight[wv]:
                    for u in self.by_weight[wu]:
                        if self._lt(v, u) and self._hall_pair(u, v):
                            self._node(u, v)

    def _new(self, w: int, left: int, right: int) -> int:
        i = len(self.weight)
        self.weight.append(w)
        self.left.append(left)
        self.right.append(right)
        self.by_weight[w].append(i)
        return i

    def _node(self, u: int, v: int) -> int:
        key = (u, v)
        i = self._node_id.get(key)
        if i is None:
            i = self._new(self.weight[u] + self.weight[v], u, v)
            self._node_id[key] = i
        return i

    def is_gen(self, h: int) -> bool:
        return self.left[h] == -1

    def _lt(self, a: int, b: int) -> bool:
        return (self.weight[a], a) < (self.weight[b], b)

    def _hall_pair(self, u: int, v: int) -> bool:
        # u > v and (u is a generator or right(u) <= v)
        return self.is_gen(u) or not self._lt(v, self.right[u])

    def mul(self, u: int, v: int) -> dict[int, int]:
        """[u, v] as an integer combination of Hall basis elements."""
        if self.weight[u] + self.weight[v] > self.max_weight:
            return {}
        if u == v:
            return {}
        if self._lt(u, v):
            return {h: -c for h, c in self.mul(v, u).items()}
        key = (u, v)
        out = self._mul_cache.get(key)
        if out is not None:
            return out
        if self._hall_pair(u, v):
            out = {self._node(u, v): 1}
        else:
            # u = [u1, u2] with u2 > v:  [u, v] = [[u1, v], u2] + [u1, [u2, v]]
            u1, u2 = self.left[u], self.right[u]
            out = {}
            for h, c in self.mul(u1, v).items():
                for g, e in self.mul(h, u2).items():
                    out[g] = out.get(g, 0) + c * e
            for h, c in self.mul(u2, v).items():
                for g, e in self.mul(u1, h).items():
                    out[g] = out.get(g, 0) + c * e
            out = {h: c for h, c in out.items() if c}
        self._mul_cache[key] = out
        return out


@lru_cache(maxsize=None)
def _hall(d: int, max_weight: int) -> HallAlgebra:
    return HallAlgebra(d, max_weight)


@lru_cache(maxsize=None)
def free_ring(p: int, pclass: int, d: int = 2) -> tuple[LieRing, tuple[int, ...]]:
    """The free d-generator Lie ring of p-class <= pclass, and its generator indices.

    Basis elements are pairs (h, s) = p^s * h for Hall elements h, ordered by
    total weight w(h) + s.  The additive order of (h, 0) is p^(pclass+1-w(h)).
    """
    if pclass < 1:
        raise ValueError("p-class bound must be >= 1")
    if pclass > 8:
        raise ValueError("p-class bound > 8 would need a gigabyte-scale table")
    H = _hall(d, pclass)
    elems = []
    for h in range(len(H.weight)):
        for s in range(pclass - H.weight[h] + 1):
            elems.append((h, s))
    elems.sort(key=lambda hs: (H.weight[hs[0]] + hs[1], hs[0], hs[1]))
    index = {hs: i for i, hs in enumerate(elems)}
    n = len(elems)
    weights = [H.weight[h] + s for (h, s) in elems]

    def spread(acc: dict[int, int], h: int, value: int):
        """Add value * h (value any integer) in p-adic coordinates."""
        e = pclass - H.weight[h] + 1
        m = value % p**e
        s = 0
        while m:
            m, digit = divmod(m, p)
            if digit:
                acc[index[(h, s)]] = acc.get(index[(h, s)], 0) + digit
            s += 1

    products = {}
    for i in range(n):
        hi, si = elems[i]
        for j in range(i + 1, n):
            hj, sj = elems[j]
            if weights[i] + weights[j] > pclass:
                continue
            acc: dict[int, int] = {}
            for g, c in H.mul(hi, hj).items():
                spread(acc, g, c * p ** (si + sj))
            if acc:
                vec = [0] * n
                for k, c in acc.items():
                    vec[k] = c
                products[(i, j)] = vec

    pmults = {}
    for i, (h, s) in enumerate(elems):
        if s + 1 <= pclass - H.weight[h]:
            vec = [0] * n
            vec[index[(h, s + 1)]] = 1
            pmults[i] = vec

    defs: list = []
    for (h, s) in elems:
        if s > 0:
            defs.append(("p", index[(h, s - 1)]))
        elif H.is_gen(h):
            defs.append(None)
        else:
            defs.append(("prod", index[(H.left[h], 0)], index[(H.right[h], 0)]))

    ring = LieRing(p, weights, products, pmults, definitions=defs)
    gen_idx = tuple(index[(h, 0)] for h in range(d))
    return ring, gen_idx
