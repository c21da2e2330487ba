"""Structure-constant presentations of finite nilpotent Lie rings of order p^n.

A ring is given by a weighted basis b_1, ..., b_n in which every element has
a unique normal form sum(c_i * b_i) with 0 <= c_i < p.  The additive group is
encoded by the p-multiple table (p * b_i expanded over strictly higher-weight
basis elements), so basis elements can have additive order p^e with e > 1.
The Lie product is encoded by the table of b_i * b_j for i < j; the other
half is synthesized from antisymmetry.

Vector arithmetic accumulates exactly over the integers and then reduces to
normal form, carrying coefficient overflow through the p-multiple table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import gfplin


def _as_vec(v, n: int) -> np.ndarray:
    a = np.array(v, dtype=np.int64)
    if a.shape != (n,):
        raise ValueError(f"expected coefficient vector of length {n}")
    return a


class LieRing:
    """A finite nilpotent Lie ring over Z/p^e in structure-constant form."""

    def __init__(self, p, weights, products, pmults, definitions=None, check=True):
        """products: dict {(i, j): vec} or (n, n, n) array giving b_i * b_j, i < j.

        pmults: (n, n) array (or dict {i: vec}) giving p * b_i.
        definitions: optional tuple, entry i is None, ("prod", j, k) meaning
        b_i = b_j * b_k, or ("p", j) meaning b_i = p * b_j.
        """
        self.p = int(p)
        self.weights = np.array(weights, dtype=np.int64)
        n = self.n = len(self.weights)

        pm = np.zeros((n, n), dtype=np.int64)
        if isinstance(pmults, dict):
            for i, v in pmults.items():
                pm[i] = _as_vec(v, n)
        else:
            pm[:] = np.array(pmults, dtype=np.int64).reshape(n, n)
        self.pmult = pm  # provisional; normalized below

        full = np.zeros((n, n, n), dtype=np.int64)
        if isinstance(products, dict):
            for (i, j), v in products.items():
                if i >= j:
                    raise ValueError("product table keys must have i < j")
                full[i, j] = _as_vec(v, n)
        else:
            arr = np.array(products, dtype=np.int64).reshape(n, n, n)
            for i in range(n):
                for j in range(i + 1, n):
                    full[i, j] = arr[i, j]
        for i in range(n):
            self.pmult[i] = self.normalize(pm[i])
        for i in range(n):
            for j in range(i + 1, n):
                full[i, j] = self.normalize(full[i, j])
                full[j, i] = self.normalize(-full[i, j])
        self.prod = full

        self.orders = np.array([self._additive_order_exp(i) for i in range(n)], dtype=np.int64)
        self.definitions = tuple(definitions) if definitions is not None else None

        if check:
            self._validate()

    # -- element arithmetic ------------------------------------------------

    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    def basis(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = 1
        return v

    def normalize(self, v) -> np.ndarray:
        """Reduce an integer coefficient vector to normal form, with carries."""
        v = np.array(v, dtype=np.int64)
        for _ in range(self.n + 2):
            q, r = np.divmod(v, self.p)
            if not q.any():
                return r
            v = r + q @ self.pmult
        raise AssertionError("carry propagation did not terminate")

    def add(self, x, y) -> np.ndarray:
        return self.normalize(np.add(x, y, dtype=np.int64))

    def sub(self, x, y) -> np.ndarray:
        return self.normalize(np.subtract(x, y, dtype=np.int64))

    def neg(self, x) -> np.ndarray:
        return self.normalize(-np.array(x, dtype=np.int64))

    def smul(self, k: int, x) -> np.ndarray:
        return self.normalize(int(k) * np.array(x, dtype=np.int64))

    def pmul(self, x) -> np.ndarray:
        """p * x, which is sum(x_i * (p * b_i))."""
        return self.normalize(np.array(x, dtype=np.int64) @ self.pmult)

    def mul(self, x, y) -> np.ndarray:
        """Lie product, bilinear expansion through the full product table."""
        acc = np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.prod)
        return self.normalize(acc)

    def mul_basis(self, x, j: int) -> np.ndarray:
        """x * b_j (cheaper than mul against a unit vector)."""
        return self.normalize(np.asarray(x) @ self.prod[:, j, :])

    def apply_map(self, v, M: np.ndarray) -> np.ndarray:
        """Image of v under the additive map with rows M (images in this ring)."""
        return self.normalize(np.asarray(v, dtype=np.int64) @ M)

    def rownorm(self, M: np.ndarray) -> np.ndarray:
        return np.array([self.normalize(row) for row in np.asarray(M, dtype=np.int64)])

    def compose_maps(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Matrix of 'apply A, then B', rows normalized in this (target) ring."""
        return self.rownorm(np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64))

    def solve_preimage(self, A: np.ndarray, target) -> np.ndarray:
        """Solve apply_map(x, A) == target for x, for bijective endomorphism maps."""
        A0inv = gfplin.inverse(np.mod(A, self.p), self.p)
        x = self.zero()
        r = self.normalize(target)
        for _ in range(int(self.weights.max(initial=0)) + 2):
            if not r.any():
                return x
            x = self.add(x, np.mod(r @ A0inv, self.p))
            r = self.sub(target, self.apply_map(x, A))
        raise ValueError("map is not invertible")

    def invert_map(self, A: np.ndarray) -> np.ndarray:
        return np.array([self.solve_preimage(A, self.basis(i)) for i in range(self.n)])

    # -- derived structure ---------------------------------------------------

    def _additive_order_exp(self, i: int) -> int:
        v = self.basis(i)
        e = 0
        while v.any():
            v = self.pmul(v)
            e += 1
            if e > self.n + 1:
                raise AssertionError("p-multiple chain does not terminate")
        return e

    @property
    def generator_indices(self) -> list[int]:
        return [i for i in range(self.n) if self.weights[i] == 1]

    def order_exp(self) -> int:
        """log_p of the ring order."""
        return self.n

    def table_key(self) -> tuple:
        return (self.p, self.weights.tobytes(), self.prod.tobytes(), self.pmult.tobytes())

    def _validate(self):
        w = self.weights
        if self.n and (np.diff(w) < 0).any():
            raise ValueError("basis must be weight-sorted")
        for i in range(self.n):
            bad = [k for k in np.nonzero(self.pmult[i])[0] if w[k] <= w[i]]
            if bad:
                raise ValueError(f"p*b_{i} not supported on higher weight")
            for j in range(i + 1, self.n):
                bad = [k for k in np.nonzero(self.prod[i, j])[0] if w[k] < w[i] + w[j]]
                if bad:
                    raise ValueError(f"b_{i}*b_{j} not supported on weight >= {w[i] + w[j]}")

    def __repr__(self):
        return f"LieRing(p={self.p}, n={self.n}, weights={self.weights.tolist()})"


# -- consistency ------------------------------------------------------------


def _normalize_batch(R: LieRing, arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(-1, R.n)
    for _ in range(R.n + 2):
        q, r = np.divmod(flat, R.p)
        if not q.any():
            return r.reshape(arr.shape)
        flat = r + q @ R.pmult
    raise AssertionError("carry propagation did not terminate")


def is_consistent(R: LieRing) -> bool:
    """Jacobi on all basis triples, p-linearity on all pairs, order chains.

    This is the soundness gate every constructed ring must pass.
    """
    n, prod, pm = R.n, R.prod, R.pmult
    # (p*b_i)*b_j == p*(b_i*b_j) for every ordered pair
    lhs = _normalize_batch(R, np.einsum("il,ljm->ijm", pm, prod))
    rhs = _normalize_batch(R, np.einsum("ijl,lm->ijm", prod, pm))
    if not np.array_equal(lhs, rhs):
        return False
    # Jacobi (b_i b_j) b_k + (b_j b_k) b_i + (b_k b_i) b_j = 0 for i < j < k
    for i in range(n):
        for j in range(i + 1, n):
            t1 = np.einsum("l,lkm->km", prod[i, j], prod)     # (b_i b_j) b_k
            t2 = np.einsum("kl,lm->km", prod[j], prod[:, i, :])   # (b_j b_k) b_i
            t3 = np.einsum("kl,lm->km", prod[:, i, :], prod[:, j, :])  # (b_k b_i) b_j
            jac = _normalize_batch(R, t1 + t2 + t3)
            if jac[j + 1:].any():
                return False
    # stored additive orders match the p-multiple chains
    for i in range(n):
        if R._additive_order_exp(i) != R.orders[i]:
            return False
    return True


# -- echelonized additive subgroups ------------------------------------------


class Subgroup:
    """An additive subgroup in echelon form (one row per pivot position).

    Rows have pivot coefficient 1 and distinct pivots; the row set is closed
    under p-multiplication, so membership is decided by leading-coefficient
    reduction.  Once an ideal-closure has been run, instances double as
    ideals.
    """

    def __init__(self, R: LieRing, elems=()):
        self.R = R
        self.rows: dict[int, np.ndarray] = {}
        for e in elems:
            self.insert(e)

    def copy(self) -> "Subgroup":
        s = Subgroup(self.R)
        s.rows = {j: v.copy() for j, v in self.rows.items()}
        return s

    def reduce(self, v) -> np.ndarray:
        """Residue of v after leading-coefficient reduction; zero iff member."""
        v = self.R.normalize(v)
        while v.any():
            j = int(np.nonzero(v)[0][0])
            row = self.rows.get(j)
            if row is None:
                return v
            v = self.R.sub(v, self.R.smul(int(v[j]), row))
        return v

    def reduce_full(self, v) -> np.ndarray:
        """Clear every pivot coordinate of v (single ascending pass)."""
        v = self.R.normalize(v)
        for j in sorted(self.rows):
            if v[j]:
                v = self.R.sub(v, self.R.smul(int(v[j]), self.rows[j]))
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()

    def insert(self, v) -> list[np.ndarray]:
        """Add v to the subgroup; returns the rows actually added (with the
        p-multiple chain rows needed for closure)."""
        added = []
        v = self.reduce(v)
        while v.any():
            j = int(np.nonzero(v)[0][0])
            row = self.R.smul(pow(int(v[j]), -1, self.R.p), v)
            self.rows[j] = row
            added.append(row)
            v = self.reduce(self.R.pmul(row))
        return added

    @property
    def dim_exp(self) -> int:
        """log_p of the subgroup order."""
        return len(self.rows)

    def basis_rows(self) -> list[np.ndarray]:
        return [self.rows[j] for j in sorted(self.rows)]

    def canonical_rows(self) -> tuple[tuple[int, ...], ...]:
        rows = {j: v.copy() for j, v in self.rows.items()}
        for j in sorted(rows):
            for i in rows:
                if i != j and rows[i][j]:
                    rows[i] = self.R.sub(rows[i], self.R.smul(int(rows[i][j]), rows[j]))
        return tuple(tuple(int(x) for x in rows[j]) for j in sorted(rows))

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.canonical_rows() == other.canonical_rows()

    def __repr__(self):
        return f"Subgroup(dim_exp={self.dim_exp} of n={self.R.n})"


def full_subgroup(R: LieRing) -> Subgroup:
    return Subgroup(R, [R.basis(i) for i in range(R.n)])


def ideal_closure(R: LieRing, seeds, gens: list[int] | None = None) -> Subgroup:
    """Smallest ideal containing the seed elements.

    gens must ring-generate R (defaults to every basis element, which is
    always sufficient; pass the weight-1 generators when the ring is known to
    be generated by them, which makes closure much cheaper).
    """
    if gens is None:
        gens = list(range(R.n))
    H = Subgroup(R)
    work = []
    for s in seeds:
        work.extend(H.insert(s))
    while work:
        r = work.pop()
        for g in gens:
            v = R.mul_basis(r, g)
            if v.any():
                work.extend(H.insert(v))
    return H


def is_ideal(R: LieRing, H: Subgroup) -> bool:
    return all(
        H.contains(R.mul_basis(r, k)) for r in H.basis_rows() for k in range(R.n)
    )


# -- series and classes -------------------------------------------------------


def _product_span(R: LieRing, H: Subgroup, with_p: bool) -> Subgroup:
    """Span of {r * b_k} (all k) over rows r of H, plus p*r when with_p."""
    S = Subgroup(R)
    for r in H.basis_rows():
        for k in range(R.n):
            v = R.mul_basis(r, k)
            if v.any():
                S.insert(v)
        if with_p:
            v = R.pmul(r)
            if v.any():
                S.insert(v)
    return S


def lower_central_series(R: LieRing) -> list[Subgroup]:
    """L = L^1 >= L^2 >= ... ending with the zero term."""
    terms = [full_subgroup(R)]
    while terms[-1].dim_exp:
        nxt = _product_span(R, terms[-1], with_p=False)
        terms.append(nxt)
        if nxt.dim_exp == terms[-2].dim_exp:
            raise ValueError("lower central series does not terminate (ring not nilpotent)")
    return terms


def lower_p_central_series(R: LieRing) -> list[Subgroup]:
    """L_1 = L, L_2 = L^2 + pL, L_{c+1} = L_c L + p L_c, ending with zero."""
    terms = [full_subgroup(R)]
    while terms[-1].dim_exp:
        nxt = _product_span(R, terms[-1], with_p=True)
        terms.append(nxt)
        if nxt.dim_exp == terms[-2].dim_exp:
            raise ValueError("lower p-central series does not terminate")
    return terms


def nilpotency_class(R: LieRing) -> int:
    return len(lower_central_series(R)) - 1


def p_class(R: LieRing) -> int:
    return len(lower_p_central_series(R)) - 1


def is_maximal_class(R: LieRing) -> bool:
    """Order p^n with nilpotency class n - 1 (and n >= 3)."""
    return R.n >= 3 and nilpotency_class(R) == R.n - 1


def characteristic_exp(R: LieRing) -> int:
    """Smallest e with p^e * x = 0 for all x."""
    return int(R.orders.max(initial=0))


def check_lemma2(R: LieRing) -> bool:
    """p*x lies in the last nonzero lower-central term for every basis x.

    Precondition: R has maximal class and order p^n with n >= 3.
    """
    if not is_maximal_class(R):
        raise ValueError("ring is not of maximal class with n >= 3")
    last = lower_central_series(R)[-2]
    return all(last.contains(R.pmul(R.basis(i))) for i in range(R.n))


# -- quotients ----------------------------------------------------------------


def quotient(R: LieRing, H: Subgroup, check: bool = True) -> tuple[LieRing, np.ndarray]:
    """Quotient ring R/H for an ideal H, and the projection matrix.

    The quotient basis is the image of the basis elements at non-pivot
    positions; the second return value maps R-coordinates to quotient
    coordinates (rows = images of the R basis).
    """
    if check and not is_ideal(R, H):
        raise ValueError("subgroup is not an ideal")
    keep = [i for i in range(R.n) if i not in H.rows]
    pos = {i: k for k, i in enumerate(keep)}
    m = len(keep)

    def project(v):
        return H.reduce_full(v)[keep]

    products = {}
    for a in range(m):
        for b in range(a + 1, m):
            products[(a, b)] = project(R.prod[keep[a], keep[b]])
    pmults = {a: project(R.pmult[keep[a]]) for a in range(m)}
    Q = LieRing(R.p, R.weights[keep], products, pmults)
    proj = np.zeros((R.n, m), dtype=np.int64)
    for i in range(R.n):
        proj[i] = H.reduce_full(R.basis(i))[keep]
    return Q, proj


# -- standard weighted form ----------------------------------------------------


class _ExprEchelon:
    """Echelon rows that remember an exact integer expression over a basis list."""

    def __init__(self, R: LieRing, width: int):
        self.R = R
        self.width = width
        self.rows: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def copy(self):
        e = _ExprEchelon(self.R, self.width)
        e.rows = {j: (v.copy(), x.copy()) for j, (v, x) in self.rows.items()}
        return e

    def reduce(self, v, x):
        v = self.R.normalize(v)
        x = np.array(x, dtype=np.int64)
        while v.any():
            j = int(np.nonzero(v)[0][0])
            if j not in self.rows:
                return v, x
            rv, rx = self.rows[j]
            c = int(v[j])
            v = self.R.sub(v, self.R.smul(c, rv))
            x = x - c * rx
        return v, x

    def insert(self, v, x):
        v, x = self.reduce(v, x)
        while v.any():
            j = int(np.nonzero(v)[0][0])
            s = pow(int(v[j]), -1, self.R.p)
            rv, rx = self.R.smul(s, v), s * x
            self.rows[j] = (rv, rx)
            v, x = self.reduce(self.R.pmul(rv), self.R.p * rx)

    def express(self, v) -> np.ndarray:
        res, x = self.reduce(v, np.zeros(self.width, dtype=np.int64))
        if res.any():
            raise ValueError("element not in span")
        return -x


@dataclass
class StdForm:
    """A ring rewritten on a standard weighted basis with definitions.

    new_in_old rows are the standard basis elements in the source ring's
    coordinates; old_in_new is the inverse coordinate map.
    """

    ring: LieRing
    source: LieRing
    new_in_old: np.ndarray
    old_in_new: np.ndarray

    def to_std(self, v) -> np.ndarray:
        return self.ring.apply_map(v, self.old_in_new)

    def from_std(self, v) -> np.ndarray:
        return self.source.apply_map(v, self.new_in_old)


def standard_form(R: LieRing) -> StdForm:
    """Rebuild R on a basis adapted to its lower p-central series.

    Weight-1 elements form a minimal generating set; every deeper basis
    element is defined as (previous element) * generator or p * (previous
    element), which is the bookkeeping the cover construction needs.
    """
    series = lower_p_central_series(R)
    c = len(series) - 1
    n = R.n

    chosen: list[np.ndarray] = []
    defs: list = []
    layer_of: list[int] = []
    layer_start = []
    for k in range(1, c + 1):
        layer_start.append(len(chosen))
        W = series[k].copy()  # chosen elements must be independent mod L_{k+1}
        if k == 1:
            candidates = [(R.basis(i), None) for i in range(n)]
        else:
            gens = list(range(layer_start[0], layer_start[1] if len(layer_start) > 1 else len(chosen)))
            prev = [i for i in range(len(chosen)) if layer_of[i] == k - 1]
            candidates = []
            for d in prev:
                for g in gens:
                    candidates.append((R.mul(chosen[d], chosen[g]), ("prod", d, g)))
            for d in prev:
                candidates.append((R.pmul(chosen[d]), ("p", d)))
        for vec, df in candidates:
            if not W.contains(vec):
                chosen.append(vec)
                defs.append(df)
                layer_of.append(k)
                W.insert(vec)
        want = series[k - 1].dim_exp - series[k].dim_exp
        got = sum(1 for l in layer_of if l == k)
        if got != want:
            raise AssertionError(f"layer {k}: spanned {got} of {want} dimensions")
    if len(chosen) != n:
        raise AssertionError("standard basis does not span")

    S = np.array(chosen, dtype=np.int64)
    weights = np.array(layer_of, dtype=np.int64)

    # expression echelons per layer, built from the deepest layer up
    ech_by_layer: dict[int, _ExprEchelon] = {c + 1: _ExprEchelon(R, n)}
    for k in range(c, 0, -1):
        e = ech_by_layer[k + 1].copy()
        for idx in range(n):
            if layer_of[idx] == k:
                unit = np.zeros(n, dtype=np.int64)
                unit[idx] = 1
                e.insert(chosen[idx], unit)
        ech_by_layer[k] = e

    pmult_std = np.zeros((n, n), dtype=np.int64)

    def norm_std(v):
        v = np.array(v, dtype=np.int64)
        for _ in range(n + 2):
            q, r = np.divmod(v, R.p)
            if not q.any():
                return r
            v = r + q @ pmult_std
        raise AssertionError("carry propagation did not terminate")

    for i in range(n - 1, -1, -1):
        w = int(weights[i])
        if w + 1 <= c:
            expr = ech_by_layer[w + 1].express(R.pmul(chosen[i]))
            pmult_std[i] = norm_std(expr)
        else:
            if R.pmul(chosen[i]).any():
                raise AssertionError("top-layer element with nonzero p-multiple")

    products = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = int(weights[i] + weights[j])
            prod_ij = R.mul(chosen[i], chosen[j])
            if w > c:
                if prod_ij.any():
                    raise AssertionError("product escapes the filtration")
                products[(i, j)] = np.zeros(n, dtype=np.int64)
            else:
                products[(i, j)] = norm_std(ech_by_layer[w].express(prod_ij))

    ring = LieRing(R.p, weights, products, pmult_std, definitions=defs)
    full = ech_by_layer[1]
    U = np.array([norm_std(full.express(R.basis(i))) for i in range(n)], dtype=np.int64)
    return StdForm(ring=ring, source=R, new_in_old=S, old_in_new=U)


def truncate_std(std_ring: LieRing, k: int) -> LieRing:
    """Quotient of a standard-form ring by its weight > k part (a basis prefix)."""
    keep = [i for i in range(std_ring.n) if std_ring.weights[i] <= k]
    m = len(keep)
    if m == std_ring.n:
        return std_ring
    products = {
        (a, b): std_ring.prod[keep[a], keep[b]][keep]
        for a in range(m)
        for b in range(a + 1, m)
    }
    pmults = {a: std_ring.pmult[keep[a]][keep] for a in range(m)}
    defs = None
    if std_ring.definitions is not None:
        defs = [std_ring.definitions[i] for i in keep]
    return LieRing(std_ring.p, std_ring.weights[keep], products, pmults, definitions=defs)


# -- serialization -------------------------------------------------------------


def ring_to_json(R: LieRing) -> str:
    """Canonical JSON form; byte-stable for identical rings."""
    doc = {
        "p": R.p,
        "orders": R.orders.tolist(),
        "weights": R.weights.tolist(),
        "products": [
            [R.prod[i, j].tolist() for j in range(i + 1, R.n)] for i in range(R.n)
        ],
        "pmults": R.pmult.tolist(),
    }
    return json.dumps(doc, separators=(",", ":"))


def ring_from_json(text: str | dict) -> LieRing:
    doc = json.loads(text) if isinstance(text, str) else text
    n = len(doc["weights"])
    products = {}
    for i, row in enumerate(doc["products"]):
        for off, vec in enumerate(row):
            products[(i, i + 1 + off)] = vec
    R = LieRing(doc["p"], doc["weights"], products, doc["pmults"])
    if R.orders.tolist() != doc["orders"]:
        raise ValueError("stored additive orders do not match the tables")
    return R
