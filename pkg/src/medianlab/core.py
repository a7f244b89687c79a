"""Finite median algebras and their basic operations.

Points are the integers ``0..n-1``.  Subsets are Python int bitmasks (bit
``i`` set iff point ``i`` is a member).  Functions taking a point set accept
any iterable of points, an object with a ``mask`` attribute, or a bare int,
which is read as a bitmask (``5`` is ``{0, 2}``, not the point 5).

An algebra is stored either as a full ``n x n x n`` median table (``n <= 64``)
or, above that, as a hypercube embedding whose coordinatewise majority is the
median, evaluated on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from . import kernels
from .errors import AxiomViolation, NotConvex, TooLarge, ValidationError

MAX_TABLE_POINTS = 64
VALIDATE_SAMPLES = 1_000_000

AXIOM_NAMES = {1: "symmetry", 2: "absorption", 3: "distributivity"}


# --------------------------------------------------------------------------
# bitmask helpers


def to_mask(points: Iterable[int] | int) -> int:
    if isinstance(points, (int, np.integer)):
        raise TypeError("expected an iterable of points, got a bare int")
    mask = 0
    for p in points:
        mask |= 1 << int(p)
    return mask


def bits(mask: int):
    """Ascending indices of the set bits of ``mask``."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: int) -> frozenset:
    return frozenset(bits(mask))


def _as_mask(S) -> int:
    """Point set as a bitmask; a bare int is taken to already be a bitmask."""
    if isinstance(S, (int, np.integer)):
        return int(S)
    if isinstance(S, ConvexSet):
        return S.mask
    if hasattr(S, "mask") and isinstance(S.mask, int):
        return S.mask
    return to_mask(S)


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class ConvexSet:
    """A convex subset; ``generators`` is set when it was built as a hull."""

    mask: int
    generators: tuple | None = None

    @property
    def members(self) -> frozenset:
        return members(self.mask)

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)

    def __iter__(self):
        return bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()


@dataclass(frozen=True)
class SubsetFlags:
    convex: bool
    subalgebra: bool
    gate_convex: bool


class MedianAlgebra:
    """Finite median algebra on the points ``0..n-1``.

    Build with :func:`validate_algebra` (from a table) or
    :meth:`from_embedding`; the constructor itself trusts its input.
    """

    def __init__(self, table=None, embedding=None, labels=None):
        if table is None and embedding is None:
            raise ValueError("need a median table or an embedding")
        self.table = None if table is None else np.ascontiguousarray(table, dtype=np.int32)
        self.embedding = None if embedding is None else np.ascontiguousarray(embedding, dtype=np.uint8)
        self.n = int(self.table.shape[0] if self.table is not None else self.embedding.shape[0])
        self.labels = tuple(labels) if labels is not None else None
        self.full = (1 << self.n) - 1
        self._cache = {}
        self._index = None
        self._intervals = None
        if self.embedding is not None:
            self._index = {row.tobytes(): i for i, row in enumerate(np.packbits(self.embedding, axis=1))}
        if self.table is not None and self.n <= MAX_TABLE_POINTS:
            self._intervals = kernels.interval_masks(self.table)

    # construction -------------------------------------------------------

    @classmethod
    def from_embedding(cls, rows, labels=None, validate=True) -> "MedianAlgebra":
        """Algebra whose median is coordinatewise majority on the given bit rows.

        ``rows`` is a sequence of equal-length bit-strings or a 0/1 array.
        The set must be closed under majority.
        """
        E = _embedding_array(rows)
        n = E.shape[0]
        if n == 0:
            raise ValidationError("empty embedding")
        packed = np.packbits(E, axis=1)
        keys = [r.tobytes() for r in packed]
        if len(set(keys)) != n:
            raise ValidationError("embedding rows are not distinct")
        if n > MAX_TABLE_POINTS:
            M = cls(embedding=E, labels=labels)
            if validate:
                _sample_majority_closure(M)
            return M
        index = {k: i for i, k in enumerate(keys)}
        Ei = E.astype(np.int8)
        maj = (Ei[:, None, None, :] + Ei[None, :, None, :] + Ei[None, None, :, :]) >= 2
        flat = np.packbits(maj.reshape(n ** 3, -1), axis=1)
        table = np.empty(n ** 3, dtype=np.int32)
        for i, row in enumerate(flat):
            j = index.get(row.tobytes())
            if j is None:
                x, y, z = np.unravel_index(i, (n, n, n))
                raise ValidationError(f"embedding not closed under majority: m({x},{y},{z}) missing")
            table[i] = j
        return cls(table=table.reshape(n, n, n), embedding=E, labels=labels)

    # primitives -----------------------------------------------------------

    def med(self, x: int, y: int, z: int) -> int:
        if self.table is not None:
            return int(self.table[x, y, z])
        E = self.embedding
        row = (E[x].astype(np.int8) + E[y] + E[z]) >= 2
        return self._index[np.packbits(row).tobytes()]

    def interval_mask(self, x: int, y: int) -> int:
        if self._intervals is not None:
            return self._intervals[x][y]
        key = (min(x, y), max(x, y))
        cached = self._cache.setdefault("intervals", {})
        if key not in cached:
            if self.table is not None:
                inside = self.table[x, y, :] == np.arange(self.n)
            else:
                E = self.embedding
                same = E[x] == E[y]
                inside = (E[:, same] == E[x, same]).all(axis=1)
            cached[key] = to_mask(np.flatnonzero(inside))
        return cached[key]

    def image(self, perm, mask: int) -> int:
        out = 0
        for p in bits(mask):
            out |= 1 << int(perm[p])
        return out

    def subalgebra(self, S) -> tuple["MedianAlgebra", tuple]:
        """Restriction to a med-closed subset, re-indexed in ascending order.

        Returns the algebra and the tuple of original indices.
        """
        idx = tuple(bits(_as_mask(S)))
        if self.table is not None:
            sub = self.table[np.ix_(idx, idx, idx)]
            where = np.full(self.n, -1, dtype=np.int32)
            where[list(idx)] = np.arange(len(idx))
            sub = where[sub]
            if (sub < 0).any():
                raise ValidationError("subset is not closed under the median")
            emb = None if self.embedding is None else self.embedding[list(idx)]
            labels = None if self.labels is None else [self.labels[i] for i in idx]
            return MedianAlgebra(table=sub, embedding=emb, labels=labels), idx
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return MedianAlgebra.from_embedding(self.embedding[list(idx)], labels=labels), idx

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)

    def same_structure(self, other: "MedianAlgebra") -> bool:
        if self.n != other.n:
            return False
        if self.table is not None and other.table is not None:
            return bool(np.array_equal(self.table, other.table))
        if self.embedding is not None and other.embedding is not None:
            return bool(np.array_equal(self.embedding, other.embedding))
        return False

    def __repr__(self):
        kind = "table" if self.table is not None else "embedding"
        return f"MedianAlgebra(n={self.n}, {kind})"


@dataclass(frozen=True)
class Morphism:
    source: MedianAlgebra
    target: MedianAlgebra
    map: tuple

    def __call__(self, x: int) -> int:
        return self.map[x]

    def violations(self, limit: int = 1) -> list:
        """Triples with ``map(m(x,y,z)) != m(map x, map y, map z)``."""
        return _morphism_violations(self.source, self.target, self.map, limit)

    def is_median_map(self) -> bool:
        return not self.violations()

    def is_surjective(self) -> bool:
        return set(self.map) == set(range(self.target.n))


def _morphism_violations(src, dst, phi, limit):
    phi = np.asarray(phi)
    if src.table is not None and dst.table is not None:
        lhs = phi[src.table]
        rhs = dst.table[np.ix_(phi, phi, phi)]
        bad = np.argwhere(lhs != rhs)
        return [tuple(int(v) for v in b) for b in bad[:limit]]
    out = []
    for x in range(src.n):
        for y in range(src.n):
            for z in range(src.n):
                if phi[src.med(x, y, z)] != dst.med(phi[x], phi[y], phi[z]):
                    out.append((x, y, z))
                    if len(out) >= limit:
                        return out
    return out


# --------------------------------------------------------------------------
# construction helpers


def _embedding_array(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        E = rows.astype(np.uint8)
    else:
        rows = list(rows)
        if rows and isinstance(rows[0], str):
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise ValidationError("embedding bit-strings have unequal lengths")
            k = widths.pop()
            if any(set(r) - {"0", "1"} for r in rows):
                raise ValidationError("embedding bit-strings may only contain 0 and 1")
            E = np.array([[c == "1" for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), k)
        else:
            E = np.array(rows, dtype=np.uint8)
    if E.ndim != 2:
        raise ValidationError("embedding must be a 2-d array of bits")
    if E.size and E.max() > 1:
        raise ValidationError("embedding entries must be 0 or 1")
    return E


def _sample_majority_closure(M, samples=VALIDATE_SAMPLES, seed=0):
    rng = np.random.default_rng(seed)
    E = M.embedding.astype(np.int8)
    for lo in range(0, samples, 100_000):
        trip = rng.integers(0, M.n, size=(min(100_000, samples - lo), 3))
        maj = (E[trip[:, 0]] + E[trip[:, 1]] + E[trip[:, 2]]) >= 2
        for t, row in zip(trip, np.packbits(maj, axis=1)):
            if row.tobytes() not in M._index:
                raise ValidationError(f"embedding not closed under majority: m{tuple(int(v) for v in t)} missing")


def _table_array(table) -> np.ndarray:
    T = np.asarray(table)
    if T.ndim == 1:
        n = round(len(T) ** (1 / 3))
        if n ** 3 != len(T):
            raise ValidationError(f"flat median table has {len(T)} entries, not a cube")
        T = T.reshape(n, n, n)
    if T.ndim != 3 or len(set(T.shape)) != 1:
        raise ValidationError("median table must be n x n x n")
    n = T.shape[0]
    if n == 0:
        raise ValidationError("empty median table")
    if not np.issubdtype(T.dtype, np.integer):
        raise ValidationError("median table entries must be integers")
    if T.min() < 0 or T.max() >= n:
        raise ValidationError("median table entries out of range")
    return T.astype(np.int32)


def axiom_violations(table) -> list:
    """First violating tuple of each axiom, as ``[(axiom, tuple), ...]``."""
    T = _table_array(table)
    n = T.shape[0]
    if n > MAX_TABLE_POINTS:
        return _sampled_axiom_violations(T)
    scan = kernels.axiom_scan(T)
    found = []
    for axiom, row in zip((1, 2, 3), scan):
        if row[0] != kernels.NO_WITNESS:
            width = 5 if axiom == 3 else 3
            found.append((axiom, tuple(int(v) for v in row[:width])))
    return found


def _sampled_axiom_violations(T, samples=VALIDATE_SAMPLES, seed=0):
    n = T.shape[0]
    rng = np.random.default_rng(seed)
    found = {}
    for lo in range(0, samples, 100_000):
        q = rng.integers(0, n, size=(min(100_000, samples - lo), 5))
        x, y, z, u, v = q.T
        bad = (T[x, y, z] != T[x, z, y]) | (T[x, y, z] != T[y, x, z])
        if bad.any() and 1 not in found:
            i = np.argmax(bad)
            found[1] = (int(x[i]), int(y[i]), int(z[i]))
        bad = T[x, x, y] != x
        if bad.any() and 2 not in found:
            i = np.argmax(bad)
            found[2] = (int(x[i]), int(x[i]), int(y[i]))
        bad = T[T[x, y, z], u, v] != T[x, T[y, u, v], T[z, u, v]]
        if bad.any() and 3 not in found:
            i = np.argmax(bad)
            found[3] = tuple(int(c[i]) for c in (x, y, z, u, v))
    return sorted(found.items())


def validate_algebra(table, labels=None) -> MedianAlgebra:
    """Check the three median axioms and return the algebra.

    Full check for ``n <= 64``; above that 10^6 random 5-tuples are sampled.
    Raises :class:`AxiomViolation` naming the lowest-numbered failing axiom;
    ``violations`` on the exception lists the first witness of every axiom.
    """
    T = _table_array(table)
    found = axiom_violations(T)
    if found:
        axiom, witness = found[0]
        raise AxiomViolation(axiom, witness, found)
    return MedianAlgebra(table=T, labels=labels)


def hypercube(k: int) -> MedianAlgebra:
    """``{0,1}^k``; point ``i`` has bit ``j`` equal to ``(i >> j) & 1``."""
    rows = [[(i >> j) & 1 for j in range(k)] for i in range(2 ** k)]
    labels = ["".join(str(b) for b in r) for r in rows]
    return MedianAlgebra.from_embedding(np.array(rows, dtype=np.uint8).reshape(2 ** k, k), labels=labels)


def path(n: int) -> MedianAlgebra:
    """The path ``0 - 1 - ... - (n-1)``; the median is the middle of the sorted triple."""
    rows = [[1 if j < i else 0 for j in range(n - 1)] for i in range(n)]
    return MedianAlgebra.from_embedding(np.array(rows, dtype=np.uint8).reshape(n, n - 1))


def product(A: MedianAlgebra, B: MedianAlgebra) -> MedianAlgebra:
    """``A x B`` with point ``(a, b)`` at index ``a * B.n + b``."""
    n = A.n * B.n
    if A.table is not None and B.table is not None and n <= MAX_TABLE_POINTS:
        a = np.arange(n) // B.n
        b = np.arange(n) % B.n
        T = A.table[np.ix_(a, a, a)] * B.n + B.table[np.ix_(b, b, b)]
        emb = None
        if A.embedding is not None and B.embedding is not None:
            emb = np.hstack([A.embedding[a], B.embedding[b]])
        labels = [f"({A.label(i)},{B.label(j)})" for i, j in zip(a, b)]
        return MedianAlgebra(table=T, embedding=emb, labels=labels)
    if A.embedding is None or B.embedding is None:
        raise TooLarge("product above 64 points needs embeddings on both factors")
    a = np.arange(n) // B.n
    b = np.arange(n) % B.n
    return MedianAlgebra.from_embedding(np.hstack([A.embedding[a], B.embedding[b]]))


def relabel(M: MedianAlgebra, perm) -> MedianAlgebra:
    """Isomorphic copy in which old point ``x`` becomes ``perm[x]``."""
    perm = np.asarray(perm)
    inv = np.argsort(perm)
    emb = None if M.embedding is None else M.embedding[inv]
    labels = None if M.labels is None else [M.labels[i] for i in inv]
    if M.table is None:
        return MedianAlgebra.from_embedding(emb, labels=labels)
    T = perm[M.table[np.ix_(inv, inv, inv)]]
    return MedianAlgebra(table=T, embedding=emb, labels=labels)


# --------------------------------------------------------------------------
# operations


def median(M: MedianAlgebra, x: int, y: int, z: int) -> int:
    for p in (x, y, z):
        if not 0 <= p < M.n:
            raise IndexError(f"point {p} out of range for n={M.n}")
    return M.med(x, y, z)


def interval(M: MedianAlgebra, x: int, y: int) -> ConvexSet:
    return ConvexSet(M.interval_mask(x, y), (x, y))


def join_mask(M: MedianAlgebra, A: int, B: int) -> int:
    out = 0
    for a in bits(A):
        for b in bits(B):
            out |= M.interval_mask(a, b)
    return out


def hull_mask(M: MedianAlgebra, S: int) -> int:
    """Convex hull by iterated join with the next generator, ascending order."""
    if not S:
        raise ValueError("convex hull of the empty set")
    it = bits(S)
    hull = 1 << next(it)
    for g in it:
        if hull >> g & 1:
            continue
        hull = join_mask(M, hull, 1 << g)
    return hull


def convex_hull(M: MedianAlgebra, S) -> ConvexSet:
    mask = _as_mask(S)
    return ConvexSet(hull_mask(M, mask), tuple(bits(mask)))


def is_convex_mask(M: MedianAlgebra, S: int) -> bool:
    pts = list(bits(S))
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            if M.interval_mask(x, y) & ~S:
                return False
    return True


def is_subalgebra_mask(M: MedianAlgebra, S: int) -> bool:
    pts = list(bits(S))
    if M.table is not None:
        vals = M.table[np.ix_(pts, pts, pts)]
        inside = np.zeros(M.n, dtype=bool)
        inside[pts] = True
        return bool(inside[vals].all())
    for x, y, z in combinations(pts, 3):
        if not S >> M.med(x, y, z) & 1:
            return False
    return True


def gate_mask(M: MedianAlgebra, x: int, C: int) -> int:
    """Gate of ``x`` in the convex set ``C`` (no convexity check).

    Folding ``g <- m(x, g, c)`` over the members of ``C`` keeps ``g`` in
    ``C`` and in every ``[x, c]`` seen so far, so it ends at the gate.
    """
    if C >> x & 1:
        return x
    it = bits(C)
    g = next(it)
    for c in it:
        g = M.med(x, g, c)
    return g


def gate(M: MedianAlgebra, x: int, C) -> int:
    mask = _as_mask(C)
    if not mask:
        raise NotConvex("gate into the empty set")
    if not isinstance(C, ConvexSet) and not is_convex_mask(M, mask):
        raise NotConvex(f"set {sorted(bits(mask))} is not convex")
    return gate_mask(M, x, mask)


def gate_projection(M: MedianAlgebra, C) -> tuple:
    mask = _as_mask(C)
    if not is_convex_mask(M, mask):
        raise NotConvex(f"set {sorted(bits(mask))} is not convex")
    return tuple(gate_mask(M, x, mask) for x in range(M.n))


def classify_subset(M: MedianAlgebra, S) -> SubsetFlags:
    mask = _as_mask(S)
    if not mask:
        raise ValueError("classify_subset needs a nonempty set")
    convex = is_convex_mask(M, mask)
    # finite median algebras: gate-convex <=> convex
    return SubsetFlags(convex=convex, subalgebra=is_subalgebra_mask(M, mask), gate_convex=convex)


def convex_sets(M: MedianAlgebra) -> list:
    """All nonempty convex subsets, as masks, by closing hulls under joins."""
    found = {1 << x for x in range(M.n)}
    frontier = list(found)
    while frontier:
        nxt = []
        for C in frontier:
            for x in range(M.n):
                if C >> x & 1:
                    continue
                D = join_mask(M, C, 1 << x)
                if D not in found:
                    found.add(D)
                    nxt.append(D)
        frontier = nxt
    return sorted(found)
