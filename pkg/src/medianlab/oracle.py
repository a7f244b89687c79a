"""Brute-force reference implementations and the hypercube-subalgebra corpus.

Everything here works straight from the median table by definition and
shares no code with the optimised modules beyond :class:`MedianAlgebra`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from .core import MedianAlgebra, hypercube, validate_algebra
from .errors import Mismatch, TooLarge

MAX_CORPUS_DIM = 4
MAX_RECHECK_POINTS = 16


@dataclass(frozen=True)
class Corpus:
    algebras: tuple
    labels: tuple

    def __iter__(self):
        return iter(zip(self.labels, self.algebras))

    def __len__(self):
        return len(self.algebras)


def _hypercube_symmetries(k: int) -> np.ndarray:
    """Point permutations of ``{0,1}^k`` induced by coordinate permutations and flips."""
    pts = np.arange(1 << k)
    out = []
    for perm in permutations(range(k)):
        for flip in range(1 << k):
            img = np.zeros_like(pts)
            for j, pj in enumerate(perm):
                img |= ((pts >> j & 1) ^ (flip >> j & 1)) << pj
            out.append(img)
    return np.array(out)


def _closure(T: np.ndarray, mask: int) -> int:
    while True:
        idx = [p for p in range(T.shape[0]) if mask >> p & 1]
        new = mask
        for p in np.unique(T[np.ix_(idx, idx, idx)]):
            new |= 1 << int(p)
        if new == mask:
            return mask
        mask = new


def enumerate_hypercube_subalgebras(k: int) -> Corpus:
    """Med-closed nonempty subsets of ``{0,1}^k``, one per hypercube-symmetry class.

    Closed sets are generated by adding one point at a time and closing;
    each class is represented by its least mask under the symmetry group.
    Labels read ``"subalgebra #i of {0,1}^k"`` in ascending (size, mask) order.
    """
    if not 0 <= k <= MAX_CORPUS_DIM:
        raise TooLarge(f"corpus dimension must be in 0..{MAX_CORPUS_DIM}")
    cube = hypercube(k)
    T = cube.table
    n = cube.n
    syms = _hypercube_symmetries(k)
    seen = set()
    frontier = [1 << p for p in range(n)]
    seen.update(frontier)
    while frontier:
        nxt = []
        for S in frontier:
            for p in range(n):
                if not S >> p & 1:
                    C = _closure(T, S | 1 << p)
                    if C not in seen:
                        seen.add(C)
                        nxt.append(C)
        frontier = nxt
    reps = set()
    for S in seen:
        idx = [p for p in range(n) if S >> p & 1]
        reps.add(int((np.left_shift(1, syms[:, idx])).sum(axis=1).min()))
    ordered = sorted(reps, key=lambda m: (m.bit_count(), m))
    algebras, labels = [], []
    for i, S in enumerate(ordered):
        rows = [format(p, f"0{k}b")[::-1] if k else "" for p in range(n) if S >> p & 1]
        M = MedianAlgebra.from_embedding(_rows_array(rows, k))
        validate_algebra(M.table)
        algebras.append(M)
        labels.append(f"subalgebra #{i} of {{0,1}}^{k}")
    return Corpus(tuple(algebras), tuple(labels))


def _rows_array(rows, k):
    return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), k)


# --------------------------------------------------------------------------
# brute-force references


def _pts(mask: int, n: int) -> list:
    return [p for p in range(n) if mask >> p & 1]


def brute_is_convex(M: MedianAlgebra, S: int) -> bool:
    T, n = M.table, M.n
    pts = _pts(S, n)
    return all(not T[x, y, z] == z or S >> z & 1 for x in pts for y in pts for z in range(n))


def brute_is_closed(M: MedianAlgebra, S: int) -> bool:
    T = M.table
    pts = _pts(S, M.n)
    return all(S >> int(T[x, y, z]) & 1 for x in pts for y in pts for z in pts)


def brute_walls(M: MedianAlgebra) -> list:
    """Canonical sides (the side with point 0) from a scan of all subsets."""
    full = (1 << M.n) - 1
    out = []
    for S in range(1, full, 2):
        if brute_is_convex(M, S) and brute_is_convex(M, full & ~S):
            out.append(S)
    return sorted(out)


def brute_hull(M: MedianAlgebra, S: int) -> int:
    T, n = M.table, M.n
    while True:
        pts = _pts(S, n)
        new = S
        for x in pts:
            for y in pts:
                for z in range(n):
                    if T[x, y, z] == z:
                        new |= 1 << z
        if new == S:
            return S
        S = new


def brute_gate(M: MedianAlgebra, x: int, C: int) -> int | None:
    T = M.table
    pts = _pts(C, M.n)
    found = [g for g in pts if all(T[x, c, g] == g for c in pts)]
    return found[0] if len(found) == 1 else None


def _maj(a: int, b: int, c: int) -> int:
    return (a & b) | (a & c) | (b & c)


def brute_cube_iso(M: MedianAlgebra, S: int) -> dict | None:
    """Backtracking search for a median iso ``{0,1}^j -> S``; returns code -> point."""
    pts = _pts(S, M.n)
    size = len(pts)
    if size & (size - 1):
        return None
    T = M.table
    codes = list(range(size))
    f = {}

    def consistent(c):
        # every triple through c whose median code is already placed
        for a in f:
            for b in f:
                m = _maj(a, b, c)
                if m in f and T[f[a], f[b], f[c]] != f[m]:
                    return False
        return True

    def rec(i):
        if i == size:
            return True
        c = codes[i]
        for p in pts:
            if p in f.values():
                continue
            f[c] = p
            if consistent(c) and rec(i + 1):
                return True
            del f[c]
        return False

    if rec(0):
        # final full check
        for a, b, c in product(codes, repeat=3):
            if T[f[a], f[b], f[c]] != f[_maj(a, b, c)]:
                return None
        return dict(f)
    return None


def brute_cubes(M: MedianAlgebra) -> list:
    """Masks of all subcubes, from a scan of subsets of power-of-two size."""
    out = []
    n = M.n
    size = 1
    while size <= n:
        for pts in combinations(range(n), size):
            S = sum(1 << p for p in pts)
            if brute_is_closed(M, S) and brute_cube_iso(M, S) is not None:
                out.append(S)
        size *= 2
    return sorted(out)


def brute_phi(M: MedianAlgebra, weights) -> tuple:
    T, n = M.table, M.n
    out = [Fraction(0)] * n
    for x in range(n):
        for y in range(n):
            for z in range(n):
                out[int(T[x, y, z])] += weights[x] * weights[y] * weights[z]
    return tuple(out)


def brute_cubical_measures(M: MedianAlgebra) -> list:
    """Uniform measures on the brute-force cubes that are Phi-fixed, by mask."""
    out = []
    for S in brute_cubes(M):
        k = S.bit_count()
        w = tuple(Fraction(1, k) if S >> p & 1 else Fraction(0) for p in range(M.n))
        if brute_phi(M, w) == w:
            out.append(S)
    return out


def automorphisms(M: MedianAlgebra) -> list:
    """All median automorphisms, by backtracking over point images."""
    T, n = M.table, M.n
    out = []
    img = [-1] * n
    used = [False] * n

    def ok(x):
        for a in range(x + 1):
            for b in range(x + 1):
                m = int(T[a, b, x])
                if m <= x and T[img[a], img[b], img[x]] != img[m]:
                    return False
        return True

    def rec(x):
        if x == n:
            g = np.array(img)
            if np.array_equal(g[T], T[np.ix_(g, g, g)]):
                out.append(g)
            return
        for p in range(n):
            if not used[p]:
                img[x] = p
                used[p] = True
                if ok(x):
                    rec(x + 1)
                used[p] = False
        img[x] = -1

    rec(0)
    return out


def median_characters(M: MedianAlgebra) -> list:
    """All median morphisms ``M -> {0,1}`` as point tuples, by scanning ``2^n`` maps."""
    T, n = M.table, M.n
    out = []
    for f in range(1 << n):
        v = [f >> p & 1 for p in range(n)]
        if all(v[int(T[x, y, z])] == _maj(v[x], v[y], v[z])
               for x in range(n) for y in range(x, n) for z in range(y, n)):
            out.append(tuple(v))
    return out


# --------------------------------------------------------------------------
# recheck


@dataclass(frozen=True)
class RecheckReport:
    n: int
    counts: dict
    diffs: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.diffs


def brute_recheck(M: MedianAlgebra, strict: bool = False) -> RecheckReport:
    """Diff walls, cubes, hulls, gates and cubical measures against brute force.

    With ``strict`` the first difference raises :class:`Mismatch`.
    """
    from .core import convex_sets, gate_mask, hull_mask
    from .cubes import enumerate_cubes
    from .measures import cubical_measure, is_balanced
    from .walls import enumerate_walls

    if M.n > MAX_RECHECK_POINTS:
        raise TooLarge(f"brute_recheck needs n <= {MAX_RECHECK_POINTS}")
    diffs = []

    def diff(component, witness):
        if strict:
            raise Mismatch(component, witness)
        diffs.append((component, witness))

    ref_walls = brute_walls(M)
    variants = [("walls", M)]
    if M.embedding is not None:
        variants.append(("walls (table only)", MedianAlgebra(table=M.table)))
    for name, A in variants:
        got = [w.side for w in enumerate_walls(A)]
        if got != ref_walls:
            diff(name, sorted(set(got) ^ set(ref_walls)))

    ref_cubes = brute_cubes(M)
    got = sorted(c.mask for c in enumerate_cubes(M))
    if got != ref_cubes:
        diff("cubes", sorted(set(got) ^ set(ref_cubes)))

    for S in range(1, 1 << M.n):
        if hull_mask(M, S) != brute_hull(M, S):
            diff("hulls", S)
            break

    convex = convex_sets(M)
    if sorted(convex) != sorted(S for S in range(1, 1 << M.n) if brute_is_convex(M, S)):
        diff("convex sets", None)
    for C in convex:
        bad = next((x for x in range(M.n) if gate_mask(M, x, C) != brute_gate(M, x, C)), None)
        if bad is not None:
            diff("gates", (bad, C))
            break

    ref_measures = brute_cubical_measures(M)
    got = sorted(c.mask for c in enumerate_cubes(M) if is_balanced(M, cubical_measure(M, c)))
    if got != ref_measures:
        diff("cubical measures", sorted(set(got) ^ set(ref_measures)))

    counts = {"walls": len(ref_walls), "cubes": len(ref_cubes), "convex sets": len(convex)}
    return RecheckReport(M.n, counts, tuple(diffs))
