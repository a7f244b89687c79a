"""Half-spaces, walls, separation and the wall-coordinate embedding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (MedianAlgebra, _as_mask, bits, gate_mask, hull_mask, is_convex_mask,
                   members)
from .errors import InternalInconsistency, NoWitness, TooLarge

MAX_SCAN_POINTS = 24


@dataclass(frozen=True, order=True)
class HalfSpace:
    mask: int

    @property
    def members(self) -> frozenset:
        return members(self.mask)

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)


@dataclass(frozen=True, order=True)
class Wall:
    """Pair of complementary half-spaces; ``side`` is the one holding point 0."""

    side: int
    full: int

    @property
    def other(self) -> int:
        return self.full & ~self.side

    @property
    def halfspaces(self) -> tuple:
        return HalfSpace(self.side), HalfSpace(self.other)

    def bitstring(self, n: int) -> str:
        return "".join("1" if self.side >> i & 1 else "0" for i in range(n))

    def map(self, perm) -> "Wall":
        img = 0
        for p in bits(self.side):
            img |= 1 << int(perm[p])
        return make_wall(img, self.full)


def make_wall(side: int, full: int) -> Wall:
    return Wall(side if side & 1 else full & ~side, full)


def enumerate_walls(M: MedianAlgebra) -> list:
    """All walls of ``M``, sorted by canonical side mask.

    Without an embedding the candidates are ``{z : m(x,y,z) = x}`` for every
    pair with ``[x,y] = {x,y}``; every wall of a finite median algebra
    arises this way.  With an embedding, the nontrivial coordinate splits
    are the candidates.  Each candidate is re-checked for convexity of both
    sides when the median table is available.
    """
    if "walls" in M._cache:
        return M._cache["walls"]
    if M.embedding is not None:
        E = M.embedding
        weights = [1 << i for i in range(M.n)]
        sides = set()
        for col in E.T:
            side = sum(w for w, b in zip(weights, col) if b)
            if side and side != M.full:
                sides.add(side)
    else:
        if M.n > MAX_SCAN_POINTS:
            raise TooLarge(f"wall enumeration without an embedding needs n <= {MAX_SCAN_POINTS}")
        sides = set()
        for x in range(M.n):
            for y in range(x + 1, M.n):
                if M.interval_mask(x, y) != (1 << x | 1 << y):
                    continue
                sides.add(sum(1 << z for z in range(M.n) if M.med(x, y, z) == x))
    walls = sorted({make_wall(s, M.full) for s in sides})
    if M.table is not None:
        for w in walls:
            if not (is_convex_mask(M, w.side) and is_convex_mask(M, w.other)):
                raise InternalInconsistency(f"candidate wall {w.bitstring(M.n)} is not a wall")
    M._cache["walls"] = walls
    return walls


def halfspaces(M: MedianAlgebra) -> list:
    return sorted(h for w in enumerate_walls(M) for h in w.halfspaces)


def delta(M: MedianAlgebra, A, B) -> list:
    """Half-spaces containing ``A`` and disjoint from ``B``."""
    a, b = _as_mask(A), _as_mask(B)
    return [h for h in halfspaces(M) if a & ~h.mask == 0 and not h.mask & b]


def gate_separator_point(M: MedianAlgebra, A, B) -> int:
    """A point ``a`` of the convex set ``A`` with ``delta(A, B) == delta({a}, B)``.

    Alternating gate projections between ``A`` and the hull of ``B`` settle
    on a pair of mutual gates; the ``A`` end of that pair is the witness.
    """
    a_mask, b_mask = _as_mask(A), _as_mask(B)
    target = delta(M, a_mask, b_mask)
    hull_b = hull_mask(M, b_mask)
    common = a_mask & hull_b
    if common:
        a = next(bits(common))
    else:
        a = gate_mask(M, next(bits(b_mask)), a_mask)
        for _ in range(M.n + 1):
            b = gate_mask(M, a, hull_b)
            a_next = gate_mask(M, b, a_mask)
            if a_next == a:
                break
            a = a_next
    if delta(M, 1 << a, b_mask) == target:
        return a
    for a in bits(a_mask):
        if delta(M, 1 << a, b_mask) == target:
            return a
    raise NoWitness(f"no point of {sorted(bits(a_mask))} realises delta against {sorted(bits(b_mask))}")


def is_transverse(w1: Wall, w2: Wall) -> bool:
    h1, h2 = w1.side, w2.side
    k1, k2 = w1.other, w2.other
    return bool(h1 & h2 and h1 & k2 and k1 & h2 and k1 & k2)


@dataclass(frozen=True)
class WallEmbedding:
    """Per-point codes; bit ``j`` of ``codes[x]`` is 1 iff ``x`` lies in the
    canonical side of wall ``j``."""

    codes: tuple
    width: int
    separating: bool
    transverse: bool

    def bitstring(self, x: int) -> str:
        return "".join("1" if self.codes[x] >> j & 1 else "0" for j in range(self.width))


def wall_codes(M: MedianAlgebra, W) -> tuple:
    codes = [0] * M.n
    for j, w in enumerate(W):
        for x in bits(w.side):
            codes[x] |= 1 << j
    return tuple(codes)


def wall_embedding(M: MedianAlgebra, W) -> WallEmbedding:
    W = list(W)
    if not W:
        raise ValueError("wall_embedding needs at least one wall")
    codes = wall_codes(M, W)
    image = set(codes)
    return WallEmbedding(codes, len(W), len(image) == M.n, len(image) == 2 ** len(W))


def halfspaces_cutting(M: MedianAlgebra, A) -> list:
    """Walls both of whose sides meet ``A``."""
    a = _as_mask(A)
    if not a:
        raise ValueError("halfspaces_cutting needs a nonempty set")
    return [w for w in enumerate_walls(M) if w.side & a and w.other & a]


def transversality_matrix(walls) -> np.ndarray:
    k = len(walls)
    out = np.zeros((k, k), dtype=np.uint8)
    for i in range(k):
        for j in range(i + 1, k):
            out[i, j] = out[j, i] = is_transverse(walls[i], walls[j])
    return out
