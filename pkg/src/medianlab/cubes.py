"""Antipodes, Ends, cube recognition and enumeration of subcubes.

A cube here is a median subalgebra isomorphic to ``{0,1}^k``; it need not be
convex (the diagonal ``{00, 11}`` of the square is a 1-cube).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import MedianAlgebra, _as_mask, bits, hull_mask, is_subalgebra_mask, members
from .errors import InternalInconsistency, NotSubalgebra, TooLarge
from .walls import MAX_SCAN_POINTS, enumerate_walls, wall_codes


@dataclass(frozen=True)
class Cube:
    """A subcube with its antipodal involution and an iso witness.

    ``coords`` maps each member to its code in ``{0,1}^dim`` (bit ``j`` of the
    int); ``hull`` is the mask of its convex hull, an interval.
    """

    mask: int
    dim: int
    antipode: dict = field(compare=False, repr=False)
    coords: dict = field(compare=False, repr=False)
    hull: int = field(compare=False, repr=False, default=0)

    @property
    def members(self) -> frozenset:
        return members(self.mask)

    def __contains__(self, x) -> bool:
        return bool(self.mask >> int(x) & 1)

    def __len__(self) -> int:
        return 1 << self.dim

    def point(self, code: int) -> int:
        for p, c in self.coords.items():
            if c == code:
                return p
        raise KeyError(code)


@dataclass(frozen=True)
class CubeCheck:
    is_cube: bool
    dim: int | None


def antipode_in(M: MedianAlgebra, x: int, A) -> int | None:
    """The unique ``y`` in ``A`` with ``m(x, y, z) = z`` for all ``z`` in ``A``."""
    a = _as_mask(A)
    if not a:
        raise ValueError("antipode_in needs a nonempty set")
    for y in bits(a):
        if a & ~M.interval_mask(x, y) == 0:
            return y
    return None


def _ends_mask(M: MedianAlgebra, a: int) -> int:
    out = 0
    for x in bits(a):
        if antipode_in(M, x, a) is not None:
            out |= 1 << x
    return out


def cube_structure(M: MedianAlgebra, S) -> Cube | None:
    """Cube on ``S`` with an explicit iso witness, or None if ``S`` is not a cube."""
    return _cube_from_mask(M, _as_mask(S))


def _cube_from_mask(M: MedianAlgebra, s: int) -> Cube | None:
    size = s.bit_count()
    if size == 0 or size & (size - 1):
        return None
    k = size.bit_length() - 1
    if not is_subalgebra_mask(M, s):
        return None
    anti = {}
    for x in bits(s):
        y = antipode_in(M, x, s)
        if y is None:
            return None
        anti[x] = y
    sub, idx = M.subalgebra(s)
    W = enumerate_walls(sub)
    if len(W) != k:
        return None
    codes = wall_codes(sub, W)
    if len(set(codes)) != size:
        return None
    coords = {idx[i]: c for i, c in enumerate(codes)}
    return Cube(s, k, anti, coords, hull_mask(M, s))


def is_cube(M: MedianAlgebra, S) -> CubeCheck:
    c = cube_structure(M, S)
    return CubeCheck(c is not None, None if c is None else c.dim)


def ends(M: MedianAlgebra, A) -> Cube | None:
    """Points of the subalgebra ``A`` that have an antipode in ``A``, as a cube."""
    return _ends_cube(M, _as_mask(A))


def _ends_cube(M: MedianAlgebra, a: int) -> Cube | None:
    if not a or not is_subalgebra_mask(M, a):
        raise NotSubalgebra(f"{sorted(bits(a))} is not a median subalgebra")
    e = _ends_mask(M, a)
    if not e:
        return None
    cube = _cube_from_mask(M, e)
    if cube is None:
        raise InternalInconsistency(f"Ends({sorted(bits(a))}) = {sorted(bits(e))} is not a cube")
    return cube


def _subcube_maps(k: int):
    """Injective median maps {0,1}^j -> {0,1}^k up to automorphisms of the source.

    Yields ``(j, spec)`` where ``spec[c]`` describes output coordinate ``c``:
    ``(None, b)`` constant ``b``, or ``(i, flip)`` equal to input bit ``i``
    xor ``flip``.  Inputs are introduced in order of first use, unflipped.
    """
    def rec(c, used, spec):
        if c == k:
            yield used, tuple(spec)
            return
        for b in (0, 1):
            spec.append((None, b))
            yield from rec(c + 1, used, spec)
            spec.pop()
        for i in range(used):
            for flip in (0, 1):
                spec.append((i, flip))
                yield from rec(c + 1, used, spec)
                spec.pop()
        spec.append((used, 0))
        yield from rec(c + 1, used + 1, spec)
        spec.pop()

    yield from rec(0, 0, [])


def _subcubes(M: MedianAlgebra, top: Cube) -> list:
    by_code = {c: p for p, c in top.coords.items()}
    out = []
    for j, spec in _subcube_maps(top.dim):
        coords = {}
        for v in range(1 << j):
            code = 0
            for c, (i, b) in enumerate(spec):
                bit = b if i is None else (v >> i & 1) ^ b
                code |= bit << c
            coords[by_code[code]] = v
        mask = sum(1 << p for p in coords)
        out.append(Cube(mask, j, _antipodes(coords, (1 << j) - 1), coords, hull_mask(M, mask)))
    return out


def _antipodes(coords: dict, full: int) -> dict:
    inv = {v: p for p, v in coords.items()}
    return {p: inv[v ^ full] for p, v in coords.items()}


def enumerate_cubes(M: MedianAlgebra, maximal_only: bool = False) -> list:
    """All subcubes (or only the maximal ones), sorted by ``(dim, mask)``.

    Maximal cubes are exactly the maximal sets among ``Ends([x, y])``; every
    other cube is the image of an injective median map into one of them.
    """
    if M.embedding is None and M.n > MAX_SCAN_POINTS:
        raise TooLarge(f"cube enumeration without an embedding needs n <= {MAX_SCAN_POINTS}")
    key = "cubes_max" if maximal_only else "cubes"
    if key in M._cache:
        return M._cache[key]
    if "cubes_max" not in M._cache:
        tops = {}
        for x in range(M.n):
            for y in range(x, M.n):
                c = _ends_cube(M, M.interval_mask(x, y))
                tops.setdefault(c.mask, c)
        maximal = [c for m, c in tops.items() if not any(m != o and m & ~o == 0 for o in tops)]
        M._cache["cubes_max"] = sorted(maximal, key=lambda c: (c.dim, c.mask))
    if maximal_only:
        return M._cache["cubes_max"]
    found = {}
    for top in M._cache["cubes_max"]:
        for c in _subcubes(M, top):
            found.setdefault(c.mask, c)
    M._cache["cubes"] = sorted(found.values(), key=lambda c: (c.dim, c.mask))
    return M._cache["cubes"]
