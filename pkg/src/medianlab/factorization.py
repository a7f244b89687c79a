"""Maximal cubical factor ``M = M' x C``.

The cube directions are the walls transverse to every other wall.  Their
codes project ``M`` onto ``C = {0,1}^|W1|``; the fiber over the code of
point 0, with its gate projection, gives the other factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MedianAlgebra, Morphism, bits, gate_mask, hypercube
from .errors import InternalInconsistency, NotCube, NotFactorizable
from .walls import enumerate_walls, is_transverse, wall_codes


@dataclass(frozen=True)
class Decomposition:
    """``iso[x] = (fiber index, cube code)``; ``iso_inverse[a][c]`` undoes it.

    ``fiber`` lists the original points of ``M0`` in ascending order, so
    fiber index ``a`` is the point ``fiber[a]`` and ``m_prime`` is ``M``
    restricted there.  Cube codes use bit ``j`` for wall ``W1[j]``.
    """

    W1: tuple
    W2: tuple
    cube: MedianAlgebra
    m_prime: MedianAlgebra
    fiber: tuple
    iso: tuple
    iso_inverse: tuple

    @property
    def dim(self) -> int:
        return len(self.W1)

    def project(self, x: int) -> int:
        return self.iso[x][1]


def classify_walls(M: MedianAlgebra) -> tuple:
    """``(W1, W2)``: walls transverse to all other walls, and the rest."""
    walls = enumerate_walls(M)
    W1, W2 = [], []
    for w in walls:
        if all(is_transverse(w, v) for v in walls if v is not w):
            W1.append(w)
        else:
            W2.append(w)
    return tuple(W1), tuple(W2)


def _product_violation(dec, M, limit_triples):
    a = np.array([dec.iso[x][0] for x in range(M.n)])
    c = np.array([dec.iso[x][1] for x in range(M.n)])
    Tm, Tc = dec.m_prime.table, dec.cube.table
    inv = np.array(dec.iso_inverse)
    if M.table is not None and Tm is not None and Tc is not None and M.n <= limit_triples:
        lhs = M.table
        rhs = inv[Tm[np.ix_(a, a, a)], Tc[np.ix_(c, c, c)]]
        bad = np.argwhere(lhs != rhs)
        return None if not len(bad) else tuple(int(v) for v in bad[0])
    rng = np.random.default_rng(0)
    for x, y, z in rng.integers(0, M.n, size=(20_000, 3)):
        lhs = M.med(x, y, z)
        rhs = inv[dec.m_prime.med(a[x], a[y], a[z]), dec.cube.med(c[x], c[y], c[z])]
        if lhs != rhs:
            return (int(x), int(y), int(z))
    return None


def cubical_factor(M: MedianAlgebra) -> Decomposition:
    W1, W2 = classify_walls(M)
    k = len(W1)
    codes = wall_codes(M, W1)
    fibers = {}
    for x, c in enumerate(codes):
        fibers[c] = fibers.get(c, 0) | 1 << x
    if len(fibers) != 1 << k:
        raise InternalInconsistency(f"cube walls realise {len(fibers)} codes, expected {1 << k}")
    base = fibers[codes[0]]
    fiber = tuple(bits(base))
    pos = {p: i for i, p in enumerate(fiber)}

    # gate projections between fibers must be mutually inverse bijections
    for cx, Fx in fibers.items():
        for cy, Fy in fibers.items():
            if cx >= cy:
                continue
            fwd = {y: gate_mask(M, y, Fx) for y in bits(Fy)}
            back = {x: gate_mask(M, x, Fy) for x in bits(Fx)}
            if sorted(fwd.values()) != list(bits(Fx)) or any(back[fwd[y]] != y for y in fwd):
                raise InternalInconsistency(f"gate projection between fibers {cx} and {cy} is not an isomorphism")

    iso = tuple((pos[gate_mask(M, x, base)], codes[x]) for x in range(M.n))
    inverse = [[-1] * (1 << k) for _ in fiber]
    for x, (a, c) in enumerate(iso):
        if inverse[a][c] != -1:
            raise InternalInconsistency(f"points {inverse[a][c]} and {x} share coordinates {(a, c)}")
        inverse[a][c] = x
    m_prime, _ = M.subalgebra(base)
    cube = hypercube(k)
    dec = Decomposition(W1, W2, cube, m_prime, fiber, iso, tuple(tuple(r) for r in inverse))
    bad = _product_violation(dec, M, limit_triples=64)
    if bad is not None:
        raise InternalInconsistency(f"product map is not a median morphism at {bad}")
    return dec


def factor_through_cube(M: MedianAlgebra, phi: Morphism, dec: Decomposition | None = None) -> Morphism:
    """The unique ``psi: C -> C'`` with ``phi = psi o project``.

    ``psi(c)`` is ``phi`` of any point over ``c``; well-definedness is
    checked on every fiber, uniqueness follows from ``project`` being onto.
    A factorisation exists iff every wall pulled back along ``phi`` lies in
    W1; this always holds for equivariant maps under a minimal action, but
    not for arbitrary median maps (a path onto ``{0,1}`` has no cube factor
    to go through), and those raise :class:`NotFactorizable`.
    """
    from .cubes import is_cube

    if dec is None:
        dec = cubical_factor(M)
    target = phi.target
    if not is_cube(target, range(target.n)).is_cube:
        raise NotCube("target of phi is not a cube")
    if not phi.is_surjective():
        raise NotFactorizable("phi is not surjective")
    psi = [-1] * dec.cube.n
    for x in range(M.n):
        c = dec.project(x)
        if psi[c] == -1:
            psi[c] = phi(x)
        elif psi[c] != phi(x):
            raise NotFactorizable(f"phi separates points {x} and {dec.iso_inverse[0][c]} of one fiber over {c}")
    if -1 in psi:
        raise InternalInconsistency("projection onto the cube is not surjective")
    out = Morphism(dec.cube, target, tuple(psi))
    if not out.is_median_map():
        raise NotFactorizable(f"induced map on the cube is not a median map at {out.violations()[0]}")
    return out


def is_equivariant_decomposition(M: MedianAlgebra, action, dec: Decomposition) -> bool:
    """True iff every generator maps the cube walls onto cube walls and the
    product coordinates transform factor-wise."""
    W1 = set(dec.W1)
    for perm in action.generators.values():
        if {w.map(perm) for w in W1} != W1:
            return False
        fiber_map, cube_map = {}, {}
        for x in range(M.n):
            a, c = dec.iso[x]
            ga, gc = dec.iso[int(perm[x])]
            if fiber_map.setdefault(a, ga) != ga or cube_map.setdefault(c, gc) != gc:
                return False
    return True
