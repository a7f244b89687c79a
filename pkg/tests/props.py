"""Property checks shared by test_properties and the acceptance suite.

Each check takes an algebra and returns a list of counterexamples.
"""
from fractions import Fraction
from itertools import combinations

import numpy as np

from medianlab.core import convex_sets, gate_mask, is_subalgebra_mask
from medianlab.cubes import antipode_in, ends
from medianlab.measures import Measure, phi, random_measures
from medianlab.oracle import automorphisms, brute_cube_iso
from medianlab.walls import halfspaces_cutting


def subalgebras(M):
    return [S for S in range(1, 1 << M.n) if is_subalgebra_mask(M, S)]


def helly(M, max_family=4):
    sets = convex_sets(M)
    bad = []
    for size in range(2, max_family + 1):
        for fam in combinations(sets, size):
            if all(a & b for a, b in combinations(fam, 2)):
                inter = M.full
                for c in fam:
                    inter &= c
                if not inter:
                    bad.append(fam)
    return bad


def gate_morphism(M):
    T = M.table
    bad = []
    for C in convex_sets(M):
        g = np.array([gate_mask(M, x, C) for x in range(M.n)])
        lhs = g[T]
        mid = T[np.ix_(g, g, g)]
        right = T[g[:, None, None], g[None, :, None], np.arange(M.n)[None, None, :]]
        if not (np.array_equal(lhs, mid) and np.array_equal(mid, right)):
            bad.append(C)
    return bad


def projection_composition(M):
    sets = convex_sets(M)
    proj = {C: [gate_mask(M, x, C) for x in range(M.n)] for C in sets}
    bad = []
    for C1 in sets:
        for C2 in sets:
            if not C1 & C2:
                continue
            p1, p2, p12 = proj[C1], proj[C2], proj[C1 & C2]
            for x in range(M.n):
                if not p2[p1[x]] == p1[p2[x]] == p12[x]:
                    bad.append((C1, C2, x))
                    break
    return bad


def _mutual_gate_bijection(M, C, D):
    pts_c = [x for x in range(M.n) if C >> x & 1]
    pts_d = [x for x in range(M.n) if D >> x & 1]
    fwd = {x: gate_mask(M, x, D) for x in pts_c}
    back = {y: gate_mask(M, y, C) for y in pts_d}
    return (sorted(fwd.values()) == pts_d and all(back[fwd[x]] == x for x in pts_c))


def gate_iso_criterion(M):
    sets = convex_sets(M)
    cut = {C: {w.side for w in halfspaces_cutting(M, C)} for C in sets}
    bad = []
    for C, D in combinations(sets, 2):
        if _mutual_gate_bijection(M, C, D) != (cut[C] == cut[D]):
            bad.append((C, D))
    return bad


def ends_is_cube(M):
    bad = []
    for A in subalgebras(M):
        cube = ends(M, A)
        if cube is not None and brute_cube_iso(M, cube.mask) is None:
            bad.append(A)
    return bad


def antipode_uniqueness(M):
    T = M.table
    bad = []
    for A in subalgebras(M):
        pts = [p for p in range(M.n) if A >> p & 1]
        for x in pts:
            cands = [y for y in pts if all(T[x, y, z] == z for z in pts)]
            got = antipode_in(M, x, A)
            if len(cands) > 1 or (cands[0] if cands else None) != got:
                bad.append((A, x))
    return bad


def phi_equivariance(M, samples=3, seed=0):
    etas = random_measures(M.n, samples, seed)
    etas.append(Measure.uniform(M.n, range(M.n)))
    bad = []
    for g in automorphisms(M):
        for eta in etas:
            if phi(M, eta.pushforward(g)) != phi(M, eta).pushforward(g):
                bad.append((tuple(g), eta.weights))
    return bad


def phi_normalised(M, eta):
    out = phi(M, eta)
    return sum(out.weights) == 1 and all(w >= 0 for w in out.weights) and isinstance(out.weights[0], Fraction)


SUITES = {
    "helly": helly,
    "gate morphism law": gate_morphism,
    "projection composition": projection_composition,
    "gate isomorphism criterion": gate_iso_criterion,
    "ends is a cube": ends_is_cube,
    "antipode uniqueness": antipode_uniqueness,
    "phi equivariance": phi_equivariance,
}
