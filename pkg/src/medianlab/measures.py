"""Exact rational measures: the self-median operator, cubical measures,
half-space mass spectra, convolution and stationary measures.

Measures are exact (``fractions.Fraction``).  The only float code is the
fixed-point search, which iterates the operator in float64 because exact
iterates square their denominators' bit length every step.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm

import numpy as np

from . import kernels
from .core import MAX_TABLE_POINTS, MedianAlgebra, _as_mask, bits, is_subalgebra_mask
from .cubes import Cube, cube_structure, enumerate_cubes
from .errors import (InternalInconsistency, NotCube, NotGenerating, SpectrumViolation, TooLarge,
                     ValidationError)
from .walls import enumerate_walls


@dataclass(frozen=True)
class Measure:
    """Probability vector over the points, exact."""

    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if any(x < 0 for x in w):
            raise ValidationError("negative weight")
        if sum(w) != 1:
            raise ValidationError(f"weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, n: int, x: int) -> "Measure":
        return cls(tuple(Fraction(int(i == x)) for i in range(n)))

    @classmethod
    def uniform(cls, n: int, points) -> "Measure":
        pts = set(bits(_as_mask(points)))
        return cls(tuple(Fraction(1, len(pts)) if i in pts else Fraction(0) for i in range(n)))

    @classmethod
    def from_counts(cls, counts) -> "Measure":
        total = sum(int(c) for c in counts)
        return cls(tuple(Fraction(int(c), total) for c in counts))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, w in enumerate(self.weights) if w)

    @property
    def support_mask(self) -> int:
        return sum(1 << i for i, w in enumerate(self.weights) if w)

    def __getitem__(self, i):
        return self.weights[i]

    def mass(self, S) -> Fraction:
        return sum((self.weights[i] for i in bits(_as_mask(S))), Fraction(0))

    def pushforward(self, perm) -> "Measure":
        out = [Fraction(0)] * self.n
        for x, w in enumerate(self.weights):
            out[int(perm[x])] += w
        return Measure(tuple(out))

    def as_floats(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def tv(self, other: "Measure") -> Fraction:
        return sum((abs(a - b) for a, b in zip(self.weights, other.weights)), Fraction(0)) / 2


@dataclass(frozen=True)
class GroupMeasure:
    """Finitely supported probability measure on words over the generators."""

    weights: dict

    def __post_init__(self):
        w = {str(k): Fraction(v) for k, v in self.weights.items()}
        if any(v < 0 for v in w.values()) or sum(w.values()) != 1:
            raise ValidationError("group measure must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def support(self) -> list:
        return [k for k, v in self.weights.items() if v]

    def is_generating(self, action) -> bool:
        """Semigroup generated by the support equals the acting group."""
        from .dynamics import semigroup

        group = {p.tobytes() for p in action.elements()}
        generated = {p.tobytes() for p in semigroup([action.word(w) for w in self.support])}
        return generated == group

    def inverse(self) -> "GroupMeasure":
        """Pushforward under inversion, as words."""
        out = {}
        for word, v in self.weights.items():
            out[_invert_word(word)] = out.get(_invert_word(word), Fraction(0)) + v
        return GroupMeasure(out)


def _invert_word(word: str) -> str:
    import re

    tokens = [t for t in re.split(r"[*\s]+", word.strip()) if t]
    if not tokens or tokens == ["e"]:
        return word
    inv = []
    for t in reversed(tokens):
        name, _, power = t.partition("^")
        p = -int(power or 1)
        inv.append(name if p == 1 else f"{name}^{p}")
    return "*".join(inv)


# --------------------------------------------------------------------------
# self-median operator


def _require_table(M: MedianAlgebra):
    if M.table is None:
        raise TooLarge(f"measure computations need the full median table (n <= {MAX_TABLE_POINTS})")
    return M.table


def phi(M: MedianAlgebra, eta: Measure) -> Measure:
    """``Phi(eta)(z)`` = mass of ordered triples with median ``z`` under ``eta^3``."""
    T = _require_table(M)
    supp = [i for i, w in enumerate(eta.weights) if w]
    den = lcm(*(eta.weights[i].denominator for i in supp))
    num = {i: eta.weights[i].numerator * (den // eta.weights[i].denominator) for i in supp}
    acc = [0] * M.n
    for x in supp:
        nx = num[x]
        for y in supp:
            nxy = nx * num[y]
            row = T[x, y]
            for z in supp:
                acc[row[z]] += nxy * num[z]
    d3 = den ** 3
    return Measure(tuple(Fraction(a, d3) for a in acc))


def is_balanced(M: MedianAlgebra, eta: Measure) -> bool:
    return phi(M, eta) == eta


def cubical_measure(M: MedianAlgebra, C) -> Measure:
    """Uniform measure on a subcube."""
    mask = _as_mask(C)
    if not isinstance(C, Cube) and cube_structure(M, mask) is None:
        raise NotCube(f"{sorted(bits(mask))} is not a subcube")
    return Measure.uniform(M.n, mask)


@dataclass(frozen=True)
class FixedPointRun:
    start: Measure
    limit: np.ndarray
    nearest: Cube
    distance: float
    step: float
    within_tol: bool


def random_measures(n: int, count: int, seed: int = 0, high: int = 1000) -> list:
    """Seeded random rational measures: integer weights in ``0..high``, normalised."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        w = rng.integers(0, high + 1, size=n)
        if w.sum():
            out.append(Measure.from_counts(w))
    return out


def cubical_matrix(M: MedianAlgebra, cubes) -> np.ndarray:
    out = np.zeros((len(cubes), M.n))
    for i, c in enumerate(cubes):
        out[i, list(bits(c.mask))] = 1.0 / (1 << c.dim)
    return out


def find_phi_fixed_points(M: MedianAlgebra, starts: int = 200, iters: int = 300,
                          tol=Fraction(1, 10 ** 6), seed: int = 0) -> list:
    """Iterate Phi from random starts and match each end point to the nearest
    cubical measure in total variation.

    Also checks that every cubical measure is exactly Phi-fixed.
    """
    T = _require_table(M)
    cubes = enumerate_cubes(M)
    for c in cubes:
        lam = cubical_measure(M, c)
        if phi(M, lam) != lam:
            raise InternalInconsistency(f"cubical measure on {sorted(c.members)} is not Phi-fixed")
    begin = random_measures(M.n, starts, seed)
    etas = np.array([m.as_floats() for m in begin])
    limits, steps = kernels.phi_iterate(T, etas, iters)
    lam = cubical_matrix(M, cubes)
    dist = 0.5 * np.abs(limits[:, None, :] - lam[None, :, :]).sum(axis=2)
    nearest = dist.argmin(axis=1)
    tol = float(tol)
    runs = []
    for i, start in enumerate(begin):
        d = float(dist[i, nearest[i]])
        runs.append(FixedPointRun(start, limits[i], cubes[nearest[i]], d, float(steps[i]), d <= tol))
    return runs


def _phi_jacobian(T, eta):
    n = len(eta)
    J = np.zeros((n, n))
    # d/d eta_x of sum eta_x eta_y eta_w [m(x,y,w)=z]; symmetric in the slots
    for x in range(n):
        for y in range(n):
            for w in range(n):
                z = T[x, y, w]
                J[z, x] += eta[y] * eta[w]
                J[z, y] += eta[x] * eta[w]
                J[z, w] += eta[x] * eta[y]
    return J


def search_balanced_by_support(M: MedianAlgebra, max_support: int = 4, tries: int = 20,
                               seed: int = 0) -> dict:
    """Root-find Phi(eta) = eta on each med-closed support of size <= max_support.

    Returns ``{support mask: [roots]}`` where each root is a float vector with
    residual below 1e-12 and strictly positive exactly on that support.  A
    fixed point of any balanced measure has med-closed support, so other
    supports are skipped.
    """
    T = _require_table(M)
    rng = np.random.default_rng(seed)
    found = {}
    for size in range(1, max_support + 1):
        for pts in combinations(range(M.n), size):
            mask = sum(1 << p for p in pts)
            if not is_subalgebra_mask(M, mask):
                continue
            idx = list(pts)
            roots = []
            for _ in range(tries):
                v = rng.random(size) + 0.05
                v /= v.sum()
                for _ in range(100):
                    eta = np.zeros(M.n)
                    eta[idx] = v
                    out = kernels.phi_iterate(T, eta[None, :], 1)[0][0]
                    F = np.concatenate([out[idx] - v, [v.sum() - 1]])
                    if np.abs(F).max() < 1e-14:
                        break
                    J = _phi_jacobian(T, eta)[np.ix_(idx, idx)] - np.eye(size)
                    J = np.vstack([J, np.ones(size)])
                    dv = np.linalg.lstsq(J, -F, rcond=None)[0]
                    v = v + dv
                eta = np.zeros(M.n)
                eta[idx] = v
                out = kernels.phi_iterate(T, eta[None, :], 1)[0][0]
                if np.abs(out - eta).max() < 1e-12 and v.min() > 1e-9:
                    if not any(np.abs(v - r).max() < 1e-8 for r in roots):
                        roots.append(v.copy())
            if roots:
                found[mask] = roots
    return found


@dataclass(frozen=True)
class MassReport:
    family: tuple
    mass: Fraction


def _is_dyadic(mass: Fraction, max_s: int) -> bool:
    if mass == 0:
        return True
    if mass.numerator != 1:
        return False
    d = mass.denominator
    return d & (d - 1) == 0 and d.bit_length() - 1 <= max_s


def halfspace_mass(M: MedianAlgebra, eta: Measure, walls=None, max_family: int = 3,
                   include_complements: bool = False) -> list:
    """Masses of all intersections of up to ``max_family`` wall sides.

    Families are drawn from the canonical sides (plus complements when
    asked).  Every mass must be 0 or ``2^-s`` with ``s`` at most the family
    size; otherwise :class:`SpectrumViolation` is raised.
    """
    if not is_balanced(M, eta):
        raise ValidationError("halfspace_mass expects a Phi-fixed measure")
    walls = enumerate_walls(M) if walls is None else list(walls)
    sides = [w.side for w in walls]
    if include_complements:
        sides += [w.other for w in walls]
    out = []
    for size in range(1, max_family + 1):
        for fam in combinations(range(len(sides)), size):
            inter = M.full
            for i in fam:
                inter &= sides[i]
            m = eta.mass(inter)
            if not _is_dyadic(m, size):
                raise SpectrumViolation(fam, m)
            out.append(MassReport(fam, m))
    return out


# --------------------------------------------------------------------------
# convolution and stationary measures


def transition_matrix(action, mu: GroupMeasure) -> list:
    """Exact ``P[x][y] = mu({g : g x = y})``."""
    n = action.n
    P = [[Fraction(0)] * n for _ in range(n)]
    for word, w in mu.weights.items():
        if not w:
            continue
        g = action.word(word)
        for x in range(n):
            P[x][int(g[x])] += w
    return P


def convolve(action, mu: GroupMeasure, nu: Measure) -> Measure:
    """``mu * nu``: pushforward of ``mu x nu`` under the action map."""
    out = [Fraction(0)] * action.n
    for word, w in mu.weights.items():
        if not w:
            continue
        g = action.word(word)
        for x, v in enumerate(nu.weights):
            if v:
                out[int(g[x])] += w * v
    return Measure(tuple(out))


def rational_nullspace(A) -> list:
    """Basis of the right null space of a Fraction matrix (reduced row echelon)."""
    rows = [list(r) for r in A]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        basis.append(v)
    return basis


def _closed_classes(P) -> list:
    """Closed communicating classes of the transition graph, as sorted lists."""
    n = len(P)
    reach = []
    for x in range(n):
        seen = {x}
        stack = [x]
        while stack:
            u = stack.pop()
            for v in range(n):
                if P[u][v] and v not in seen:
                    seen.add(v)
                    stack.append(v)
        reach.append(seen)
    classes = []
    done = set()
    for x in range(n):
        if x in done:
            continue
        cls = {y for y in reach[x] if x in reach[y]}
        done |= cls
        if reach[x] == cls:
            classes.append(sorted(cls))
    return classes


def stationary_polytope(action, mu: GroupMeasure) -> list:
    """Vertices of ``{nu : mu * nu = nu}``, exact.

    Vertices are the unique stationary measures of the closed classes of the
    transition matrix; their number is cross-checked against the dimension
    of the rational null space of ``P^T - I`` and each is re-substituted.
    """
    if not mu.is_generating(action):
        raise NotGenerating("support of mu does not generate the acting group")
    P = transition_matrix(action, mu)
    n = len(P)
    vertices = []
    for cls in _closed_classes(P):
        k = len(cls)
        # nu (P_cls - I) = 0 with sum nu = 1
        A = [[P[cls[j]][cls[i]] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
        A.append([Fraction(1)] * k)
        sol = _solve_exact(A, [Fraction(0)] * k + [Fraction(1)])
        w = [Fraction(0)] * n
        for i, c in enumerate(cls):
            w[c] = sol[i]
        vertices.append(Measure(tuple(w)))
    A = [[P[j][i] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    dim = len(rational_nullspace(A))
    if dim != len(vertices):
        raise InternalInconsistency(f"null space has dimension {dim} but found {len(vertices)} closed classes")
    for v in vertices:
        if convolve(action, mu, v) != v:
            raise InternalInconsistency("stationary vertex fails re-substitution")
    return sorted(vertices, key=lambda v: sorted(v.support))


def _solve_exact(A, b) -> list:
    """Solve the consistent (possibly overdetermined) system ``A x = b`` exactly."""
    rows = [list(r) + [bb] for r, bb in zip(A, b)]
    m, n = len(rows), len(rows[0]) - 1
    r = 0
    piv = []
    for c in range(n):
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if len(piv) != n or any(rows[i][-1] != 0 for i in range(r, m)):
        raise InternalInconsistency("stationary system is singular or inconsistent")
    return [rows[i][-1] for i in range(n)]


def in_convex_hull(target: Measure, vertices) -> list | None:
    """Exact coefficients expressing ``target`` as a convex combination, or None."""
    n = target.n
    k = len(vertices)
    A = [[v.weights[i] for v in vertices] for i in range(n)]
    A.append([Fraction(1)] * k)
    b = list(target.weights) + [Fraction(1)]
    try:
        coeffs = _solve_exact(A, b)
    except InternalInconsistency:
        return None
    if any(c < 0 for c in coeffs):
        return None
    return coeffs
