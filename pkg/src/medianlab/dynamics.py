"""Group actions on finite median algebras and the F2 x Z/2 random walk.

Group elements are never materialised abstractly: an action is a set of
named generator permutations, and a word such as ``"a*b^-1"`` is evaluated
to a permutation (``a*b`` acts as ``x -> a(b(x))``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .core import MedianAlgebra, bits, hypercube
from .errors import NotAutomorphism, NotEquivariant, TooLarge, ValidationError
from .factorization import Decomposition, is_equivariant_decomposition
from .measures import GroupMeasure

IDENTITY_WORDS = ("e", "1", "id", "")
_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class GroupAction:
    algebra: MedianAlgebra
    generators: dict

    @property
    def n(self) -> int:
        return self.algebra.n

    def identity(self) -> np.ndarray:
        return np.arange(self.n)

    def word(self, word: str) -> np.ndarray:
        """Permutation of a word over the generators."""
        perm = self.identity()
        word = word.strip()
        if word in IDENTITY_WORDS and word not in self.generators:
            return perm
        for token in re.split(r"[*\s]+", word):
            m = _TOKEN.match(token)
            if not m or m.group(1) not in self.generators:
                raise ValidationError(f"bad word token {token!r} in {word!r}")
            g = self.generators[m.group(1)]
            power = int(m.group(2) or 1)
            if power < 0:
                g = np.argsort(g)
                power = -power
            for _ in range(power):
                perm = perm[g]
        return perm

    def elements(self) -> list:
        """All permutations in the generated group (breadth-first closure)."""
        return _closure([self.identity()], self._moves())

    def _moves(self) -> list:
        moves = []
        for g in self.generators.values():
            moves.append(g)
            moves.append(np.argsort(g))
        return moves

    def orbit_mask(self, mask: int) -> int:
        """Union of all translates of ``mask``."""
        out, frontier = mask, mask
        moves = self._moves()
        while frontier:
            new = 0
            for g in moves:
                for p in bits(frontier):
                    q = int(g[p])
                    if not out >> q & 1:
                        new |= 1 << q
            out |= new
            frontier = new
        return out


def _closure(seeds, moves) -> list:
    seen = {}
    frontier = []
    for s in seeds:
        key = s.tobytes()
        if key not in seen:
            seen[key] = s
            frontier.append(s)
    while frontier:
        nxt = []
        for p in frontier:
            for g in moves:
                q = p[g]
                key = q.tobytes()
                if key not in seen:
                    seen[key] = q
                    nxt.append(q)
        frontier = nxt
    return list(seen.values())


def semigroup(perms) -> list:
    """Closure of ``perms`` under composition (identity only if generated)."""
    perms = [np.asarray(p) for p in perms]
    return _closure(perms, perms)


def _automorphism_witness(M: MedianAlgebra, g) -> tuple | None:
    if M.table is not None:
        bad = np.argwhere(M.table[np.ix_(g, g, g)] != g[M.table])
        return None if not len(bad) else tuple(int(v) for v in bad[0])
    for x in range(M.n):
        for y in range(M.n):
            for z in range(M.n):
                if M.med(g[x], g[y], g[z]) != g[M.med(x, y, z)]:
                    return (x, y, z)
    return None


def validate_action(algebra: MedianAlgebra, generators: dict) -> GroupAction:
    gens = {}
    for name, perm in generators.items():
        g = np.asarray(perm, dtype=np.int64)
        if g.shape != (algebra.n,) or sorted(g.tolist()) != list(range(algebra.n)):
            raise ValidationError(f"generator {name!r} is not a permutation of 0..{algebra.n - 1}")
        witness = _automorphism_witness(algebra, g)
        if witness is not None:
            raise NotAutomorphism(name, witness)
        gens[name] = g
    return GroupAction(algebra, gens)


def _med_closure(M: MedianAlgebra, mask: int) -> int:
    while True:
        pts = list(bits(mask))
        if M.table is not None:
            vals = np.unique(M.table[np.ix_(pts, pts, pts)])
            new = mask
            for v in vals:
                new |= 1 << int(v)
        else:
            new = mask
            for i, x in enumerate(pts):
                for j, y in enumerate(pts[i:]):
                    for z in pts[i + j:]:
                        new |= 1 << M.med(x, y, z)
        if new == mask:
            return mask
        mask = new


def invariant_closure(action: GroupAction, mask: int) -> int:
    """Smallest invariant subalgebra containing ``mask``."""
    M = action.algebra
    while True:
        new = _med_closure(M, action.orbit_mask(mask))
        if new == mask:
            return mask
        mask = new


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    witness: frozenset | None


def is_minimal(action: GroupAction) -> MinimalityReport:
    """Minimal iff the invariant closure of every singleton is everything.

    The witness is a smallest proper closure (lowest seed on ties).
    """
    M = action.algebra
    best = None
    for x in range(M.n):
        c = invariant_closure(action, 1 << x)
        if c != M.full and (best is None or c.bit_count() < best.bit_count()):
            best = c
    if best is None:
        return MinimalityReport(True, None)
    return MinimalityReport(False, frozenset(bits(best)))


def induced_cube_action(action: GroupAction, dec: Decomposition) -> tuple:
    """Actions on ``M'`` and on the cube factor induced through the iso."""
    M = action.algebra
    if not is_equivariant_decomposition(M, action, dec):
        raise NotEquivariant("generators do not preserve the cube walls factor-wise")
    on_fiber, on_cube = {}, {}
    for name, g in action.generators.items():
        fa = np.full(dec.m_prime.n, -1, dtype=np.int64)
        fc = np.full(dec.cube.n, -1, dtype=np.int64)
        for x in range(M.n):
            a, c = dec.iso[x]
            ga, gc = dec.iso[int(g[x])]
            fa[a], fc[c] = ga, gc
        on_fiber[name], on_cube[name] = fa, fc
    return validate_action(dec.m_prime, on_fiber), validate_action(dec.cube, on_cube)


def parity_subgroup_action() -> tuple:
    """The subgroup ``{(x,y,z) : xyz = 1}`` of ``{+-1}^3`` acting on the 3-cube.

    Bit 1 encodes the sign -1, so multiplication is xor.  Returns the action
    with generators ``a = (1,-1,-1)`` and ``b = (-1,1,-1)``, and the uniform
    measure on its four elements.
    """
    C = hypercube(3)
    a = np.array([i ^ 0b110 for i in range(8)])
    b = np.array([i ^ 0b101 for i in range(8)])
    action = validate_action(C, {"a": a, "b": b})
    mu = GroupMeasure({w: Fraction(1, 4) for w in ("e", "a", "b", "a*b")})
    return action, mu


# --------------------------------------------------------------------------
# tree model

LETTERS = "aAbB"  # A = a^-1, B = b^-1; inverse of letter i is i ^ 1


def reduced_words(depth: int) -> list:
    words = [""]
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for i, ch in enumerate(LETTERS):
                if w and LETTERS.index(w[-1]) == i ^ 1:
                    continue
                nxt.append(w + ch)
        words.extend(nxt)
        frontier = nxt
    return words


def tree_model(depth: int, with_sign: bool = False) -> MedianAlgebra:
    """Ball of radius ``depth`` in the Cayley tree of F2, optionally times ``{+1,-1}``.

    One embedding coordinate per non-root word ``w`` (1 iff the point lies in
    the subtree below ``w``), plus a trailing sign coordinate (1 for -1).
    Without sign the points are the reduced words by length then letter
    order; with sign, point ``2i`` is ``(word i, +1)`` and ``2i+1`` is
    ``(word i, -1)``.
    """
    if depth < 0 or depth > 5:
        raise TooLarge("tree_model supports depth 0..5")
    words = reduced_words(depth)
    edges = words[1:]
    rows = np.array([[1 if p.startswith(w) else 0 for w in edges] for p in words], dtype=np.uint8)
    rows = rows.reshape(len(words), len(edges))
    labels = [w or "e" for w in words]
    if with_sign:
        rows = np.repeat(rows, 2, axis=0)
        sign = np.tile([0, 1], len(words))[:, None].astype(np.uint8)
        rows = np.hstack([rows, sign])
        labels = [f"{w},{s}" for w in labels for s in "+-"]
    return MedianAlgebra.from_embedding(rows, labels=labels)


# --------------------------------------------------------------------------
# random walk on F2 x Z/2

STEP_NAMES = ("a+", "A+", "b+", "B+", "a-", "A-", "b-", "B-")
MAX_EXTENSIONS = 100
CHUNK = 50_000
FLIP_HORIZON = 10


def uniform_steps() -> tuple:
    return tuple(Fraction(1, 8) for _ in STEP_NAMES)


def parse_step_spec(spec: str) -> tuple:
    """``"a+=1/8,A-=1/4,..."`` -> step weights in :data:`STEP_NAMES` order."""
    weights = dict.fromkeys(STEP_NAMES, Fraction(0))
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        if key.strip() not in weights:
            raise ValidationError(f"unknown step {key!r}; expected one of {', '.join(STEP_NAMES)}")
        weights[key.strip()] = Fraction(value.strip())
    return tuple(weights[k] for k in STEP_NAMES)


@dataclass(frozen=True)
class WalkConfig:
    depth: int
    steps: int
    trajectories: int
    seed: int = 0
    step_weights: tuple = field(default_factory=uniform_steps)

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.step_weights)
        object.__setattr__(self, "step_weights", w)
        if len(w) != 8 or any(x < 0 for x in w) or sum(w) != 1:
            raise ValidationError("step weights must be 8 nonnegative numbers summing to 1")
        if self.depth < 1 or self.steps <= self.depth or self.trajectories < 1:
            raise ValidationError("need depth >= 1, steps > depth and trajectories >= 1")

    @property
    def flip_probability(self) -> Fraction:
        return sum(self.step_weights[4:])

    @property
    def letter_weights(self) -> tuple:
        w = self.step_weights
        return tuple(w[i] + w[i + 4] for i in range(4))


@dataclass
class WalkReport:
    config: WalkConfig
    prefix_counts: np.ndarray
    sign_counts: dict
    sign_flip_stats: dict
    unresolved: int

    def prefix_distribution(self) -> np.ndarray:
        total = self.prefix_counts.sum()
        return self.prefix_counts / total if total else self.prefix_counts.astype(float)

    def predicted_prefix(self) -> np.ndarray | None:
        """Exact cylinder measure; available when every letter has weight 1/4."""
        if any(w != Fraction(1, 4) for w in self.config.letter_weights):
            return None
        d = self.config.depth
        return np.full(cylinder_count(d), 0.25 * (1 / 3) ** (d - 1))

    def predicted_plus(self) -> float:
        q = float(self.config.flip_probability)
        return 0.5 * (1 + (1 - 2 * q) ** self.config.steps)

    def predicted_flip(self, k: int) -> float:
        return float(1 - self.config.flip_probability) ** k

    def prefix_tv(self) -> float | None:
        pred = self.predicted_prefix()
        if pred is None:
            return None
        return 0.5 * float(np.abs(self.prefix_distribution() - pred).sum())

    def plus_fraction(self) -> float:
        return self.sign_counts[1] / self.config.trajectories


def cylinder_count(depth: int) -> int:
    return 4 * 3 ** (depth - 1)


def cylinder_index(words: np.ndarray) -> np.ndarray:
    """Index of each length-d reduced word among the ``4 * 3^(d-1)`` cylinders.

    The first letter contributes ``l0 * 3^(d-1)``; each later letter is
    ranked among the three letters that do not cancel its predecessor.
    """
    words = words.astype(np.int64)
    idx = words[:, 0].copy()
    for j in range(1, words.shape[1]):
        banned = words[:, j - 1] ^ 1
        rank = words[:, j] - (words[:, j] > banned)
        idx = idx * 3 + rank
    return idx


def cylinder_words(depth: int) -> list:
    return [w for w in reduced_words(depth) if len(w) == depth]


def _draw_steps(rng, probs, shape):
    if np.allclose(probs, 1 / 8):
        return rng.integers(0, 8, size=shape, dtype=np.uint8)
    return rng.choice(8, size=shape, p=probs).astype(np.uint8)


def simulate_walk(config: WalkConfig) -> WalkReport:
    """Run ``config.trajectories`` walks and aggregate the three histograms.

    Chunks of trajectories draw from independent streams spawned from the
    master seed, so output does not depend on the kernel flavour.
    """
    d, n, N = config.depth, config.steps, config.trajectories
    probs = np.array([float(w) for w in config.step_weights])
    chunks = range(0, N, CHUNK)
    streams = np.random.SeedSequence(config.seed).spawn(len(chunks))
    prefix_counts = np.zeros(cylinder_count(d), dtype=np.int64)
    plus = 0
    horizon = min(FLIP_HORIZON, n)
    runs_at_least = np.zeros(horizon + 1, dtype=np.int64)
    unresolved = 0
    for lo, stream in zip(chunks, streams):
        rng = np.random.default_rng(stream)
        size = min(CHUNK, N - lo)
        steps = _draw_steps(rng, probs, (size, n))
        start = np.full((size, d), -1, dtype=np.int8)
        words, length, parity, run = kernels.walk_block(steps, start, np.zeros(size, np.int64), d)
        plus += int((parity == 0).sum())
        for k in range(1, horizon + 1):
            runs_at_least[k] += int((run >= k).sum())
        short = np.flatnonzero(length < d)
        for _ in range(MAX_EXTENSIONS):
            if not short.size:
                break
            more = _draw_steps(rng, probs, (short.size, n))
            w2, l2, _, _ = kernels.walk_block(more, words[short], length[short], d)
            words[short], length[short] = w2, l2
            short = short[l2 < d]
        unresolved += short.size
        done = length >= d
        np.add.at(prefix_counts, cylinder_index(words[done]), 1)
    flips = {k: runs_at_least[k] / N for k in range(1, horizon + 1)}
    return WalkReport(config, prefix_counts, {1: plus, -1: N - plus}, flips, unresolved)
