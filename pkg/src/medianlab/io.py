"""JSON formats for algebras, actions and exact fractions.

Algebra files hold exactly one of ``{"n": n, "median": [n^3 ints]}`` (flat,
row-major) or ``{"embedding": ["0110", ...]}``.  Action files hold
``{"generators": {name: perm}, "mu": {word: "p/q"}}``; ``mu`` is optional.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import MedianAlgebra, validate_algebra
from .errors import ValidationError


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ValidationError(f"fractions must be given as \"p/q\" strings or ints, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad fraction {s!r}") from exc


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def algebra_from_dict(data: dict) -> MedianAlgebra:
    if not isinstance(data, dict):
        raise ValidationError("algebra file must hold a JSON object")
    has_table, has_emb = "median" in data, "embedding" in data
    if has_table == has_emb:
        raise ValidationError('algebra needs exactly one of "median" or "embedding"')
    if has_emb:
        rows = data["embedding"]
        if not isinstance(rows, list) or not all(isinstance(r, str) for r in rows):
            raise ValidationError('"embedding" must be a list of bit-strings')
        return MedianAlgebra.from_embedding(rows)
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise ValidationError('"n" must be a positive integer')
    flat = data["median"]
    if not isinstance(flat, list) or len(flat) != n ** 3:
        raise ValidationError(f'"median" must be a flat list of n^3 = {n ** 3} entries')
    return validate_algebra(np.array(flat, dtype=np.int64).reshape(n, n, n))


def algebra_to_dict(M: MedianAlgebra) -> dict:
    if M.embedding is not None:
        return {"embedding": ["".join(str(int(b)) for b in row) for row in M.embedding]}
    return {"n": M.n, "median": [int(v) for v in M.table.reshape(-1)]}


def load_algebra(path) -> MedianAlgebra:
    try:
        return algebra_from_dict(read_json(path))
    except ValidationError as exc:
        _prefix(exc, path)
        raise


def action_from_dict(algebra: MedianAlgebra, data: dict) -> tuple:
    """``(GroupAction, GroupMeasure or None)``."""
    from .dynamics import validate_action
    from .measures import GroupMeasure

    if not isinstance(data, dict) or not isinstance(data.get("generators"), dict):
        raise ValidationError('action file needs a "generators" object')
    gens = {}
    for name, perm in data["generators"].items():
        if not isinstance(perm, list) or sorted(perm) != list(range(algebra.n)):
            raise ValidationError(f"generator {name!r} is not a permutation of 0..{algebra.n - 1}")
        gens[str(name)] = np.array(perm, dtype=np.int64)
    action = validate_action(algebra, gens)
    mu = None
    if "mu" in data:
        if not isinstance(data["mu"], dict):
            raise ValidationError('"mu" must map words to "p/q" weights')
        mu = GroupMeasure({w: parse_fraction(v) for w, v in data["mu"].items()})
        for w in mu.weights:
            action.word(w)
    return action, mu


def action_to_dict(action, mu=None) -> dict:
    out = {"generators": {k: [int(v) for v in g] for k, g in action.generators.items()}}
    if mu is not None:
        out["mu"] = {w: fraction_str(v) for w, v in mu.weights.items()}
    return out


def load_action(algebra: MedianAlgebra, path) -> tuple:
    try:
        return action_from_dict(algebra, read_json(path))
    except ValidationError as exc:
        _prefix(exc, path)
        raise


def _prefix(exc: Exception, path) -> None:
    if not str(exc).startswith(str(path)):
        exc.args = (f"{path}: {exc}",)


def measure_to_list(eta) -> list:
    return [fraction_str(w) for w in eta.weights]
