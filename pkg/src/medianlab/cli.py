"""``medianlab`` command line.

Every command builds a JSON-ready payload plus a plain-text table; the
``--format`` flag picks one.  Exit codes: 0 success, 1 invalid input,
2 internal inconsistency.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import io
from .errors import AxiomViolation, InternalError, ValidationError

DEFAULT_SEED = 0


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple
    seed: int = DEFAULT_SEED
    format: str = "table"
    precision: int = 6
    out: str | None = None


def _bits(mask: int, n: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def _num(x: float, precision: int) -> str:
    return format(float(x), f".{precision}g")


# --------------------------------------------------------------------------
# commands: each returns (payload, lines)


def cmd_check(args, cfg):
    M = io.load_algebra(args.file)
    payload = {"valid": True, "n": M.n}
    return payload, [f"valid median algebra on {M.n} points"]


def cmd_walls(args, cfg):
    from .walls import enumerate_walls, transversality_matrix

    M = io.load_algebra(args.file)
    W = enumerate_walls(M)
    T = transversality_matrix(W)
    sides = [w.bitstring(M.n) for w in W]
    payload = {"n": M.n, "count": len(W), "walls": sides, "transverse": T.tolist()}
    lines = [f"walls: {len(W)}"]
    lines += [f"  {j:>3}  {s}" for j, s in enumerate(sides)]
    if W:
        lines.append("transversality:")
        lines += ["  " + " ".join(str(v) for v in row) for row in T]
    return payload, lines


def cmd_cubes(args, cfg):
    from .cubes import enumerate_cubes

    M = io.load_algebra(args.file)
    cubes = enumerate_cubes(M, maximal_only=args.maximal)
    rows = [{"members": _bits(c.mask, M.n), "dim": c.dim, "hull": _bits(c.hull, M.n)} for c in cubes]
    kind = "maximal cubes" if args.maximal else "cubes"
    lines = [f"{kind}: {len(cubes)}"]
    lines += [f"  {r['members']}  dim {r['dim']}  hull {r['hull']}" for r in rows]
    return {"n": M.n, "maximal_only": args.maximal, "cubes": rows}, lines


def cmd_decompose(args, cfg):
    from .factorization import cubical_factor

    M = io.load_algebra(args.file)
    dec = cubical_factor(M)
    iso = [[a, _bits(c, dec.dim)] for a, c in dec.iso]
    payload = {
        "W1": len(dec.W1),
        "dim_C": dec.dim,
        "cube_walls": [w.bitstring(M.n) for w in dec.W1],
        "M_prime": io.algebra_to_dict(dec.m_prime),
        "fiber": list(dec.fiber),
        "iso": iso,
    }
    lines = [f"|W1| = {len(dec.W1)}", f"dim C = {dec.dim}", f"|M'| = {dec.m_prime.n}"]
    if not dec.W1:
        lines.append("no cubical factor")
    lines.append("point  M'  C")
    lines += [f"  {x:>4}  {a:>3}  {c or '-'}" for x, (a, c) in enumerate(iso)]
    return payload, lines


def cmd_balanced(args, cfg):
    from .measures import find_phi_fixed_points

    M = io.load_algebra(args.file)
    tol = io.parse_fraction(args.tol)
    if tol <= 0:
        raise ValidationError("--tol must be positive")
    runs = find_phi_fixed_points(M, starts=args.starts, iters=args.iters, tol=tol, seed=cfg.seed)
    by_cube = {}
    for r in runs:
        key = _bits(r.nearest.mask, M.n)
        by_cube[key] = by_cube.get(key, 0) + 1
    within = sum(r.within_tol for r in runs)
    spurious = sum(r.distance >= 1e-3 and r.step < 1e-9 for r in runs)
    p = cfg.precision
    payload = {
        "starts": args.starts,
        "iters": args.iters,
        "tol": io.fraction_str(tol),
        "within_tol": within,
        "spurious": spurious,
        "max_distance": _num(max(r.distance for r in runs), p),
        "max_step": _num(max(r.step for r in runs), p),
        "nearest_cube_counts": dict(sorted(by_cube.items())),
    }
    lines = [
        "every cubical measure is exactly Phi-fixed",
        f"runs within tol: {within}/{len(runs)}",
        f"spurious fixed points: {spurious}",
        f"max distance: {payload['max_distance']}",
        f"max final step: {payload['max_step']}",
        "nearest cube  runs",
    ]
    lines += [f"  {k}  {v}" for k, v in payload["nearest_cube_counts"].items()]
    return payload, lines


def cmd_stationary(args, cfg):
    from .measures import stationary_polytope

    M = io.load_algebra(args.file)
    action, mu = io.load_action(M, args.action)
    if mu is None:
        raise ValidationError(f'{args.action}: stationary needs "mu"')
    verts = stationary_polytope(action, mu)
    rows = [io.measure_to_list(v) for v in verts]
    lines = [f"stationary vertices: {len(verts)}"]
    lines += ["  " + " ".join(r) for r in rows]
    return {"vertices": rows}, lines


def cmd_minimal(args, cfg):
    from .dynamics import is_minimal

    M = io.load_algebra(args.file)
    action, _ = io.load_action(M, args.action)
    rep = is_minimal(action)
    witness = None if rep.witness is None else _bits(sum(1 << p for p in rep.witness), M.n)
    lines = ["minimal" if rep.minimal else f"not minimal; invariant subalgebra {witness}"]
    return {"minimal": rep.minimal, "witness": witness}, lines


def cmd_simulate(args, cfg):
    from .dynamics import (STEP_NAMES, WalkConfig, cylinder_words, parse_step_spec, simulate_walk,
                           uniform_steps)

    weights = parse_step_spec(args.mu) if args.mu else uniform_steps()
    wc = WalkConfig(args.depth, args.steps, args.traj, cfg.seed, weights)
    rep = simulate_walk(wc)
    p = cfg.precision
    words = cylinder_words(wc.depth)
    tv = rep.prefix_tv()
    flips = {k: {"observed": _num(v, p), "predicted": _num(rep.predicted_flip(k), p)}
             for k, v in rep.sign_flip_stats.items()}
    payload = {
        "depth": wc.depth, "steps": wc.steps, "trajectories": wc.trajectories, "seed": wc.seed,
        "step_weights": dict(zip(STEP_NAMES, (io.fraction_str(w) for w in wc.step_weights))),
        "prefix_counts": dict(zip(words, (int(c) for c in rep.prefix_counts))),
        "prefix_tv": None if tv is None else _num(tv, p),
        "sign_counts": {"+1": rep.sign_counts[1], "-1": rep.sign_counts[-1]},
        "plus_fraction": _num(rep.plus_fraction(), p),
        "predicted_plus": _num(rep.predicted_plus(), p),
        "sign_flip_stats": {str(k): v for k, v in flips.items()},
        "unresolved": rep.unresolved,
    }
    lines = [f"cylinders: {len(words)}   unresolved: {rep.unresolved}"]
    lines += [f"  {w:<{wc.depth}}  {int(c)}" for w, c in zip(words, rep.prefix_counts)]
    lines.append(f"TV to exact cylinder measure: {payload['prefix_tv'] or 'n/a (non-uniform letters)'}")
    lines.append(f"sign +1: {rep.sign_counts[1]}  -1: {rep.sign_counts[-1]}  "
                 f"P(+1) = {payload['plus_fraction']} (exact {payload['predicted_plus']})")
    lines.append("k  constant-sign fraction  predicted")
    lines += [f"  {k:>2}  {v['observed']}  {v['predicted']}" for k, v in flips.items()]
    return payload, lines


def cmd_oracle(args, cfg):
    from .oracle import brute_recheck, enumerate_hypercube_subalgebras

    corpus = enumerate_hypercube_subalgebras(args.dim)
    entries, lines = [], [f"corpus for {{0,1}}^{args.dim}: {len(corpus)} classes"]
    failed = 0
    for label, M in corpus:
        rep = brute_recheck(M)
        failed += not rep.ok
        entries.append({"label": label, "algebra": io.algebra_to_dict(M), "counts": rep.counts,
                        "diffs": [[c, repr(w)] for c, w in rep.diffs]})
        status = "ok" if rep.ok else "MISMATCH " + ", ".join(c for c, _ in rep.diffs)
        lines.append(f"  {label:<26} n={M.n:<3} walls={rep.counts['walls']:<3} "
                     f"cubes={rep.counts['cubes']:<4} {status}")
    payload = {"dim": args.dim, "corpus": entries, "mismatches": failed}
    if failed:
        _emit(payload, lines, cfg)
        raise _Mismatches(f"{failed} corpus algebras disagree with the brute-force oracle")
    return payload, lines


class _Mismatches(InternalError):
    pass


COMMANDS = {
    "check": cmd_check, "walls": cmd_walls, "cubes": cmd_cubes, "decompose": cmd_decompose,
    "balanced": cmd_balanced, "stationary": cmd_stationary, "minimal": cmd_minimal,
    "simulate": cmd_simulate, "oracle": cmd_oracle,
}


# --------------------------------------------------------------------------
# plumbing


def _emit(payload, lines, cfg):
    if cfg.format == "json":
        text = json.dumps(payload) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("table", "json"), default="table")
    shared.add_argument("--seed", type=int, default=DEFAULT_SEED)
    shared.add_argument("--out", help="write the report here instead of stdout")
    shared.add_argument("--precision", type=int, default=6, help="significant digits for float statistics")

    parser = argparse.ArgumentParser(prog="medianlab", description="Finite median algebras and their dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[shared], help="validate an algebra file")
    p.add_argument("file")
    p = sub.add_parser("walls", parents=[shared], help="walls and their transversality")
    p.add_argument("file")
    p = sub.add_parser("cubes", parents=[shared], help="subcubes with dimension and hull")
    p.add_argument("file")
    p.add_argument("--maximal", action="store_true")
    p = sub.add_parser("decompose", parents=[shared], help="maximal cubical factor")
    p.add_argument("file")
    p = sub.add_parser("balanced", parents=[shared], help="Phi fixed-point search")
    p.add_argument("file")
    p.add_argument("--starts", type=int, default=200)
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--tol", default="1/1000000")
    p = sub.add_parser("stationary", parents=[shared], help="vertices of the stationary polytope")
    p.add_argument("file")
    p.add_argument("--action", required=True)
    p = sub.add_parser("minimal", parents=[shared], help="minimality of an action")
    p.add_argument("file")
    p.add_argument("--action", required=True)
    p = sub.add_parser("simulate", parents=[shared], help="random walk on F2 x Z/2")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--traj", type=int, default=200_000)
    p.add_argument("--mu", help='step weights, e.g. "a+=1/8,A+=1/8,..." (default uniform)')
    p = sub.add_parser("oracle", parents=[shared], help="corpus and brute-force recheck")
    p.add_argument("--dim", type=int, required=True)
    return parser


def dispatch(cfg: RunConfig, args) -> int:
    try:
        payload, lines = COMMANDS[cfg.command](args, cfg)
    except AxiomViolation as exc:
        _report_axioms(exc, args)
        return 1
    except ValidationError as exc:
        print(f"medianlab {cfg.command}: error: {exc}", file=sys.stderr)
        return 1
    except InternalError as exc:
        print(f"medianlab {cfg.command}: internal inconsistency: {exc}", file=sys.stderr)
        return 2
    _emit(payload, lines, cfg)
    return 0


def _report_axioms(exc: AxiomViolation, args) -> None:
    print(f"medianlab: {getattr(args, 'file', '')}: not a median algebra", file=sys.stderr)
    for axiom, witness in exc.violations:
        print(f"  axiom {axiom} fails at {tuple(witness)}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, tuple(v for k, v in vars(args).items() if k in ("file", "action")),
                    args.seed, args.format, args.precision, args.out)
    return dispatch(cfg, args)


if __name__ == "__main__":
    sys.exit(main())
