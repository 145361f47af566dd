"""Command-line interface: ``lmatrix <command> ...``.

Exit codes: 0 success, 1 a checked invariant failed, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .budget import BudgetExceeded
from .constructions import (
    PhiAssignment,
    certify,
    construct_fivethirds,
    construct_square,
    construct_subset_incidence,
    construct_threehalves,
    construct_xy3,
    grassmann_construct,
)
from .experiment import (
    ExperimentConfig,
    atomic_write,
    report_claims,
    run_experiment,
    verify_file,
)
from .fields import field_make
from .linalg import InvariantViolation, certified_rank, eigen_multiplicity, rank_bounds_modular
from .matrix import ExactMatrix
from .relations import (
    LSet,
    normalize_min_negatives,
    point_criterion,
    primitive_relation,
    relation_lattice,
    relation_to_differences,
)
from .search import SearchSpec, min_rank, n_of_r, primitive_relation_box_search
from .spectral import companion, digraph_pipeline, polytobetter_pipeline
from .vanishing import MultiPoly, genupper_witness, hasse_derivative, vanishing_order

log = logging.getLogger("lmatrix")


class UsageError(ValueError):
    pass


def _split(text: str) -> list:
    return [s.strip() for s in text.split(",") if s.strip()]


def _lset(args, allow_zero=False) -> LSet:
    ctx = field_make(args.field)
    if not args.L:
        raise UsageError("--L is required")
    return LSet(ctx, tuple(ctx.parse(s) for s in _split(args.L)), allow_zero)


def _relation(args, L: LSet, square: bool = False):
    if getattr(args, "relation", None):
        return tuple(int(x) for x in _split(args.relation))
    res = primitive_relation(L)
    if not res.exists:
        raise UsageError(f"L admits no primitive relation; certificate {res.certificate}")
    rel = res.relation
    if square and len(rel.negatives) > 1 and L.is_integral():
        rel = normalize_min_negatives(rel)
    return rel.A


def _emit(obj, args) -> None:
    print(json.dumps(obj, indent=2, default=str))


def _load_matrix(path) -> tuple[ExactMatrix, dict]:
    obj = json.loads(Path(path).read_text())
    return ExactMatrix.from_json_obj(obj), obj.get("claims", {})


def _write_matrix(args, M: ExactMatrix, claims=None) -> None:
    if args.out:
        atomic_write(args.out, M.to_json(claims))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_construct(args) -> int:
    name = args.name
    cert = args.cert
    if name == "incidence":
        rep = construct_subset_incidence(args.r, args.k, cert=cert)
    elif name == "xy3":
        ctx = field_make(args.field)
        rep = construct_xy3(ctx.parse(args.x), ctx.parse(args.y), args.q, ctx, cert=cert)
    elif name == "phi":
        obj = json.loads(Path(args.phi).read_text())
        rep = grassmann_construct(PhiAssignment.from_json_obj(obj), cert=cert)
    else:
        L = _lset(args)
        A = _relation(args, L, square=name == "square")
        if name == "square":
            rep = construct_square(L, A, args.q, cert=cert)
        elif name == "threehalves":
            rep = construct_threehalves(L, A, args.q, cert=cert)
        else:
            rep = construct_fivethirds(L, A, args.q, seed=args.seed, cert=cert)
    if cert == "modular" and rep.bounds is None:
        certify(rep, "modular", args.primes)
    rep.verify()
    _write_matrix(args, rep.matrix, report_claims(rep))
    _emit(rep.summary(), args)
    return 0


def cmd_rank(args) -> int:
    M, _ = _load_matrix(args.matrix)
    if args.cert == "modular":
        b = rank_bounds_modular(M, args.primes)
        _emit({"lower": b.lower, "per_prime": b.per_prime, "notices": b.notices}, args)
        return 0
    c = certified_rank(M)
    _emit({"rank": c.rank, "lower": c.lower, "upper": c.upper, "method": c.method}, args)
    return 0


def cmd_eigen(args) -> int:
    if args.action == "companion":
        M = companion(args.minpoly)
        _write_matrix(args, M)
        _emit({"matrix": [[str(x) for x in r] for r in M.to_rows()]}, args)
        return 0
    if args.action == "pipeline":
        res = digraph_pipeline(args.minpoly, args.n)
        _write_matrix(args, res.matrix, {"L": ["0", "1"], "diagonal": "0"})
        _emit(res.report(), args)
        return 0
    if args.action == "polytobetter":
        L = _lset(args)
        res = polytobetter_pipeline(args.poly, L, args.l)
        _write_matrix(args, res.matrix, {"L": L.strings(), "diagonal": "0", "rank": res.rank})
        _emit(res.report(), args)
        return 0
    if args.action == "multiplicity":
        M, _ = _load_matrix(args.matrix)
        lam = M.ctx.parse(args.lam)
        _emit({"lambda": M.ctx.fmt(lam), "multiplicity": eigen_multiplicity(M, lam)}, args)
        return 0
    raise UsageError(f"unknown eigen action {args.action}")


def cmd_relations(args) -> int:
    if args.action == "point-criterion":
        ctx = field_make("QQ")
        pc = point_criterion([ctx.parse(s) for s in _split(args.point)])
        _emit({"holds": pc.holds, "gcd": pc.gcd, "witness": pc.witness}, args)
        return 0
    L = _lset(args)
    if args.action == "lattice":
        _emit({"L": L.strings(), "lattice": relation_lattice(L)}, args)
        return 0
    res = primitive_relation(L)
    out = {"L": L.strings(), "relation": None, "certificate": None, "S": None, "differences": None}
    if res.exists:
        rel = res.relation
        d = relation_to_differences(rel)
        out.update(relation=list(rel.A), S=d.S,
                   differences=[[i, j, b] for (i, j), b in sorted(d.B.items())])
        if L.is_integral() and len(rel.negatives) > 1:
            out["min_negatives"] = list(normalize_min_negatives(rel).A)
    else:
        out["certificate"] = [str(w) for w in res.certificate]
    _emit(out, args)
    return 0


def cmd_vanish(args) -> int:
    ctx = field_make(args.field)
    if args.action == "order":
        P = MultiPoly.parse(args.poly)
        pt = [ctx.parse(s) for s in _split(args.point)]
        o = vanishing_order(P, pt, ctx)
        _emit({"order": "infinite" if o == float("inf") else o}, args)
        return 0
    if args.action == "hasse":
        P = MultiPoly.parse(args.poly)
        idx = [int(x) for x in _split(args.index)]
        _emit({"derivative": str(hasse_derivative(P, idx))}, args)
        return 0
    if args.action == "witness":
        M, claims = _load_matrix(args.matrix)
        Ls = _split(args.L) if args.L else claims.get("L")
        if not Ls:
            raise UsageError("--L is required when the matrix file has no L claim")
        w = genupper_witness(M, [M.ctx.parse(s) for s in Ls])
        _emit({"P": str(w.P), "r": w.r, "v": w.v, "order": w.order}, args)
        return 0
    raise UsageError(f"unknown vanish action {args.action}")


def cmd_search(args) -> int:
    L = _lset(args, allow_zero=False)
    if args.action == "min-rank":
        res = min_rank(SearchSpec(L, args.n, args.symmetric))
        _emit({"rank": res.rank, "visited": res.visited,
               "witness": [[L.ctx.fmt(x) for x in r] for r in res.witness.to_rows()]}, args)
        return 0
    if args.action == "n-of-r":
        res = n_of_r(L, args.r, args.n_max, args.symmetric)
        _emit({"N": res.n, "N0": res.n0, "n_max": res.n_max,
               "per_size": {str(k): list(v) for k, v in res.per_size.items()},
               "witness": None if res.witness is None else
               [[L.ctx.fmt(x) for x in r] for r in res.witness.to_rows()]}, args)
        return 0
    if args.action == "relation-box":
        res = primitive_relation_box_search(L, args.bound)
        _emit({"relation": None if res.relation is None else list(res.relation.A),
               "visited": res.visited}, args)
        return 0
    raise UsageError(f"unknown search action {args.action}")


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    if args.out:
        cfg.out_dir = args.out
    table = run_experiment(cfg)
    sys.stdout.write(table.to_csv())
    for q, msg in table.failures:
        print(f"q={q}: {msg}", file=sys.stderr)
    return 0 if table.ok else 1


def cmd_verify(args) -> int:
    rep = verify_file(args.matrix)
    _emit(rep.to_obj(), args)
    if not rep.checks.get("schema", True):
        return 2
    return 0 if rep.ok else 1


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(defaults: bool) -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--field", default="QQ" if defaults else S,
                   help="QQ, GF(p) or QQ[t]/(f) (default QQ)")
    p.add_argument("--seed", type=int, default=0 if defaults else S)
    p.add_argument("--out", default=None if defaults else S, help="output path")
    p.add_argument("--cert", choices=["exact", "modular", "bound"],
                   default="exact" if defaults else S)
    p.add_argument("--primes", type=lambda s: [int(x) for x in _split(s)],
                   default=[1000003, 1000033] if defaults else S,
                   help="primes for --cert modular")
    p.add_argument("-v", "--verbose", action="store_true", default=False if defaults else S)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    parser = argparse.ArgumentParser(prog="lmatrix", parents=[_common(True)],
                                     description="Exact constructions and checks for L-matrices.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="build a low-rank L-matrix")
    c.add_argument("name", choices=["square", "threehalves", "fivethirds", "xy3", "incidence", "phi"])
    c.add_argument("--L", help="comma-separated elements")
    c.add_argument("--relation", help="comma-separated integer relation")
    c.add_argument("--q", type=int)
    c.add_argument("--x")
    c.add_argument("--y")
    c.add_argument("--r", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--phi", help="JSON file with a phi assignment")
    c.set_defaults(func=cmd_construct)

    r = sub.add_parser("rank", parents=[common], help="rank of a matrix JSON file")
    r.add_argument("matrix")
    r.set_defaults(func=cmd_rank)

    e = sub.add_parser("eigen", parents=[common], help="eigenvalue multiplicity tools")
    e.add_argument("action", choices=["companion", "pipeline", "polytobetter", "multiplicity"])
    e.add_argument("--minpoly")
    e.add_argument("--n", type=int)
    e.add_argument("--poly")
    e.add_argument("--L")
    e.add_argument("--l", type=int)
    e.add_argument("--matrix")
    e.add_argument("--lam")
    e.set_defaults(func=cmd_eigen)

    rl = sub.add_parser("relations", parents=[common], help="integer relations on L")
    rl.add_argument("action", choices=["find", "lattice", "point-criterion"])
    rl.add_argument("--L")
    rl.add_argument("--point")
    rl.set_defaults(func=cmd_relations)

    v = sub.add_parser("vanish", parents=[common], help="Hasse derivatives and vanishing orders")
    v.add_argument("action", choices=["order", "hasse", "witness"])
    v.add_argument("--poly")
    v.add_argument("--point")
    v.add_argument("--index")
    v.add_argument("--matrix")
    v.add_argument("--L")
    v.set_defaults(func=cmd_vanish)

    s = sub.add_parser("search", parents=[common], help="exhaustive searches on tiny instances")
    s.add_argument("action", choices=["min-rank", "n-of-r", "relation-box"])
    s.add_argument("--L")
    s.add_argument("--n", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--n-max", type=int)
    s.add_argument("--bound", type=int, default=10)
    s.add_argument("--symmetric", action="store_true")
    s.set_defaults(func=cmd_search)

    x = sub.add_parser("experiment", parents=[common], help="run a growth-table experiment")
    x.add_argument("config")
    x.set_defaults(func=cmd_experiment)

    vf = sub.add_parser("verify", parents=[common], help="re-check a matrix JSON file")
    vf.add_argument("matrix")
    vf.set_defaults(func=cmd_verify)
    return parser


_REQUIRED = {
    ("construct", "square"): ["q"], ("construct", "threehalves"): ["q"],
    ("construct", "fivethirds"): ["q"], ("construct", "xy3"): ["q", "x", "y"],
    ("construct", "incidence"): ["r", "k"], ("construct", "phi"): ["phi"],
    ("eigen", "companion"): ["minpoly"], ("eigen", "pipeline"): ["minpoly", "n"],
    ("eigen", "polytobetter"): ["poly", "L", "l"], ("eigen", "multiplicity"): ["matrix", "lam"],
    ("relations", "point-criterion"): ["point"], ("vanish", "order"): ["poly", "point"],
    ("vanish", "hasse"): ["poly", "index"], ("vanish", "witness"): ["matrix"],
    ("search", "min-rank"): ["n"], ("search", "n-of-r"): ["r", "n_max"],
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    key = (args.command, getattr(args, "name", None) or getattr(args, "action", None))
    missing = [f"--{m.replace('_', '-')}" for m in _REQUIRED.get(key, []) if getattr(args, m, None) is None]
    if missing:
        parser.error(f"{' '.join(k for k in key if k)} needs {', '.join(missing)}")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, BudgetExceeded, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
