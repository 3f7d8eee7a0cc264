"""Command-line interface: ``latmax check|solve|exact|reduce|experiment|replay``.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 on
success, 1 when a checked property, verdict or replay fails, 2 on invalid
input.
"""
import argparse
import json
import sys

from ._common import DomainTooLargeError, LatmaxError
from .constraints import Cardinality, MatroidIntersection, PosetMatroid, constraint_from_dict
from .exact import describe_point, exact_max
from .experiments import (
    ALGOS,
    check_trace,
    load_config,
    mean_std,
    replay,
    run_experiment,
    solve_once,
)
from .instances import instance_to_dict, load_instance
from .properties import check_dr, check_monotone, check_poset_matroid, check_submodular
from .reduction import load_hypergraph, reduce_dksh


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(obj):
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def cmd_check(args):
    inst = load_instance(args.instance)
    oracle = inst.oracle
    if args.property == "submodular":
        rep = check_submodular(oracle, mode=args.mode or "local", exact=args.exact)
    elif args.property == "dr":
        kw = {"mode": args.mode} if args.mode else {}
        rep = check_dr(oracle, exact=args.exact, **kw)
    elif args.property == "monotone":
        rep = check_monotone(oracle, exact=args.exact)
    else:
        if oracle.is_lattice:
            raise LatmaxError("poset-matroid checks need a distributive-lattice instance")
        poset = oracle.domain.poset
        if args.matroid:
            mt = PosetMatroid.from_dict(poset, _load_json(args.matroid))
        elif isinstance(inst.constraint, PosetMatroid):
            mt = inst.constraint
        else:
            raise LatmaxError("no matroid given (use --matroid or an instance matroid constraint)")
        rep = check_poset_matroid(poset, mt)
    _emit(rep.to_dict())
    return 0 if rep.holds else 1


def _solve_constraint(args, inst):
    poset = inst.oracle.domain.poset
    if args.algo == "card-greedy":
        if args.k is not None:
            return Cardinality(args.k), args.k
        if isinstance(inst.constraint, Cardinality):
            return inst.constraint, inst.constraint.k
        raise LatmaxError("card-greedy needs --k or a cardinality constraint in the instance")
    if args.algo == "matroid-greedy":
        if args.matroid:
            mts = [PosetMatroid.from_dict(poset, _load_json(p)) for p in args.matroid]
            return (mts[0] if len(mts) == 1 else mts), None
        if isinstance(inst.constraint, PosetMatroid):
            return inst.constraint, None
        raise LatmaxError("matroid-greedy needs --matroid or a matroid constraint in the instance")
    return None, None


def cmd_solve(args):
    inst = load_instance(args.instance)
    constraint, k = (None, None) if inst.oracle.is_lattice else _solve_constraint(args, inst)
    runs = []
    for t in range(args.trials):
        seed = args.seed + t
        sol, trace = solve_once(args.algo, inst, seed, args.order, args.extension, k, constraint)
        runs.append((seed, sol, trace))
    seed, sol, trace = runs[0]
    out = {"algo": args.algo, "instance": args.instance, "seed": seed,
           "solution": describe_point(sol), "value": trace.value, "queries": trace.queries}
    if args.trials > 1:
        mu, sd = mean_std([tr.value for _, _, tr in runs])
        out.update({"trials": args.trials, "mean_value": mu, "std_value": sd})
    if args.trace:
        try:
            region = MatroidIntersection(constraint) if isinstance(constraint, list) else constraint
            opt = exact_max(inst.oracle, region).argmax
        except DomainTooLargeError:
            opt = None
        if opt is not None and args.algo in ("dg13", "matroid-greedy", "card-greedy"):
            check_trace(args.algo, trace, inst, opt)
        with open(args.trace, "w") as fh:
            json.dump(trace.to_dict(), fh, indent=1)
            fh.write("\n")
        out["trace"] = args.trace
    _emit(out)
    return 0


def cmd_exact(args):
    inst = load_instance(args.instance)
    constraint = inst.constraint
    if args.constraint:
        poset = None if inst.oracle.is_lattice else inst.oracle.domain.poset
        constraint = constraint_from_dict(poset, _load_json(args.constraint))
    _emit(exact_max(inst.oracle, constraint).to_dict())
    return 0


def cmd_reduce(args):
    h = load_hypergraph(args.hypergraph)
    red = reduce_dksh(h, args.k)
    d = instance_to_dict(red.oracle, red.knapsack)
    with open(args.out, "w") as fh:
        json.dump(d, fh, indent=1)
        fh.write("\n")
    _emit({"out": args.out, "vertices": h.n, "edges": h.m, "k": args.k, "elements": red.poset.m})
    return 0


def cmd_experiment(args):
    cfg = load_config(args.config)
    rep = run_experiment(cfg)
    rep.write(args.csv, args.json)
    _emit({"name": cfg.name, "rows": len(rep.rows), "verdicts": rep.verdicts, "passed": rep.passed})
    return 0 if rep.passed else 1


def cmd_replay(args):
    res = replay(args.trace, dr=not args.non_dr)
    _emit(res)
    return 0 if res["valid"] else 1


def _extension_arg(text):
    if text in ("id", "seeded"):
        return text
    try:
        return [int(e) for e in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad extension {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="latmax", description="Submodular maximization on lattices.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="verify a structural property exhaustively")
    c.add_argument("--instance", required=True)
    c.add_argument("--property", required=True, choices=["submodular", "dr", "monotone", "poset-matroid"])
    c.add_argument("--mode", help="local|pairwise (submodular), characterization|definition|local (dr)")
    c.add_argument("--matroid", help="matroid JSON for --property poset-matroid")
    c.add_argument("--exact", action="store_true", help="compare with exact rationals")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="run a solver")
    s.add_argument("--algo", required=True, choices=[a for a in ALGOS if a != "reduction"])
    s.add_argument("--instance", required=True)
    s.add_argument("--order", default="fixed", choices=["fixed", "greedy"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--trace", help="write the first run's trace to this file")
    s.add_argument("--matroid", action="append", help="matroid JSON (repeat for an intersection)")
    s.add_argument("--k", type=int)
    s.add_argument("--extension", default="id", type=_extension_arg,
                   help='"id", "seeded" or a comma-separated element order')
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("exact", help="brute-force optimum")
    e.add_argument("--instance", required=True)
    e.add_argument("--constraint", help="constraint JSON overriding the instance's")
    e.set_defaults(func=cmd_exact)

    r = sub.add_parser("reduce", help="build the knapsack instance for a densest k-subhypergraph input")
    r.add_argument("--hypergraph", required=True)
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reduce)

    x = sub.add_parser("experiment", help="run an experiment config")
    x.add_argument("--config", required=True)
    x.add_argument("--csv")
    x.add_argument("--json")
    x.set_defaults(func=cmd_experiment)

    y = sub.add_parser("replay", help="re-check a saved trace")
    y.add_argument("trace")
    y.add_argument("--non-dr", action="store_true", help="skip checks that need a DR input")
    y.set_defaults(func=cmd_replay)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LatmaxError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"latmax: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
