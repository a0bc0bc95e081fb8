"""pi-cli: command-line front end."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .cache import Cache, threads
from .envelope import NonSplitInput
from .exactalg import DimensionError
from .exponent import DEFAULT_STATE_CAP, pi_exponent
from .growth import FAIL, INCONCLUSIVE, GrowthOptions, run_growth
from .liestruct import LeviError, verify_lemmas
from .multilin import DEFAULT_CELL_BUDGET, ResourceGuardError, cocharacter_multiplicities
from .pipeline import codimensions, structures
from .repspec import SpecError, parse_spec

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD, EXIT_NONSPLIT = 0, 1, 2, 3, 4


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cache(args) -> Cache:
    return Cache(enabled=not args.no_cache)


def cmd_analyze(args, out) -> int:
    spec = parse_spec(args.spec)
    st = structures(spec, args.seed, _cache(args))
    env, levi = st.env, st.levi
    report = verify_lemmas(st.rep, env, levi)
    out.write(_json({
        "name": spec.name,
        "dim_v": spec.dim_v,
        "dim_L": st.rep.dim_l,
        "dim_A": env.dim_a,
        "dim_G": levi.g.dim,
        "dim_R": levi.r.dim,
        "dim_S": levi.s.dim,
        "dim_L_cap_J": levi.l_cap_j.dim,
        "dim_J": env.radical.dim,
        "p": env.p,
        "theta": env.theta,
        "factor_dims": env.factor_dims(),
        "factor_kinds": list(env.factor_kind),
        "lemmas": report.checks,
    }))
    return EXIT_OK


def cmd_codim(args, out) -> int:
    spec = parse_spec(args.spec)
    st = structures(spec, args.seed, _cache(args))
    rows = codimensions(spec, st.rep, args.max_n, args.method, args.primes, args.seed,
                        args.budget, args.force, _cache(args))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "c_n", "method", "seed"])
    for n, r in rows:
        w.writerow([n, r.rank, r.method, "" if r.seed is None else r.seed])
    return EXIT_OK


def cmd_cochar(args, out) -> int:
    spec = parse_spec(args.spec)
    st = structures(spec, args.seed, _cache(args))
    table = cocharacter_multiplicities(st.rep, args.n, args.method, args.primes, args.seed,
                                       args.budget, args.force, compute_all=args.all,
                                       max_n=args.max_n, workers=threads())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["lambda", "m", "dim", "product"])
    for row in table.rows:
        w.writerow([str(row.shape), row.m, row.dim, row.m * row.dim])
    out.write(f"# sum={table.weighted_sum} c_n={table.c_n} "
              f"consistent={str(table.consistent).lower()}\n")
    return EXIT_OK if table.consistent else EXIT_FAIL


def cmd_exponent(args, out) -> int:
    spec = parse_spec(args.spec)
    st = structures(spec, args.seed, _cache(args))
    res = pi_exponent(st.rep, st.env, st.levi, state_cap=args.state_cap, seed=args.seed)
    out.write(_json({
        "name": spec.name,
        "d": res.d,
        "dim_L": st.rep.dim_l,
        "witness": res.witness_indices,
        "witness_factor_dims": [c.complement.dim for c in res.witness],
        "ann_dims": [c.ann.dim for c in res.witness],
        "final_ann_dim": res.final_ann.dim,
        "visited_states": res.visited,
        "lower_bound": res.lower_bound,
        "complement_disagreement": res.complement_disagreement,
        "notes": res.notes,
    }))
    return EXIT_GUARD if res.lower_bound else EXIT_OK


def cmd_verify(args, out) -> int:
    spec = parse_spec(args.spec)
    st = structures(spec, args.seed, _cache(args))
    report = verify_lemmas(st.rep, st.env, st.levi)
    for name, ok in report.checks.items():
        detail = report.details.get(name, "")
        out.write(f"{name}: {'pass' if ok else 'FAIL'}{' (' + detail + ')' if detail else ''}\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_growth(args, out) -> int:
    spec = parse_spec(args.spec)
    opts = GrowthOptions(args.method, args.primes, args.seed, args.budget, args.force,
                         args.state_cap)
    report = run_growth(spec, args.max_n, opts, _cache(args))
    out.write(_json(report.to_dict()))
    if report.verdict == INCONCLUSIVE:
        return EXIT_GUARD
    return EXIT_FAIL if report.verdict == FAIL else EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pi-cli", description=(
        "Polynomial identities of finite-dimensional Lie algebra representations: "
        "codimensions, cocharacters and the PI-exponent."))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="TOML spec file or bundled example name")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    common.add_argument("--no-cache", action="store_true", help="ignore PI_CACHE_DIR")
    ranks = argparse.ArgumentParser(add_help=False)
    ranks.add_argument("--method", choices=["auto", "exact", "modular"], default="auto")
    ranks.add_argument("--primes", type=_positive, default=2)
    ranks.add_argument("--budget", type=_positive, default=DEFAULT_CELL_BUDGET,
                       help="maximum evaluation-matrix cells")
    ranks.add_argument("--force", action="store_true", help="ignore the resource guard")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="structure report (JSON)")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("codim", parents=[common, ranks], help="codimensions (CSV)")
    p.add_argument("--max-n", type=_positive, required=True)
    p.set_defaults(func=cmd_codim)
    p = sub.add_parser("cochar", parents=[common, ranks], help="cocharacter multiplicities (CSV)")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--max-n", type=_positive, default=6, help="refuse larger n unless --force")
    p.add_argument("--all", action="store_true",
                   help="also compute shapes with more rows than dim rho(L)")
    p.set_defaults(func=cmd_cochar)
    p = sub.add_parser("exponent", parents=[common], help="PI-exponent search (JSON)")
    p.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)
    p.set_defaults(func=cmd_exponent)
    p = sub.add_parser("verify", parents=[common], help="structure lemma checks")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("growth", parents=[common, ranks], help="growth-law verdict (JSON)")
    p.add_argument("--max-n", type=_positive, required=True)
    p.add_argument("--state-cap", type=_positive, default=DEFAULT_STATE_CAP)
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (SpecError, DimensionError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"pi-cli: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceGuardError as exc:
        print(f"pi-cli: resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NonSplitInput, LeviError) as exc:
        print(f"pi-cli: non-split input: {exc}", file=sys.stderr)
        return EXIT_NONSPLIT
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
