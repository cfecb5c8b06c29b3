"""Command-line driver: JSON lines on stdout, a short summary on stderr.

Exit codes: 0 resolved and consistent, 1 verification failure, 2 unresolved
items remain, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from apsieve import __version__

EXIT_OK, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_INPUT = 0, 1, 2, 3


class InputError(ValueError):
    pass


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, default=str) + "\n")


def note(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# argument parsing helpers


def int_list(text: str) -> list[int]:
    text = text.strip().strip("[]()")
    if not text:
        return []
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def tuple_arg(text: str):
    from apsieve.tuple_enum import ATuple

    try:
        return ATuple(tuple(int_list(text)))
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def pair_arg(text: str) -> tuple[int, int]:
    v = int_list(text)
    if len(v) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated integers")
    return v[0], v[1]


def _oracle(args):
    from apsieve.oracle_client import Oracle, default_store

    return Oracle(default_store(getattr(args, "fixtures", None)))


def _field_elem(field, pair):
    return field(Fraction(pair[0]), Fraction(pair[1]))


def _read_tuples(args):
    from apsieve.tuple_enum import read_tuples

    if args.tuple:
        return list(args.tuple)
    return list(read_tuples(sys.stdin))


# ---------------------------------------------------------------------------
# subcommands


def cmd_alphabet(args) -> int:
    from apsieve.tuple_enum import coefficient_alphabet

    alpha = coefficient_alphabet(args.pmax)
    emit({"pmax": args.pmax, "size": len(alpha), "alphabet": alpha})
    return EXIT_OK


def cmd_tuples(args) -> int:
    from apsieve.tuple_enum import TupleConstraints, generate_candidates, generate_union

    if args.forced is None:
        forced = [1, 2] if args.k == 5 else []
    else:
        forced = args.forced
    if forced:
        runs = [TupleConstraints(args.pmax, forced_divisibility={(i, args.pmax)}) for i in forced]
        if any(i >= args.k or i < 0 for i in forced):
            raise InputError("forced position out of range")
        out = generate_union(args.k, runs)
    else:
        out = list(generate_candidates(args.k, TupleConstraints(args.pmax)))
    for t in out:
        sys.stdout.write(t.to_json() + "\n")
    note(f"{len(out)} candidate tuples (k={args.k}, pmax={args.pmax}, forced={forced})")
    return EXIT_OK


def cmd_sieve(args) -> int:
    from apsieve.congruence_sieve import replay_certificate, sieve_tuple

    if args.replay:
        bad = 0
        with open(args.replay) as fh:
            for no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    ok = replay_certificate(rec)
                except (ValueError, KeyError, TypeError) as exc:
                    raise InputError(f"line {no}: {exc}") from None
                emit({"tuple": rec["tuple"], "p": rec["p"], "outcome": rec["outcome"], "confirmed": ok})
                bad += not ok
        note(f"replayed certificates, {bad} not confirmed")
        return EXIT_FAIL if bad else EXIT_OK
    n_elim = 0
    tuples = _read_tuples(args)
    for t in tuples:
        rep = sieve_tuple(t, args.primes)
        v = rep.verdicts[-1] if rep.verdicts else None
        if v is None:
            emit({"tuple": list(t.a), "p": None, "outcome": "survives", "witness": None})
            continue
        emit(v.to_dict())
        n_elim += not v.survives
    note(f"{n_elim} of {len(tuples)} eliminated over primes {list(args.primes)}")
    return EXIT_OK


def cmd_curves(args) -> int:
    from apsieve.curve_lab.delta import curve_locally_soluble, delta_candidates, local_solubility
    from apsieve.curve_lab.quartic import GenusOneQuartic, j_invariant, jacobian_model
    from apsieve.curve_lab.relations import derive_family, pivot_system, pivots_for

    if args.action == "jinv-check":
        from apsieve.curve_lab.reference import WEIERSTRASS_MODELS
        from apsieve.tuple_enum import ATuple

        bad = 0
        for t, delta, E in WEIERSTRASS_MODELS:
            fam = derive_family(ATuple(t))
            q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)), delta)
            mine, ref = j_invariant(q), E.j_invariant()
            ok = mine == ref
            bad += not ok
            emit({"tuple": list(t), "delta": str(delta), "j": str(mine), "reference_j": str(ref), "equal": ok})
        note(f"{len(WEIERSTRASS_MODELS) - bad}/{len(WEIERSTRASS_MODELS)} j-invariants agree")
        return EXIT_FAIL if bad else EXIT_OK
    if args.tuple is None:
        raise InputError("--tuple is required")
    t = args.tuple[0]
    pivots = args.pivots or pivots_for(t)
    if args.action == "derive":
        rels = pivot_system(t, *pivots)
        fam = derive_family(t, pivots)
        emit(
            {
                "tuple": list(t.a),
                "pivots": list(pivots),
                "relations": [str(r) for r in rels],
                "field_D": fam.field.D,
                "scale": [fam.scale_i, fam.scale_j],
                "curve": fam.describe(),
            }
        )
        return EXIT_OK
    fam = derive_family(t, pivots)
    if args.action == "delta":
        rep = delta_candidates(fam, args.local_primes, args.filter)
        emit(
            {
                "tuple": list(t.a),
                "S": list(rep.S),
                "classes": len(rep.selmer),
                "after_norm": [str(x) for x in rep.after_norm],
                "deltas": [str(x) for x in rep.survivors],
            }
        )
        note(f"{len(rep.survivors)} delta classes survive ({args.filter} filter)")
        return EXIT_OK
    if args.action == "local":
        if args.delta is None:
            raise InputError("--delta is required for 'curves local'")
        delta = _field_elem(fam.field, args.delta)
        q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)), delta)
        places = args.local_primes or [2, 3, 5]
        res = {}
        for p in ["inf", *places]:
            res[str(p)] = curve_locally_soluble(q, p, rational_x=args.rational_x) if args.rational_x else local_solubility(q, p)
        emit({"tuple": list(t.a), "delta": str(delta), "soluble": res, "j": str(j_invariant(jacobian_model(q)))})
        return EXIT_OK
    raise InputError(f"unknown action {args.action}")


def cmd_oracle(args) -> int:
    from apsieve.oracle_client import Missing, OracleError, OracleQuery, default_store, key_for

    try:
        store = default_store(args.fixtures)
    except OracleError as exc:
        raise InputError(str(exc)) from None
    if args.action == "check":
        ranks = sum(1 for r in store if r.question == "rank")
        emit({"records": len(store), "rank": ranks, "chabauty": len(store) - ranks})
        note(f"fixture store OK: {len(store)} records")
        return EXIT_OK
    from apsieve.curve_lab.elimination import quadruple_quartic
    from apsieve.curve_lab.quartic import GenusOneQuartic
    from apsieve.curve_lab.relations import derive_family

    if args.tuple is None:
        raise InputError("--tuple is required")
    t = args.tuple[0]
    if args.alpha is not None:
        q = quadruple_quartic(t, args.alpha)
    else:
        if args.delta is None:
            raise InputError("give --alpha (quadruple curve) or --delta (family curve)")
        fam = derive_family(t)
        delta = _field_elem(fam.field, args.delta)
        q = GenusOneQuartic(fam.field, tuple(fam.quartic_coeffs(delta)), delta)
    key = key_for(q)
    out = {"key": key}
    rank = store.lookup(OracleQuery(key, "rank"))
    out["rank"] = None if rank is Missing else rank
    out["chabauty"] = {r.question: sorted(str(x) for x in r.answer) for r in store.chabauty_records(key)}
    emit(out)
    return EXIT_OK


def _spec_from(args, k: int, pb: str):
    from apsieve.brute_search import BCondition, SearchSpec

    try:
        return SearchSpec(k, args.nmin, args.nmax, args.dmin, args.dmax, BCondition.parse(pb))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_search(args) -> int:
    from apsieve.brute_search import search_box_parallel

    spec = _spec_from(args, args.k, args.pb)
    sols = search_box_parallel(spec, args.jobs)
    for s in sols:
        emit(s.to_dict())
    note(f"{len(sols)} solutions in k={spec.k}, n in [{spec.n_min}, {spec.n_max}], d in [{spec.d_min}, {spec.d_max}], b {spec.bcond}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.theorem1:
        from apsieve.pipeline import verify_theorem1

        res = verify_theorem1(_oracle(args))
        for row in res["rows"]:
            emit(row)
        emit({"conclusion": res["conclusion"], "ok": res["ok"]})
        note(res["conclusion"])
        return EXIT_OK if res["ok"] else EXIT_UNRESOLVED
    from apsieve.brute_search import verify_solution

    if args.values is None or len(args.values) != 5:
        raise InputError("verify needs n d k b y (or --theorem1)")
    n, d, k, b, y = args.values
    rep = verify_solution(n, d, k, b, y)
    emit(rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_reduce(args) -> int:
    from apsieve.pipeline import K7_TUPLES
    from apsieve.tuple_enum import find_subtuple, half_subprogression

    if args.tuple is None:
        raise InputError("--tuple is required")
    t = args.tuple[0]
    sub = find_subtuple(t, K7_TUPLES)
    if sub is not None:
        emit({"tuple": list(t.a), "via": "subtuple", "offset": sub[0], "reduces_to": list(sub[1].a)})
        return EXIT_OK
    for start in range(2):
        if start + 12 >= t.k:
            continue
        h = half_subprogression(t, start, 7)
        if h is not None:
            known = h.a in {x.a for x in K7_TUPLES}
            emit({"tuple": list(t.a), "via": "half", "start": start, "reduces_to": list(h.a), "known": known})
            if known:
                return EXIT_OK
    emit({"tuple": list(t.a), "via": None})
    return EXIT_UNRESOLVED


def cmd_pipeline(args) -> int:
    from apsieve.pipeline import run_pipeline_k5

    if args.k != 5:
        raise InputError("the pipeline is implemented for k=5")
    ranges = None
    if args.dmax is not None:
        ranges = _spec_from(args, 5, args.pb)
    rep = run_pipeline_k5(_oracle(args), args.primes, ranges, args.pmax, args.forced or (1, 2))
    if args.certificates:
        for c in rep.certificates:
            emit({"certificate": c})
    emit(rep.summary())
    note(
        f"generated {rep.generated}; presieve {rep.presieve_eliminated}; rank-0 {rep.rank0_eliminated}; "
        f"curve stage {len(rep.curve_stage)}; congruence {rep.congruence_eliminated}; "
        f"resolved by curves {len(rep.chabauty_resolved)}; unresolved {len(rep.unresolved)}; "
        f"solutions d>1: {rep.solutions}"
    )
    return rep.exit_code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from apsieve.congruence_sieve import DEFAULT_PRIMES

    ap = argparse.ArgumentParser(prog="apsieve", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def fixtures(p):
        p.add_argument("--fixtures", default=None, help="fixture file (default: $APSIEVE_FIXTURES, then bundled)")

    def box(p, d_required=True):
        p.add_argument("--nmin", type=int, default=-2000)
        p.add_argument("--nmax", type=int, default=2000)
        p.add_argument("--dmin", type=int, default=1)
        p.add_argument("--dmax", type=int, default=100 if d_required else None)
        p.add_argument("--pb", default="le:5", help="eq:P, le:P or one")
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("alphabet", help="signed squarefree coefficients")
    p.add_argument("--pmax", type=int, default=5)
    p.set_defaults(func=cmd_alphabet)

    p = sub.add_parser("tuples", help="candidate coefficient tuples")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--forced", type=int_list, default=None, help="positions divisible by pmax, one run each")
    p.set_defaults(func=cmd_tuples)

    p = sub.add_parser("sieve", help="congruence sieve (tuples from --tuple or stdin JSON lines)")
    p.add_argument("--tuple", type=tuple_arg, action="append", help="e.g. --tuple=-3,-5,2,1,1")
    p.add_argument("--primes", type=int_list, default=list(DEFAULT_PRIMES))
    p.add_argument("--replay", default=None, help="certificate file to re-check")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("curves", help="relations, delta classes, j-invariants, local solubility")
    p.add_argument("action", choices=["derive", "delta", "jinv-check", "local"])
    p.add_argument("--tuple", type=tuple_arg, action="append")
    p.add_argument("--pivots", type=pair_arg, default=None)
    p.add_argument("--delta", type=pair_arg, default=None, help="u,v for u + v*sqrt(D)")
    p.add_argument("--filter", default="quartic", choices=["quartic", "curve-rational", "system", "none"])
    p.add_argument("--local-primes", type=int_list, default=None)
    p.add_argument("--rational-x", action="store_true")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("oracle", help="fixture store checks and key lookup")
    p.add_argument("action", choices=["check", "key"])
    fixtures(p)
    p.add_argument("--tuple", type=tuple_arg, action="append")
    p.add_argument("--alpha", type=int_list, default=None)
    p.add_argument("--delta", type=pair_arg, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("search", help="exhaustive (n, d) box search")
    p.add_argument("--k", type=int, default=5)
    box(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="check a solution n d k b y, or --theorem1")
    p.add_argument("values", nargs="*", type=int)
    p.add_argument("--theorem1", action="store_true")
    fixtures(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="reduce a long tuple to a known length-7 tuple")
    p.add_argument("--tuple", type=tuple_arg, action="append")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("pipeline", help="full k=5 elimination")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--primes", type=int_list, default=list(DEFAULT_PRIMES))
    p.add_argument("--forced", type=int_list, default=None)
    p.add_argument("--certificates", action="store_true", help="also emit every certificate")
    fixtures(p)
    box(p, d_required=False)
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    from apsieve.oracle_client import OracleError

    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, OracleError, FileNotFoundError) as exc:
        note(f"error: {exc}")
        return EXIT_INPUT
    except ValueError as exc:
        note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
