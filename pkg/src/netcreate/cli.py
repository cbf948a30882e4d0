"""Command-line driver.

Machine output (JSON, CSV, DOT) goes to ``--out`` or stdout; one-line
human summaries go to stderr. Exit status is 0 on success, 1 for malformed
input and 2 when a precondition or size limit refuses the request.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .constructions import (
    CliqueLeavesSpec,
    make_clique,
    make_clique_with_leaves,
    make_random_profile,
    make_star,
    poa_lower_bound_asymptote,
    poa_upper_bound_formula,
)
from .core import GameParams, StrategyProfile, build_graph, format_scalar, parse_alpha, profile_from_json, social_cost
from .enumeration import (
    ENUMERATION_LIMIT,
    decode,
    enumerate_equilibria,
    poa_sweep,
    price_of_anarchy_exact,
    sweep_csv,
)
from .equilibria import EXHAUSTIVE_LIMIT, best_response_dynamics, best_response_exact, is_nash
from .errors import LimitExceeded, NetCreateError, PreconditionError, SchemaError, SearchExhausted
from .structure import layer_partition, lemma_audit


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _alpha_arg(text: str) -> Fraction:
    try:
        return parse_alpha(text)
    except SchemaError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(args) -> tuple[GameParams, StrategyProfile]:
    if args.inp in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.inp) as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read profile: {exc}") from exc
    game, profile = profile_from_json(text)
    if getattr(args, "alpha", None) is not None:
        game = GameParams(game.n, args.alpha)
    return game, profile


def _fresh_seed() -> int:
    return random.SystemRandom().randrange(2**32)


def cmd_construct(args) -> None:
    extra = {}
    if args.kind == "star":
        profile = make_star(_need(args.n, "--n"))
    elif args.kind == "clique":
        profile = make_clique(_need(args.n, "--n"))
    elif args.kind == "clique-leaves":
        profile = make_clique_with_leaves(CliqueLeavesSpec(_need(args.k, "--k"), _need(args.alpha, "--alpha")))
    else:
        seed = args.seed if args.seed is not None else _fresh_seed()
        profile = make_random_profile(_need(args.n, "--n"), args.edge_prob, seed)
        extra["seed"] = seed
    alpha = args.alpha if args.alpha is not None else Fraction(1)
    out = profile.to_dict(alpha)
    out.update(extra)
    _emit(args, json.dumps(out))
    _say(f"constructed {args.kind}: n={profile.n}, purchases={profile.num_purchases()}")


def _need(value, flag):
    if value is None:
        raise _UsageError(f"{flag} is required here")
    return value


def cmd_cost(args) -> None:
    game, profile = _load(args)
    report = social_cost(game, profile)
    _emit(args, _dump(report.to_dict()))
    _say(f"social cost {format_scalar(report.social_cost)}")


def cmd_check_nash(args) -> None:
    game, profile = _load(args)
    verdict = is_nash(game, profile, limit=args.limit_exhaustive)
    _emit(args, _dump(verdict.to_dict()))
    _say(f"weak Nash: {verdict.is_weak_nash}, strict Nash: {verdict.is_strict_nash}")


def cmd_best_response(args) -> None:
    game, profile = _load(args)
    if not 0 <= args.vertex < profile.n:
        raise PreconditionError(f"--vertex must lie in [0, {profile.n})")
    cost, best = best_response_exact(game, profile, args.vertex, limit=args.limit_exhaustive)
    current = social_cost(game, profile).vertices[args.vertex].total
    _emit(args, _dump({
        "vertex": args.vertex,
        "current_purchases": sorted(profile[args.vertex]),
        "current_cost": format_scalar(current),
        "best_purchases": sorted(best),
        "best_cost": format_scalar(cost),
    }))


def cmd_dynamics(args) -> None:
    game, profile = _load(args)
    out = {}
    seed = args.seed
    if args.schedule == "random" and seed is None:
        seed = _fresh_seed()
    if seed is not None:
        out["seed"] = seed
    trajectory, fixed = best_response_dynamics(
        game, profile, schedule=args.schedule, tie_break=args.tie_break,
        max_rounds=args.max_rounds, seed=seed, limit=args.limit_exhaustive,
    )
    out.update({
        "fixed_point": fixed,
        "steps": len(trajectory) - 1,
        "trajectory": [p.as_lists() for p in trajectory],
        "final": trajectory[-1].to_dict(game.alpha),
    })
    _emit(args, _dump(out))
    _say(f"{len(trajectory) - 1} moves, fixed point: {fixed}")


def cmd_partition(args) -> None:
    game, profile = _load(args)
    if not 0 <= args.root < profile.n:
        raise PreconditionError(f"--root must lie in [0, {profile.n})")
    _emit(args, _dump(layer_partition(build_graph(profile), args.root).to_dict()))


def cmd_audit(args) -> None:
    game, profile = _load(args)
    report = lemma_audit(game, profile, require_nash=not args.no_require_nash, limit=args.limit_exhaustive)
    _emit(args, report.to_csv() if args.format == "csv" else _dump(report.to_dict()))
    _say(f"audit {'passed' if report.passed else 'FAILED'}: {len(report.failures())} failing checks")


def cmd_enumerate(args) -> None:
    game = GameParams(args.n, args.alpha)
    found = enumerate_equilibria(game, args.mode, limit=args.limit_enumeration, threads=args.threads)
    if args.format == "csv":
        lines = ["code,social_cost"] + [f"{c},{format_scalar(r.social_cost)}" for c, r in found]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dump({
            "n": args.n,
            "alpha": format_scalar(game.alpha),
            "mode": args.mode,
            "count": len(found),
            "equilibria": [
                {"code": c, "social_cost": format_scalar(r.social_cost), "purchases": decode(c, args.n).as_lists()}
                for c, r in found
            ],
        }))
    _say(f"{len(found)} {args.mode} equilibria")


def cmd_poa(args) -> None:
    res = price_of_anarchy_exact(GameParams(args.n, args.alpha), args.mode, limit=args.limit_enumeration, threads=args.threads)
    row = res.to_row()
    _emit(args, sweep_csv([row]) if args.format == "csv" else _dump(row))
    _say(f"price of anarchy {row['poa']}")


def cmd_sweep(args) -> None:
    rows = poa_sweep(args.n, args.alpha, args.mode, limit=args.limit_enumeration, threads=args.threads)
    _emit(args, _dump(rows) if args.format == "json" else sweep_csv(rows))


def cmd_bounds(args) -> None:
    if args.which == "lower":
        _emit(args, _dump({"alpha": format_scalar(args.alpha), "lower_bound": format_scalar(poa_lower_bound_asymptote(args.alpha))}))
    else:
        value = poa_upper_bound_formula(args.alpha, _need(args.n, "--n"))
        _emit(args, _dump({"alpha": format_scalar(args.alpha), "n": args.n, "upper_bound": repr(value)}))


def cmd_export_dot(args) -> None:
    game, profile = _load(args)
    lines = ["digraph G {"]
    lines += [f"  {v};" for v in range(profile.n)]
    for v in range(profile.n):
        for w in sorted(profile[v]):
            lines.append(f"  {v} -> {w};")
    lines.append("}")
    _emit(args, "\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for enumeration")
    common.add_argument("--limit-exhaustive", type=int, default=EXHAUSTIVE_LIMIT)
    common.add_argument("--limit-enumeration", type=int, default=ENUMERATION_LIMIT)

    with_in = _Parser(add_help=False)
    with_in.add_argument("--in", dest="inp", default="-", help="profile JSON path (default stdin)")
    with_in.add_argument("--alpha", type=_alpha_arg, default=None, help="override the profile's alpha (p/q)")

    parser = _Parser(prog="netcreate", description="Exact network creation game engine")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", parents=[common])
    p.add_argument("kind", choices=["star", "clique", "clique-leaves", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=_alpha_arg)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_construct)

    for name, func in (("cost", cmd_cost), ("check-nash", cmd_check_nash), ("export-dot", cmd_export_dot)):
        p = sub.add_parser(name, parents=[common, with_in])
        p.set_defaults(func=func)

    p = sub.add_parser("best-response", parents=[common, with_in])
    p.add_argument("--vertex", type=int, required=True)
    p.set_defaults(func=cmd_best_response)

    p = sub.add_parser("dynamics", parents=[common, with_in])
    p.add_argument("--schedule", choices=["round-robin", "random"], default="round-robin")
    p.add_argument("--tie-break", choices=["incumbent", "least"], default="incumbent")
    p.add_argument("--max-rounds", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("partition", parents=[common, with_in])
    p.add_argument("--root", type=int, default=0)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("audit", parents=[common, with_in])
    p.add_argument("--no-require-nash", action="store_true")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_audit)

    for name, func in (("enumerate", cmd_enumerate), ("poa", cmd_poa)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--alpha", type=_alpha_arg, required=True)
        p.add_argument("--mode", choices=["weak", "strict"], default="weak")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--n", type=int, nargs="*", default=[])
    p.add_argument("--alpha", type=_alpha_arg, nargs="*", default=[])
    p.add_argument("--mode", choices=["weak", "strict"], default="weak")
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", parents=[common])
    p.add_argument("which", choices=["upper", "lower"])
    p.add_argument("--alpha", type=_alpha_arg, required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_bounds)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except (_UsageError, SchemaError) as exc:
        _say(f"error: {exc}")
        return 1
    except (LimitExceeded, PreconditionError, SearchExhausted) as exc:
        _say(f"refused: {exc}")
        return 2
    except NetCreateError as exc:
        _say(f"error: {exc}")
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
