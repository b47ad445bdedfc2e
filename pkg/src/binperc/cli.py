"""Command-line front end.

On any library error the process prints ``error: <Name>: <message>`` to stderr
and exits with status 2; ``verify`` exits 1 when the vector is not a solution.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidConfig, PerceptronError
from .experiment import TAIL_FIELDS, TRIAL_FIELDS, ExperimentConfig, run_experiment, write_csv
from .generate import GenConfig, random_spins, sample_instance
from .io import format_instance, load_instance, load_solution, save_solution
from .model import ModelKind, margin_report, spin_string, spins
from .oracle import DEFAULT_CAP, cluster_census, margin_census, solution_codes
from .paths import local_path_first, local_path_second, verify_path, wide_web_path
from .schedule import build_schedule, custom_schedule, parse_psi_variant
from .solver import Policy, solve
from .stats import capacity_sbp


def _int_list(text: str) -> list[int]:
    return [int(float(t)) for t in text.split(",") if t]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _schedule_for(instance, args):
    psi = parse_psi_variant(args.psi)
    if args.blocks:
        if not args.budgets:
            raise InvalidConfig("--blocks needs --budgets")
        return custom_schedule(instance.model, instance.kappa, _int_list(args.blocks),
                               _int_list(args.budgets), instance.m, psi)
    return build_schedule(instance.model, instance.n, instance.m, instance.kappa, psi)


def _policy(args, n0: int) -> Policy:
    if args.policy == "all_plus":
        return Policy.all_plus()
    if args.policy == "random":
        return Policy.seeded_random(args.seed)
    if args.policy == "given":
        if not args.v:
            raise InvalidConfig("--policy given needs --v")
        return Policy.given(spins(args.v))
    raise InvalidConfig(f"unknown policy {args.policy!r}")


def cmd_gen(args) -> int:
    cfg = GenConfig(ModelKind.parse(args.model), args.n, args.alpha, args.kappa, args.seed)
    inst = sample_instance(cfg, m=args.m)
    text = format_instance(inst)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    sched = _schedule_for(inst, args)
    out = solve(inst, sched, _policy(args, sched.n0))
    if args.solution:
        save_solution(out.x, args.solution)
    payload = {
        "success": out.success,
        "rounds_executed": out.rounds_executed,
        "R": sched.R,
        "n": inst.n,
        "m": inst.m,
        "n_i": list(sched.n_i),
        "m_i": list(sched.m_i),
        "policy": args.policy,
        "psi_variant": sched.psi_variant,
        "x": spin_string(out.x),
    }
    if args.timings:
        payload["round_times"] = list(out.round_times)
        payload["total_time"] = out.total_time
    _emit(payload, args.out)
    return 0


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    x = load_solution(args.solution)
    rep = margin_report(inst, x, args.kappa_prime)
    _emit(
        {
            "all_satisfied": rep.all_satisfied,
            "kappa": inst.kappa if args.kappa_prime is None else args.kappa_prime,
            "violations": int((~rep.satisfied).sum()),
            "row_sums": rep.row_sums.tolist(),
            "scaled": rep.scaled.tolist(),
        },
        args.out,
    )
    return 0 if rep.all_satisfied else 1


def cmd_path(args) -> int:
    inst = load_instance(args.instance)
    sched = _schedule_for(inst, args)
    if args.kind == "wide":
        v = spins(args.v) if args.v else random_spins(args.seed, sched.n0, stream=1)
        cursor = wide_web_path(inst, sched, v)
    else:
        if not args.x:
            raise InvalidConfig("local paths need --x SOLUTION_FILE")
        X = load_solution(args.x)
        if args.kind == "first":
            cursor = local_path_first(inst, sched, X, args.ell, args.kappa_prime, args.d_count)
        else:
            if args.d_count is None:
                raise InvalidConfig("--kind second needs --d-count")
            cursor = local_path_second(inst, sched, X, args.ell, args.d_count, args.kappa_prime)
    sample = "all" if args.sample == "all" else int(args.sample)
    report = verify_path(inst, cursor, sample=sample, seed=args.sample_seed)
    _emit(report.to_json(), args.out)
    return 0


def cmd_enumerate(args) -> int:
    inst = load_instance(args.instance)
    codes = solution_codes(inst, cap=args.cap)
    census = cluster_census(inst, codes)
    payload = census.to_json()
    if args.kappa_prime is not None:
        mc = margin_census(inst, codes, args.kappa_prime, args.threshold, census)
        payload["kappa_prime"] = args.kappa_prime
        payload["threshold"] = args.threshold
        payload["kappa_prime_count"] = mc.kappa_prime_count
        payload["wide_fraction"] = mc.fraction
    _emit(payload, args.out)
    return 0


def cmd_capacity(args) -> int:
    lines = ["kappa,alpha_c"]
    for k in args.kappa:
        lines.append(f"{k!r},{capacity_sbp(k):.6f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        model=ModelKind.parse(args.model),
        kappa=args.kappa,
        n_values=tuple(_int_list(args.n)),
        alpha_values=tuple(_float_list(args.alpha)),
        seed_count=args.seeds,
        base_seed=args.seed,
        policy=args.policy,
        psi_variant=parse_psi_variant(args.psi),
        equivariance=not args.no_equivariance,
        kappa_prime=args.kappa_prime,
        out=args.out,
        tail_out=args.tail_out,
    )
    trials, tails = run_experiment(cfg)
    if args.out:
        write_csv(args.out, trials, TRIAL_FIELDS)
    else:
        w = sys.stdout
        w.write(",".join(TRIAL_FIELDS) + "\n")
        for r in trials:
            w.write(",".join(str(r[f]) for f in TRIAL_FIELDS) + "\n")
    if args.tail_out:
        write_csv(args.tail_out, tails, TAIL_FIELDS)
    adjusted = sum(r["m_adjusted"] for r in trials)
    if adjusted:
        print(f"note: m lowered by one to make it odd in {adjusted} trial(s)", file=sys.stderr)
    return 0


def _add_schedule_flags(p) -> None:
    p.add_argument("--psi", default="std", choices=["std", "literal"])
    p.add_argument("--blocks", help="explicit block sizes n_0,...,n_R")
    p.add_argument("--budgets", help="explicit row budgets m_1,...,m_R")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="binperc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample an instance")
    p.add_argument("--model", required=True, choices=["sbp", "abp"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, help="explicit row count instead of floor(alpha n)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the majority algorithm")
    p.add_argument("instance")
    p.add_argument("--policy", default="all_plus", choices=["all_plus", "random", "given"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--v", help="block-0 vector as +/- string for --policy given")
    p.add_argument("--solution", help="write the vector here")
    p.add_argument("--timings", action="store_true", help="include wall-clock times in the JSON")
    p.add_argument("--out")
    _add_schedule_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a vector against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--kappa-prime", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("path", help="audit an interpolation path")
    p.add_argument("instance")
    p.add_argument("--kind", default="wide", choices=["wide", "first", "second"])
    p.add_argument("--seed", type=int, default=0, help="seed for the random block-0 vector")
    p.add_argument("--v")
    p.add_argument("--x", help="solution file for the local paths")
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--kappa-prime", type=float)
    p.add_argument("--d-count", type=int)
    p.add_argument("--sample", default="all", help="'all' or a number of random tuples")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--out")
    _add_schedule_flags(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("enumerate", help="brute-force solutions and clusters")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--kappa-prime", type=float)
    p.add_argument("--threshold", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("capacity", help="SBP capacity threshold")
    p.add_argument("--kappa", type=float, nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("experiment", help="Monte Carlo sweep to CSV")
    p.add_argument("--model", required=True, choices=["sbp", "abp"])
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--n", required=True, help="comma-separated list")
    p.add_argument("--alpha", required=True, help="comma-separated list")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--policy", default="all_plus", choices=["all_plus", "random"])
    p.add_argument("--psi", default="std", choices=["std", "literal"])
    p.add_argument("--kappa-prime", type=float)
    p.add_argument("--no-equivariance", action="store_true", help="keep even m and skip the v/-v check")
    p.add_argument("--tail-out", help="CSV of per-round tail checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PerceptronError as exc:
        print(f"error: {exc.name}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: IOError: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
