"""Command-line front end.

Exit status: 0 when the model is diagnosable (or the command succeeded),
1 when it is not diagnosable (or xcheck found a mismatch), 2 on usage or
input errors.
"""
import argparse
import json
import os
import sys

from . import __version__
from .augment import build_augmented
from .errors import OfdiagError
from .estimate import diagnose, format_estimate
from .model import EPS, export_dot, load_model, serialize_model
from .observation import render_output
from .oracle import GenParams, cross_check, random_model, replay_diagnoser, simulate_fair_run
from .verifier import build_verification_structure, check_classical, check_of_diagnosability, summarize

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


class UsageError(OfdiagError):
    pass


def _symbols(text):
    """``"b,c"`` -> ``["b", "c"]``; the empty string is the empty list."""
    return [t.strip() for t in text.split(",") if t.strip()]


def _unit(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return value


def _nonneg(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} must be non-negative")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ofdiag",
        description="Diagnosability and output-fair diagnosability of discrete-event systems.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def fairness_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--fair", type=_symbols, metavar="D1,D2",
                           help="fair outputs (overrides the model file); 'eps' allowed")
        group.add_argument("--classical", action="store_true",
                           help="classical diagnosability (no fair outputs)")

    p = sub.add_parser("check", help="decide (OF-)diagnosability")
    p.add_argument("model")
    fairness_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("witness", help="print the witness of non-diagnosability")
    p.add_argument("model")
    fairness_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("diagnose", help="run the diagnoser on an output string")
    p.add_argument("model")
    p.add_argument("--obs", type=_symbols, required=True, metavar="D1,D2,...")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export", help="export the model, augmented system or verifier")
    p.add_argument("model")
    p.add_argument("--what", choices=["g", "aug", "ver"], default="g")
    p.add_argument("--format", choices=["dot", "json"], default="dot")

    p = sub.add_parser("gen", help="generate a random model")
    p.add_argument("--states", type=_positive, required=True)
    p.add_argument("--events", type=_positive, required=True)
    p.add_argument("--outputs", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eps-prob", type=_unit, default=0.4)
    p.add_argument("--fault-density", type=_unit, default=0.3)
    p.add_argument("--fair-density", type=_unit, default=0.5)

    p = sub.add_parser("xcheck", help="cross-check the verifier against brute force")
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-states", type=_positive, default=5)
    p.add_argument("--max-edges", type=_positive, default=16)
    p.add_argument("--dump-dir", default="xcheck-mismatches")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate", help="simulate a fair run and replay the diagnoser")
    p.add_argument("model")
    p.add_argument("--steps", type=_nonneg, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--json", action="store_true")
    return parser


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def _verdict(args):
    m = load_model(args.model)
    if args.classical:
        return check_classical(m)
    return check_of_diagnosability(m, args.fair)


def cmd_check(args, out):
    verdict = _verdict(args)
    if args.json:
        _dump(verdict.to_json(), out)
    else:
        out.write(summarize(verdict) + "\n")
    return EXIT_OK if verdict.diagnosable else EXIT_NEGATIVE


def cmd_witness(args, out):
    verdict = _verdict(args)
    if args.json:
        _dump(verdict.witness.to_json() if verdict.witness else None, out)
    elif verdict.diagnosable:
        out.write("no witness: " + summarize(verdict) + "\n")
    else:
        w = verdict.witness
        out.write("prefix: " + " ".join(map(str, w.lasso.prefix)) + "\n")
        out.write("cycle:  " + " ".join(map(str, w.lasso.cycle)) + "\n")
        out.write("verifier cycle:\n")
        for s, e, d in w.v_cycle:
            out.write(f"  {s} --{e}--> {d}\n")
    return EXIT_OK if verdict.diagnosable else EXIT_NEGATIVE


def cmd_diagnose(args, out):
    m = load_model(args.model)
    if EPS in args.obs:
        raise UsageError(f"'{EPS}' is not an observable symbol")
    result = diagnose(build_augmented(m), args.obs)
    if args.json:
        out.write(json.dumps(result.to_json()) + "\n")
    else:
        meaning = "fault certain" if result.verdict else "no alarm"
        out.write(f"verdict: {result.verdict} ({meaning})\n")
        out.write(f"estimate: {format_estimate(result.estimate)}\n")
    return EXIT_OK


def cmd_export(args, out):
    m = load_model(args.model)
    if args.what == "g":
        obj = m
    else:
        obj = build_augmented(m)
        if args.what == "ver":
            obj = build_verification_structure(obj)
    if args.format == "dot":
        out.write(export_dot(obj))
    elif args.what == "g":
        out.write(serialize_model(m))
    else:
        _dump(obj.to_json(), out)
    return EXIT_OK


def cmd_gen(args, out):
    params = GenParams(
        states=args.states,
        events=args.events,
        outputs=args.outputs,
        seed=args.seed,
        eps_prob=args.eps_prob,
        fault_density=args.fault_density,
        fair_density=args.fair_density,
    )
    out.write(serialize_model(random_model(params)))
    return EXIT_OK


def cmd_xcheck(args, out):
    rows = []
    mismatches = 0
    if not args.json:
        out.write(f"{'trial':>5}  {'instance':<14} {'|Q|':>3} {'|S|':>3} {'|D|':>3}  "
                  f"{'fair':<14} {'unc':>3}  {'verifier':<8} {'oracle':<8} agree\n")
    for r in cross_check(args.trials, args.seed, args.max_states, args.max_edges):
        fair = ",".join(sorted(r.fair)) or "-"
        row = {
            "trial": r.index,
            "instance": r.label,
            "states": len(r.model.states),
            "events": len(r.model.events),
            "outputs": len(r.model.outputs),
            "fair": sorted(r.fair),
            "uncertain_edges": r.uncertain_edges,
            "verifier": r.verifier,
            "oracle": r.oracle,
            "agree": r.agree,
        }
        rows.append(row)
        if not r.agree:
            mismatches += 1
            os.makedirs(args.dump_dir, exist_ok=True)
            path = os.path.join(args.dump_dir, f"mismatch-{r.label.replace(':', '-')}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(serialize_model(r.model))
            row["dumped"] = path
        if not args.json:
            out.write(
                f"{r.index:>5}  {r.label:<14} {row['states']:>3} {row['events']:>3} "
                f"{row['outputs']:>3}  {fair:<14} {r.uncertain_edges:>3}  "
                f"{str(r.verifier):<8} {str(r.oracle):<8} {'yes' if r.agree else 'NO'}\n"
            )
    if args.json:
        _dump({"trials": rows, "mismatches": mismatches}, out)
    else:
        out.write(f"{len(rows)} trials, {mismatches} mismatches\n")
    return EXIT_NEGATIVE if mismatches else EXIT_OK


def cmd_simulate(args, out):
    m = load_model(args.model)
    run = simulate_fair_run(m, args.steps, args.seed)
    det = replay_diagnoser(m, run)
    if args.json:
        _dump(
            {
                "run": [str(e) for e in run],
                "output": [e.out for e in run if e.out != EPS],
                "fault_at": det.fault_at,
                "alarm_at": det.alarm_at,
                "verdicts": list(det.verdicts),
            },
            out,
        )
    else:
        for i, (ev, verdict) in enumerate(zip(run, det.verdicts)):
            out.write(f"{i:>5}  {str(ev):<24} diagnoser={verdict}\n")
        out.write(f"output: {render_output(e.out for e in run) or '(empty)'}\n")
        out.write(f"first fault at step: {det.fault_at}\n")
        out.write(f"first alarm at step: {det.alarm_at}\n")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "witness": cmd_witness,
    "diagnose": cmd_diagnose,
    "export": cmd_export,
    "gen": cmd_gen,
    "xcheck": cmd_xcheck,
    "simulate": cmd_simulate,
}


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return COMMANDS[args.command](args, out)
    except (OfdiagError, OSError) as exc:
        err.write(f"ofdiag {args.command}: error: {exc}\n")
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
