"""Command-line front end.

Five subcommands cover the pipeline end to end: ``simulate`` runs a network
and emits the per-step trajectory as CSV, ``identify`` grid-searches the
free weights of a model variant against a survey, ``evaluate`` scores fitted
weights per batch in a wide CSV table, ``infer-emotion`` explains an observed
action that contradicts the forward prediction, and ``synth`` generates a
synthetic survey with its ground-truth weights stored alongside.

Every subcommand is deterministic given its inputs, writes output files
atomically (never leaving a partial file behind), and prints numbers at nine
significant digits.  ``--config FILE`` supplies defaults for any flag of the
invoked subcommand from a JSON object; explicit flags win.
"""

from __future__ import annotations

import argparse
import io as _io
import json
import os
import sys
from typing import Callable, Optional

from .errors import CognitiveMapError, ValidationError
from .identification import (
    GridSpec,
    evaluate_batches,
    fit_batches,
    make_batches,
    synthesize_population,
)
from .inverse import infer_emotion, predict_action, simplified_network
from .io import (
    read_history,
    read_observations,
    read_survey,
    read_weights_doc,
    write_evaluation_long,
    write_evaluation_wide,
    write_inference,
    write_survey,
    write_truth_doc,
    write_weights_doc,
)
from .network import network_from_json
from .scenarios import (
    Concept,
    build_scenario1,
    build_scenario2,
    default_scenarios,
    get_variant,
    quantize_input,
    read_scenarios,
)
from .simulation import compile_network, simulate

COMMANDS = ("simulate", "identify", "evaluate", "infer-emotion", "synth")

_INPUT_FLAGS = (("rpk", Concept.RPK), ("gwk", Concept.GWK), ("gp", Concept.GP))


# ---------------------------------------------------------------------------
# argument types


def _positive_int(text) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _positive_float(text) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonnegative_float(text) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _seed_value(text) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in u64, got {value}")
    return value


# ---------------------------------------------------------------------------
# output plumbing


def _emit(path: Optional[str], render: Callable) -> None:
    """Render into memory first, then write the file in one atomic move.

    A ``None`` path streams to stdout instead.  Nothing is created on disk
    until rendering (and therefore all validation) has finished.
    """
    buffer = _io.StringIO()
    render(buffer)
    text = buffer.getvalue()
    if path is None:
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _info_stream(args) -> object:
    # keep stdout clean for CSV when no output file was named
    return sys.stdout if args.out else sys.stderr


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


# ---------------------------------------------------------------------------
# shared network construction


def _parse_pairs(entries, what: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for entry in entries or ():
        name, sep, raw = str(entry).partition("=")
        name = name.strip()
        if not sep or not name:
            raise ValidationError(f"expected NAME=VALUE, got {entry!r}")
        try:
            out[name] = float(raw)
        except ValueError:
            raise ValidationError(f"invalid {what} in {entry!r}") from None
    return out


def _input_value(concept: Concept, text: str) -> float:
    """An input flag takes either a number or a vocabulary term."""
    try:
        return float(text)
    except ValueError:
        return quantize_input(concept, text)


def _add_network_args(sub: argparse.ArgumentParser) -> None:
    source = sub.add_mutually_exclusive_group()
    source.add_argument(
        "--scenario", type=str, choices=("1", "2"), default=None,
        help="built-in scenario network (default: 1)",
    )
    source.add_argument("--network", metavar="FILE", help="network JSON file")
    family = sub.add_mutually_exclusive_group()
    family.add_argument(
        "--functional", action="store_true",
        help="state-dependent goal drive (default)",
    )
    family.add_argument(
        "--constant", action="store_true",
        help="constant-weight goal drive instead of the sign-split one",
    )
    for flag, _ in _INPUT_FLAGS:
        sub.add_argument(
            f"--{flag}", type=str, default=None, metavar="TERM|VALUE",
            help=f"{flag} input as a vocabulary term or a number in [-1, 1]",
        )
    sub.add_argument(
        "--init", action="append", default=None, metavar="NAME=VALUE",
        help="initial realisation for a concept (repeatable)",
    )
    sub.add_argument(
        "--set", dest="overrides", action="append", default=None,
        metavar="PARAM=VALUE",
        help="override a named weight or alpha of the built-in scenario (repeatable)",
    )


def _build_network(args):
    if args.network:
        if args.overrides or args.functional or args.constant:
            raise ValidationError(
                "--set/--functional/--constant configure the built-in scenarios; "
                "edit the network file instead"
            )
        with open(args.network) as fh:
            return network_from_json(fh.read())
    params = _parse_pairs(args.overrides, "weight") or None
    build = build_scenario2 if args.scenario == "2" else build_scenario1
    return build(params=params, functional=not args.constant)


def _initial_values(net, args) -> dict[int, float]:
    names = {c.name: c.id for c in net.concepts}
    initial: dict[int, float] = {}
    for flag, concept in _INPUT_FLAGS:
        raw = getattr(args, flag)
        if raw is None:
            continue
        if flag not in names:
            raise ValidationError(f"network has no {flag!r} concept")
        initial[names[flag]] = _input_value(concept, raw)
    goal0 = getattr(args, "goal0", None)
    if goal0 is not None:
        if "goal" not in names:
            raise ValidationError("network has no 'goal' concept")
        initial[names["goal"]] = goal0
    for name, value in _parse_pairs(args.init, "realisation").items():
        if name not in names:
            raise ValidationError(f"network has no {name!r} concept")
        initial[names[name]] = value
    return initial


def _load_scenarios(path: Optional[str]):
    return read_scenarios(path) if path else default_scenarios()


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    net = _build_network(args)
    initial = _initial_values(net, args)
    traj = simulate(net, initial, max_steps=args.max_steps, epsilon=args.epsilon)
    _emit(args.out, traj.to_csv)
    info = _info_stream(args)
    if args.out:
        print(f"wrote {args.out} ({traj.n_steps + 1} rows)", file=info)
    if traj.converged:
        print(f"converged at step {traj.converged_at} (epsilon {traj.epsilon:g})", file=info)
    else:
        print(
            f"no convergence within {traj.n_steps} steps (epsilon {traj.epsilon:g})",
            file=info,
        )
    for name, value in traj.final_values().items():
        print(f"  {name} = {_fmt(value)}", file=info)
    return 0


def _cmd_identify(args) -> int:
    records = read_survey(args.survey)
    scenarios = _load_scenarios(args.scenarios)
    variant = get_variant(args.model)
    if args.grid:
        with open(args.grid) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValidationError(f"{args.grid}: grid file must be a JSON object")
        values = {
            name: tuple(vals) if isinstance(vals, (list, tuple)) else (vals,)
            for name, vals in raw.items()
        }
        grid = GridSpec(values=values, mode=args.mode, max_sweeps=args.max_sweeps)
    else:
        grid = GridSpec.default(
            variant, levels=args.levels, mode=args.mode, max_sweeps=args.max_sweeps
        )
    batches = make_batches(scenarios)
    if args.batch != "all":
        batches = [b for b in batches if b.number == int(args.batch)]
    doc = fit_batches(variant.name, records, scenarios, grid=grid, batches=batches)
    _emit(args.out, lambda fh: write_weights_doc(doc, fh))
    info = _info_stream(args)
    if args.out:
        print(f"wrote {args.out}", file=info)
    for number in sorted(doc.batches):
        entries = doc.batches[number]
        scope = "population vector" if "population" in entries else (
            f"{len(entries)} participants"
        )
        print(f"batch {number}: {args.model}, {scope} ({doc.mode} search)", file=info)
    return 0


def _cmd_evaluate(args) -> int:
    records = read_survey(args.survey)
    scenarios = _load_scenarios(args.scenarios)
    batch_numbers = None if args.batch == "all" else [int(args.batch)]
    reports = []
    for path in args.weights:
        doc = read_weights_doc(path)
        reports.append(
            evaluate_batches(doc, records, scenarios, batch_numbers=batch_numbers)
        )
    _emit(args.out, lambda fh: write_evaluation_wide(reports, fh))
    if args.per_scenario:
        _emit(args.per_scenario, lambda fh: write_evaluation_long(reports, fh))
    info = _info_stream(args)
    if args.out:
        print(f"wrote {args.out}", file=info)
    if args.per_scenario:
        print(f"wrote {args.per_scenario}", file=info)
    for report in reports:
        for concept, cells in report.summary.items():
            overall = cells.get("overall")
            if overall is not None:
                print(f"{report.model} {concept}: overall MSE {_fmt(overall)}", file=info)
    return 0


def _cmd_infer_emotion(args) -> int:
    net = _build_network(args)
    observed = read_observations(args.observations)[-1]
    initial = _initial_values(net, args)
    simplified = simplified_network(net)
    kept = {c.id for c in simplified.concepts}
    observer_view = {cid: v for cid, v in initial.items() if cid in kept}
    predicted = predict_action(
        simplified, initial=observer_view, theta=args.theta, horizon=args.horizon
    )
    if args.history:
        history = read_history(args.history)
    else:
        # no recorded estimates: use the observer's own forward trajectory
        compiled = compile_network(simplified)
        if int(Concept.BELIEF) not in compiled.index:
            raise ValidationError(
                "deriving a history needs a 'belief' concept; pass --history"
            )
        rec = compiled.record(compiled.initial_state(observer_view), args.horizon)
        b = compiled.index[int(Concept.BELIEF)]
        g = compiled.index[int(Concept.GOAL)]
        history = [(float(rec[t, b]), float(rec[t, g])) for t in range(args.horizon + 1)]
    result = infer_emotion(
        net, predicted, observed, history,
        inputs=initial, theta=args.theta, horizon=args.horizon,
    )
    _emit(args.out, lambda fh: write_inference(result, observed, fh))
    info = _info_stream(args)
    if args.out:
        print(f"wrote {args.out}", file=info)
    if not result.discrepancy:
        print(
            f"observed {observed.action!r} matches the prediction; "
            "no hidden emotion required",
            file=info,
        )
    elif result.unexplained:
        print(
            f"predicted {result.predicted_action!r}, observed {observed.action!r}: "
            f"no candidate emotion reproduces the action; nearest is "
            f"{_fmt(result.inferred_emotion)} (unexplained)",
            file=info,
        )
    else:
        via = f" via {result.explained_via}" if result.explained_via else ""
        print(
            f"predicted {result.predicted_action!r}, observed {observed.action!r}: "
            f"inferred initial emotion {_fmt(result.inferred_emotion)}{via}",
            file=info,
        )
    return 0


def _cmd_synth(args) -> int:
    scenarios = _load_scenarios(args.scenarios)
    seed = 0 if args.seed is None else args.seed
    out = args.out or "survey.csv"
    truth = args.truth or f"{out}.truth.json"
    records, truths = synthesize_population(
        args.count, scenarios, seed=seed, model=args.model,
        quantize=not args.raw, noise_sd=args.noise_sd,
    )
    _emit(out, lambda fh: write_survey(records, fh, terms=not args.raw))
    _emit(truth, lambda fh: write_truth_doc(truths, args.model, seed, fh))
    print(f"wrote {out} ({len(records)} rows) and {truth} (model {args.model}, seed {seed})")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", metavar="FILE", help="JSON object of flag defaults")
    shared.add_argument("--out", metavar="PATH", default=None, help="output file")
    shared.add_argument(
        "--seed", type=_seed_value, default=None, help="random seed (synth)"
    )

    parser = argparse.ArgumentParser(
        prog="xfcm",
        description="Cognitive-map simulation, identification and inference.",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    subs: dict[str, argparse.ArgumentParser] = {}

    sub = commands.add_parser(
        "simulate", parents=[shared],
        help="run a network and write the per-step trajectory CSV",
    )
    _add_network_args(sub)
    sub.add_argument("--goal0", type=float, default=None, help="initial goal realisation")
    sub.add_argument("--max-steps", type=_positive_int, default=30)
    sub.add_argument("--epsilon", type=_positive_float, default=1e-4,
                     help="convergence tolerance on the largest update")
    sub.set_defaults(handler=_cmd_simulate)
    subs["simulate"] = sub

    sub = commands.add_parser(
        "identify", parents=[shared],
        help="fit a model variant's free weights to a survey",
    )
    sub.add_argument("--survey", required=True, metavar="FILE")
    sub.add_argument("--scenarios", metavar="FILE", help="scenario CSV (default: bundled)")
    sub.add_argument("--model", type=str, choices=("M1", "M2", "M3", "M4"), default="M1")
    sub.add_argument("--mode", type=str, choices=("cyclic", "exhaustive"), default="cyclic")
    sub.add_argument("--levels", type=_positive_int, default=9,
                     help="grid levels per parameter over [-1, 1]")
    sub.add_argument("--max-sweeps", type=_positive_int, default=3)
    sub.add_argument("--grid", metavar="FILE",
                     help="JSON object of per-parameter value lists (overrides --levels)")
    sub.add_argument("--batch", type=str, choices=("1", "2", "3", "all"), default="all")
    sub.set_defaults(handler=_cmd_identify)
    subs["identify"] = sub

    sub = commands.add_parser(
        "evaluate", parents=[shared],
        help="score fitted weights on validation scenarios",
    )
    sub.add_argument("--weights", action="append", required=True, metavar="FILE",
                     help="fitted-weights document (repeatable to compare models)")
    sub.add_argument("--survey", required=True, metavar="FILE")
    sub.add_argument("--scenarios", metavar="FILE", help="scenario CSV (default: bundled)")
    sub.add_argument("--batch", type=str, choices=("1", "2", "3", "all"), default="all")
    sub.add_argument("--per-scenario", metavar="FILE", default=None,
                     help="also write per-scenario MSE rows to this CSV")
    sub.set_defaults(handler=_cmd_evaluate)
    subs["evaluate"] = sub

    sub = commands.add_parser(
        "infer-emotion", parents=[shared],
        help="explain an observed action that contradicts the prediction",
    )
    _add_network_args(sub)
    sub.add_argument("--observations", required=True, metavar="FILE",
                     help="CSV of step,action rows; the last row is inferred against")
    sub.add_argument("--history", metavar="FILE",
                     help="CSV of step,belief,goal estimates (default: simulated)")
    sub.add_argument("--theta", type=float, default=0.0,
                     help="decision threshold on the converged goal")
    sub.add_argument("--horizon", type=_positive_int, default=30)
    sub.set_defaults(handler=_cmd_infer_emotion)
    subs["infer-emotion"] = sub

    sub = commands.add_parser(
        "synth", parents=[shared],
        help="generate a synthetic survey with stored ground truth",
    )
    sub.add_argument("--count", type=_positive_int, required=True,
                     help="number of participants")
    sub.add_argument("--scenarios", metavar="FILE", help="scenario CSV (default: bundled)")
    sub.add_argument("--model", type=str, choices=("M1", "M2", "M3", "M4"), default="M1")
    sub.add_argument("--noise-sd", type=_nonnegative_float, default=0.0,
                     help="response noise before quantization")
    sub.add_argument("--raw", action="store_true",
                     help="emit numeric responses instead of vocabulary terms")
    sub.add_argument("--truth", metavar="FILE",
                     help="ground-truth document path (default: OUT.truth.json)")
    sub.set_defaults(handler=_cmd_synth)
    subs["synth"] = sub

    return parser, subs


def _apply_config(parser, subs, argv) -> None:
    """Fill a subcommand's defaults from the JSON object named by --config."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        parser.error(f"{known.config}: config must be a JSON object")
    command = next((a for a in rest if a in subs), None)
    if command is None:
        parser.error("--config needs a subcommand to apply to")
    sub = subs[command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest in ("help", "config", "command", "handler") or dest not in actions:
            sub.error(f"unknown config key {key!r}")
        action = actions[dest]
        if dest in ("init", "overrides") and isinstance(value, dict):
            value = [f"{k}={v}" for k, v in value.items()]
        elif action.type is not None and not isinstance(value, (list, tuple)):
            try:
                value = action.type(value)
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                sub.error(f"config key {key!r}: {exc}")
        if action.choices is not None and value not in action.choices:
            sub.error(
                f"config key {key!r}: invalid choice {value!r} "
                f"(choose from {', '.join(map(str, action.choices))})"
            )
        defaults[dest] = value
    sub.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = _build_parser()
    try:
        _apply_config(parser, subs, argv)
        args = parser.parse_args(argv)
        return args.handler(args)
    except CognitiveMapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        detail = exc.args[0] if exc.args else exc
        print(f"error: {detail}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
