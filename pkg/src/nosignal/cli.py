"""Command-line entry point.

    nosignal disentangler --alpha 1,0 --beta 0,0 --json
    nosignal entangler --all --json
    nosignal tunnel --gamma 1 --schedule open --grid 0:3.2:0.01 --csv
    nosignal signal --p0 1 --p1 0.5 --n 7 --epsilon 1e-3 --json
    nosignal gram --preset entangler:++
    nosignal factor --preset cnot --acted 1

Exit status is 0 for every completed analysis (a contradiction is a
result) and 2 for bad arguments or inputs.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import disentangler as dis
from . import entangler as ent
from . import sigstat, tunnel
from .linmaps import BasisMapSpec, gram, local_factor, matrix_from_dict, witness
from .qcore import PHOTON_PAIR, Space, StateVector, ValidationError

SCHEMA = 1
CSV_COLUMNS = ("t", "p1", "p2", "re1", "im1", "re2", "im2")


def parse_complex(text: str) -> complex:
    """``"RE,IM"`` or a bare real number."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValidationError(f"cannot read complex number from {text!r}; use RE,IM")


def timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for reproducible output
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        dt.datetime.fromtimestamp(int(epoch), dt.timezone.utc)
        if epoch
        else dt.datetime.now(dt.timezone.utc).replace(microsecond=0)
    )
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def manifest(subcommand: str, parameters: dict, results) -> dict:
    return {
        "schema": SCHEMA,
        "subcommand": subcommand,
        "parameters": parameters,
        "tool_version": __version__,
        "timestamp": timestamp(),
        "results": results,
    }


def emit_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def flatten(obj, prefix=""):
    """``(path, value)`` pairs for the human-readable listing."""
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def emit_text(report: dict) -> str:
    lines = [f"nosignal {report['subcommand']} (schema {report['schema']}, v{report['tool_version']})"]
    for path, value in flatten(report["results"]):
        if isinstance(value, list):
            value = "[" + ", ".join(repr(v) for v in value) + "]"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"  {path}: {value}")
    return "\n".join(lines) + "\n"


def write_outputs(args, report: dict, extra=None) -> None:
    """Print the report and, with ``--out``, write it and any figures to disk."""
    text = emit_json(report) if args.json else emit_text(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{report['subcommand']}.json").write_text(emit_json(report))
        if extra is not None:
            extra(out)


# -- subcommands ----------------------------------------------------------


def cmd_disentangler(args) -> int:
    target = dis.DisentanglerTarget(parse_complex(args.alpha), parse_complex(args.beta))
    verdict = dis.audit(target)
    shift = dis.receiver_shift(target)
    results = {**verdict.to_dict(), "receiver_shift": shift.to_dict()}
    params = {"alpha": args.alpha, "beta": args.beta}

    def figures(out):
        from .plotting import plot_row_sums

        plot_row_sums(abs(target.alpha) ** 2, out / "disentangler_row_sums.png")

    write_outputs(args, manifest("disentangler", params, results), figures)
    return 0


def cmd_entangler(args) -> int:
    phase = parse_complex(args.phase)
    if args.general_a is not None or args.general_b is not None:
        if args.general_a is None or args.general_b is None:
            raise ValidationError("--general-a and --general-b go together")
        plist = [
            ent.EntanglerParams(
                phase2=phase,
                general_a=parse_complex(args.general_a),
                general_b=parse_complex(args.general_b),
            )
        ]
    elif args.signs and not args.all:
        plist = [ent.EntanglerParams.from_signs(args.signs, phase)]
    else:
        plist = ent.readings(phase)
    initial = StateVector.basis(PHOTON_PAIR, args.initial)
    records = []
    for p in plist:
        rec = ent.audit(p).to_dict()
        rec["demo"] = ent.demo(initial, p).to_dict()
        records.append(rec)
    params = {
        "signs": None if len(plist) > 1 else plist[0].label,
        "phase2": args.phase,
        "general_a": args.general_a,
        "general_b": args.general_b,
        "initial": args.initial,
    }

    def figures(out):
        from .plotting import plot_readings

        plot_readings(records, out / "entangler_readings.png")

    write_outputs(args, manifest("entangler", params, records), figures)
    return 0


def _blocked_spans(config):
    return [(s.start, s.end) for s in config.schedule if not s.open]


def cmd_tunnel(args) -> int:
    config = tunnel.TunnelConfig(
        args.gamma, tunnel.parse_schedule(args.schedule), tunnel.parse_grid(args.grid)
    )
    if args.spin:
        initial = tunnel.spin_map(args.initial or "+1-2")
    else:
        initial = {"X1": tunnel.IN_X1, "X2": tunnel.IN_X2}.get(args.initial or "X1")
        if initial is None:
            raise ValidationError("--initial must be X1 or X2 (spin labels need --spin)")
    tr = tunnel.trace(config, initial)
    balance = tunnel.time_to_balance(config)
    basis = ["+1-2", "-1+2"] if args.spin else ["X1=1,X2=0", "X1=0,X2=1"]

    csv_text = io.StringIO()
    writer = csv.writer(csv_text, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in tr.rows():
        writer.writerow([repr(v) for v in row])

    def figures(out):
        from .plotting import plot_tunnel

        (out / "tunnel.csv").write_text(csv_text.getvalue())
        labels = ("P(+1-2)", "P(-1+2)") if args.spin else ("P(X1)", "P(X2)")
        plot_tunnel(tr, out / "tunnel_occupations.png", labels=labels, balance=balance,
                    blocked=_blocked_spans(config))

    results = {
        "basis": basis,
        "gamma": config.gamma,
        "time_to_balance": balance,
        "balance_reached": balance is not None,
        "generator_support": list(tunnel.GENERATOR_SUPPORT),
        "phase_convention": "relative phase -i at balance",
        "trace": {name: list(col) for name, col in zip(CSV_COLUMNS, zip(*tr.rows()))},
    }
    params = {"gamma": args.gamma, "schedule": args.schedule, "grid": args.grid,
              "spin": args.spin, "initial": args.initial}
    report = manifest("tunnel", params, results)
    if args.csv:
        # stdout stays pure CSV; the manifest only goes to --out
        sys.stdout.write(csv_text.getvalue())
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "tunnel.json").write_text(emit_json(report))
            figures(out)
        return 0
    write_outputs(args, report, figures)
    return 0


def cmd_signal(args) -> int:
    if args.epsilon is not None and args.message is not None:
        raise ValidationError("--epsilon and --message are alternatives")
    k = args.k
    if k is None:
        # default: the threshold minimising type1 + type2
        k = sigstat.decision_errors(sigstat.SignalBudget(args.p0, args.p1, args.n, 0)).best_threshold
    budget = sigstat.SignalBudget(args.p0, args.p1, args.n, k)
    errors = sigstat.decision_errors(budget)
    results = {"k_threshold": k, "errors": errors.to_dict()}
    params = {"p0": args.p0, "p1": args.p1, "n": args.n, "k": args.k}
    if args.message is not None:
        seed = args.seed
        if seed is None:
            env = os.environ.get("NOSIGNAL_SEED")
            if env is None:
                raise ValidationError("--message needs --seed or NOSIGNAL_SEED")
            try:
                seed = int(env)
            except ValueError:
                raise ValidationError(f"NOSIGNAL_SEED is not an integer: {env!r}") from None
        if seed < 0:
            raise ValidationError("seed must be non-negative")
        if set(args.message) - {"0", "1"}:
            raise ValidationError("--message must be a string of 0s and 1s")
        results["simulation"] = sigstat.simulate(budget, args.message, seed).to_dict()
        params.update(message=args.message, seed=seed)
    else:
        eps = 1e-3 if args.epsilon is None else args.epsilon
        results["required_samples"] = {"epsilon": eps, **sigstat.required_samples(args.p0, args.p1, eps).to_dict()}
        params["epsilon"] = eps

    def figures(out):
        from .plotting import plot_errors

        t1, t2 = sigstat.error_curves(budget.p0, budget.p1, budget.n)
        plot_errors(budget.p0, budget.p1, budget.n, t1, t2, out / "signal_errors.png", threshold=k)

    write_outputs(args, manifest("signal", params, results), figures)
    return 0


def _load_matrix(text: str) -> np.ndarray:
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        data = json.loads(text)
        return matrix_from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"matrix must be JSON {{\"re\": [[..]], \"im\": [[..]]}}: {exc}") from None


PRESETS = {
    "identity": lambda: np.eye(4),
    "cnot": lambda: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "hadamard1": lambda: np.kron(np.array([[1, 1], [1, -1]]) / math.sqrt(2), np.eye(2)),
}


def _preset(name: str, full: bool) -> np.ndarray:
    if name.startswith("entangler:"):
        p = ent.EntanglerParams.from_signs(name.split(":", 1)[1])
        return ent.full_matrix(p) if full else ent.build(p).matrix
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)} or entangler:SS")
    return PRESETS[name]()


def _generic_space(dim: int) -> Space:
    return Space((tuple(f"e{i}" for i in range(dim)),), slot_names=("",))


def cmd_gram(args) -> int:
    m = _preset(args.preset, full=False) if args.preset else _load_matrix(args.matrix)
    if m.ndim != 2:
        raise ValidationError("map must be a matrix whose columns are the basis images")
    spec = BasisMapSpec(_generic_space(m.shape[1]), _generic_space(m.shape[0]), m)
    w = witness(spec)
    results = {**gram(spec).to_dict(), "witness": None if w is None else w.to_dict()}
    params = {"preset": args.preset, "matrix": args.matrix}
    write_outputs(args, manifest("gram", params, results))
    return 0


def cmd_factor(args) -> int:
    m = _preset(args.preset, full=True) if args.preset else _load_matrix(args.matrix)
    try:
        dims = tuple(int(d) for d in args.dims.split(","))
    except ValueError:
        raise ValidationError(f"--dims must look like 2,2, got {args.dims!r}") from None
    if len(dims) != 2:
        raise ValidationError("--dims needs exactly two subsystem dimensions")
    results = local_factor(m, args.acted, dims).to_dict()
    if args.preset and args.preset.startswith("entangler:"):
        results["complement_extension"] = "identity"
    params = {"preset": args.preset, "matrix": args.matrix, "acted": args.acted, "dims": args.dims}
    write_outputs(args, manifest("factor", params, results))
    return 0


# -- parser ---------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--out", metavar="DIR", help="also write the report and figures into DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nosignal",
        description="Audit one-sided signalling devices, simulate tunnelling, size signal statistics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    p = sub.add_parser("disentangler", help="unitarity audit of a partially disentangling device")
    p.add_argument("--alpha", required=True, metavar="RE,IM")
    p.add_argument("--beta", required=True, metavar="RE,IM")
    _common(p)
    p.set_defaults(func=cmd_disentangler)

    p = sub.add_parser("entangler", help="audit every sign reading of the entangling map")
    p.add_argument("--signs", choices=["++", "+-", "-+", "--"])
    p.add_argument("--all", action="store_true", help="all four readings (default without --signs)")
    p.add_argument("--phase", default="0,1", metavar="RE,IM", help="factor on the second image (default i)")
    p.add_argument("--general-a", metavar="RE,IM")
    p.add_argument("--general-b", metavar="RE,IM")
    p.add_argument("--initial", default="H1H2", choices=PHOTON_PAIR.labels(), help="product state for the demo")
    _common(p)
    p.set_defaults(func=cmd_entangler)

    p = sub.add_parser("tunnel", help="two-box (or spin) tunnelling trace")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--schedule", default="open", help='e.g. "blocked:0..2,open:2.."')
    p.add_argument("--grid", required=True, metavar="T0:T1:DT")
    p.add_argument("--csv", action="store_true", help="emit CSV t,p1,p2,re1,im1,re2,im2")
    p.add_argument("--spin", action="store_true", help="label the basis as spin pairs +-/-+")
    p.add_argument("--initial", help="X1 (default) or X2; with --spin, +1-2 (default) or -1+2")
    _common(p)
    p.set_defaults(func=cmd_tunnel)

    p = sub.add_parser("signal", help="binomial error budget of the receiver's test")
    p.add_argument("--p0", type=float, required=True, help="hit probability while the sender is idle")
    p.add_argument("--p1", type=float, required=True, help="hit probability after the sender acted")
    p.add_argument("--n", type=int, default=1, help="particles per decision (default: 1)")
    p.add_argument("--k", type=int, help="decision threshold (default: best)")
    p.add_argument("--epsilon", type=float, help="target max error for sample sizing (tool default 1e-3)")
    p.add_argument("--message", metavar="BITS", help="simulate sending this 0/1 string")
    p.add_argument("--seed", type=int, help="simulation seed (falls back to NOSIGNAL_SEED)")
    _common(p)
    p.set_defaults(func=cmd_signal)

    p = sub.add_parser("gram", help="Gram-matrix isometry audit of a map")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help='JSON {"re": [[..]], "im": [[..]]}, columns are images; @FILE reads a file')
    g.add_argument("--preset", help="identity, cnot, hadamard1 or entangler:SS")
    _common(p)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("factor", help="test whether a joint map acts on one side only")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help='JSON {"re": [[..]], "im": [[..]]}; @FILE reads a file')
    g.add_argument("--preset", help="identity, cnot, hadamard1 or entangler:SS (identity on the complement)")
    p.add_argument("--acted", type=int, default=1, choices=[1, 2])
    p.add_argument("--dims", default="2,2")
    _common(p)
    p.set_defaults(func=cmd_factor)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"nosignal {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
