"""Command-line front end.

Subcommands: quality, optimize, sweep, gate-fidelity, coeff, single-qubit.
Every command honors --seed and produces byte-identical output for
identical flags.  Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import optimize as opt
from . import tomography as tomo
from .gates import HEISENBERG, INTERACTIONS, QuorumParams, standard_mub_params
from .noise import (
    CHANNELS,
    DEPOLARIZING,
    NoiseModel,
    average_gate_fidelity,
    kraus_depolarizing,
    kraus_ou_heisenberg,
    kraus_ou_ising,
)
from .quality import (
    estimate_log_coefficient,
    quality_report,
    single_qubit_optimal_angle,
    single_qubit_quality,
)

# Flags echoed into outputs; --out and --config are omitted so the result
# does not depend on where it is written.
_CONFIG_KEYS = (
    "channel",
    "interaction",
    "strength",
    "seed",
    "threads",
    "shots",
    "states",
    "quorum",
    "mub",
    "strategy",
    "starts",
    "grid",
    "schemes",
    "samples",
    "gate",
)


def _noise_from_args(args) -> NoiseModel:
    if args.strength is None:
        raise SystemExit2("missing noise strength (--zeta / -r)")
    return NoiseModel(channel=args.channel, interaction=args.interaction, strength=args.strength)


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _effective_config(args) -> dict:
    cfg = {}
    for key in _CONFIG_KEYS:
        if hasattr(args, key):
            val = getattr(args, key)
            if val is not None:
                cfg[key] = val
    return cfg


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-noisyqst-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_quality(args) -> int:
    noise = _noise_from_args(args)
    if args.quorum:
        try:
            with open(args.quorum) as fh:
                quorum = QuorumParams.from_json(fh.read())
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise SystemExit2(f"cannot load quorum file {args.quorum!r}: {exc}")
        if quorum.interaction != noise.interaction:
            raise SystemExit2(
                f"quorum interaction {quorum.interaction!r} conflicts with --interaction"
            )
    else:
        quorum = standard_mub_params(args.mub or noise.interaction)
        if quorum.interaction != noise.interaction:
            raise SystemExit2("--mub interaction conflicts with --interaction")
    report = quality_report(quorum, noise)
    doc = {"config": _effective_config(args), "noise": noise.to_dict(), **report.to_dict()}
    _emit(args, json.dumps(doc, sort_keys=True))
    return 0


def cmd_optimize(args) -> int:
    noise = _noise_from_args(args)
    opts = opt.OptimizerOptions(seed=args.seed, max_iters=args.max_iters)
    results = opt.optimize_quorum(
        noise,
        strategy=args.strategy,
        n_starts=args.starts,
        opts=opts,
        threads=args.threads,
        threshold_pairs=args.threshold_pairs,
    )
    csv_text = opt.results_to_csv(results, args.strategy, args.seed)
    doc = {
        "config": _effective_config(args),
        "noise": noise.to_dict(),
        **json.loads(opt.results_to_json(results, args.strategy, args.seed)),
    }
    if args.out:
        _atomic_write(args.out, csv_text)
        _atomic_write(args.out + ".json", json.dumps(doc, sort_keys=True))
    else:
        sys.stdout.write(csv_text)
    return 0


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise SystemExit2(f"bad --grid value: {exc}")


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    scheme_names = [s.strip() for s in args.schemes.split(",") if s.strip()]
    rows = []
    for strength in grid:
        noise = NoiseModel(channel=args.channel, interaction=args.interaction, strength=strength)
        schemes = []
        for name in scheme_names:
            if name == "mub":
                schemes.append(tomo.mub_scheme(noise, 1))
            elif name == "pauli9":
                schemes.append(tomo.pauli9_scheme(1))
            elif name == "optimized":
                best = opt.optimize_quorum(
                    noise, strategy="mub-seeded", opts=opt.OptimizerOptions(seed=args.seed)
                )[0]
                schemes.append(tomo.quorum_scheme(best.params, noise, 1, "optimized"))
            else:
                raise SystemExit2(f"unknown scheme {name!r} (expected mub, pauli9, optimized)")
        reports = tomo.run_experiment(
            schemes, noise, args.states, args.shots, args.seed, threads=args.threads
        )
        rows.extend((rep, strength) for rep in reports)
    config_line = "# config: " + json.dumps(_effective_config(args), sort_keys=True) + "\n"
    _emit(args, config_line + tomo.reports_to_csv(rows))
    return 0


def cmd_gate_fidelity(args) -> int:
    if args.gate != "cnot":
        raise SystemExit2(f"unknown gate {args.gate!r} (only 'cnot' is built in)")
    noise = _noise_from_args(args)
    if noise.channel == DEPOLARIZING:
        time = 1.0 if noise.interaction == HEISENBERG else 0.25
        q = float(np.exp(-noise.strength * np.pi * time))
        fid = average_gate_fidelity(kraus_depolarizing(q))
    elif noise.interaction == HEISENBERG:
        gammas = np.exp(-noise.strength * np.pi * np.array([0.5, 0.0, 0.5]))
        fid = average_gate_fidelity(kraus_ou_heisenberg(gammas))
    else:
        gammas = np.exp(-2.0 * noise.strength * np.array([0.0, 0.0, np.pi / 4]))
        fid = average_gate_fidelity(kraus_ou_ising(gammas))
    _emit(args, f"{fid:.12g}")
    return 0


def cmd_coeff(args) -> int:
    rng = np.random.default_rng(args.seed)
    slope = estimate_log_coefficient(args.dim, args.samples, rng)
    doc = {"config": _effective_config(args), "dim": args.dim, "samples": args.samples,
           "coefficient": slope}
    _emit(args, json.dumps(doc, sort_keys=True))
    return 0


def cmd_single_qubit(args) -> int:
    if args.strength is None:
        raise SystemExit2("missing noise strength (-r)")
    r = args.strength
    theta = single_qubit_optimal_angle(r)
    doc = {
        "config": _effective_config(args),
        "r": r,
        "optimal_theta": theta,
        "q_noisy_at_optimum": single_qubit_quality(theta, r),
    }
    _emit(args, json.dumps(doc, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *, noise: bool = True) -> None:
    if noise:
        p.add_argument("--channel", choices=CHANNELS, default=DEPOLARIZING)
        p.add_argument("--interaction", choices=INTERACTIONS, default=HEISENBERG)
        p.add_argument("--zeta", "-r", dest="strength", type=float, default=None,
                       help="noise strength (zeta for depolarizing, r for ou)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (atomic write)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--config", default=None, help="JSON file of flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisyqst", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommand_parsers = {}

    def add_parser(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        parser.subcommand_parsers[name] = p
        return p

    p = add_parser("quality", help="evaluate a quorum's Q and Q_N")
    _add_common(p)
    p.add_argument("--quorum", default=None, help="quorum JSON file")
    p.add_argument("--mub", choices=INTERACTIONS, default=None,
                   help="use the built-in standard MUB quorum")
    p.set_defaults(func=cmd_quality)

    p = add_parser("optimize", help="optimize a quorum for a noise model")
    _add_common(p)
    p.add_argument("--strategy", choices=opt.STRATEGIES, default="mub-seeded")
    p.add_argument("--starts", type=int, default=1)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=200)
    p.add_argument("--threshold-pairs", dest="threshold_pairs", type=int, default=10_000)
    p.set_defaults(func=cmd_optimize)

    p = add_parser("sweep", help="reconstruction-infidelity sweep over a noise grid")
    _add_common(p)
    p.add_argument("--grid", required=True, help="comma-separated noise strengths")
    p.add_argument("--schemes", default="mub,pauli9")
    p.add_argument("--shots", type=int, default=23040)
    p.add_argument("--states", type=int, default=1000)
    p.set_defaults(func=cmd_sweep)

    p = add_parser("gate-fidelity", help="average gate fidelity of a noisy gate")
    _add_common(p)
    p.add_argument("--gate", default="cnot")
    p.set_defaults(func=cmd_gate_fidelity)

    p = add_parser("coeff", help="estimate the log-average linear coefficient")
    _add_common(p, noise=False)
    p.add_argument("--dim", type=int, choices=(2, 4), default=4)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.set_defaults(func=cmd_coeff)

    p = add_parser("single-qubit", help="closed-form single-qubit optimum")
    _add_common(p)
    p.set_defaults(func=cmd_single_qubit)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise SystemExit2("--config requires a path")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config must be a JSON object")
    except (OSError, ValueError) as exc:
        raise SystemExit2(f"cannot load config {path!r}: {exc}")
    # Subparsers parse into a fresh namespace, so defaults must be set on
    # them directly; explicit flags still override these.
    defaults = {k: v for k, v in cfg.items() if k != "config"}
    for sp in parser.subcommand_parsers.values():
        sp.set_defaults(**defaults)
    return argv


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit2 as exc:
        return int(exc.code)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if exc.code is not None else 0
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
