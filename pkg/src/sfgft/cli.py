"""Command-line entry points.

Subcommands: gft, select, partition, reconstruct, verify, experiment.
Exit codes: 0 on success, 2 on validation errors (malformed files, bad
flags, precondition violations), 1 on numerical failures. Randomized
commands require an explicit --seed; nothing defaults to the wall clock.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import compute_sf_gft
from .errors import NumericalError, SingularBlock, ValidationError
from .experiment import ExperimentConfig, run_table1
from .parallel import resolve_threads
from .reconstruct import (
    bandlimited_interpolate,
    mmse_estimate,
    reconstruction_report,
    sf_interpolate,
)
from .sampling import SamplingObjective, greedy_select, partition_baseline, partition_greedy
from .verify import verification_report


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: SFGFT_THREADS or 1)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfgft",
        description="Sampling-set-adaptive graph Fourier transforms with spectral folding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gft", help="compute the folded transform and write its pieces")
    p.add_argument("--matrix", required=True)
    p.add_argument("--set", required=True, dest="sampling_set")
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("select", help="greedy sampling-set selection")
    p.add_argument("--matrix", required=True)
    p.add_argument("--s", type=int, required=True, dest="size")
    p.add_argument("--objective", default="approx0")
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("partition", help="representative sampling subset partitioning")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--objective", default="approx0")
    p.add_argument("--algorithm", choices=["greedy", "random", "fixed-gft"], default="greedy")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--bandwidth", type=int, default=None)
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("reconstruct", help="interpolate a signal from its samples")
    p.add_argument("--matrix", required=True)
    p.add_argument("--set", required=True, dest="sampling_set")
    p.add_argument("--samples", required=True)
    p.add_argument("--method", default="sf",
                   help="sf, bandlimited:<K>, or mmse")
    p.add_argument("--truth", default=None, help="full signal for an error report")
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="run the identity and Monte-Carlo check suite")
    p.add_argument("--matrix", required=True)
    p.add_argument("--set", required=True, dest="sampling_set")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mc-samples", type=int, default=50_000)
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    _add_common(p)

    p = sub.add_parser("experiment", help="run the comparison grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    return parser


def _cmd_gft(args) -> int:
    m = io.read_variation_operator(args.matrix, args.ridge)
    s = io.read_sampling_set(args.sampling_set, m.n)
    basis = compute_sf_gft(m, s)
    out = Path(args.out_dir)
    io.write_matrix_csv(out / "U.csv", basis.vectors, sidecar=False)
    io.write_vector_csv(out / "lambdas.csv", basis.freqs)
    io.write_json(
        out / "bands.json",
        {
            "n": basis.n,
            "sampling_set": list(s.indices),
            "band_tol": basis.band_tol,
            "low": [int(i) for i in basis.low],
            "mid": [int(i) for i in basis.mid],
            "high": [int(i) for i in basis.high],
        },
    )
    print(f"wrote U.csv, lambdas.csv, bands.json to {out}")
    return 0


def _cmd_select(args) -> int:
    m = io.read_variation_operator(args.matrix, args.ridge)
    objective = SamplingObjective.from_spec(args.objective)
    s = greedy_select(m, args.size, objective, threads=resolve_threads(args.threads))
    io.write_sampling_set(args.out, s)
    print(f"selected {list(s.indices)} -> {args.out}")
    return 0


def _cmd_partition(args) -> int:
    m = io.read_variation_operator(args.matrix, args.ridge)
    threads = resolve_threads(args.threads)
    if args.algorithm == "greedy":
        objective = SamplingObjective.from_spec(args.objective)
        partition = partition_greedy(m, args.p, objective, threads=threads)
    elif args.algorithm == "random":
        if args.seed is None:
            raise ValidationError("--algorithm random requires an explicit --seed")
        partition = partition_baseline(m, args.p, "random", seed=args.seed)
    else:
        if args.bandwidth is None:
            raise ValidationError("--algorithm fixed-gft requires --bandwidth")
        partition = partition_baseline(
            m, args.p, "fixed-gft", bandwidth=args.bandwidth, threads=threads
        )
    io.write_partition(args.out, partition)
    print(f"wrote partition with sizes {partition.sizes} -> {args.out}")
    return 0


def _cmd_reconstruct(args) -> int:
    m = io.read_variation_operator(args.matrix, args.ridge)
    s = io.read_sampling_set(args.sampling_set, m.n)
    x_s = io.read_vector_csv(args.samples)
    out = Path(args.out_dir)
    method = args.method
    if method == "sf":
        basis = compute_sf_gft(m, s)
        x_tilde = sf_interpolate(basis, x_s)
    elif method.startswith("bandlimited:"):
        try:
            bandwidth = int(method.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError(f"bad bandwidth in method {method!r}") from exc
        x_tilde = bandlimited_interpolate(m, s, x_s, bandwidth)
    elif method == "mmse":
        x_tilde = np.zeros(m.n)
        x_tilde[s.index_array] = x_s
        x_tilde[s.complement] = mmse_estimate(m, s, x_s)
    else:
        raise ValidationError(
            f"unknown method {method!r}; expected sf, bandlimited:<K>, or mmse"
        )
    io.write_vector_csv(out / "x_tilde.csv", x_tilde)
    written = ["x_tilde.csv"]
    if args.truth is not None:
        x = io.read_vector_csv(args.truth)
        basis = compute_sf_gft(m, s)
        report = reconstruction_report(basis, x)
        io.write_json(
            out / "report.json",
            {
                "err": float(np.sum((x_tilde[s.complement] - x[s.complement]) ** 2))
                / float(np.sum(x**2)),
                "snr_db": report.snr_db,
                "band_energies": {
                    "high": report.band_energies[0],
                    "mid": report.band_energies[1],
                },
                "err_q_norm_sq": report.err_q_norm_sq,
                "method": method,
            },
        )
        written.append("report.json")
    print(f"wrote {', '.join(written)} to {out}")
    return 0


def _cmd_verify(args) -> int:
    m = io.read_variation_operator(args.matrix, args.ridge)
    s = io.read_sampling_set(args.sampling_set, m.n)
    report = verification_report(
        m, s, trials=args.trials, seed=args.seed, mc_samples=args.mc_samples
    )
    if args.out is not None:
        io.write_json(args.out, report)
        print(f"wrote report -> {args.out}")
    else:
        import json

        print(json.dumps(io.sanitize_json(report), indent=2, sort_keys=True))
    print("verification:", "PASS" if report["pass"] else "FAIL")
    return 0 if report["pass"] else 1


def _cmd_experiment(args) -> int:
    data = io.read_json(args.config)
    if not isinstance(data, dict):
        raise ValidationError(f"{args.config}: config must be a JSON object")
    config = ExperimentConfig.from_dict(data)
    artifacts = run_table1(config, threads=resolve_threads(args.threads))
    written = io.write_experiment_artifacts(artifacts, args.out_dir)
    print(f"wrote {len(written)} artifacts to {args.out_dir}")
    return 0


_DISPATCH = {
    "gft": _cmd_gft,
    "select": _cmd_select,
    "partition": _cmd_partition,
    "reconstruct": _cmd_reconstruct,
    "verify": _cmd_verify,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SingularBlock as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        if getattr(args, "ridge", None) is None:
            print(
                "hint: retry with --ridge to regularize a semi-definite operator",
                file=sys.stderr,
            )
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
