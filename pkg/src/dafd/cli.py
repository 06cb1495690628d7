"""Command-line front end.

Subcommands: experiment, decompose, nbest, verify, analyze.  All numeric
output is plot-ready CSV or JSON; nothing is rendered.  Exit codes:
0 ok, 1 usage or bad input, 2 numerical-contract violation, 3 I/O error.
The environment variable DAFD_THREADS caps parallel grid evaluation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, storage
from .engine import EngineConfig, decompose, partial_sum, validate_mode
from .errors import ContractError, DimensionError, DomainError, SchemaError
from .experiments import example1_samples, example_signal
from .nbest import optimize
from .signals import BoundarySignal, grid_t, project_real, reconstruct_real

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONTRACT = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


@dataclass
class ExperimentSpec:
    """Reproduction run: which source, how many terms, where to write."""

    name: str
    n_samples: int = 4096
    modes: tuple = ("core", "double")
    n_max: int = 10
    seed: int = 0
    out_dir: Path = Path(".")
    input_path: Path | None = None
    r_max: float = 0.995
    residual_tol: float = 1e-8


def _config(args, n_samples=None) -> EngineConfig:
    return EngineConfig(
        n_samples=n_samples or args.n_samples,
        r_max=args.r_max,
        max_terms=args.max_terms,
        residual_tol=args.tol,
    )


def _load_real_csv(path) -> np.ndarray:
    try:
        values = storage.read_signal_csv(path)
    except ContractError as exc:
        raise _UsageError(str(exc))
    if values.size < 64:
        raise _UsageError(f"need at least 64 samples, got {values.size}")
    return values


def _load_source(args):
    """Signal plus descriptor from either --name or an input CSV path."""
    name = getattr(args, "name", None)
    if name and name != "custom":
        f, descriptor = example_signal(name, args.n_samples)
        if name == "ex1":
            real = example1_samples(args.n_samples)
            return f, descriptor, real
        return f, descriptor, None
    path = getattr(args, "input", None)
    if path is None:
        raise _UsageError("an input CSV or --name ex1/ex2 is required")
    real = _load_real_csv(path)
    fplus, c0 = project_real(real)
    descriptor = {"kind": "csv", "path": str(path), "c0": c0, "n_samples": real.size}
    return fplus, descriptor, real


def _print_trace(d):
    errors = d.relative_errors()
    print("n,abs_a,residual_energy,relative_l2_error")
    for k, term in enumerate(d.terms):
        print(
            f"{k + 1},{storage.fmt(abs(term.a))},"
            f"{storage.fmt(term.residual_energy_after)},{storage.fmt(errors[k])}"
        )


def cmd_experiment(spec: ExperimentSpec) -> list:
    """Run a named reproduction and write its tables and decompositions."""
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if spec.name == "custom":
        if spec.input_path is None:
            raise _UsageError("experiment --name custom requires --input")
        real = _load_real_csv(spec.input_path)
        f, c0 = project_real(real)
        descriptor = {
            "kind": "csv",
            "path": str(spec.input_path),
            "c0": c0,
            "n_samples": real.size,
        }
        n_samples = real.size
    else:
        f, descriptor = example_signal(spec.name, spec.n_samples)
        n_samples = spec.n_samples
        real = example1_samples(spec.n_samples) if spec.name == "ex1" else None

    t = grid_t(n_samples)
    if real is not None:
        path = out / "input.csv"
        storage.write_csv(path, ["t", "value"], zip(t, real))
        written.append(path)

    config = EngineConfig(
        n_samples=n_samples,
        r_max=spec.r_max,
        max_terms=spec.n_max,
        residual_tol=spec.residual_tol,
    )
    decay_rows = []
    summary = [
        f"experiment: {spec.name}",
        f"n_samples: {n_samples}",
        f"modes: {','.join(spec.modes)}",
        f"n_max: {spec.n_max}",
        f"seed: {spec.seed}",
        f"source: {json.dumps(descriptor, sort_keys=True)}",
    ]
    for mode in spec.modes:
        d = decompose(f, mode, config)
        errors = d.relative_errors()
        for k in range(len(d.terms)):
            decay_rows.append((k + 1, mode, float(errors[k])))

        path = out / f"parameters_{mode.replace(':', '')}.csv"
        storage.write_csv(
            path,
            ["k", "re_a", "im_a"],
            [(k + 1, a.real, a.imag) for k, a in enumerate(d.parameters)],
        )
        written.append(path)

        for k in range(1, len(d.terms) + 1):
            s_k = partial_sum(d, k)
            path = out / f"residual_{mode.replace(':', '')}_n{k:02d}.csv"
            if real is not None:
                c0 = descriptor.get("c0", 0.0)
                residual = real - reconstruct_real(s_k, c0)
                storage.write_csv(path, ["t", "residual"], zip(t, residual))
            else:
                residual = f.samples - s_k.samples
                storage.write_csv(
                    path,
                    ["t", "re_residual", "im_residual"],
                    zip(t, residual.real, residual.imag),
                )
            written.append(path)

        path = out / f"decomposition_{mode.replace(':', '')}.json"
        storage.save_decomposition(path, d, descriptor)
        written.append(path)

        defect = analysis.energy_identity_check(f, d)
        summary.append(
            f"{mode}: terms={len(d.terms)} final_relative_error="
            f"{storage.fmt(errors[-1]) if len(d.terms) else 'n/a'} "
            f"energy_defect={storage.fmt(defect)}"
        )

    path = out / "error_decay.csv"
    storage.write_csv(path, ["n", "mode", "relative_l2_error"], decay_rows)
    written.append(path)

    path = out / "summary.txt"
    path.write_text("\n".join(summary) + "\n")
    written.append(path)
    return written


def cmd_decompose(args) -> int:
    real = _load_real_csv(args.input)
    fplus, c0 = project_real(real)
    config = _config(args, n_samples=real.size)
    d = decompose(fplus, args.mode, config)
    descriptor = {
        "kind": "csv",
        "path": str(args.input),
        "c0": c0,
        "n_samples": real.size,
    }
    if args.out:
        storage.save_decomposition(args.out, d, descriptor)
    _print_trace(d)
    return EXIT_OK


def cmd_nbest(args) -> int:
    f, descriptor, _ = _load_source(args)
    config = _config(args, n_samples=f.n_samples)
    basis = "tm" if args.mode == "core" else "dtm"
    result = optimize(f, args.n_terms, basis, config, seed=args.seed)
    payload = {
        "basis": basis,
        "n_terms": args.n_terms,
        "source": descriptor,
        "params": [[a.real, a.imag] for a in result.params],
        "coefficients": [[c.real, c.imag] for c in result.coefficients],
        "residual_energy": result.residual_energy,
        "starts_used": result.starts_used,
        "best_start_origin": result.best_start_origin,
        "diagnostics": result.diagnostics,
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    d, stored_source = storage.load_decomposition(args.file)
    args.n_samples = d.config.n_samples
    f, _, real = _load_source(args)
    if f.n_samples != d.config.n_samples:
        print(
            f"contract violation: input has {f.n_samples} samples, "
            f"file expects {d.config.n_samples}"
        )
        return EXIT_CONTRACT
    failures = []

    energies = d.residual_energies
    if np.any(np.diff(energies) > 1e-12 * max(d.source_norm2, 1.0)):
        failures.append("residual trace is not non-increasing")

    defect = analysis.energy_identity_check(f, d)
    allowance = 1e-8 + sum(t.leakage for t in d.terms) / max(f.energy(), 1e-300)
    status = "ok" if defect <= allowance else "FAIL"
    print(f"energy identity defect: {storage.fmt(defect)} (allowed {storage.fmt(allowance)}) {status}")
    if defect > allowance:
        failures.append("energy identity")

    if d.mode == "double" and d.terms:
        report = analysis.verify_interpolation(f, d, len(d.terms))
        nrm = f.norm()
        value_ok = report.max_value_error <= 1e-7 * nrm
        deriv_ok = report.max_derivative_error <= 1e-5 * nrm
        print(
            f"interpolation: max value error {storage.fmt(report.max_value_error)} "
            f"{'ok' if value_ok else 'FAIL'}, max derivative error "
            f"{storage.fmt(report.max_derivative_error)} {'ok' if deriv_ok else 'FAIL'}"
        )
        if not (value_ok and deriv_ok):
            failures.append("interpolation")

    if real is not None and d.mode == "double" and d.terms:
        n = len(d.terms)
        count = analysis.zero_crossing_count(real, d, n)
        ok = count >= 4 * n
        print(f"zero crossings at n={n}: {count} (needs >= {4 * n}) {'ok' if ok else 'FAIL'}")
        if not ok:
            failures.append("zero crossings")

    if failures:
        print("verification FAILED: " + "; ".join(failures))
        return EXIT_CONTRACT
    print("verification passed")
    return EXIT_OK


def cmd_analyze(args) -> int:
    f, descriptor, real = _load_source(args)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    config = _config(args, n_samples=f.n_samples)
    modes = [validate_mode(m) for m in args.modes.split(",")]
    rows = analysis.error_decay_table(f, modes, args.n_max, config)
    table = [(r.n, r.mode, r.relative_l2_error) for r in rows]
    if out:
        storage.write_csv(out / "error_decay.csv", ["n", "mode", "relative_l2_error"], table)
    else:
        print("n,mode,relative_l2_error")
        for n, mode, err in table:
            print(f"{n},{mode},{storage.fmt(err)}")

    report_lines = [f"source: {json.dumps(descriptor, sort_keys=True)}"]
    for mode in modes:
        cfg = dataclasses.replace(config, max_terms=args.n_max)
        d = decompose(f, mode, cfg)
        defect = analysis.energy_identity_check(f, d)
        report_lines.append(f"{mode}: energy_defect={storage.fmt(defect)}")
        if d.terms:
            rep = analysis.verify_interpolation(f, d, len(d.terms))
            report_lines.append(
                f"{mode}: max_value_error={storage.fmt(rep.max_value_error)} "
                f"max_derivative_error={storage.fmt(rep.max_derivative_error)}"
            )
        if real is not None and mode == "double":
            zc_rows = []
            for n in range(1, len(d.terms) + 1):
                zc_rows.append((n, analysis.zero_crossing_count(real, d, n), 4 * n))
            if out:
                storage.write_csv(
                    out / "zero_crossings.csv", ["n", "count", "lower_bound"], zc_rows
                )
            report_lines.extend(
                f"zero crossings n={n}: {c} (bound {b})" for n, c, b in zc_rows
            )
    report = "\n".join(report_lines)
    if out:
        (out / "report.txt").write_text(report + "\n")
    else:
        print(report)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--n-samples", type=int, default=4096, help="boundary grid size")
    p.add_argument("--r-max", type=float, default=0.995, help="parameter search radius")
    p.add_argument("--max-terms", type=int, default=50, help="term cap")
    p.add_argument(
        "--mode",
        default="double",
        help="core, double, mono, or ho:<k>",
    )
    p.add_argument("--tol", type=float, default=1e-8, help="relative residual stop")
    p.add_argument("--seed", type=int, default=0, help="seed for random starts")
    p.add_argument("--out", default=None, help="output file or directory")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="dafd",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run a built-in reproduction")
    p.add_argument("--name", choices=("ex1", "ex2", "custom"), required=True)
    p.add_argument("--input", default=None, help="CSV input for --name custom")
    p.add_argument("--modes", default="core,double", help="comma-separated modes")
    p.add_argument("--n-max", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("decompose", help="decompose a CSV signal")
    p.add_argument("input", help="CSV of (t, value) or a single value column")
    _add_common(p)

    p = sub.add_parser("nbest", help="best n-term parameter search")
    p.add_argument("input", nargs="?", default=None, help="CSV input")
    p.add_argument("--name", choices=("ex1", "ex2"), default=None)
    p.add_argument("--n-terms", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("verify", help="check a stored decomposition against its input")
    p.add_argument("file", help="decomposition JSON")
    p.add_argument("--input", default=None, help="CSV input")
    p.add_argument("--name", choices=("ex1", "ex2"), default=None)
    _add_common(p)

    p = sub.add_parser("analyze", help="error decay and verification tables")
    p.add_argument("input", nargs="?", default=None, help="CSV input")
    p.add_argument("--name", choices=("ex1", "ex2"), default=None)
    p.add_argument("--modes", default="core,double")
    p.add_argument("--n-max", type=int, default=8)
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "experiment":
            mode_list = tuple(validate_mode(m) for m in args.modes.split(","))
            spec = ExperimentSpec(
                name=args.name,
                n_samples=args.n_samples,
                modes=mode_list,
                n_max=args.n_max,
                seed=args.seed,
                out_dir=Path(args.out or "."),
                input_path=Path(args.input) if args.input else None,
                r_max=args.r_max,
                residual_tol=args.tol,
            )
            written = cmd_experiment(spec)
            for path in written:
                print(path)
            return EXIT_OK
        if args.command == "decompose":
            validate_mode(args.mode)
            return cmd_decompose(args)
        if args.command == "nbest":
            if args.mode not in ("core", "double"):
                raise _UsageError("nbest supports --mode core or double")
            return cmd_nbest(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ContractError, DomainError, DimensionError) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
